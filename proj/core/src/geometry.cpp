#include "linfty/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace linfty {

const char* const kLocusScope =
    "classical-locus bijection certified only on the supplied candidate points";
const char* const kFibrationScope =
    "submersion and surjectivity checked only at the sample points unless certified globally";

// ---- cochain complexes ----

int CochainComplex::dim(int k) const {
    auto it = dims.find(k);
    return it == dims.end() ? 0 : it->second;
}

Matrix CochainComplex::diff(int k) const {
    auto it = d.find(k);
    if (it != d.end()) return it->second;
    return Matrix(dim(k + 1), dim(k));
}

int CochainComplex::lo() const { return dims.empty() ? 0 : dims.begin()->first; }
int CochainComplex::hi() const { return dims.empty() ? -1 : dims.rbegin()->first; }

int rank_with_tol(const Matrix& m, double tol) {
    if (tol <= 0) return rank(m);
    std::vector<std::vector<double>> a(m.rows, std::vector<double>(m.cols));
    double scale = 1;
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) {
            a[i][j] = m(i, j).get_d();
            scale = std::max(scale, std::fabs(a[i][j]));
        }
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int piv = r;
        for (int i = r + 1; i < m.rows; ++i)
            if (std::fabs(a[i][c]) > std::fabs(a[piv][c])) piv = i;
        if (std::fabs(a[piv][c]) <= tol * scale) continue;
        std::swap(a[piv], a[r]);
        for (int i = r + 1; i < m.rows; ++i) {
            double f = a[i][c] / a[r][c];
            for (int j = c; j < m.cols; ++j) a[i][j] -= f * a[r][j];
        }
        ++r;
    }
    return r;
}

static bool near_zero(const Matrix& m, double tol) {
    if (tol <= 0) return m.is_zero();
    for (auto& x : m.a)
        if (std::fabs(x.get_d()) > tol) return false;
    return true;
}

std::string CochainComplex::check() const {
    for (auto& [k, m] : d)
        if (m.rows != dim(k + 1) || m.cols != dim(k)) return "differential d^" + std::to_string(k) + " has the wrong shape";
    for (int k = lo(); k < hi(); ++k) {
        Matrix dd = diff(k + 1) * diff(k);
        if (!near_zero(dd, tol)) return "d^" + std::to_string(k + 1) + " d^" + std::to_string(k) + " != 0";
    }
    return "";
}

std::map<int, int> CochainComplex::betti() const {
    std::map<int, int> b;
    for (int k = lo(); k <= hi(); ++k) b[k] = dim(k) - rank_with_tol(diff(k), tol) - rank_with_tol(diff(k - 1), tol);
    return b;
}

int CochainComplex::euler() const {
    int e = 0;
    for (auto& [k, n] : dims) e += (k % 2 == 0 ? 1 : -1) * n;
    return e;
}

Matrix CochainMap::at(int k, int rows, int cols) const {
    auto it = f.find(k);
    if (it != f.end()) return it->second;
    return Matrix(rows, cols);
}

std::string check_chain_map(const CochainComplex& A, const CochainComplex& B, const CochainMap& f) {
    int lo = std::min(A.lo(), B.lo()), hi = std::max(A.hi(), B.hi());
    double tol = std::max(A.tol, B.tol);
    for (int k = lo; k <= hi; ++k) {
        Matrix fk = f.at(k, B.dim(k), A.dim(k));
        if (fk.rows != B.dim(k) || fk.cols != A.dim(k)) return "f^" + std::to_string(k) + " has the wrong shape";
        Matrix lhs = B.diff(k) * fk;
        Matrix rhs = f.at(k + 1, B.dim(k + 1), A.dim(k + 1)) * A.diff(k);
        if (!near_zero(lhs - rhs, tol)) return "d f != f d in degree " + std::to_string(k);
    }
    return "";
}

CochainComplex mapping_cone(const CochainComplex& A, const CochainComplex& B, const CochainMap& f) {
    CochainComplex C;
    C.tol = std::max(A.tol, B.tol);
    int lo = std::min(A.lo() - 1, B.lo()), hi = std::max(A.hi() - 1, B.hi());
    for (int k = lo; k <= hi; ++k) C.dims[k] = A.dim(k + 1) + B.dim(k);
    for (int k = lo; k < hi; ++k) {
        int a0 = A.dim(k + 1), b0 = B.dim(k), a1 = A.dim(k + 2), b1 = B.dim(k + 1);
        Matrix m(a1 + b1, a0 + b0);
        Matrix dA = A.diff(k + 1), dB = B.diff(k), fk = f.at(k + 1, b1, a0);
        for (int i = 0; i < a1; ++i)
            for (int j = 0; j < a0; ++j) m(i, j) = -dA(i, j);
        for (int i = 0; i < b1; ++i) {
            for (int j = 0; j < a0; ++j) m(a1 + i, j) = fk(i, j);
            for (int j = 0; j < b0; ++j) m(a1 + i, a0 + j) = dB(i, j);
        }
        C.d[k] = m;
    }
    return C;
}

bool is_acyclic(const CochainComplex& c) {
    for (auto& [k, b] : c.betti())
        if (b != 0) return false;
    return true;
}

// ---- classical points ----

std::vector<double> ClassicalPoint::approx() const {
    std::vector<double> r;
    for (auto& q : coords) r.push_back(q.get_d());
    return r;
}

std::string ClassicalPoint::str() const {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < coords.size(); ++i) {
        if (i) os << ", ";
        if (exact)
            os << q_to_string(coords[i]);
        else
            os << coords[i].get_d();
    }
    os << ")";
    return os.str();
}

std::vector<Q> curvature_at(const LinftyBundle& b, const std::vector<Q>& P) {
    if ((int)P.size() != b.base.dim()) throw std::invalid_argument("point has the wrong number of coordinates");
    std::vector<Q> r(b.fiber.dim());
    for (auto& [i, c] : b.lambda.eval_basis({})) r[i] = c.evaluate(P);
    return r;
}

ClassicalPoint classical_point(const LinftyBundle& b, const std::vector<Q>& P, double tol) {
    auto v = curvature_at(b, P);
    ClassicalPoint cp;
    cp.coords = P;
    bool zero = true;
    for (auto& x : v) {
        if (x != 0) zero = false;
        cp.residual = std::max(cp.residual, std::fabs(x.get_d()));
    }
    if (zero) return cp;
    if (tol > 0 && cp.residual <= tol) {
        cp.exact = false;
        cp.tol = std::max(tol, 1e-9);
        return cp;
    }
    std::ostringstream os;
    os << "not a classical point: max |lambda_0(P)| = " << cp.residual;
    throw MathError(os.str());
}

PMatrix jacobian(const std::vector<Poly>& f, int nvars) {
    PMatrix J((int)f.size(), nvars);
    for (size_t i = 0; i < f.size(); ++i)
        for (int j = 0; j < nvars; ++j) J((int)i, j) = f[i].derivative(j);
    return J;
}

Matrix curvature_derivative(const LinftyBundle& b, const ClassicalPoint& P) {
    auto b1 = b.fiber.basis_of_degree(1);
    Vec l0 = b.lambda.eval_basis({});
    std::vector<Poly> comps;
    for (int i : b1) {
        auto it = l0.find(i);
        comps.push_back(it == l0.end() ? Poly() : it->second);
    }
    return jacobian(comps, b.base.dim()).at(P.coords);
}

CochainComplex tangent_complex(const LinftyBundle& b, const ClassicalPoint& P) {
    CochainComplex c;
    c.tol = P.exact ? 0 : P.tol;
    c.dims[0] = b.base.dim();
    const int amp = b.amplitude();
    for (int i = 1; i <= amp; ++i) c.dims[i] = (int)b.fiber.basis_of_degree(i).size();
    c.d[0] = curvature_derivative(b, P);
    Family l1 = b.lambda.arity(1);
    for (int i = 1; i < amp; ++i) c.d[i] = block(l1, i, i + 1).at(P.coords);
    std::string err = c.check();
    if (!err.empty()) throw MathError("tangent complex: " + err);
    return c;
}

CochainMap tangent_map(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor, const ClassicalPoint& P) {
    CochainMap f;
    f.f[0] = jacobian(mor.base_map, src.base.dim()).at(P.coords);
    Family p1 = mor.phi.arity(1);
    const int amp = std::max(src.amplitude(), dst.amplitude());
    for (int i = 1; i <= amp; ++i) f.f[i] = block(p1, i, i).at(P.coords);
    return f;
}

int virtual_dimension(const LinftyBundle& b) {
    int v = b.base.dim();
    for (auto& [d, n] : b.fiber.dims()) v += (d % 2 == 0 ? 1 : -1) * n;
    return v;
}

static std::vector<Q> apply_base_map(const Morphism& mor, const std::vector<Q>& P) {
    std::vector<Q> r;
    for (auto& p : mor.base_map) r.push_back(p.evaluate(P));
    return r;
}

EtaleReport is_etale_at(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor, const ClassicalPoint& P,
                        double tol) {
    EtaleReport r;
    r.point = P;
    r.image = classical_point(dst, apply_base_map(mor, P.coords), P.exact ? tol : std::max(tol, P.tol));
    CochainComplex A = tangent_complex(src, P);
    CochainComplex B = tangent_complex(dst, r.image);
    CochainMap f = tangent_map(src, dst, mor, P);
    r.src_betti = A.betti();
    r.dst_betti = B.betti();
    std::string err = check_chain_map(A, B, f);
    if (!err.empty()) {
        r.ok = false;
        r.detail = "tangent map is not a cochain map: " + err;
        return r;
    }
    CochainComplex C = mapping_cone(A, B, f);
    r.cone_betti = C.betti();
    r.ok = is_acyclic(C);
    if (!r.ok)
        for (auto& [k, b] : r.cone_betti)
            if (b) {
                r.detail = "mapping cone has cohomology in degree " + std::to_string(k);
                break;
            }
    return r;
}

static bool same_point(const std::vector<Q>& a, const std::vector<Q>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (tol <= 0) {
            if (a[i] != b[i]) return false;
        } else if (std::fabs(Q(a[i] - b[i]).get_d()) > tol) {
            return false;
        }
    }
    return true;
}

WeakEquivalenceReport is_weak_equivalence(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor,
                                          const std::vector<std::vector<Q>>& src_points,
                                          const std::vector<std::vector<Q>>& dst_points, double tol) {
    WeakEquivalenceReport r;
    std::vector<ClassicalPoint> sp, dp;
    for (auto& P : src_points) sp.push_back(classical_point(src, P, tol));
    for (auto& P : dst_points) dp.push_back(classical_point(dst, P, tol));
    std::vector<int> hits(dp.size(), 0);
    for (size_t i = 0; i < sp.size(); ++i) {
        EtaleReport e = is_etale_at(src, dst, mor, sp[i], tol);
        if (!e.ok) {
            r.etale_ok = false;
            r.notes.push_back("not etale at " + sp[i].str() + ": " + e.detail);
        }
        int m = -1;
        for (size_t j = 0; j < dp.size(); ++j)
            if (same_point(e.image.coords, dp[j].coords, tol)) {
                m = (int)j;
                break;
            }
        if (m < 0) {
            r.locus_ok = false;
            r.notes.push_back("image of " + sp[i].str() + " is not among the target candidates");
        } else if (hits[m]++) {
            r.locus_ok = false;
            r.notes.push_back("two source points map to " + dp[m].str());
        }
        r.matched.push_back(m);
        r.points.push_back(std::move(e));
    }
    for (size_t j = 0; j < dp.size(); ++j)
        if (!hits[j]) {
            r.locus_ok = false;
            r.notes.push_back("target point " + dp[j].str() + " has no preimage among the source candidates");
        }
    r.ok = r.locus_ok && r.etale_ok;
    return r;
}

FibrationReport is_fibration(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor,
                             const std::vector<std::vector<Q>>& samples_in) {
    FibrationReport r;
    const int m = src.base.dim(), n = dst.base.dim();
    auto samples = samples_in;
    if (samples.empty()) {
        samples.push_back(std::vector<Q>(m));
        r.notes.push_back("no sample points given; using the origin");
    }
    auto aff = as_affine(mor.base_map, m);
    if (aff) {
        r.submersion_ok = rank(aff->A) == n;
        r.notes.push_back(r.submersion_ok ? "affine base map of full rank: submersion everywhere"
                                          : "affine base map is not surjective");
    } else {
        PMatrix J = jacobian(mor.base_map, m);
        for (auto& P : samples)
            if (rank(J.at(P)) < n) {
                r.submersion_ok = false;
                std::ostringstream os;
                os << "Jacobian of the base map has rank < " << n << " at " << ClassicalPoint{P}.str();
                r.notes.push_back(os.str());
            }
    }
    Family p1 = mor.phi.arity(1);
    auto sd = src.fiber.dims();
    for (auto& [d, k] : dst.fiber.dims()) {
        if (!sd.count(d)) {
            r.surjective_ok = false;
            r.notes.push_back("phi_1 cannot be surjective in degree " + std::to_string(d));
            continue;
        }
        PMatrix A = block(p1, d, d);
        if (unimodular_column_reduction(A)) continue;
        bool deficient = false;
        for (auto& P : samples)
            if (rank(A.at(P)) < k) deficient = true;
        if (deficient) {
            r.surjective_ok = false;
            r.notes.push_back("phi_1 is not surjective in degree " + std::to_string(d) + " at a sample point");
        } else {
            r.rank_certified = false;
            r.notes.push_back("phi_1 in degree " + std::to_string(d) +
                              " has no constant-rank certificate; rejected");
        }
    }
    r.ok = r.submersion_ok && r.surjective_ok && r.rank_certified;
    return r;
}

// ---- shifted tangent bundle ----

ShiftedTangent shifted_tangent(const LinftyBundle& b) {
    const GradedSpace& L = b.fiber;
    const int m = b.base.dim();
    GradedSpace T;
    ShiftedTangent st;
    st.tm_offset = 0;
    for (auto& c : b.base.coords) T.add(1, "d" + c + ".dt");
    st.ldt_offset = T.dim();
    for (int i = 0; i < L.dim(); ++i) T.add(L.deg[i] + 1, L.label[i] + ".dt");
    st.l_offset = T.dim();
    for (int i = 0; i < L.dim(); ++i) T.add(L.deg[i], L.label[i]);
    st.bundle = LinftyBundle(b.base, T);
    Family& mu = st.bundle.lambda;
    auto shift = [](const Vec& v, int off) {
        Vec r;
        for (auto& [i, c] : v) r.emplace(i + off, c);
        return r;
    };
    for (int k = 0; k <= b.lambda.max_arity(); ++k)
        for (auto& [key, val] : b.lambda.part(k)) {
            Key x;
            for (int i : key) x.push_back(i + st.l_offset);
            mu.add(x, shift(val, st.l_offset));
            // one input moved to L dt, placed last
            std::set<int> seen;
            for (size_t pos = 0; pos < key.size(); ++pos) {
                if (!seen.insert(key[pos]).second) continue;
                Key rest, order;
                for (size_t q = 0; q < key.size(); ++q)
                    if (q != pos) rest.push_back(key[q]);
                order = rest;
                order.push_back(key[pos]);
                Vec v = b.lambda.eval_basis(order);
                Key nk;
                for (int i : rest) nk.push_back(i + st.l_offset);
                nk.push_back(key[pos] + st.ldt_offset);
                mu.add(nk, shift(v, st.ldt_offset));
            }
            // covariant derivative along a tangent input, placed last
            for (int c = 0; c < m; ++c) {
                Vec dv;
                for (auto& [j, p] : val) {
                    Poly d = p.derivative(c);
                    if (!d.is_zero()) dv.emplace(j + st.ldt_offset, d);
                }
                if (dv.empty()) continue;
                Key nk = x;
                nk.push_back(st.tm_offset + c);
                mu.add(nk, dv);
            }
        }
    return st;
}

// ---- pullbacks ----

namespace {

// Right inverse of a surjective constant matrix.
Matrix right_inverse(const Matrix& A) {
    Matrix R(A.cols, A.rows);
    for (int j = 0; j < A.rows; ++j) {
        std::vector<Q> e(A.rows);
        e[j] = 1;
        auto x = solve(A, e);
        if (!x) throw MathError("affine base map is not surjective");
        for (int i = 0; i < A.cols; ++i) R(i, j) = (*x)[i];
    }
    return R;
}

// x = R (target - b) + N s, with the target given as polynomials.
std::vector<Poly> graph_param(const AffineMap& a, const std::vector<Poly>& target, const std::vector<int>& s_vars) {
    Matrix R = right_inverse(a.A);
    Matrix N = nullspace(a.A);
    std::vector<Poly> x(a.A.cols);
    for (int i = 0; i < a.A.cols; ++i) {
        for (int j = 0; j < a.A.rows; ++j)
            if (R(i, j) != 0) x[i] += Poly(R(i, j)) * (target[j] - Poly(a.b[j]));
        for (int s = 0; s < N.cols; ++s)
            if (N(i, s) != 0) x[i] += Poly(N(i, s)) * Poly::var(s_vars[s]);
    }
    return x;
}

std::vector<Poly> shifted_vars(int n, int off) {
    std::vector<Poly> r;
    for (int i = 0; i < n; ++i) r.push_back(Poly::var(off + i));
    return r;
}

}  // namespace

PullbackResult pullback_fibration(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& p,
                                  const LinftyBundle& other, const Morphism& g) {
    const int m = src.base.dim(), n = dst.base.dim(), mo = other.base.dim();
    if ((int)p.base_map.size() != n || (int)g.base_map.size() != n)
        throw std::invalid_argument("pullback_fibration: base maps do not land in the same base");
    if (p.phi.tgt != dst.fiber || g.phi.tgt != dst.fiber)
        throw std::invalid_argument("pullback_fibration: fiber mismatch");

    Linearization lin = linearize_fibration(src, dst, p);
    const GradedSpace& Lm = lin.middle.fiber;

    // Base M x_N M' as a graph.
    PullbackResult out;
    Base base;
    std::vector<Poly> x_of, xo_of;
    auto pa = as_affine(p.base_map, m);
    auto ga = as_affine(g.base_map, mo);
    if (pa && rank(pa->A) == n) {
        int ns = m - n;
        for (int i = 0; i < ns; ++i) base.coords.push_back("s" + std::to_string(i + 1));
        std::set<std::string> used(base.coords.begin(), base.coords.end());
        for (auto& c : other.base.coords) base.coords.push_back(used.count(c) ? c + "'" : c);
        xo_of = shifted_vars(mo, ns);
        std::vector<Poly> gx;
        for (auto& q : g.base_map) gx.push_back(q.compose(xo_of));
        std::vector<int> svars;
        for (int i = 0; i < ns; ++i) svars.push_back(i);
        x_of = graph_param(*pa, gx, svars);
        out.base_description = "graph over the second factor (fibration base map affine)";
    } else if (ga && rank(ga->A) == n) {
        int ns = mo - n;
        base.coords = src.base.coords;
        std::set<std::string> used(base.coords.begin(), base.coords.end());
        for (int i = 0; i < ns; ++i) {
            std::string c = "s" + std::to_string(i + 1);
            base.coords.push_back(used.count(c) ? c + "'" : c);
        }
        x_of = shifted_vars(m, 0);
        std::vector<int> svars;
        for (int i = 0; i < ns; ++i) svars.push_back(m + i);
        xo_of = graph_param(*ga, p.base_map, svars);
        out.base_description = "graph over the first factor (second base map affine)";
    } else {
        throw MathError("base fibered product not representable: neither base map is affine and surjective");
    }
    for (int i = 0; i < n; ++i)
        if (p.base_map[i].compose(x_of) != g.base_map[i].compose(xo_of))
            throw MathError("base parametrisation does not close the square");

    // Fiber K + L'.
    GradedSpace F;
    std::vector<int> k_new(Lm.dim(), -1);
    for (int i : lin.kernel_index) k_new[i] = F.add(Lm.deg[i], Lm.label[i]);
    const int lo_off = F.dim();
    for (int i = 0; i < other.fiber.dim(); ++i) F.add(other.fiber.deg[i], other.fiber.label[i]);

    // lift of the target basis inside the middle fiber
    std::vector<int> lift_of(dst.fiber.dim(), -1);
    for (int i : lin.lift_index)
        for (auto& [e, c] : lin.linear.phi.eval_basis({i})) lift_of[e] = i;
    Family phi_o = compose_coeffs(g.phi, xo_of);
    Family Phi(F, Lm, 0);
    for (int i : lin.kernel_index) Phi.set({k_new[i]}, unit_vec(i));
    for (int k = 1; k <= phi_o.max_arity(); ++k)
        for (auto& [key, v] : phi_o.part(k)) {
            Key nk;
            for (int j : key) nk.push_back(j + lo_off);
            Vec w;
            for (auto& [e, c] : v) w.emplace(lift_of[e], c);
            Phi.set(nk, w);
        }

    LinftyBundle P(base, F);
    Family lam_m = compose_coeffs(lin.middle.lambda, x_of);
    Family pulled = bullet(lam_m, Phi, SumMode::Auto, arity_bound(F, Lm, 1));
    for (int k = 0; k <= pulled.max_arity(); ++k)
        for (auto& [key, v] : pulled.part(k)) {
            Vec w;
            for (auto& [i, c] : v)
                if (k_new[i] >= 0) w.emplace(k_new[i], c);
            if (!w.empty()) P.lambda.set(key, w);
        }
    Family lam_o = compose_coeffs(other.lambda, xo_of);
    for (int k = 0; k <= lam_o.max_arity(); ++k)
        for (auto& [key, v] : lam_o.part(k)) {
            Key nk;
            for (int j : key) nk.push_back(j + lo_off);
            Vec w;
            for (auto& [i, c] : v) w.emplace(i + lo_off, c);
            P.lambda.add(nk, w);
        }
    out.bundle = P;

    out.to_other.base_map = xo_of;
    out.to_other.phi = linear_family(F, other.fiber, 0, [&](int i) { return i >= lo_off ? unit_vec(i - lo_off) : Vec{}; });
    Morphism to_middle{x_of, Phi};
    Morphism back = invert_iso(src, lin.middle, lin.iso);
    out.to_source = compose(back, to_middle);

    if (!check_mc(out.bundle).ok) throw MathError("pullback structure fails the MC equation");
    if (!check_morphism(out.bundle, src, out.to_source).ok) throw MathError("projection to the fibration source is not a morphism");
    if (!check_morphism(out.bundle, other, out.to_other).ok) throw MathError("projection to the second factor is not a morphism");
    return out;
}

// ---- locus search ----

namespace {

Q rationalize(double x, int max_den) {
    // continued fraction convergents
    double r = x;
    long h0 = 1, h1 = 0, k0 = 0, k1 = 1;
    Q best(0);
    for (int it = 0; it < 40; ++it) {
        double a = std::floor(r);
        if (std::fabs(a) > 1e12) break;
        long ai = (long)a;
        long h = ai * h0 + h1, k = ai * k0 + k1;
        if (k > max_den) break;
        best = Q(h, k);
        best.canonicalize();
        h1 = h0;
        h0 = h;
        k1 = k0;
        k0 = k;
        double frac = r - a;
        if (std::fabs(frac) < 1e-12) break;
        r = 1 / frac;
    }
    return best;
}

// Solves the small dense system A x = b (Gaussian elimination, partial pivoting).
std::vector<double> solve_small(std::vector<std::vector<double>> A, std::vector<double> b) {
    const int n = (int)b.size();
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int i = c + 1; i < n; ++i)
            if (std::fabs(A[i][c]) > std::fabs(A[piv][c])) piv = i;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        if (std::fabs(A[c][c]) < 1e-300) continue;
        for (int i = c + 1; i < n; ++i) {
            double f = A[i][c] / A[c][c];
            for (int j = c; j < n; ++j) A[i][j] -= f * A[c][j];
            b[i] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = std::fabs(A[i][i]) < 1e-300 ? 0 : s / A[i][i];
    }
    return x;
}

}  // namespace

std::vector<ClassicalPoint> find_classical_points(const LinftyBundle& b, const LocusSearch& o) {
    const int m = b.base.dim();
    if (m > 3) throw std::invalid_argument("locus search supports base dimension <= 3");
    std::vector<Poly> F;
    for (auto& [i, c] : b.lambda.eval_basis({})) F.push_back(c);
    std::vector<ClassicalPoint> found;
    if (m == 0) {
        if (F.empty()) found.push_back(ClassicalPoint{});
        return found;
    }
    PMatrix J = jacobian(F, m);
    auto evalF = [&](const std::vector<double>& x) {
        std::vector<double> r;
        for (auto& f : F) r.push_back(f.evaluate(x));
        return r;
    };
    auto norm = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) s = std::max(s, std::fabs(x));
        return s;
    };
    auto add_point = [&](const std::vector<double>& x) {
        for (auto& p : found) {
            auto a = p.approx();
            double d = 0;
            for (int i = 0; i < m; ++i) d = std::max(d, std::fabs(a[i] - x[i]));
            if (d < 1e-6) return;
        }
        std::vector<Q> rq;
        for (double v : x) rq.push_back(rationalize(v, o.max_denominator));
        bool exact = true;
        for (auto& v : curvature_at(b, rq))
            if (v != 0) exact = false;
        if (exact) {
            found.push_back(classical_point(b, rq));
            return;
        }
        std::vector<Q> xq;
        for (double v : x) xq.push_back(Q(v));
        found.push_back(classical_point(b, xq, o.tol));
    };

    const int g = std::max(o.grid, 1);
    int total = 1;
    for (int i = 0; i < m; ++i) total *= g;
    for (int idx = 0; idx < total; ++idx) {
        std::vector<double> x(m);
        int t = idx;
        for (int i = 0; i < m; ++i) {
            int c = t % g;
            t /= g;
            x[i] = g == 1 ? (o.lo + o.hi) / 2 : o.lo + (o.hi - o.lo) * c / (g - 1);
        }
        for (int it = 0; it < o.max_iter; ++it) {
            auto f = evalF(x);
            if (norm(f) <= o.tol * 1e-3) break;
            const int r = (int)F.size();
            std::vector<std::vector<double>> Jd(r, std::vector<double>(m));
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < m; ++j) Jd[i][j] = J(i, j).evaluate(x);
            // minimal-norm damped step: dx = J^T (J J^T + mu I)^-1 f
            std::vector<std::vector<double>> G(r, std::vector<double>(r));
            for (int i = 0; i < r; ++i)
                for (int k = 0; k < r; ++k) {
                    double s = 0;
                    for (int j = 0; j < m; ++j) s += Jd[i][j] * Jd[k][j];
                    G[i][k] = s + (i == k ? 1e-14 : 0);
                }
            auto y = solve_small(G, f);
            double step = 0;
            for (int j = 0; j < m; ++j) {
                double s = 0;
                for (int i = 0; i < r; ++i) s += Jd[i][j] * y[i];
                x[j] -= s;
                step = std::max(step, std::fabs(s));
            }
            if (!std::isfinite(step) || norm(x) > 1e6) break;
            if (step < 1e-15) break;
        }
        bool finite = true;
        for (double v : x) finite = finite && std::isfinite(v);
        if (!finite) continue;
        if (norm(evalF(x)) <= o.tol) add_point(x);
    }
    return found;
}

}  // namespace linfty
