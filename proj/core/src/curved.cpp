#include "linfty/curved.hpp"

#include <sstream>

namespace linfty {

CurvedAlgebra::CurvedAlgebra(GradedSpace s)
    : space(s), delta(s, s, 1), lambda(s, s, 1) {}

Family CurvedAlgebra::total() const {
    if (delta.is_zero()) return lambda;
    return delta + lambda;
}

Base Base::euclidean(int m, const std::string& prefix) {
    Base b;
    static const char* xyz[] = {"x", "y", "z"};
    for (int i = 0; i < m; ++i)
        b.coords.push_back(prefix == "x" && m <= 3 ? std::string(xyz[i]) : prefix + std::to_string(i + 1));
    return b;
}

LinftyBundle::LinftyBundle(Base b, GradedSpace f) : base(std::move(b)), fiber(f), lambda(f, f, 1) {}

std::string LinftyBundle::validate() const {
    for (int d : fiber.deg)
        if (d < 1) return "fiber degrees must be positive";
    if (lambda.src != fiber || lambda.tgt != fiber) return "operations do not act on the fiber";
    if (lambda.degree != 1) return "operations must have degree 1";
    if (auto e = lambda.validate(); !e.empty()) return e;
    const int n = amplitude();
    for (int k = std::max(n, 1); k <= lambda.max_arity(); ++k)
        if (lambda.has_arity(k)) return "operation of arity " + std::to_string(k) + " beyond the amplitude";
    for (int k = 0; k <= lambda.max_arity(); ++k)
        for (auto& [key, v] : lambda.part(k))
            for (auto& [i, c] : v)
                if (c.nvars() > base.dim()) return "coefficient uses an undeclared base coordinate";
    return {};
}

const ArityCheck* CheckReport::first_failure() const {
    for (auto& a : arities)
        if (!a.ok) return &a;
    return nullptr;
}

std::string CheckReport::describe(const GradedSpace& inputs, const GradedSpace& outputs,
                                  const std::vector<std::string>& coords) const {
    std::ostringstream os;
    for (auto& a : arities) {
        os << "  arity " << a.arity << ": " << (a.ok ? "pass" : "FAIL");
        if (!a.ok) {
            os << "  witness (";
            for (size_t i = 0; i < a.witness.size(); ++i)
                os << (i ? ", " : "") << inputs.label[a.witness[i]];
            os << ") -> " << vec_str(a.residual, outputs.label, coords);
        }
        os << "\n";
    }
    for (auto& n : notes) os << "  note: " << n << "\n";
    return os.str();
}

CheckReport vanishing_report(const Family& residual, int max_arity) {
    CheckReport r;
    for (int n = 0; n <= max_arity; ++n) {
        ArityCheck a;
        a.arity = n;
        const auto& part = residual.part(n);
        if (!part.empty()) {
            a.ok = false;
            a.witness = part.begin()->first;
            a.residual = part.begin()->second;
            r.ok = false;
        }
        r.arities.push_back(a);
    }
    for (int n = max_arity + 1; n <= residual.max_arity(); ++n)
        if (residual.has_arity(n)) {
            ArityCheck a;
            a.arity = n;
            a.ok = false;
            a.witness = residual.part(n).begin()->first;
            a.residual = residual.part(n).begin()->second;
            r.ok = false;
            r.arities.push_back(a);
        }
    return r;
}

CheckReport check_mc_total(const Family& total, SumMode mode) {
    int bound = arity_bound(total.src, total.tgt, 2);
    Family sq = circ(total, total, mode, bound);
    return vanishing_report(sq, bound);
}

CheckReport check_mc(const CurvedAlgebra& alg, SumMode mode) {
    CheckReport r = check_mc_total(alg.total(), mode);
    if (!alg.delta.is_zero()) {
        Family dd = circ(alg.delta, alg.delta, mode, 1);
        if (!dd.is_zero()) {
            r.ok = false;
            r.notes.push_back("delta does not square to zero");
        }
    }
    return r;
}

CheckReport check_mc(const LinftyBundle& b, SumMode mode) {
    if (auto e = b.validate(); !e.empty()) throw std::invalid_argument("bundle: " + e);
    return check_mc_total(b.lambda, mode);
}

std::string check_filtration(const CurvedAlgebra& alg) {
    auto raise = [&](const Family& f, int by, bool skip_zero) -> std::string {
        for (int k = skip_zero ? 1 : 0; k <= f.max_arity(); ++k)
            for (auto& [key, v] : f.part(k)) {
                int lv = by;
                for (int i : key) lv += alg.level(i);
                for (auto& [j, c] : v)
                    if (alg.level(j) < lv)
                        return "arity " + std::to_string(k) + " output " + alg.space.label[j] + " below level " +
                               std::to_string(lv);
            }
        return {};
    };
    if (auto e = raise(alg.delta, 0, false); !e.empty()) return "delta: " + e;
    if (auto e = raise(alg.lambda, 1, true); !e.empty()) return "lambda: " + e;
    return {};
}

CheckReport check_morphism(const CurvedAlgebra& src, const CurvedAlgebra& dst, const Family& phi, SumMode mode) {
    if (phi.src != src.space || phi.tgt != dst.space || phi.degree != 0)
        throw std::invalid_argument("check_morphism: space mismatch");
    if (phi.has_arity(0)) throw std::invalid_argument("check_morphism: morphisms have no arity-0 component");
    int bound = arity_bound(src.space, dst.space, 1);
    Family lhs = circ(phi, src.total(), mode, bound);
    Family rhs = bullet(dst.total(), phi, mode, bound);
    CheckReport r = vanishing_report(lhs - rhs, bound);
    r.notes.push_back("arity 0 compares phi_1(lambda_0) with the target curvature");
    return r;
}

CheckReport check_morphism(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor, SumMode mode) {
    if ((int)mor.base_map.size() != dst.base.dim()) throw std::invalid_argument("check_morphism: base map has wrong size");
    for (auto& p : mor.base_map)
        if (p.nvars() > src.base.dim()) throw std::invalid_argument("check_morphism: base map uses unknown coordinates");
    if (mor.phi.src != src.fiber || mor.phi.tgt != dst.fiber || mor.phi.degree != 0)
        throw std::invalid_argument("check_morphism: fiber mismatch");
    if (mor.phi.has_arity(0)) throw std::invalid_argument("check_morphism: morphisms have no arity-0 component");
    int bound = arity_bound(src.fiber, dst.fiber, 1);
    Family pulled = compose_coeffs(dst.lambda, mor.base_map);
    Family lhs = circ(mor.phi, src.lambda, mode, bound);
    Family rhs = bullet(pulled, mor.phi, mode, bound);
    CheckReport r = vanishing_report(lhs - rhs, bound);
    r.notes.push_back(r.arities.empty() || r.arities[0].ok
                          ? "phi_1(lambda_0) = lambda_0' o f, so f maps classical points to classical points"
                          : "phi_1(lambda_0) differs from lambda_0' o f");
    return r;
}

Morphism identity_morphism(const LinftyBundle& b) {
    Morphism m;
    for (int i = 0; i < b.base.dim(); ++i) m.base_map.push_back(Poly::var(i));
    m.phi = identity_family(b.fiber);
    return m;
}

Family compose_families(const Family& psi, const Family& phi) {
    int bound = arity_bound(phi.src, psi.tgt, 0);
    return bullet(psi, phi, SumMode::Auto, bound);
}

Morphism compose(const Morphism& g, const Morphism& f) {
    Morphism r;
    for (auto& p : g.base_map) r.base_map.push_back(p.compose(f.base_map));
    Family gp = compose_coeffs(g.phi, f.base_map);
    r.phi = compose_families(gp, f.phi);
    return r;
}

bool same_morphism(const Morphism& a, const Morphism& b) { return a.base_map == b.base_map && a.phi == b.phi; }

namespace {

struct LinearInverse {
    PMatrix inv;
    Family fam;  // tgt -> src
};

LinearInverse linear_inverse(const Family& phi) {
    if (phi.src.dims() != phi.tgt.dims()) throw MathError("phi_1 is not invertible: dimensions differ by degree");
    PMatrix m = full_matrix(phi.arity(1));
    auto inv = inverse_const_det(m);
    if (!inv) throw MathError("phi_1 is not invertible with constant determinant");
    return {*inv, family_from_matrix(phi.tgt, phi.src, 0, *inv)};
}

std::vector<Vec> preimages(const Family& inv1, const Key& y) {
    std::vector<Vec> xs;
    for (int j : y) xs.push_back(inv1.eval_basis({j}));
    return xs;
}

std::vector<int> degrees(const GradedSpace& s, const Key& y) {
    std::vector<int> d;
    for (int j : y) d.push_back(s.deg[j]);
    return d;
}

}  // namespace

Family transport_structure(const Family& D, const Family& phi) {
    if (phi.src != D.src) throw std::invalid_argument("transport_structure: space mismatch");
    LinearInverse li = linear_inverse(phi);
    const GradedSpace& Lp = phi.tgt;
    Family Dp(Lp, Lp, D.degree);
    int bound = arity_bound(Lp, Lp, D.degree);
    auto tdims = Lp.dims();
    for (int n = 0; n <= bound; ++n) {
        std::vector<std::pair<Key, Vec>> vals;
        for (const Key& y : sorted_tuples(Lp, n, Lp.max_degree() - D.degree)) {
            int d = D.degree;
            for (int j : y) d += Lp.deg[j];
            if (!tdims.count(d)) continue;
            auto xs = preimages(li.fam, y);
            auto degs = degrees(Lp, y);
            Vec lhs = circ_apply(evaluator(phi), evaluator(D), xs, degs);
            Vec rest = bullet_apply(evaluator(Dp), evaluator(phi), xs, degs);
            Vec v = lhs - rest;
            if (!v.empty()) vals.emplace_back(y, v);
        }
        for (auto& [y, v] : vals) Dp.set(y, v);
    }
    return Dp;
}

Family invert_family(const Family& phi) {
    if (phi.degree != 0) throw std::invalid_argument("invert_family: degree must be 0");
    LinearInverse li = linear_inverse(phi);
    const GradedSpace& E = phi.tgt;
    Family psi = li.fam;
    int bound = arity_bound(E, phi.src, 0);
    auto sdims = phi.src.dims();
    for (int n = 2; n <= bound; ++n) {
        std::vector<std::pair<Key, Vec>> vals;
        for (const Key& y : sorted_tuples(E, n, phi.src.max_degree())) {
            int d = 0;
            for (int j : y) d += E.deg[j];
            if (!sdims.count(d)) continue;
            Vec rest = bullet_apply(evaluator(psi), evaluator(phi), preimages(li.fam, y), degrees(E, y));
            if (!rest.empty()) vals.emplace_back(y, -rest);
        }
        for (auto& [y, v] : vals) psi.set(y, v);
    }
    return psi;
}

std::optional<AffineMap> as_affine(const std::vector<Poly>& f, int src_dim) {
    AffineMap a{Matrix((int)f.size(), src_dim), std::vector<Q>(f.size())};
    for (size_t i = 0; i < f.size(); ++i) {
        for (auto& [m, c] : f[i].terms()) {
            int deg = 0, var = -1;
            for (size_t j = 0; j < m.size(); ++j)
                if (m[j]) {
                    deg += m[j];
                    var = (int)j;
                }
            if (deg == 0)
                a.b[i] = c;
            else if (deg == 1 && var < src_dim)
                a.A((int)i, var) = c;
            else
                return std::nullopt;
        }
    }
    return a;
}

std::vector<Poly> affine_polys(const AffineMap& a) {
    std::vector<Poly> r;
    for (int i = 0; i < a.A.rows; ++i) {
        Poly p(a.b[i]);
        for (int j = 0; j < a.A.cols; ++j) p += Poly::var(j) * Poly(a.A(i, j));
        r.push_back(p);
    }
    return r;
}

Morphism invert_iso(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor) {
    auto aff = as_affine(mor.base_map, src.base.dim());
    if (!aff) throw MathError("base map is not affine");
    auto Ainv = inverse(aff->A);
    if (!Ainv) throw MathError("base map is not invertible");
    AffineMap back{*Ainv, std::vector<Q>(aff->b.size())};
    for (int i = 0; i < Ainv->rows; ++i) {
        Q s = 0;
        for (int j = 0; j < Ainv->cols; ++j) s += (*Ainv)(i, j) * aff->b[j];
        back.b[i] = -s;
    }
    Morphism psi;
    psi.base_map = affine_polys(back);
    psi.phi = compose_coeffs(invert_family(mor.phi), psi.base_map);
    if (!same_morphism(compose(psi, mor), identity_morphism(src)) ||
        !same_morphism(compose(mor, psi), identity_morphism(dst)))
        throw MathError("inverse failed verification");
    return psi;
}

LinftyBundle as_bundle(const CurvedAlgebra& alg) {
    LinftyBundle b(Base{}, alg.space);
    b.lambda = alg.total();
    return b;
}

LinftyBundle product_bundle(const LinftyBundle& a, const LinftyBundle& b) {
    Base base = a.base;
    for (auto& c : b.base.coords) base.coords.push_back(c);
    LinftyBundle r(base, direct_sum(a.fiber, b.fiber));
    const int off = a.fiber.dim();
    std::vector<int> shift;
    for (int i = 0; i < b.base.dim(); ++i) shift.push_back(a.base.dim() + i);
    for (int k = 0; k <= a.lambda.max_arity(); ++k)
        for (auto& [key, v] : a.lambda.part(k)) r.lambda.set(key, v);
    for (int k = 0; k <= b.lambda.max_arity(); ++k)
        for (auto& [key, v] : b.lambda.part(k)) {
            Key nk;
            for (int i : key) nk.push_back(i + off);
            Vec nv;
            for (auto& [j, c] : v) nv.emplace(j + off, c.rename(shift));
            r.lambda.add(nk, nv);
        }
    return r;
}

Linearization linearize_fibration(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor) {
    const GradedSpace& L = src.fiber;
    const GradedSpace& E = dst.fiber;
    Family phi1 = mor.phi.arity(1);

    GradedSpace mid;
    std::vector<int> lift, kern;
    std::vector<std::pair<int, int>> colmap;  // new index -> (degree, column in block)
    PMatrix Cg(L.dim(), L.dim()), Cig(L.dim(), L.dim());
    std::map<int, ColumnReduction> red;
    std::vector<int> lift_of_target(E.dim(), -1);
    auto ldims = L.dims();
    for (auto& [d, n] : E.dims())
        if (!ldims.count(d)) throw MathError("phi_1 is not surjective in degree " + std::to_string(d));
    for (auto& [d, n] : ldims) {
        PMatrix A = block(phi1, d, d);
        auto cr = unimodular_column_reduction(A);
        if (!cr) throw MathError("phi_1 in degree " + std::to_string(d) + " is not surjective with a constant-rank certificate");
        auto lb = L.basis_of_degree(d);
        auto eb = E.basis_of_degree(d);
        for (int c = 0; c < n; ++c) {
            int idx;
            if (c < (int)eb.size()) {
                idx = mid.add(d, E.label[eb[c]] + "~");
                lift.push_back(idx);
                lift_of_target[eb[c]] = idx;
            } else {
                idx = mid.add(d, "k" + std::to_string(d) + "_" + std::to_string(c - (int)eb.size()));
                kern.push_back(idx);
            }
            for (int a = 0; a < n; ++a) {
                Cg(lb[a], idx) = cr->C(a, c);
                Cig(idx, lb[a]) = cr->Cinv(c, a);
            }
        }
    }
    Family Cf = family_from_matrix(mid, L, 0, Cg);
    Family Cif = family_from_matrix(L, mid, 0, Cig);
    Family lam_t = push_forward(Cif, bullet(src.lambda, Cf, SumMode::Auto, arity_bound(mid, L, 1)));
    Family phi_t = compose_families(mor.phi, Cf);

    Family iota = linear_family(E, mid, 0, [&](int i) { return unit_vec(lift_of_target[i]); });
    Family phip = identity_family(mid);
    for (int k = 2; k <= phi_t.max_arity(); ++k) phip = phip + compose_families(iota, phi_t.arity(k));

    Linearization out;
    out.middle = LinftyBundle(src.base, mid);
    out.middle.lambda = transport_structure(lam_t, phip);
    out.iso.base_map = identity_morphism(src).base_map;
    out.iso.phi = compose_families(phip, Cif);
    out.linear.base_map = mor.base_map;
    out.linear.phi = linear_family(mid, E, 0, [&](int i) {
        for (int e = 0; e < E.dim(); ++e)
            if (lift_of_target[e] == i) return unit_vec(e);
        return Vec{};
    });
    out.lift_index = lift;
    out.kernel_index = kern;
    if (!same_morphism(compose(out.linear, out.iso), mor))
        throw MathError("linearization failed verification: composite differs from the fibration");
    return out;
}

}  // namespace linfty
