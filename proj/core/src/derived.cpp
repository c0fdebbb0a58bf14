#include "linfty/derived.hpp"

#include <memory>
#include <set>
#include <sstream>

namespace linfty {

namespace {

Base path_base(const Base& b) {
    Base r;
    for (auto& c : b.coords) r.coords.push_back(c + "@0");
    for (auto& c : b.coords) r.coords.push_back(c + "@1");
    return r;
}

Q parity_sign(int k) { return k % 2 == 0 ? Q(1) : Q(-1); }

std::vector<Poly> vars(int n, int off = 0) {
    std::vector<Poly> r;
    for (int i = 0; i < n; ++i) r.push_back(Poly::var(off + i));
    return r;
}

std::vector<int> shift_map(int n, int off) {
    std::vector<int> r;
    for (int i = 0; i < n; ++i) r.push_back(off + i);
    return r;
}

// Second factor of a product gets primed names when they collide with the first.
std::vector<std::string> primed(const std::vector<std::string>& first, const std::vector<std::string>& second) {
    std::set<std::string> used(first.begin(), first.end());
    std::vector<std::string> r;
    for (auto& c : second) {
        std::string n = c;
        while (used.count(n)) n += "'";
        used.insert(n);
        r.push_back(n);
    }
    return r;
}

LinftyBundle named_product(const LinftyBundle& a, const LinftyBundle& b) {
    LinftyBundle r = product_bundle(a, b);
    auto coords = primed(a.base.coords, b.base.coords);
    for (size_t i = 0; i < coords.size(); ++i) r.base.coords[a.base.dim() + i] = coords[i];
    auto labels = primed(a.fiber.label, b.fiber.label);
    for (size_t i = 0; i < labels.size(); ++i) {
        r.fiber.label[a.fiber.dim() + i] = labels[i];
        r.lambda.src.label[a.fiber.dim() + i] = labels[i];
        r.lambda.tgt.label[a.fiber.dim() + i] = labels[i];
    }
    return r;
}

void check_vec_cap(const Vec& v, int tvar, const char* where) {
    for (auto& [i, c] : v) check_degree_cap(c, tvar, where);
}

void check_family_cap(const Family& f, int tvar, const char* where) {
    for (int k = 0; k <= f.max_arity(); ++k)
        for (auto& [key, v] : f.part(k)) check_vec_cap(v, tvar, where);
}

}  // namespace

LinftyBundle path_space_manifold(int m) {
    if (m <= 0) throw std::invalid_argument("path_space_manifold: dimension must be positive");
    Base M = Base::euclidean(m);
    GradedSpace F;
    for (auto& c : M.coords) F.add(1, "d" + c + ".dt");
    LinftyBundle P(path_base(M), F);
    Vec D;
    for (int i = 0; i < m; ++i) D.emplace(i, Poly::var(m + i) - Poly::var(i));
    P.lambda.set({}, D);
    return P;
}

// ---- path structure ----

Vec PathStructure::delta(const Vec& x) const {
    Vec r;
    for (auto& [i, c] : x) {
        if (i < l_offset) continue;
        Poly d = c.derivative(tvar);
        if (d.is_zero()) continue;
        const int j = i - l_offset;
        axpy(r, Poly(parity_sign(space.deg[i])) * d, unit_vec(ldt_offset + j));
    }
    return r;
}

Vec PathStructure::total(const std::vector<Vec>& xs) const {
    Vec r = mu.eval(xs);
    if (xs.size() == 1) r = r + delta(xs[0]);
    check_vec_cap(r, tvar, "path structure");
    return r;
}

CheckReport PathStructure::check_mc(int max_t) const {
    // Truncated basis: component i times t^j; TM dt sections are constant.
    GradedSpace E;
    std::vector<Vec> elem;
    for (int i = 0; i < space.dim(); ++i)
        for (int j = 0; j <= (i < ldt_offset ? 0 : max_t); ++j) {
            E.add(space.deg[i], space.label[i] + "*t^" + std::to_string(j));
            elem.push_back(unit_vec(i, Poly::var(tvar, j)));
        }
    Evaluator D = [this](const std::vector<Vec>& xs) { return total(xs); };
    CheckReport rep;
    const int bound = arity_bound(E, space, 2);
    for (int n = 0; n <= bound; ++n) {
        ArityCheck a;
        a.arity = n;
        for (const Key& y : sorted_tuples(E, n, space.max_degree() - 2)) {
            std::vector<Vec> xs;
            std::vector<int> degs;
            for (int i : y) {
                xs.push_back(elem[i]);
                degs.push_back(E.deg[i]);
            }
            Vec r = circ_apply(D, D, xs, degs);
            if (!r.empty()) {
                a.ok = false;
                a.witness = y;
                a.residual = r;
                rep.ok = false;
                break;
            }
        }
        rep.arities.push_back(a);
    }
    rep.notes.push_back("inputs are components times t^j with j <= " + std::to_string(max_t));
    return rep;
}

PathStructure path_curved_structure(const LinftyBundle& b, const std::vector<Poly>& path_coords, int tvar) {
    const int m = b.base.dim();
    if ((int)path_coords.size() != m) throw std::invalid_argument("path_curved_structure: path has the wrong dimension");
    for (auto& c : path_coords)
        if (c.degree_in(tvar) > 1) throw std::invalid_argument("path_curved_structure: only straight paths are supported");
    ShiftedTangent st = shifted_tangent(b);
    PathStructure ps;
    ps.space = st.bundle.fiber;
    ps.m = m;
    ps.nl = b.fiber.dim();
    ps.tm_offset = st.tm_offset;
    ps.ldt_offset = st.ldt_offset;
    ps.l_offset = st.l_offset;
    ps.tvar = tvar;
    ps.path = path_coords;
    ps.curvature = Family(ps.space, ps.space, 1);
    ps.lambda = ps.tilde = ps.nabla = ps.curvature;

    Family pulled = compose_coeffs(st.bundle.lambda, path_coords);
    check_family_cap(pulled, tvar, "pullback");
    for (int k = 0; k <= pulled.max_arity(); ++k)
        for (auto& [key, v] : pulled.part(k)) {
            bool tangent = false, dt = false;
            for (int i : key) {
                if (i < ps.ldt_offset) tangent = true;
                else if (i < ps.l_offset) dt = true;
            }
            Family& target = tangent ? ps.nabla : dt ? ps.tilde : ps.lambda;
            target.set(key, v);
        }
    Vec adt;
    for (int i = 0; i < m; ++i) {
        Poly d = path_coords[i].derivative(tvar);
        if (!d.is_zero()) adt.emplace(ps.tm_offset + i, d);
    }
    if (!adt.empty()) ps.curvature.set({}, adt);
    ps.mu = ps.curvature + ps.lambda + ps.tilde + ps.nabla;
    ps.weight.assign(ps.space.dim(), 0);
    for (int i = ps.ldt_offset; i < ps.space.dim(); ++i)
        ps.weight[i] = i < ps.l_offset ? ps.space.deg[i] - 1 : ps.space.deg[i];
    return ps;
}

PathStructure path_curved_structure(const LinftyBundle& b, const AffinePath& path) {
    if ((int)path.p.size() != b.base.dim() || (int)path.q.size() != b.base.dim())
        throw std::invalid_argument("path_curved_structure: endpoints have the wrong dimension");
    return path_curved_structure(b, path_coordinates(path), 0);
}

// ---- derived path space ----

DerivedPathSpace derived_path_space(const LinftyBundle& b) {
    if (auto e = b.validate(); !e.empty()) throw std::invalid_argument("derived_path_space: " + e);
    const int m = b.base.dim();
    DerivedPathSpace d;
    d.m = m;
    d.nl = b.fiber.dim();
    d.full = path_curved_structure(b, symbolic_path_coordinates(m), 2 * m);
    const PathStructure& ps = d.full;

    GradedSpace H;
    for (int i = 0; i < ps.l_offset; ++i) H.add(ps.space.deg[i], ps.space.label[i]);
    d.tm_offset = 0;
    d.ldt_offset = ps.ldt_offset;
    d.l0_offset = H.dim();
    for (int j = 0; j < d.nl; ++j) H.add(b.fiber.deg[j], b.fiber.label[j] + "@0");
    d.l1_offset = H.dim();
    for (int j = 0; j < d.nl; ++j) H.add(b.fiber.deg[j], b.fiber.label[j] + "@1");

    auto sp = std::make_shared<PathStructure>(ps);
    const int tv = ps.tvar, lo = ps.l_offset, ldt = ps.ldt_offset, l0 = d.l0_offset, l1 = d.l1_offset;
    Contraction& c = d.contraction;
    c.L = ps.space;
    c.H = H;
    c.weight = ps.weight;
    c.delta = [sp](const Vec& x) { return sp->delta(x); };
    c.eta = [sp, tv, lo, ldt](const Vec& x) {
        Vec r;
        for (auto& [i, a] : x) {
            if (i < ldt || i >= lo) continue;
            Poly e = poly_eta_part(a, tv) * parity_sign(sp->space.deg[i] - 1);
            if (!e.is_zero()) axpy(r, e, unit_vec(lo + i - ldt));
        }
        return r;
    };
    c.iota = [tv, lo, l0, l1](const Vec& h) {
        Vec r;
        const Poly t = Poly::var(tv);
        for (auto& [i, a] : h) {
            if (i < l0) axpy(r, a, unit_vec(i));
            else if (i < l1) axpy(r, a * (Poly(1) - t), unit_vec(lo + i - l0));
            else axpy(r, a * t, unit_vec(lo + i - l1));
        }
        return r;
    };
    c.pi = [tv, lo, l0, l1](const Vec& x) {
        Vec r;
        for (auto& [i, a] : x) {
            if (i < lo) {
                Poly v = poly_interval_integral(a, tv);
                if (!v.is_zero()) axpy(r, v, unit_vec(i));
                continue;
            }
            Poly a0 = a.evaluate_var(tv, Q(0)), a1 = a.evaluate_var(tv, Q(1));
            if (!a0.is_zero()) axpy(r, a0, unit_vec(l0 + i - lo));
            if (!a1.is_zero()) axpy(r, a1, unit_vec(l1 + i - lo));
        }
        return r;
    };

    d.transferred = transfer(c, ps.mu);
    d.bundle = LinftyBundle(path_base(b.base), H);
    d.bundle.lambda = d.transferred.mu + d.transferred.algebra.delta;
    d.bundle.lambda.prune();
    for (int k = 0; k <= d.bundle.lambda.max_arity(); ++k)
        for (auto& [key, v] : d.bundle.lambda.part(k))
            for (auto& [i, p] : v)
                if (p.degree_in(tv) > 0) throw MathError("transferred operation still depends on t");
    return d;
}

// ---- factorisation of the diagonal ----

DiagonalFactorization factorize_diagonal(const LinftyBundle& b) {
    DiagonalFactorization f;
    f.source = b;
    f.path = derived_path_space(b);
    f.square = named_product(b, b);
    const int m = b.base.dim(), nl = b.fiber.dim();
    const DerivedPathSpace& P = f.path;

    f.constant.base_map = vars(m);
    for (int i = 0; i < m; ++i) f.constant.base_map.push_back(Poly::var(i));
    f.constant.phi = linear_family(b.fiber, P.bundle.fiber, 0,
                                   [&](int j) { return unit_vec(P.l0_offset + j) + unit_vec(P.l1_offset + j); });

    f.evaluation.base_map = vars(2 * m);
    f.evaluation.phi = linear_family(P.bundle.fiber, f.square.fiber, 0, [&](int i) {
        if (i >= P.l1_offset) return unit_vec(nl + i - P.l1_offset);
        if (i >= P.l0_offset) return unit_vec(i - P.l0_offset);
        return Vec{};
    });

    f.diagonal.base_map = f.constant.base_map;
    f.diagonal.phi = linear_family(b.fiber, f.square.fiber, 0, [&](int j) { return unit_vec(j) + unit_vec(nl + j); });
    f.composite_is_diagonal = same_morphism(compose(f.evaluation, f.constant), f.diagonal);
    return f;
}

std::vector<std::vector<Q>> path_classical_points(const DiagonalFactorization& f,
                                                  const std::vector<std::vector<Q>>& points) {
    std::vector<std::vector<Q>> r;
    for (auto& P : points) {
        // D = (q - p) dt vanishes only on constant paths; then pi_lin(a*lambda_0) = 0
        // says lambda_0 vanishes at the common endpoint.
        std::vector<Q> pq = P;
        pq.insert(pq.end(), P.begin(), P.end());
        bool zero = true;
        for (auto& x : curvature_at(f.source, P))
            if (x != 0) zero = false;
        if (zero) r.push_back(pq);
    }
    return r;
}

FactorizationReport verify_factorization(const DiagonalFactorization& f, const std::vector<std::vector<Q>>& points,
                                         const std::vector<std::vector<Q>>& samples) {
    FactorizationReport r;
    r.constant_morphism = check_morphism(f.source, f.path.bundle, f.constant);
    r.evaluation_morphism = check_morphism(f.path.bundle, f.square, f.evaluation);
    r.constant = is_weak_equivalence(f.source, f.path.bundle, f.constant, points, path_classical_points(f, points));
    r.evaluation = is_fibration(f.path.bundle, f.square, f.evaluation, samples);
    r.composite_ok = f.composite_is_diagonal;
    r.ok = r.constant_morphism.ok && r.evaluation_morphism.ok && r.constant.ok && r.evaluation.ok && r.composite_ok;
    return r;
}

// ---- homotopy fibered products ----

Morphism product_morphism(const LinftyBundle& X, const Morphism& f, const LinftyBundle& Y, const Morphism& g,
                          const LinftyBundle& Z) {
    if (f.phi.tgt != Z.fiber || g.phi.tgt != Z.fiber || (int)f.base_map.size() != Z.base.dim() ||
        (int)g.base_map.size() != Z.base.dim())
        throw std::invalid_argument("product_morphism: maps do not land in Z");
    if (f.phi.src != X.fiber || g.phi.src != Y.fiber) throw std::invalid_argument("product_morphism: source mismatch");
    const int nx = X.fiber.dim(), nz = Z.fiber.dim();
    auto ymap = shift_map(Y.base.dim(), X.base.dim());
    Morphism r;
    r.base_map = f.base_map;
    for (auto& p : g.base_map) r.base_map.push_back(p.rename(ymap));
    r.phi = Family(direct_sum(X.fiber, Y.fiber), direct_sum(Z.fiber, Z.fiber), 0);
    for (int k = 1; k <= f.phi.max_arity(); ++k)
        for (auto& [key, v] : f.phi.part(k)) r.phi.set(key, v);
    for (int k = 1; k <= g.phi.max_arity(); ++k)
        for (auto& [key, v] : g.phi.part(k)) {
            Key nk;
            for (int i : key) nk.push_back(i + nx);
            Vec w;
            for (auto& [j, c] : v) w.emplace(j + nz, c.rename(ymap));
            r.phi.set(nk, w);
        }
    return r;
}

HomotopyFiberedProduct homotopy_fibered_product(const LinftyBundle& X, const Morphism& f, const LinftyBundle& Y,
                                                const Morphism& g, const LinftyBundle& Z) {
    DiagonalFactorization F = factorize_diagonal(Z);
    LinftyBundle XY = named_product(X, Y);
    Morphism fg = product_morphism(X, f, Y, g, Z);
    fg.phi.src = XY.fiber;
    fg.phi.tgt = F.square.fiber;
    PullbackResult pb = pullback_fibration(F.path.bundle, F.square, F.evaluation, XY, fg);

    HomotopyFiberedProduct h;
    h.bundle = pb.bundle;
    h.to_path = pb.to_source;
    h.base_description = pb.base_description;
    const int nx = X.fiber.dim();
    Morphism prx, pry;
    prx.base_map = vars(X.base.dim());
    prx.phi = linear_family(XY.fiber, X.fiber, 0, [&](int i) { return i < nx ? unit_vec(i) : Vec{}; });
    pry.base_map = vars(Y.base.dim(), X.base.dim());
    pry.phi = linear_family(XY.fiber, Y.fiber, 0, [&](int i) { return i >= nx ? unit_vec(i - nx) : Vec{}; });
    h.to_x = compose(prx, pb.to_other);
    h.to_y = compose(pry, pb.to_other);
    // Kernel directions that are plain path-space basis vectors keep their names.
    const GradedSpace& PF = F.path.bundle.fiber;
    for (int i = 0; i < h.bundle.fiber.dim(); ++i) {
        Vec v = h.to_path.phi.eval_basis({i});
        if (v.size() != 1 || v.begin()->second != Poly(1)) continue;
        const std::string& name = PF.label[v.begin()->first];
        if (h.bundle.fiber.find(name) >= 0) continue;
        for (GradedSpace* g : {&h.bundle.fiber, &h.bundle.lambda.src, &h.bundle.lambda.tgt, &h.to_x.phi.src,
                               &h.to_y.phi.src, &h.to_path.phi.src})
            g->label[i] = name;
    }
    h.vdim = virtual_dimension(h.bundle);
    h.vdim_formula = virtual_dimension(X) + virtual_dimension(Y) - virtual_dimension(Z);
    return h;
}

// ---- submanifolds ----

int Submanifold::dim() const { return kind == Kind::Affine ? A.cols : (int)free.size(); }

std::vector<Poly> Submanifold::embedding() const {
    std::vector<Poly> x(ambient);
    if (kind == Kind::Affine) {
        for (int i = 0; i < ambient; ++i) {
            x[i] = Poly(b[i]);
            for (int j = 0; j < A.cols; ++j)
                if (A(i, j) != 0) x[i] += Poly(A(i, j)) * Poly::var(j);
        }
        return x;
    }
    std::vector<char> is_free(ambient, 0);
    for (size_t k = 0; k < free.size(); ++k) {
        x[free[k]] = Poly::var((int)k);
        is_free[free[k]] = 1;
    }
    size_t v = 0;
    for (int i = 0; i < ambient; ++i)
        if (!is_free[i]) x[i] = values[v++];
    return x;
}

std::optional<std::vector<Q>> Submanifold::locate(const std::vector<Q>& point) const {
    if ((int)point.size() != ambient) throw std::invalid_argument("point has the wrong number of coordinates");
    std::vector<Q> s;
    if (kind == Kind::Affine) {
        std::vector<Q> rhs(ambient);
        for (int i = 0; i < ambient; ++i) rhs[i] = point[i] - b[i];
        auto x = solve(A, rhs);
        if (!x) return std::nullopt;
        s = *x;
    } else {
        for (int i : free) s.push_back(point[i]);
    }
    auto emb = embedding();
    for (int i = 0; i < ambient; ++i) {
        std::vector<Q> args = s;
        if (emb[i].nvars() > (int)args.size()) return std::nullopt;
        if (emb[i].evaluate(args) != point[i]) return std::nullopt;
    }
    return s;
}

LinftyBundle Submanifold::as_bundle() const { return LinftyBundle(Base::euclidean(dim(), "s"), GradedSpace{}); }

Submanifold Submanifold::affine(Matrix A, std::vector<Q> b, std::string name) {
    if ((int)b.size() != A.rows) throw std::invalid_argument("affine submanifold: offset has the wrong size");
    if (rank(A) != A.cols) throw std::invalid_argument("affine submanifold: parametrisation is not injective");
    Submanifold s;
    s.kind = Kind::Affine;
    s.ambient = A.rows;
    s.A = std::move(A);
    s.b = std::move(b);
    s.name = std::move(name);
    return s;
}

Submanifold Submanifold::graph(int ambient, std::vector<int> free, std::vector<Poly> values, std::string name) {
    std::set<int> f(free.begin(), free.end());
    if (f.size() != free.size() || (!free.empty() && (*f.begin() < 0 || *f.rbegin() >= ambient)))
        throw std::invalid_argument("graph submanifold: free coordinates must be distinct and in range");
    if ((int)(free.size() + values.size()) != ambient)
        throw std::invalid_argument("graph submanifold: need one polynomial per dependent coordinate");
    for (auto& v : values)
        if (v.nvars() > (int)free.size()) throw std::invalid_argument("graph submanifold: polynomial uses unknown parameters");
    Submanifold s;
    s.kind = Kind::Graph;
    s.ambient = ambient;
    s.free = std::move(free);
    s.values = std::move(values);
    s.name = std::move(name);
    return s;
}

Submanifold Submanifold::whole(int m) { return affine(Matrix::identity(m), std::vector<Q>(m), "M"); }

// ---- derived intersections ----

namespace {

std::optional<WeakEquivalenceReport> compare_with_classical(const DerivedIntersection& d) {
    if (d.X.kind != Submanifold::Kind::Affine || d.Y.kind != Submanifold::Kind::Affine) return std::nullopt;
    const int m = d.X.ambient, dx = d.X.dim(), dy = d.Y.dim();
    // A_X u - A_Y w = b_Y - b_X
    Matrix S(m, dx + dy);
    std::vector<Q> rhs(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < dx; ++j) S(i, j) = d.X.A(i, j);
        for (int j = 0; j < dy; ++j) S(i, dx + j) = -d.Y.A(i, j);
        rhs[i] = d.Y.b[i] - d.X.b[i];
    }
    auto z0 = solve(S, rhs);
    if (!z0) return std::nullopt;
    Matrix N = nullspace(S);
    LinftyBundle C(Base::euclidean(N.cols, "s"), GradedSpace{});
    Morphism mor;
    for (int i = 0; i < dx + dy; ++i) {
        Poly p((*z0)[i]);
        for (int k = 0; k < N.cols; ++k)
            if (N(i, k) != 0) p += Poly(N(i, k)) * Poly::var(k);
        mor.base_map.push_back(p);
    }
    mor.phi = Family(GradedSpace{}, d.bundle.fiber, 0);
    std::vector<std::vector<Q>> src, dst;
    for (auto& pt : d.points) {
        std::vector<Q> diff(dx + dy);
        for (int i = 0; i < dx + dy; ++i) diff[i] = pt.point.coords[i] - (*z0)[i];
        auto s = solve(N, diff);
        if (!s) throw MathError("intersection point is not on the classical intersection");
        src.push_back(*s);
        dst.push_back(pt.point.coords);
    }
    return is_weak_equivalence(C, d.bundle, mor, src, dst);
}

}  // namespace

DerivedIntersection derived_intersection(const Submanifold& X, const Submanifold& Y,
                                         const std::vector<std::vector<Q>>& points) {
    if (X.ambient != Y.ambient || X.ambient <= 0) throw std::invalid_argument("derived_intersection: ambient dimensions differ");
    const int m = X.ambient;
    DerivedIntersection d;
    d.X = X;
    d.Y = Y;
    LinftyBundle M(Base::euclidean(m), GradedSpace{});
    LinftyBundle Xb = X.as_bundle(), Yb = Y.as_bundle();
    Morphism f{X.embedding(), Family(GradedSpace{}, GradedSpace{}, 0)};
    Morphism g{Y.embedding(), Family(GradedSpace{}, GradedSpace{}, 0)};
    HomotopyFiberedProduct h = homotopy_fibered_product(Xb, f, Yb, g, M);
    d.bundle = h.bundle;
    d.to_x = h.to_x;
    d.to_y = h.to_y;
    d.vdim = h.vdim;

    std::vector<std::vector<Q>> params;
    for (auto& P : points) {
        auto sx = X.locate(P), sy = Y.locate(P);
        if (!sx || !sy) throw MathError("candidate point does not lie on both submanifolds");
        std::vector<Q> s = *sx;
        s.insert(s.end(), sy->begin(), sy->end());
        params.push_back(s);
    }
    if (points.empty()) {
        if (X.dim() + Y.dim() <= 3) {
            for (auto& cp : find_classical_points(d.bundle)) {
                if (!cp.exact) {
                    d.notes.push_back("numeric intersection point " + cp.str() + " skipped");
                    continue;
                }
                params.push_back(cp.coords);
            }
            d.notes.push_back("candidates found by grid search");
        } else {
            d.notes.push_back("no candidate points given and the parameter space is too large to search");
        }
    }
    auto emb = X.embedding();
    for (auto& s : params) {
        IntersectionPoint ip;
        ip.point = classical_point(d.bundle, s);
        std::vector<Q> sx(s.begin(), s.begin() + X.dim());
        for (auto& e : emb) ip.ambient.push_back(e.evaluate(sx));
        ip.tangent = tangent_complex(d.bundle, ip.point);
        auto betti = ip.tangent.betti();
        ip.h0 = betti[0];
        ip.h1 = betti[1];
        ip.transversal = ip.h1 == 0;
        d.points.push_back(std::move(ip));
    }
    d.classical_comparison = compare_with_classical(d);
    return d;
}

// ---- zero loci ----

ZeroLocusComparison zero_locus_model(const std::vector<Poly>& s, int m, const std::vector<std::vector<Q>>& points) {
    if (m <= 0) throw std::invalid_argument("zero_locus_model: base dimension must be positive");
    const int r = (int)s.size();
    if (r == 0) throw std::invalid_argument("zero_locus_model: the bundle has rank zero");
    for (auto& p : s)
        if (p.nvars() > m) throw std::invalid_argument("zero_locus_model: section uses unknown coordinates");
    ZeroLocusComparison z;
    GradedSpace E;
    for (int j = 0; j < r; ++j) E.add(1, "e" + std::to_string(j + 1) + ".dt");
    z.quasi_smooth = LinftyBundle(Base::euclidean(m), E);
    Vec s0;
    for (int j = 0; j < r; ++j)
        if (!s[j].is_zero()) s0.emplace(j, s[j]);
    if (!s0.empty()) z.quasi_smooth.lambda.set({}, s0);

    std::vector<int> free;
    for (int i = 0; i < m; ++i) free.push_back(i);
    Submanifold zero = Submanifold::graph(m + r, free, std::vector<Poly>(r), "zero section");
    Submanifold graph = Submanifold::graph(m + r, free, s, "s(M)");
    std::vector<std::vector<Q>> ambient;
    for (auto& P : points) {
        std::vector<Q> a = P;
        a.resize(m + r);
        ambient.push_back(a);
    }
    // Classical points must be validated before they are located on s(M).
    for (auto& P : points) classical_point(z.quasi_smooth, P);
    z.intersection = derived_intersection(zero, graph, ambient);

    // Target fiber: T(R^{m+r}) dt; the E directions come after the base directions.
    Base Ebase = Base::euclidean(m + r);
    z.map.base_map = vars(m);
    for (int i = 0; i < m; ++i) z.map.base_map.push_back(Poly::var(i));
    const GradedSpace& T = z.intersection.bundle.fiber;
    z.map.phi = linear_family(E, T, 0, [&](int j) {
        int k = T.find("d" + Ebase.coords[m + j] + ".dt");
        if (k < 0) throw std::logic_error("zero_locus_model: missing fiber direction");
        return unit_vec(k);
    });
    z.map_check = check_morphism(z.quasi_smooth, z.intersection.bundle, z.map);
    std::vector<std::vector<Q>> dst;
    for (auto& ip : z.intersection.points) dst.push_back(ip.point.coords);
    z.weak_equivalence = is_weak_equivalence(z.quasi_smooth, z.intersection.bundle, z.map, points, dst);
    if (points.empty()) z.weak_equivalence.notes.push_back("no classical points supplied; the etale condition is vacuous");
    z.ok = z.map_check.ok && z.weak_equivalence.ok;
    return z;
}

}  // namespace linfty
