#include "doctest.h"
#include "linfty/geometry.hpp"
#include "oracles.hpp"
#include "random_models.hpp"

#include <random>

using namespace linfty;
using linfty::testing::bareiss_rank;
using linfty::testing::oracle_betti;

namespace {

Matrix mat(int r, int c, std::initializer_list<int> v) {
    Matrix m(r, c);
    int i = 0;
    for (int x : v) m.a[i++] = x;
    return m;
}

// (R, L^1 = R, lambda_0 = x^2)
LinftyBundle quasi_smooth_x2() {
    LinftyBundle M(Base::euclidean(1), GradedSpace::from_dims({{1, 1}}));
    M.lambda.set({}, unit_vec(0, Poly::var(0, 2)));
    return M;
}

LinftyBundle point_bundle() { return LinftyBundle(Base{}, GradedSpace()); }

Morphism to_point(const LinftyBundle& M) {
    Morphism m;
    m.phi = Family(M.fiber, GradedSpace(), 0);
    return m;
}

}  // namespace

TEST_CASE("curvature derivative") {
    auto M = quasi_smooth_x2();
    CHECK(curvature_derivative(M, classical_point(M, {0})) == mat(1, 1, {0}));

    LinftyBundle N(Base::euclidean(2), GradedSpace::from_dims({{1, 1}}));
    Poly x = Poly::var(0), y = Poly::var(1);
    Poly l0 = x * x + y - Poly(1);
    N.lambda.set({}, unit_vec(0, l0));
    std::vector<Q> P = {0, 1};
    Matrix D = curvature_derivative(N, classical_point(N, P));
    // central differences are exact for quadratics
    Matrix oracle(1, 2);
    for (int j = 0; j < 2; ++j) {
        auto a = P, b = P;
        a[j] += 1;
        b[j] -= 1;
        oracle(0, j) = (l0.evaluate(a) - l0.evaluate(b)) / 2;
    }
    CHECK(D == oracle);
    CHECK(D == mat(1, 2, {0, 1}));

    LinftyBundle lin(Base::euclidean(2), GradedSpace::from_dims({{1, 2}}));
    Matrix A = mat(2, 2, {2, -1, 3, 5});
    lin.lambda.set({}, Vec{{0, Poly(2) * x - y}, {1, Poly(3) * x + Poly(5) * y}});
    CHECK(curvature_derivative(lin, classical_point(lin, {0, 0})) == A);

    CHECK_THROWS_AS(classical_point(M, {1}), MathError);
    CHECK_THROWS_AS(classical_point(N, {1, 1}), MathError);
}

TEST_CASE("tangent complexes") {
    auto M = quasi_smooth_x2();
    auto T = tangent_complex(M, classical_point(M, {0}));
    CHECK(T.dims == std::map<int, int>{{0, 1}, {1, 1}});
    CHECK(T.betti() == std::map<int, int>{{0, 1}, {1, 1}});
    CHECK(T.betti() == oracle_betti(T));

    // surjective Jacobian: x^2 + y - 1 at (0, 1)
    LinftyBundle N(Base::euclidean(2), GradedSpace::from_dims({{1, 1}}));
    N.lambda.set({}, unit_vec(0, Poly::var(0, 2) + Poly::var(1) - Poly(1)));
    auto TN = tangent_complex(N, classical_point(N, {0, 1}));
    CHECK(TN.betti()[1] == 0);
    CHECK(TN.betti()[0] == 1);

    // amplitude 2: lambda_0 = x e1, lambda_1(e2) = f
    LinftyBundle A(Base::euclidean(2), GradedSpace());
    int e1 = A.fiber.add(1, "e1"), e2 = A.fiber.add(1, "e2"), f = A.fiber.add(2, "f");
    A.lambda = Family(A.fiber, A.fiber, 1);
    A.lambda.set({}, unit_vec(e1, Poly::var(0)));
    A.lambda.set({e2}, unit_vec(f));
    REQUIRE(check_mc(A).ok);
    for (int y : {-2, 0, 5}) {
        auto TA = tangent_complex(A, classical_point(A, {0, y}));
        CHECK(TA.betti() == oracle_betti(TA));
        CHECK(TA.betti() == std::map<int, int>{{0, 1}, {1, 0}, {2, 0}});
        CHECK(TA.euler() == virtual_dimension(A));
    }

    // inconsistent data: d^2 != 0 at a zero of lambda_0
    LinftyBundle bad = A;
    bad.lambda = Family(A.fiber, A.fiber, 1);
    bad.lambda.set({}, unit_vec(e1, Poly::var(1)) + unit_vec(e2, Poly::var(0)));
    bad.lambda.set({e1}, unit_vec(f));
    CHECK_FALSE(check_mc(bad).ok);
    CHECK_THROWS_AS(tangent_complex(bad, classical_point(bad, {0, 0})), MathError);
}

TEST_CASE("cohomology") {
    CochainComplex z;
    z.dims = {{0, 2}, {1, 3}, {2, 1}};
    CHECK(z.betti() == z.dims);
    CHECK(z.euler() == 0);

    CochainComplex id;
    id.dims = {{0, 3}, {1, 3}};
    id.d[0] = Matrix::identity(3);
    CHECK(id.betti() == std::map<int, int>{{0, 0}, {1, 0}});
    CHECK(is_acyclic(id));

    // random complexes: sums of elementary pieces conjugated by random invertible maps
    std::mt19937 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const int lo = 0, hi = 3;
        std::map<int, int> dims, expected;
        std::vector<std::pair<int, int>> pieces;  // (degree, 1 = R -> R starting there, 0 = lone R)
        int np = 2 + (int)(rng() % 6);
        for (int i = 0; i < np; ++i) {
            int k = lo + (int)(rng() % (hi - lo));
            bool pair = rng() % 2;
            pieces.emplace_back(k, pair);
            dims[k]++;
            if (pair)
                dims[k + 1]++;
            else
                expected[k]++;
        }
        for (int k = lo; k <= hi; ++k) {
            dims[k] += 0;
            expected[k] += 0;
        }
        CochainComplex c;
        c.dims = dims;
        std::map<int, int> fill;
        for (int k = lo; k < hi; ++k) c.d[k] = Matrix(dims[k + 1], dims[k]);
        for (auto [k, pair] : pieces) {
            int a = fill[k]++;
            if (pair) {
                int b = fill[k + 1]++;
                c.d[k](b, a) = 1;
            }
        }
        std::map<int, Matrix> g, gi;
        for (int k = lo; k <= hi; ++k) {
            Matrix u = Matrix::identity(dims[k]);
            for (int i = 0; i < dims[k]; ++i)
                for (int j = i + 1; j < dims[k]; ++j) u(i, j) = (int)(rng() % 5) - 2;
            Matrix l = Matrix::identity(dims[k]);
            for (int i = 0; i < dims[k]; ++i)
                for (int j = 0; j < i; ++j) l(i, j) = (int)(rng() % 3) - 1;
            g[k] = u * l;
            gi[k] = *inverse(g[k]);
        }
        for (int k = lo; k < hi; ++k) c.d[k] = g[k + 1] * c.d[k] * gi[k];
        REQUIRE(c.check().empty());
        CHECK(c.betti() == expected);
        CHECK(c.betti() == oracle_betti(c));
        int alt = 0;
        for (auto& [k, b] : c.betti()) alt += (k % 2 ? -1 : 1) * b;
        CHECK(alt == c.euler());
    }

    CochainComplex notc;
    notc.dims = {{0, 1}, {1, 1}, {2, 1}};
    notc.d[0] = mat(1, 1, {1});
    notc.d[1] = mat(1, 1, {1});
    CHECK_FALSE(notc.check().empty());
}

TEST_CASE("mapping cones") {
    CochainComplex A, B;
    A.dims = {{0, 1}, {1, 1}};
    B.dims = {{0, 1}, {1, 1}};
    CochainMap f;
    f.f[0] = mat(1, 1, {1});
    f.f[1] = mat(1, 1, {1});
    CHECK(check_chain_map(A, B, f).empty());
    CHECK(is_acyclic(mapping_cone(A, B, f)));
    f.f[1] = mat(1, 1, {0});
    CHECK_FALSE(is_acyclic(mapping_cone(A, B, f)));
    // the cone of a quasi-isomorphism that is not an isomorphism
    CochainComplex C;
    C.dims = {{0, 2}, {1, 1}};
    C.d[0] = mat(1, 2, {0, 1});
    CochainComplex D;
    D.dims = {{0, 1}};
    CochainMap g;
    g.f[0] = mat(1, 2, {1, 0});
    CHECK(check_chain_map(C, D, g).empty());
    auto cone = mapping_cone(C, D, g);
    CHECK(cone.check().empty());
    CHECK(is_acyclic(cone));
    CochainMap bad;
    bad.f[0] = mat(1, 2, {0, 1});
    CHECK_FALSE(is_acyclic(mapping_cone(C, D, bad)));
}

TEST_CASE("virtual dimension") {
    CHECK(virtual_dimension(quasi_smooth_x2()) == 0);
    CHECK(virtual_dimension(LinftyBundle(Base::euclidean(4), GradedSpace())) == 4);
    for (int m = 0; m < 3; ++m)
        for (int r1 = 0; r1 < 3; ++r1)
            for (int r2 = 0; r2 < 3; ++r2)
                CHECK(virtual_dimension(LinftyBundle(Base::euclidean(m), GradedSpace::from_dims({{1, r1}, {2, r2}}))) ==
                      m - r1 + r2);
}

TEST_CASE("etale maps and weak equivalences") {
    auto M = quasi_smooth_x2();
    auto id = identity_morphism(M);
    auto r = is_weak_equivalence(M, M, id, {{0}}, {{0}});
    CHECK(r.ok);
    CHECK(r.scope == kLocusScope);

    // empty classical locus mapping to a point
    LinftyBundle E(Base::euclidean(1), GradedSpace::from_dims({{1, 1}}));
    E.lambda.set({}, unit_vec(0, Poly::var(0, 2) + Poly(1)));
    auto pt = point_bundle();
    auto w = is_weak_equivalence(E, pt, to_point(E), {}, {{}});
    CHECK_FALSE(w.ok);
    CHECK_FALSE(w.locus_ok);
    CHECK(find_classical_points(E).empty());
    CHECK_THROWS_AS(is_weak_equivalence(E, pt, to_point(E), {{0}}, {{}}), MathError);

    // (R^2, <e, c>, x^2 e + w c) -> x^2 example, and the inclusion back
    LinftyBundle W(Base::euclidean(2), GradedSpace::from_dims({{1, 2}}));
    W.lambda.set({}, Vec{{0, Poly::var(0, 2)}, {1, Poly::var(1)}});
    Morphism proj{{Poly::var(0)}, Family(W.fiber, M.fiber, 0)};
    proj.phi.set({0}, unit_vec(0));
    Morphism incl{{Poly::var(0), Poly(0)}, Family(M.fiber, W.fiber, 0)};
    incl.phi.set({0}, unit_vec(0));
    REQUIRE(check_morphism(W, M, proj).ok);
    REQUIRE(check_morphism(M, W, incl).ok);
    CHECK(is_weak_equivalence(W, M, proj, {{0, 0}}, {{0}}).ok);
    CHECK(is_weak_equivalence(M, W, incl, {{0}}, {{0, 0}}).ok);
    CHECK(is_weak_equivalence(M, M, compose(proj, incl), {{0}}, {{0}}).ok);

    // two out of three on a triple with one failing map
    Morphism h = to_point(M);
    bool f_ok = is_weak_equivalence(M, W, incl, {{0}}, {{0, 0}}).ok;
    bool g_ok = is_weak_equivalence(W, pt, compose(h, proj), {{0, 0}}, {{}}).ok;
    bool gf_ok = is_weak_equivalence(M, pt, compose(compose(h, proj), incl), {{0}}, {{}}).ok;
    CHECK(f_ok);
    CHECK_FALSE(g_ok);
    CHECK_FALSE(gf_ok);
    CHECK((int)f_ok + (int)g_ok + (int)gf_ok != 2);

    // the zero phi_1 is not etale
    Morphism flat = proj;
    flat.phi = Family(W.fiber, M.fiber, 0);
    auto bad = is_weak_equivalence(W, M, flat, {{0, 0}}, {{0}});
    CHECK(bad.locus_ok);
    CHECK_FALSE(bad.etale_ok);

    // etale at every sampled point of a one-dimensional locus
    LinftyBundle D(Base::euclidean(2), GradedSpace::from_dims({{1, 1}}));
    D.lambda.set({}, unit_vec(0, Poly::var(1) - Poly::var(0)));
    LinftyBundle R(Base::euclidean(1), GradedSpace());
    Morphism ev{{Poly::var(0)}, Family(D.fiber, R.fiber, 0)};
    REQUIRE(check_morphism(D, R, ev).ok);
    for (int a = -3; a <= 3; ++a) {
        Q q(a, 2);
        q.canonicalize();
        CHECK(is_etale_at(D, R, ev, classical_point(D, {q, q})).ok);
    }
}

TEST_CASE("fibrations") {
    auto M = quasi_smooth_x2();
    auto pt = point_bundle();
    auto r = is_fibration(M, pt, to_point(M), {{0}, {1}});
    CHECK(r.ok);
    CHECK(r.scope == kFibrationScope);

    LinftyBundle R(Base::euclidean(1), GradedSpace());
    Morphism incl{{Poly(0)}, Family(pt.fiber, R.fiber, 0)};
    REQUIRE(check_morphism(pt, R, incl).ok);
    auto ri = is_fibration(pt, R, incl, {{}});
    CHECK_FALSE(ri.ok);
    CHECK_FALSE(ri.submersion_ok);

    LinftyBundle R2(Base::euclidean(2), GradedSpace::from_dims({{1, 1}}));
    LinftyBundle R1(Base::euclidean(1), GradedSpace::from_dims({{1, 1}}));
    Morphism pr{{Poly::var(0)}, identity_family(R2.fiber)};
    pr.phi.tgt = R1.fiber;
    CHECK(is_fibration(R2, R1, pr, {{0, 0}, {2, -1}}).ok);

    // nonlinear base map: rank checked at the samples only
    Morphism sq{{Poly::var(0, 3)}, identity_family(R1.fiber)};
    CHECK(is_fibration(R1, R1, sq, {{1}, {2}}).ok);
    auto s0 = is_fibration(R1, R1, sq, {{0}});
    CHECK_FALSE(s0.submersion_ok);

    // phi_1 = x: surjective at x = 1 but rank is not constant
    Morphism lin{{Poly::var(0)}, Family(R1.fiber, R1.fiber, 0)};
    lin.phi.set({0}, unit_vec(0, Poly::var(0)));
    auto nc = is_fibration(R1, R1, lin, {{1}});
    CHECK_FALSE(nc.ok);
    CHECK_FALSE(nc.rank_certified);
    auto nz = is_fibration(R1, R1, lin, {{0}});
    CHECK_FALSE(nz.surjective_ok);
    // phi_1 = 1 + x^2 is constant-rank only after a polynomial pivot; still rejected
    lin.phi.set({0}, unit_vec(0, Poly(1) + Poly::var(0, 2)));
    CHECK_FALSE(is_fibration(R1, R1, lin, {{0}}).ok);
}

TEST_CASE("shifted tangent bundle") {
    LinftyBundle Z(Base::euclidean(2), GradedSpace::from_dims({{1, 1}, {2, 1}}));
    auto st0 = shifted_tangent(Z);
    CHECK(st0.bundle.lambda.is_zero());
    CHECK(st0.bundle.fiber.dims() == std::map<int, int>{{1, 3}, {2, 2}, {3, 1}});

    auto M = quasi_smooth_x2();
    auto st = shifted_tangent(M);
    const auto& T = st.bundle.fiber;
    REQUIRE(T.dim() == 3);
    CHECK(T.deg == std::vector<int>{1, 2, 1});
    // (nabla lambda)_1(v dt) = 2 x v dt
    CHECK(st.bundle.lambda.eval_basis({st.tm_offset}) == unit_vec(st.ldt_offset, Poly(2) * Poly::var(0)));
    CHECK(st.bundle.lambda.eval_basis({}) == unit_vec(st.l_offset, Poly::var(0, 2)));
    CHECK(st.bundle.lambda.eval_basis({st.l_offset}).empty());
    CHECK(check_mc(st.bundle).ok);
    CHECK(virtual_dimension(st.bundle) == 0);

    // random bundles with base-dependent structure
    std::mt19937 rng(5);
    testing::RandomOptions o;
    o.amplitude = 3;
    o.max_per_degree = 3;
    for (int trial = 0; trial < 12; ++trial) {
        auto B = testing::random_bundle(rng, 1 + trial % 2, o);
        REQUIRE(check_mc(B).ok);
        auto S = shifted_tangent(B);
        CHECK(S.bundle.validate().empty());
        CHECK(check_mc(S.bundle).ok);
        // restriction to a translated box commutes with the construction
        std::vector<Poly> shift;
        for (int i = 0; i < B.base.dim(); ++i) shift.push_back(Poly::var(i) + Poly(i + 1));
        LinftyBundle Bs = B;
        Bs.lambda = compose_coeffs(B.lambda, shift);
        CHECK(shifted_tangent(Bs).bundle.lambda == compose_coeffs(S.bundle.lambda, shift));
    }

    // a sign-sensitive case: lambda_2 on an odd and an even input
    LinftyBundle A(Base::euclidean(1), GradedSpace());
    int e = A.fiber.add(1, "e"), f = A.fiber.add(2, "f"), g = A.fiber.add(4, "g"), h = A.fiber.add(5, "h");
    A.lambda = Family(A.fiber, A.fiber, 1);
    A.lambda.set({e, f}, unit_vec(g, Poly::var(0)));
    A.lambda.set({f, f}, unit_vec(h, Poly(1) + Poly::var(0, 2)));
    REQUIRE(check_mc(A).ok);
    auto SA = shifted_tangent(A);
    CHECK(check_mc(SA.bundle).ok);
    // lambda~(e, f dt) = lambda(e, f) dt ; lambda~(f, e dt) = (-1)^{|f|} lambda(f, e) dt
    CHECK(SA.bundle.lambda.eval_basis({SA.l_offset + e, SA.ldt_offset + f}) ==
          unit_vec(SA.ldt_offset + g, Poly::var(0)));
    CHECK(SA.bundle.lambda.eval_basis({SA.l_offset + f, SA.ldt_offset + e}) ==
          unit_vec(SA.ldt_offset + g, Poly::var(0)));
    // the two copies of f give one term
    CHECK(SA.bundle.lambda.eval_basis({SA.l_offset + f, SA.ldt_offset + f}) ==
          unit_vec(SA.ldt_offset + h, Poly(1) + Poly::var(0, 2)));
}

TEST_CASE("pullbacks of fibrations") {
    auto pt = point_bundle();
    auto M = quasi_smooth_x2();
    LinftyBundle Y(Base::euclidean(1, "y"), GradedSpace::from_dims({{1, 1}, {2, 1}}));
    Y.lambda.set({}, unit_vec(0, Poly::var(0) - Poly(2)));
    // N = point: plain product
    auto prod = pullback_fibration(M, pt, to_point(M), Y, to_point(Y));
    CHECK(prod.bundle.base.dim() == 2);
    CHECK(prod.bundle.fiber.dims() == std::map<int, int>{{1, 2}, {2, 1}});
    CHECK(virtual_dimension(prod.bundle) == virtual_dimension(M) + virtual_dimension(Y));
    CHECK(find_classical_points(prod.bundle).size() == 1);
    CHECK(is_fibration(prod.bundle, Y, prod.to_other, {{0, 2}}).ok);

    // M -> point along point -> point gives M back
    auto back = pullback_fibration(M, pt, to_point(M), pt, identity_morphism(pt));
    CHECK(back.bundle.base.dim() == 1);
    CHECK(back.bundle.lambda == M.lambda);

    // two affine submersions R^2 -> R with trivial bundles
    LinftyBundle P2(Base::euclidean(2), GradedSpace());
    LinftyBundle R(Base::euclidean(1), GradedSpace());
    Morphism a{{Poly::var(0) + Poly::var(1)}, Family(P2.fiber, R.fiber, 0)};
    Morphism b{{Poly(2) * Poly::var(1) - Poly(1)}, Family(P2.fiber, R.fiber, 0)};
    auto pb = pullback_fibration(P2, R, a, P2, b);
    CHECK(pb.bundle.base.dim() == 3);
    CHECK(virtual_dimension(pb.bundle) == 2 + 2 - 1);
    auto sq_l = compose(a, pb.to_source).base_map, sq_r = compose(b, pb.to_other).base_map;
    CHECK(sq_l == sq_r);

    // fibration with a kernel and nonlinear data
    LinftyBundle N(Base::euclidean(1, "y"), GradedSpace::from_dims({{1, 1}}));
    N.lambda.set({}, unit_vec(0, Poly::var(0, 2)));
    LinftyBundle N2(Base::euclidean(1, "y"), GradedSpace::from_dims({{1, 1}, {2, 1}}));
    N2.lambda = Family(N2.fiber, N2.fiber, 1);
    N2.lambda.set({}, unit_vec(0, Poly::var(0, 2)));
    LinftyBundle S0(Base::euclidean(2), GradedSpace());
    int e1 = S0.fiber.add(1, "e1"), k = S0.fiber.add(1, "k"), f = S0.fiber.add(2, "f");
    S0.lambda = Family(S0.fiber, S0.fiber, 1);
    S0.lambda.set({}, unit_vec(e1, Poly::var(0, 2)) + unit_vec(k, Poly::var(1)));
    Morphism p0{{Poly::var(0)}, Family(S0.fiber, N2.fiber, 0)};
    p0.phi.set({e1}, unit_vec(0));
    p0.phi.set({f}, unit_vec(1));
    REQUIRE(check_morphism(S0, N2, p0).ok);
    // bend it by a nonlinear isomorphism so the fibration has a quadratic term
    Morphism bend{identity_morphism(S0).base_map, identity_family(S0.fiber)};
    bend.phi.set({e1, k}, unit_vec(f, Poly::var(0)));
    LinftyBundle S = S0;
    S.lambda = transport_structure(S0.lambda, bend.phi);
    REQUIRE(check_mc(S).ok);
    Morphism p = compose(p0, invert_iso(S0, S, bend));
    REQUIRE(p.phi.has_arity(2));
    REQUIRE(check_morphism(S, N2, p).ok);
    REQUIRE(is_fibration(S, N2, p, {{0, 0}, {1, 2}}).ok);

    LinftyBundle Mp(Base::euclidean(1, "z"), GradedSpace::from_dims({{1, 1}}));
    Mp.lambda.set({}, unit_vec(0, Poly::var(0, 2)));
    Morphism g{{Poly::var(0)}, Family(Mp.fiber, N2.fiber, 0)};
    g.phi.set({0}, unit_vec(0));
    REQUIRE(check_morphism(Mp, N2, g).ok);
    auto q = pullback_fibration(S, N2, p, Mp, g);
    CHECK(check_mc(q.bundle).ok);
    CHECK(virtual_dimension(q.bundle) == virtual_dimension(S) + virtual_dimension(Mp) - virtual_dimension(N2));
    CHECK(is_fibration(q.bundle, Mp, q.to_other, {{0, 0}, {1, 1}}).ok);
    // classical locus: pairs of classical points over the same point of N
    auto locus = find_classical_points(q.bundle);
    CHECK_FALSE(locus.empty());
    for (auto& P : locus) {
        std::vector<Q> s, o;
        for (auto& c : q.to_source.base_map) s.push_back(c.evaluate(P.coords));
        for (auto& c : q.to_other.base_map) o.push_back(c.evaluate(P.coords));
        CHECK_NOTHROW(classical_point(S, s));
        CHECK_NOTHROW(classical_point(Mp, o));
        CHECK(p.base_map[0].evaluate(s) == g.base_map[0].evaluate(o));
    }

    // pulling back a weak equivalence along a fibration
    LinftyBundle W(Base::euclidean(2), GradedSpace::from_dims({{1, 2}}));
    W.lambda.set({}, Vec{{0, Poly::var(0, 2)}, {1, Poly::var(1)}});
    Morphism proj{{Poly::var(0)}, Family(W.fiber, N.fiber, 0)};
    proj.phi.set({0}, unit_vec(0));
    REQUIRE(check_morphism(W, N, proj).ok);
    REQUIRE(is_weak_equivalence(W, N, proj, {{0, 0}}, {{0}}).ok);
    Morphism p1{{Poly::var(0)}, Family(S0.fiber, N.fiber, 0)};
    p1.phi.set({e1}, unit_vec(0));
    REQUIRE(check_morphism(S0, N, p1).ok);
    auto pw = pullback_fibration(S0, N, p1, W, proj);
    auto lp = find_classical_points(pw.bundle);
    auto ls = find_classical_points(S0);
    std::vector<std::vector<Q>> lpq, lsq;
    for (auto& P : lp) lpq.push_back(P.coords);
    for (auto& P : ls) lsq.push_back(P.coords);
    REQUIRE_FALSE(lpq.empty());
    CHECK(is_weak_equivalence(pw.bundle, S0, pw.to_source, lpq, lsq).ok);

    // not representable: both base maps nonlinear
    Morphism pc{{Poly::var(0, 3)}, p.phi};
    Morphism gc{{Poly::var(0, 3)}, g.phi};
    CHECK_THROWS_AS(pullback_fibration(S, N2, pc, Mp, gc), std::exception);
}

TEST_CASE("locus search") {
    auto M = quasi_smooth_x2();
    auto l = find_classical_points(M);
    REQUIRE(l.size() == 1);
    CHECK(l[0].exact);
    CHECK(l[0].coords == std::vector<Q>{0});

    LinftyBundle S2(Base::euclidean(1), GradedSpace::from_dims({{1, 1}}));
    S2.lambda.set({}, unit_vec(0, Poly::var(0, 2) - Poly(2)));
    auto r = find_classical_points(S2);
    REQUIRE(r.size() == 2);
    for (auto& P : r) {
        CHECK_FALSE(P.exact);
        CHECK(std::abs(std::abs(P.approx()[0]) - std::sqrt(2.0)) < 1e-9);
        auto T = tangent_complex(S2, P);
        CHECK(T.betti() == std::map<int, int>{{0, 0}, {1, 0}});
    }

    LinftyBundle L2(Base::euclidean(2), GradedSpace::from_dims({{1, 2}}));
    Poly x = Poly::var(0), y = Poly::var(1);
    L2.lambda.set({}, Vec{{0, Poly(2) * x - Poly(1)}, {1, Poly(3) * y + Poly(1)}});
    auto e = find_classical_points(L2);
    REQUIRE(e.size() == 1);
    CHECK(e[0].exact);
    CHECK(e[0].coords == std::vector<Q>{Q(1, 2), Q(-1, 3)});

    LinftyBundle C(Base::euclidean(2), GradedSpace::from_dims({{1, 1}}));
    C.lambda.set({}, unit_vec(0, x * x + y * y - Poly(1)));
    auto circle = find_classical_points(C);
    CHECK(circle.size() >= 4);
    for (auto& P : circle) {
        auto a = P.approx();
        CHECK(std::abs(a[0] * a[0] + a[1] * a[1] - 1) < 1e-9);
        CHECK(tangent_complex(C, P).euler() == virtual_dimension(C));
    }
}
