#include "doctest.h"
#include "linfty/curved.hpp"
#include "random_models.hpp"

#include <random>

using namespace linfty;

namespace {

struct Toy {
    GradedSpace L;
    int e, f, g;
    Toy() {
        e = L.add(1, "e");
        f = L.add(2, "f");
        g = L.add(3, "g");
    }
};

// Random morphism out of alg: phi_1 invertible and filtered, phi_k arbitrary.
// The target carries the transported structure.
std::pair<CurvedAlgebra, Family> random_morphism(std::mt19937& rng, const CurvedAlgebra& alg) {
    const GradedSpace& L = alg.space;
    Family phi = identity_family(L);
    for (int j = 0; j < L.dim(); ++j)
        for (int i = 0; i < L.dim(); ++i)
            if (L.deg[i] == L.deg[j] && i > j && rng() % 3 == 0) phi.add({j}, unit_vec(i, Poly(testing::rand_coeff(rng))));
    for (const Key& t : sorted_tuples(L, 2, L.max_degree())) {
        int d = L.deg[t[0]] + L.deg[t[1]];
        for (int i : L.basis_of_degree(d))
            if (rng() % 4 == 0) phi.add(t, unit_vec(i, Poly(testing::rand_coeff(rng))));
    }
    CurvedAlgebra tgt(L);
    tgt.lambda = transport_structure(alg.total(), phi);
    return {tgt, phi};
}

}  // namespace

TEST_CASE("MC check on hand-built algebras") {
    Toy t;
    CurvedAlgebra a(t.L);
    a.lambda.set({t.e}, unit_vec(t.f));
    CHECK(check_mc(a).ok);

    a.lambda.set({t.f}, unit_vec(t.g));
    auto r = check_mc(a);
    CHECK_FALSE(r.ok);
    REQUIRE(r.first_failure());
    CHECK(r.first_failure()->arity == 1);
    CHECK(r.first_failure()->witness == Key{t.e});
    CHECK(r.first_failure()->residual == unit_vec(t.g));
    CHECK(r.describe(t.L, t.L).find("witness (e) -> g") != std::string::npos);

    CurvedAlgebra b(t.L);
    b.lambda.set({t.e}, unit_vec(t.f));
    b.lambda.set({t.e, t.f}, unit_vec(t.g));
    CHECK(check_mc(b).ok);
    b.lambda.set({}, unit_vec(t.e));
    auto rb = check_mc(b);
    CHECK_FALSE(rb.ok);
    CHECK(rb.first_failure()->arity == 0);
    CHECK(rb.first_failure()->residual == unit_vec(t.f));
}

TEST_CASE("delta is checked separately") {
    Toy t;
    CurvedAlgebra a(t.L);
    a.delta.set({t.e}, unit_vec(t.f));
    a.delta.set({t.f}, unit_vec(t.g));
    CHECK_FALSE(check_mc(a).ok);
}

TEST_CASE("filtration check") {
    Toy t;
    CurvedAlgebra a(t.L);
    a.lambda.set({t.e}, unit_vec(t.f));
    CHECK(check_filtration(a).empty());
    a.filtration = {1, 1, 3};
    CHECK(check_filtration(a).find("below level") != std::string::npos);
}

TEST_CASE("morphism checks") {
    Toy t;
    CurvedAlgebra a(t.L);
    a.lambda.set({t.e}, unit_vec(t.f));
    CHECK(check_morphism(a, a, identity_family(t.L)).ok);

    CurvedAlgebra curved(t.L);
    curved.lambda.set({}, unit_vec(t.e));
    auto r = check_morphism(a, curved, Family(t.L, t.L, 0));
    CHECK_FALSE(r.ok);
    CHECK(r.first_failure()->arity == 0);

    // A subalgebra closed under the brackets includes without corrections.
    GradedSpace S;
    int se = S.add(1, "e"), sf = S.add(2, "f");
    CurvedAlgebra sub(S);
    sub.lambda.set({se}, unit_vec(sf));
    Family inc = linear_family(S, t.L, 0, [&](int j) { return unit_vec(j == se ? t.e : t.f); });
    CHECK(check_morphism(sub, a, inc).ok);
    CHECK_THROWS(check_morphism(a, sub, inc));
}

TEST_CASE("composition of random morphisms") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 15; ++trial) {
        testing::RandomOptions o;
        o.amplitude = 1 + trial % 3;
        auto inst = testing::random_instance(rng, o);
        REQUIRE(check_mc(inst.alg).ok);
        auto [b, f] = random_morphism(rng, inst.alg);
        auto [c, g] = random_morphism(rng, b);
        CHECK(check_morphism(inst.alg, b, f).ok);
        CHECK(check_morphism(b, c, g).ok);
        Family gf = compose_families(g, f);
        CHECK(check_morphism(inst.alg, c, gf).ok);
        CHECK(compose_families(identity_family(b.space), f) == f);
        CHECK(compose_families(f, identity_family(inst.alg.space)) == f);
        auto [d, h] = random_morphism(rng, c);
        CHECK(compose_families(h, compose_families(g, f)) == compose_families(compose_families(h, g), f));
    }
}

TEST_CASE("inverting isomorphisms") {
    Toy t;
    CurvedAlgebra a(t.L);
    a.lambda.set({t.e}, unit_vec(t.f));
    LinftyBundle B = as_bundle(a);
    Morphism id = identity_morphism(B);
    CHECK(same_morphism(invert_iso(B, B, id), id));

    Morphism two;
    two.phi = Poly(2) * identity_family(t.L);
    LinftyBundle B2 = B;
    B2.lambda = transport_structure(B.lambda, two.phi);
    Morphism inv = invert_iso(B, B2, two);
    CHECK(inv.phi == Poly(Q(1, 2)) * identity_family(t.L));

    Morphism bump;
    bump.phi = identity_family(t.L);
    bump.phi.set({t.e, t.f}, unit_vec(t.g, Poly(5)));
    LinftyBundle B3 = B;
    B3.lambda = transport_structure(B.lambda, bump.phi);
    CHECK(check_morphism(B, B3, bump).ok);
    Morphism psi = invert_iso(B, B3, bump);
    CHECK(psi.phi.eval_basis({t.e, t.f}) == unit_vec(t.g, Poly(-5)));
    CHECK(compose_families(psi.phi, bump.phi) == identity_family(t.L));
    CHECK(check_morphism(B3, B, psi).ok);

    Morphism sing;
    sing.phi = Family(t.L, t.L, 0);
    CHECK_THROWS_AS(invert_iso(B, B, sing), MathError);
}

TEST_CASE("inverting with an affine base map and polynomial phi_1") {
    LinftyBundle M(Base::euclidean(2), GradedSpace::from_dims({{1, 2}}));
    Poly x = Poly::var(0), y = Poly::var(1);
    M.lambda.set({}, Vec{{0, x * x + y}, {1, x - y}});
    REQUIRE(check_mc(M).ok);
    Morphism m;
    m.base_map = {x + y + Poly(1), y};
    m.phi = identity_family(M.fiber);
    m.phi.set({0}, Vec{{0, Poly(1)}, {1, x}});
    // Target curvature lambda'_0(u, v) = phi_1(lambda_0) at f^{-1}(u, v).
    Morphism psi_base;
    LinftyBundle N(Base::euclidean(2, "u"), M.fiber);
    Vec l0 = m.phi.apply(M.lambda.eval_basis({}));
    std::vector<Poly> finv = {Poly::var(0) - Poly::var(1) - Poly(1), Poly::var(1)};
    N.lambda.set({}, compose_coeffs(l0, finv));
    REQUIRE(check_morphism(M, N, m).ok);
    Morphism inv = invert_iso(M, N, m);
    CHECK(check_morphism(N, M, inv).ok);
    CHECK(same_morphism(compose(inv, m), identity_morphism(M)));

    Morphism bad = m;
    bad.base_map = {x * x, y};
    CHECK_THROWS_AS(invert_iso(M, N, bad), MathError);
}

TEST_CASE("bundle morphisms compose base maps") {
    LinftyBundle M(Base::euclidean(1), GradedSpace::from_dims({{1, 1}}));
    M.lambda.set({}, unit_vec(0, Poly::var(0) * Q(2)));
    LinftyBundle N(Base::euclidean(1, "y"), GradedSpace::from_dims({{1, 1}}));
    N.lambda.set({}, unit_vec(0, Poly::var(0)));
    Morphism m;
    m.base_map = {Poly::var(0) * Q(2)};
    m.phi = identity_family(M.fiber);
    auto r = check_morphism(M, N, m);
    CHECK(r.ok);
    CHECK(r.notes.front().find("classical points") != std::string::npos);
    m.base_map = {Poly::var(0) * Q(3)};
    CHECK_FALSE(check_morphism(M, N, m).ok);
}

TEST_CASE("pointwise evaluation commutes with the MC check") {
    LinftyBundle M(Base::euclidean(2), GradedSpace::from_dims({{1, 1}, {2, 1}}));
    Poly x = Poly::var(0), y = Poly::var(1);
    M.lambda.set({}, unit_vec(0, x));
    M.lambda.set({0}, unit_vec(1, y));
    CHECK_FALSE(check_mc(M).ok);
    for (auto [px, py] : std::vector<std::pair<int, int>>{{0, 0}, {0, 3}, {2, 0}, {1, 1}}) {
        CurvedAlgebra at(M.fiber);
        at.lambda = compose_coeffs(M.lambda, {Poly(px), Poly(py)});
        bool fiberwise = vanishing_report(compose_coeffs(circ(M.lambda, M.lambda), {Poly(px), Poly(py)}), 3).ok;
        CHECK(check_mc(at).ok == fiberwise);
        CHECK(check_mc(at).ok == (px * py == 0));
    }
    CHECK(M.validate().empty());
    LinftyBundle bad = M;
    bad.lambda.set({}, unit_vec(0, Poly::var(4)));
    CHECK_FALSE(bad.validate().empty());
}

TEST_CASE("linearizing fibrations") {
    // Source: (R, L^1 = <e1, e2>, L^2 = <f>), target: (R, <e>, 0).
    LinftyBundle M(Base::euclidean(1), GradedSpace());
    int e1 = M.fiber.add(1, "e1"), e2 = M.fiber.add(1, "e2"), f = M.fiber.add(2, "f");
    M.lambda = Family(M.fiber, M.fiber, 1);
    Poly x = Poly::var(0);
    M.lambda.set({e1}, unit_vec(f));
    M.lambda.set({e2}, unit_vec(f, x));
    REQUIRE(check_mc(M).ok);
    LinftyBundle N(Base::euclidean(1), GradedSpace::from_dims({{1, 1}, {2, 1}}));
    Morphism p;
    p.base_map = {x};
    p.phi = Family(M.fiber, N.fiber, 0);
    p.phi.set({e1}, Vec{{0, Poly(1)}});
    p.phi.set({e2}, Vec{{0, x}});
    p.phi.set({f}, unit_vec(1));
    N.lambda.set({0}, unit_vec(1));
    REQUIRE(check_morphism(M, N, p).ok);
    auto lin = linearize_fibration(M, N, p);
    CHECK(lin.iso.phi.max_arity() == 1);
    CHECK(same_morphism(compose(lin.linear, lin.iso), p));
    CHECK(check_mc(lin.middle).ok);
    CHECK(check_morphism(lin.middle, N, lin.linear).ok);
    CHECK(check_morphism(M, lin.middle, lin.iso).ok);
    CHECK(lin.kernel_index.size() == 1);

    // A fibration with a quadratic term: p after the inverse of a nonlinear isomorphism.
    Morphism bend;
    bend.base_map = {x};
    bend.phi = identity_family(M.fiber);
    bend.phi.set({e1, e2}, unit_vec(f, x));
    LinftyBundle M2 = M;
    M2.lambda = transport_structure(M.lambda, bend.phi);
    REQUIRE(check_mc(M2).ok);
    Morphism q = compose(p, invert_iso(M, M2, bend));
    REQUIRE(q.phi.has_arity(2));
    REQUIRE(check_morphism(M2, N, q).ok);
    auto l2 = linearize_fibration(M2, N, q);
    CHECK(same_morphism(compose(l2.linear, l2.iso), q));
    CHECK(check_mc(l2.middle).ok);
    CHECK(check_morphism(l2.middle, N, l2.linear).ok);
    CHECK(check_morphism(M2, l2.middle, l2.iso).ok);

    Morphism notsurj = p;
    notsurj.phi.set({f}, Vec{});
    CHECK_THROWS_AS(linearize_fibration(M, N, notsurj), MathError);
}

TEST_CASE("products of bundles") {
    LinftyBundle A(Base::euclidean(1), GradedSpace::from_dims({{1, 1}}));
    A.lambda.set({}, unit_vec(0, Poly::var(0, 2)));
    LinftyBundle B(Base::euclidean(1, "y"), GradedSpace::from_dims({{1, 1}}));
    B.lambda.set({}, unit_vec(0, Poly::var(0) - Poly(1)));
    auto P = product_bundle(A, B);
    CHECK(P.base.dim() == 2);
    CHECK(P.fiber.dim() == 2);
    CHECK(P.lambda.eval_basis({}) == Vec{{0, Poly::var(0, 2)}, {1, Poly::var(1) - Poly(1)}});
    CHECK(check_mc(P).ok);
}
