#include "doctest.h"
#include "linfty/graded.hpp"
#include "random_models.hpp"

#include <numeric>
#include <random>

using namespace linfty;

namespace {

// Brute-force circ straight from the symmetrised formula, with permutations of
// basis tuples and no shared code paths beyond Family evaluation.
Vec circ_oracle(const Family& lam, const Family& mu, const Key& x) {
    const int n = (int)x.size();
    std::vector<int> degs;
    for (int i : x) degs.push_back(mu.src.deg[i]);
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    Vec out;
    do {
        int sign = 1;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (p[i] > p[j] && (degs[p[i]] % 2) && (degs[p[j]] % 2)) sign = -sign;
        for (int k = 0; k <= n; ++k) {
            Key in;
            for (int j = 0; j < k; ++j) in.push_back(x[p[j]]);
            Vec m = mu.eval_basis(in);
            std::vector<Vec> args{m};
            for (int j = k; j < n; ++j) args.push_back(unit_vec(x[p[j]]));
            Vec r = lam.eval(args);
            axpy(out, Q(sign) / (factorial(k) * factorial(n - k)), r);
        }
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

Family random_family(std::mt19937& rng, const GradedSpace& s, const GradedSpace& t, int degree, int min_arity,
                     int max_arity, double density) {
    Family f(s, t, degree);
    std::uniform_real_distribution<double> u(0, 1);
    auto tdims = t.dims();
    for (int k = min_arity; k <= max_arity; ++k)
        for (const Key& key : sorted_tuples(s, k, t.max_degree() - degree)) {
            int d = degree;
            for (int i : key) d += s.deg[i];
            if (!tdims.count(d) || u(rng) > density) continue;
            Vec v;
            for (int j : t.basis_of_degree(d))
                if (u(rng) < 0.6) v.emplace(j, Poly(testing::rand_coeff(rng)));
            f.set(key, v);
        }
    return f;
}

GradedSpace small_space(std::mt19937& rng, int amplitude) {
    std::map<int, int> dims;
    for (int d = 1; d <= amplitude; ++d) dims[d] = 1 + (int)(rng() % 2);
    return GradedSpace::from_dims(dims);
}

}  // namespace

TEST_CASE("koszul signs") {
    CHECK(koszul_sign({1, 1}, {1, 0}) == -1);
    CHECK(koszul_sign({1, 2}, {1, 0}) == 1);
    CHECK(koszul_sign({1, 1, 1}, {1, 2, 0}) == 1);
    CHECK(koszul_sign({1, 1, 2}, {2, 0, 1}) == 1);
    CHECK(koszul_sign({1, 3, 1}, {2, 1, 0}) == -1);
    CHECK_THROWS(koszul_sign({1, 1}, {0}));
    CHECK_THROWS(koszul_sign({1, 1}, {0, 0}));
}

TEST_CASE("evaluation is graded symmetric") {
    GradedSpace L;
    int e = L.add(1, "e"), a = L.add(1, "a"), g = L.add(3, "g"), f = L.add(2, "f");
    Family lam(L, L, 1);
    lam.set({e}, unit_vec(f));
    lam.set({e, a}, unit_vec(g));
    CHECK(lam.apply(unit_vec(e)) == unit_vec(f));
    CHECK(lam.eval({unit_vec(a), unit_vec(e)}) == -unit_vec(g));
    CHECK(lam.eval({unit_vec(e), Vec{}}).empty());
    CHECK(lam.eval_basis({e, e}).empty());
    CHECK_THROWS(lam.set({a, a}, unit_vec(f)));
    CHECK(lam.validate().empty());

    std::mt19937 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        GradedSpace s = small_space(rng, 4);
        Family fam = random_family(rng, s, s, 1, 1, 3, 0.5);
        for (int k = 1; k <= 3; ++k)
            for (const Key& key : sorted_tuples(s, k, 4)) {
                std::vector<int> p(k);
                std::iota(p.begin(), p.end(), 0);
                std::vector<int> degs;
                for (int i : key) degs.push_back(s.deg[i]);
                Vec base = fam.eval_basis(key);
                do {
                    Key perm;
                    for (int i : p) perm.push_back(key[i]);
                    CHECK(fam.eval_basis(perm) == Poly(koszul_sign(degs, p)) * base);
                } while (std::next_permutation(p.begin(), p.end()));
            }
    }
}

TEST_CASE("circ examples") {
    GradedSpace L;
    int e = L.add(1, "e"), f = L.add(2, "f"), g = L.add(3, "g");
    Family lam(L, L, 1);
    lam.set({e}, unit_vec(f));
    CHECK(circ(lam, lam).is_zero());
    lam.set({f}, unit_vec(g));
    Family sq = circ(lam, lam);
    CHECK(sq.eval_basis({e}) == unit_vec(g));
    CHECK(circ(Family(L, L, 1), lam).is_zero());
}

TEST_CASE("circ agrees with the brute-force expansion and unshuffle path") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        GradedSpace s = small_space(rng, 4);
        Family lam = random_family(rng, s, s, 1, 0, 3, 0.4);
        Family mu = random_family(rng, s, s, 1, 0, 3, 0.4);
        Family c = circ(lam, mu, SumMode::Auto, 4);
        Family u = circ(lam, mu, SumMode::Unshuffle, 4);
        CHECK(c == u);
        for (int n = 0; n <= 4; ++n)
            for (const Key& key : sorted_tuples(s, n, 2)) CHECK(c.eval_basis(key) == circ_oracle(lam, mu, key));
        CHECK(c.validate().empty());
    }
}

TEST_CASE("bullet unit laws, curvature and associativity") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 25; ++trial) {
        GradedSpace s = small_space(rng, 4);
        Family lam = random_family(rng, s, s, 1, 0, 3, 0.4);
        CHECK(bullet(lam, identity_family(s)) == lam);
        Family phi = identity_family(s) + random_family(rng, s, s, 0, 1, 3, 0.3);
        Family psi = identity_family(s) + random_family(rng, s, s, 0, 1, 3, 0.3);
        Family curv = lam.arity(0);
        CHECK(bullet(curv, phi) == curv);
        Family left = bullet(bullet(lam, phi), psi);
        Family right = bullet(lam, bullet(phi, psi));
        CHECK(left == right);
        CHECK(bullet(lam, phi, SumMode::Literal) == bullet(lam, phi, SumMode::Unshuffle));
    }
}

TEST_CASE("graded Jacobi identity for the commutator") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        GradedSpace s = small_space(rng, 3);
        Family a = random_family(rng, s, s, 1, 0, 2, 0.4);
        Family b = random_family(rng, s, s, 1, 0, 2, 0.4);
        Family c = random_family(rng, s, s, 0, 0, 2, 0.4);
        // [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]
        Family lhs = commutator(a, commutator(b, c));
        Family rhs = commutator(commutator(a, b), c) - commutator(b, commutator(a, c));
        CHECK(lhs == rhs);
        CHECK(commutator(a, b).degree == 2);
    }
}
