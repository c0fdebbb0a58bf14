#pragma once
// Oracles for the derived path space: the low-arity formulas, the amplitude-2
// binary bracket, and random submanifold pairs through a common point.

#include "linfty/derived.hpp"
#include "random_models.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace linfty::testing {

inline Poly P(int i) { return Poly::var(i); }

inline std::vector<Vec> units(const Key& y) {
    std::vector<Vec> xs;
    for (int j : y) xs.push_back(unit_vec(j));
    return xs;
}

inline std::vector<int> degs(const GradedSpace& s, const Key& y) {
    std::vector<int> d;
    for (int j : y) d.push_back(s.deg[j]);
    return d;
}

inline std::vector<Poly> components(const Vec& v, int n, int off = 0) {
    std::vector<Poly> r(n);
    for (auto& [i, c] : v)
        if (i >= off && i < off + n) r[i - off] = c;
    return r;
}

// nu_0 and delta_H + nu_1 from the displayed formulas, evaluated with the path
// section helpers only.
inline Family expected_low_arities(const LinftyBundle& b, const DerivedPathSpace& d) {
    const int m = b.base.dim(), nl = b.fiber.dim(), tv = 2 * m;
    auto a = symbolic_path_coordinates(m);
    Family e(d.bundle.fiber, d.bundle.fiber, 1);
    auto at = [&](const Poly& c, int t) { return c.evaluate_var(tv, Q(t)); };

    Vec nu0;
    for (int i = 0; i < m; ++i) axpy(nu0, P(m + i) - P(i), unit_vec(i));
    PathSection l0 = pullback(components(b.lambda.eval_basis({}), nl), a, 1, tv);
    PathSection lin = pi_lin(l0);
    for (int j = 0; j < nl; ++j) {
        axpy(nu0, at(lin.comp[j], 0), unit_vec(d.l0_offset + j));
        axpy(nu0, at(lin.comp[j], 1), unit_vec(d.l1_offset + j));
    }
    if (!nu0.empty()) e.set({}, nu0);

    // v_i dt -> pi_con a*(nabla_i lambda_0)
    for (int i = 0; i < m; ++i) {
        std::vector<Poly> di;
        for (auto& c : components(b.lambda.eval_basis({}), nl)) di.push_back(c.derivative(i));
        PathSection s = pullback(di, a, 1, tv);
        s.dt = true;
        PathSection con = pi_con(s);
        Vec v;
        for (int j = 0; j < nl; ++j) axpy(v, con.comp[j], unit_vec(d.ldt_offset + j));
        if (!v.empty()) e.set({i}, v);
    }
    for (int j = 0; j < nl; ++j) {
        const int k = b.fiber.deg[j];
        PathSection s = pullback(components(b.lambda.eval_basis({j}), nl), a, k + 1, tv);
        // e dt -> pi_con a*lambda~_1
        PathSection sdt = s;
        sdt.dt = true;
        PathSection con = pi_con(sdt);
        Vec v;
        for (int l = 0; l < nl; ++l) axpy(v, con.comp[l], unit_vec(d.ldt_offset + l));
        if (!v.empty()) e.set({d.ldt_offset + j}, v);
        // e@0, e@1 -> pi_lin a*lambda_1 plus delta_H
        const Poly t = Poly::var(tv);
        Vec w0, w1;
        for (int l = 0; l < nl; ++l) {
            Poly c0 = s.comp[l] * (Poly(1) - t), c1 = s.comp[l] * t;
            axpy(w0, at(c0, 0), unit_vec(d.l0_offset + l));
            axpy(w0, at(c0, 1), unit_vec(d.l1_offset + l));
            axpy(w1, at(c1, 0), unit_vec(d.l0_offset + l));
            axpy(w1, at(c1, 1), unit_vec(d.l1_offset + l));
        }
        Q sg = k % 2 == 0 ? Q(1) : Q(-1);
        axpy(w0, -sg, unit_vec(d.ldt_offset + j));
        axpy(w1, sg, unit_vec(d.ldt_offset + j));
        if (!w0.empty()) e.set({d.l0_offset + j}, w0);
        if (!w1.empty()) e.set({d.l1_offset + j}, w1);
    }
    return e;
}

// Binary bracket of the path space of amplitude2_model().  With tangent inputs
// stored last, (v dt, alpha) = -(alpha, v dt).
inline Family amplitude2_binary_bracket(const LinftyBundle& b, const DerivedPathSpace& d) {
    const int m = 2, tv = 4, f = 2;
    auto a = symbolic_path_coordinates(m);
    auto lam1 = [&](int j) { return b.lambda.eval_basis({j}).count(f) ? b.lambda.eval_basis({j}).at(f) : Poly(); };
    auto integral = [&](const Poly& c) { return poly_interval_integral(c, tv); };
    const Poly t = Poly::var(tv);
    Family expected(d.bundle.fiber, d.bundle.fiber, 1);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < 2; ++j) {
            // pi_con nabla lambda_1 on (v_i dt, e_j@0) and (v_i dt, e_j@1)
            Poly g = lam1(j).derivative(i).compose(a);
            Poly c0 = -integral(g * (Poly(1) - t)), c1 = -integral(g * t);
            if (!c0.is_zero()) expected.set({i, d.l0_offset + j}, unit_vec(d.ldt_offset + f, c0));
            if (!c1.is_zero()) expected.set({i, d.l1_offset + j}, unit_vec(d.ldt_offset + f, c1));
        }
    // x (x) y -> -pi_con (nabla lambda_1)(eta nabla lambda_0 (x), y) - pi_con (nabla lambda_1)(x, eta nabla lambda_0 (y))
    auto eta_nabla_l0 = [&](int i) {
        std::vector<Poly> s;
        for (int j = 0; j < 2; ++j) {
            Poly c = b.lambda.eval_basis({}).count(j) ? b.lambda.eval_basis({}).at(j) : Poly();
            s.push_back(-poly_eta_part(c.derivative(i).compose(a), tv));  // (-1)^1 for L^1 dt
        }
        return s;
    };
    // (nabla_k lambda_1)(sigma) for sigma a section of L^1
    auto nabla_l1 = [&](int k, const std::vector<Poly>& sigma) {
        Poly r;
        for (int j = 0; j < 2; ++j) r += lam1(j).derivative(k).compose(a) * sigma[j];
        return r;
    };
    const int x = 0, y = 1;
    // (A, y) with A of degree 1 and y = v_y dt last: nabla_y lambda_1 (A); (x, B) = -(B, x)
    Poly c = -integral(nabla_l1(y, eta_nabla_l0(x))) + integral(nabla_l1(x, eta_nabla_l0(y)));
    if (!c.is_zero()) expected.set({x, y}, unit_vec(d.ldt_offset + f, c));
    return expected;
}

inline RandomOptions small_options(int amplitude) {
    RandomOptions o;
    o.amplitude = amplitude;
    o.max_per_degree = 2;
    o.max_seed_arity = 2;
    o.max_phi_arity = 2;
    return o;
}

// Random affine or graph submanifold of R^m through pt.
inline Submanifold random_submanifold_through(std::mt19937& rng, const std::vector<Q>& pt) {
    auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
    const int m = (int)pt.size();
    const int k = uni(0, m);
    if (uni(0, 1)) {
        Matrix A;
        do {
            A = Matrix(m, k);
            for (auto& x : A.a) x = uni(-2, 2);
        } while (rank(A) != k);
        std::vector<Q> s0(k), b(m);
        for (auto& x : s0) x = uni(-1, 1);
        for (int i = 0; i < m; ++i) {
            b[i] = pt[i];
            for (int j = 0; j < k; ++j) b[i] -= A(i, j) * s0[j];
        }
        return Submanifold::affine(A, b);
    }
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<int> free(idx.begin(), idx.begin() + k);
    std::sort(free.begin(), free.end());
    std::vector<Poly> vals;
    std::vector<char> isf(m, 0);
    for (int i : free) isf[i] = 1;
    for (int i = 0; i < m; ++i) {
        if (isf[i]) continue;
        Poly v;
        for (int j = 0; j < k; ++j) v += Poly(uni(-1, 1)) * Poly::var(j, uni(1, 2));
        std::vector<Q> s;
        for (int j : free) s.push_back(pt[j]);
        v += Poly(pt[i] - (v.nvars() ? v.evaluate(s) : v.constant_term()));
        vals.push_back(v);
    }
    return Submanifold::graph(m, free, vals);
}

}  // namespace linfty::testing
