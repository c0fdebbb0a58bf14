#include "linfty/transfer.hpp"

#include <algorithm>
#include <memory>
#include <numeric>

namespace linfty {

namespace {

Family lin_compose(const Family& f, const Family& g) {
    return linear_family(g.src, f.tgt, f.degree + g.degree, [&](int j) { return f.apply(g.eval_basis({j})); });
}

std::vector<Vec> units(const Key& y) {
    std::vector<Vec> xs;
    for (int j : y) xs.push_back(unit_vec(j));
    return xs;
}

std::vector<int> degs_of(const GradedSpace& s, const Key& y) {
    std::vector<int> d;
    for (int j : y) d.push_back(s.deg[j]);
    return d;
}

int degree_sum(const GradedSpace& s, const Key& y) {
    int d = 0;
    for (int j : y) d += s.deg[j];
    return d;
}

// sum_j (-step)^j v
Vec neumann(const Vec& v, const LinearFn& step, int limit) {
    Vec acc, term = v;
    for (int j = 0; !term.empty(); ++j) {
        if (j > limit) throw MathError("perturbation series does not terminate; the filtration is not respected");
        acc = acc + term;
        term = -step(term);
    }
    return acc;
}

int series_limit(const Contraction& c) { return c.L.dim() + c.weight_range() + 2; }

void check_lambda(const Contraction& c, const Family& lambda) {
    if (lambda.src != c.L || lambda.tgt != c.L) throw std::invalid_argument("transfer: lambda does not act on L");
    if (lambda.degree != 1) throw std::invalid_argument("transfer: lambda must have degree 1");
}

}  // namespace

Family Contraction::delta_h_family() const {
    return linear_family(H, H, 1, [&](int j) { return delta_h(unit_vec(j)); });
}

int Contraction::weight_range() const {
    if (weight.empty()) return L.empty() ? 0 : L.max_degree() - L.min_degree();
    auto [lo, hi] = std::minmax_element(weight.begin(), weight.end());
    return *hi - *lo;
}

DerivedH derive_h(const GradedSpace& L, const Family& delta, const Family& eta) {
    if (delta.src != L || delta.tgt != L || delta.degree != 1 || delta.max_arity() > 1 || delta.has_arity(0))
        throw std::invalid_argument("derive_h: delta must be a degree 1 linear map on L");
    if (eta.src != L || eta.tgt != L || eta.degree != -1 || eta.max_arity() > 1 || eta.has_arity(0))
        throw std::invalid_argument("derive_h: eta must be a degree -1 linear map on L");
    if (!lin_compose(delta, delta).is_zero()) throw MathError("delta does not square to zero");
    if (!lin_compose(eta, eta).is_zero()) throw MathError("eta does not square to zero");
    if (lin_compose(eta, lin_compose(delta, eta)) != eta) throw MathError("eta delta eta differs from eta");

    Family P = identity_family(L) - lin_compose(delta, eta) - lin_compose(eta, delta);
    DerivedH out;
    std::vector<std::pair<int, Matrix>> cols;  // degree, iota block
    std::vector<int> pivot_global;
    for (auto& [d, n] : L.dims()) {
        PMatrix pb = block(P, d, d);
        if (!pb.is_constant()) throw MathError("contraction data must have constant coefficients");
        Matrix m = pb.constant();
        Echelon e = rref(m);
        auto lb = L.basis_of_degree(d);
        for (int p : e.pivots) {
            out.H.add(d, L.label[lb[p]]);
            pivot_global.push_back(lb[p]);
        }
    }
    out.iota = linear_family(out.H, L, 0, [&](int j) { return P.eval_basis({pivot_global[j]}); });
    out.pi = Family(L, out.H, 0);
    for (auto& [d, n] : L.dims()) {
        auto lb = L.basis_of_degree(d);
        auto hb = out.H.basis_of_degree(d);
        if (hb.empty()) continue;
        Matrix I((int)lb.size(), (int)hb.size());
        for (size_t c = 0; c < hb.size(); ++c)
            for (auto& [i, v] : out.iota.eval_basis({hb[c]})) I(L.index_in_degree(i), (int)c) = v.constant_term();
        for (int i : lb) {
            Vec pv = P.eval_basis({i});
            std::vector<Q> rhs(lb.size());
            for (auto& [r, v] : pv) rhs[L.index_in_degree(r)] = v.constant_term();
            auto x = solve(I, rhs);
            if (!x) throw MathError("projection does not land in H");
            Vec hv;
            for (size_t c = 0; c < hb.size(); ++c)
                if ((*x)[c] != 0) hv.emplace(hb[c], Poly((*x)[c]));
            out.pi.set({i}, hv);
        }
    }
    if (lin_compose(out.pi, out.iota) != identity_family(out.H)) throw MathError("pi iota differs from the identity");
    return out;
}

Contraction make_contraction(const GradedSpace& L, const Family& delta, const Family& eta, std::vector<int> weight) {
    DerivedH d = derive_h(L, delta, eta);
    auto fc = std::make_shared<FiniteContraction>(FiniteContraction{delta, eta, d.iota, d.pi});
    Contraction c;
    c.L = L;
    c.H = d.H;
    c.delta = [fc](const Vec& v) { return fc->delta.apply(v); };
    c.eta = [fc](const Vec& v) { return fc->eta.apply(v); };
    c.iota = [fc](const Vec& v) { return fc->iota.apply(v); };
    c.pi = [fc](const Vec& v) { return fc->pi.apply(v); };
    if (!weight.empty() && (int)weight.size() != L.dim()) throw std::invalid_argument("make_contraction: weight size");
    c.weight = weight.empty() ? L.deg : std::move(weight);
    c.finite = *fc;
    return c;
}

Transferred transfer(const Contraction& c, const Family& lambda) {
    check_lambda(c, lambda);
    Transferred out;
    out.phi = Family(c.H, c.L, 0);
    out.mu = Family(c.H, c.H, 1);
    if (lambda.has_arity(0)) out.mu.set({}, c.pi(lambda.eval_basis({})));
    if (c.H.empty()) {
        out.algebra = CurvedAlgebra(c.H);
        return out;
    }
    const int bound = arity_bound(c.H, c.L, 0);
    const int limit = series_limit(c);
    auto Ldims = c.L.dims(), Hdims = c.H.dims();
    Family& phi = out.phi;
    Evaluator lam = evaluator(lambda), ph = evaluator(phi);
    LinearFn step = [&](const Vec& v) { return c.eta(lambda.apply(v)); };
    for (int n = 1; n <= bound; ++n) {
        for (const Key& y : sorted_tuples(c.H, n, c.L.max_degree())) {
            int d = degree_sum(c.H, y);
            if (!Ldims.count(d) && !Hdims.count(d + 1)) continue;
            auto xs = units(y);
            Vec rest = bullet_apply(lam, ph, xs, degs_of(c.H, y));
            Vec base = n == 1 ? c.iota(xs[0]) : Vec{};
            base = base - c.eta(rest);
            Vec x = neumann(base, step, limit);
            if (!x.empty()) phi.set(y, x);
            Vec m = c.pi(rest + lambda.apply(x));
            if (!m.empty()) out.mu.set(y, m);
        }
    }
    out.algebra = CurvedAlgebra(c.H);
    out.algebra.delta = c.delta_h_family();
    out.algebra.lambda = out.mu;
    return out;
}

std::vector<TreeShape> tree_shapes(int max_leaves, int max_nodes) {
    std::vector<TreeShape> shapes{TreeShape{{}, 1, 0, Q(1)}};
    for (int c = 1; c <= max_nodes; ++c) {
        const int known = (int)shapes.size();
        std::vector<int> cur;
        std::function<void(int, int, int)> rec = [&](int start, int remaining, int leaves) {
            if (remaining == 0 && !cur.empty()) {
                TreeShape t;
                t.children = cur;
                t.leaves = leaves;
                t.nodes = c;
                Q coef = -factorial(leaves);
                for (size_t i = 0; i < cur.size();) {
                    size_t j = i;
                    while (j < cur.size() && cur[j] == cur[i]) ++j;
                    coef /= factorial((int)(j - i));
                    i = j;
                }
                for (int ch : cur) coef *= shapes[ch].coeff / factorial(shapes[ch].leaves);
                t.coeff = coef;
                shapes.push_back(t);
            }
            for (int id = start; id < known; ++id) {
                const TreeShape& s = shapes[id];
                if (s.nodes > remaining || leaves + s.leaves > max_leaves) continue;
                cur.push_back(id);
                rec(id, remaining - s.nodes, leaves + s.leaves);
                cur.pop_back();
            }
        };
        rec(0, c - 1, 0);
    }
    return shapes;
}

namespace {

// Planar evaluation; root_map is eta for phi trees and pi for mu trees.
Vec eval_shape(const std::vector<TreeShape>& shapes, int id, const Family& lambda, const Contraction& c,
               const std::vector<Vec>& ys, size_t& pos, bool root, bool mu_root) {
    const TreeShape& t = shapes[id];
    if (t.children.empty()) return c.iota(ys[pos++]);
    std::vector<Vec> args;
    bool zero = false;
    for (int ch : t.children) {
        Vec v = eval_shape(shapes, ch, lambda, c, ys, pos, false, false);
        if (v.empty()) zero = true;
        args.push_back(std::move(v));
    }
    if (zero) return {};
    Vec v = lambda.eval(args);
    if (v.empty()) return {};
    return (root && mu_root) ? c.pi(v) : c.eta(v);
}

Vec symmetrised(const std::vector<TreeShape>& shapes, int id, const Family& lambda, const Contraction& c,
                const Key& y, bool mu_root) {
    auto xs = units(y);
    auto degs = degs_of(c.H, y);
    std::vector<int> p(y.size());
    std::iota(p.begin(), p.end(), 0);
    Vec acc;
    do {
        std::vector<Vec> ys;
        for (int i : p) ys.push_back(xs[i]);
        size_t pos = 0;
        Vec v = eval_shape(shapes, id, lambda, c, ys, pos, true, mu_root);
        if (!v.empty()) axpy(acc, Q(koszul_sign(degs, p)), v);
    } while (std::next_permutation(p.begin(), p.end()));
    return acc;
}

}  // namespace

Transferred transfer_trees(const Contraction& c, const Family& lambda) {
    check_lambda(c, lambda);
    Transferred out;
    out.phi = Family(c.H, c.L, 0);
    out.mu = Family(c.H, c.H, 1);
    if (lambda.has_arity(0)) out.mu.set({}, c.pi(lambda.eval_basis({})));
    out.algebra = CurvedAlgebra(c.H);
    if (c.H.empty()) return out;
    const int bound = arity_bound(c.H, c.L, 0);
    const int nodes = c.weight_range() + 2;
    Family lam_pos = lambda;
    if (lam_pos.has_arity(0)) lam_pos.parts[0].clear();
    auto shapes = tree_shapes(std::max(bound, 1), nodes);
    auto Ldims = c.L.dims(), Hdims = c.H.dims();
    for (int n = 1; n <= bound; ++n) {
        for (const Key& y : sorted_tuples(c.H, n, c.L.max_degree())) {
            int d = degree_sum(c.H, y);
            Vec phi_v, mu_v;
            for (int id = 0; id < (int)shapes.size(); ++id) {
                const TreeShape& t = shapes[id];
                if (t.leaves != n) continue;
                Q w = t.coeff / factorial(n);
                if (Ldims.count(d) && t.nodes < nodes) axpy(phi_v, w, symmetrised(shapes, id, lam_pos, c, y, false));
                if (Hdims.count(d + 1) && !t.children.empty())
                    axpy(mu_v, -w, symmetrised(shapes, id, lam_pos, c, y, true));
            }
            if (!phi_v.empty()) out.phi.set(y, phi_v);
            if (!mu_v.empty()) out.mu.set(y, mu_v);
        }
    }
    out.algebra.delta = c.delta_h_family();
    out.algebra.lambda = out.mu;
    return out;
}

namespace {

using Sym = std::map<Key, Poly>;

void sym_add(Sym& s, Key k, const Poly& c, const std::vector<int>& deg) {
    int sg = sort_with_sign(k, deg);
    if (sg == 0 || c.is_zero()) return;
    auto& slot = s[k];
    slot += Poly(sg) * c;
    if (slot.is_zero()) s.erase(k);
}

}  // namespace

Family projection_morphism(const Contraction& c, const Family& lambda) {
    check_lambda(c, lambda);
    if (!c.finite) throw std::invalid_argument("projection_morphism: needs a contraction given by families");
    const FiniteContraction& F = *c.finite;
    const GradedSpace& L = c.L;

    // Adapted basis: iota(H) followed by a basis of K = im(delta eta + eta delta), degree by degree.
    Family K = lin_compose(F.delta, F.eta) + lin_compose(F.eta, F.delta);
    GradedSpace A;
    std::vector<Vec> cols;
    for (int j = 0; j < c.H.dim(); ++j) {
        A.add(c.H.deg[j], c.H.label[j]);
        cols.push_back(F.iota.eval_basis({j}));
    }
    const int h = c.H.dim();
    for (auto& [d, n] : L.dims()) {
        PMatrix kb = block(K, d, d);
        if (!kb.is_constant()) throw MathError("contraction data must have constant coefficients");
        Matrix cb = column_basis(kb.constant());
        auto lb = L.basis_of_degree(d);
        for (int j = 0; j < cb.cols; ++j) {
            A.add(d, "k" + std::to_string(A.dim() - h));
            Vec v;
            for (int i = 0; i < cb.rows; ++i)
                if (cb(i, j) != 0) v.emplace(lb[i], Poly(cb(i, j)));
            cols.push_back(v);
        }
    }
    if (A.dim() != L.dim()) throw MathError("iota(H) and the image of [delta, eta] do not span L");
    Matrix Bm(L.dim(), A.dim());
    for (int j = 0; j < A.dim(); ++j)
        for (auto& [i, v] : cols[j]) Bm(i, j) = v.constant_term();
    auto Binv = inverse(Bm);
    if (!Binv) throw MathError("iota(H) and the image of [delta, eta] are not complementary");
    Family Bf = family_from_matrix(A, L, 0, PMatrix::from(Bm));
    Family Bif = family_from_matrix(L, A, 0, PMatrix::from(*Binv));
    Family lamA = push_forward(Bif, bullet(lambda, Bf, SumMode::Auto, arity_bound(A, L, 1)));
    Family etaA = lin_compose(Bif, lin_compose(F.eta, Bf));
    Family piA = lin_compose(F.pi, Bf);
    const auto& degA = A.deg;

    auto homotopy = [&](const Sym& s) {
        Sym out;
        for (auto& [key, coef] : s) {
            int q = 0;
            for (int i : key) q += i >= h;
            if (q == 0) continue;
            int before = 0;
            for (size_t i = 0; i < key.size(); ++i) {
                Vec ev = etaA.eval_basis({key[i]});
                Poly sc = coef * Poly(Q((before & 1) ? -1 : 1, q));
                for (auto& [t, ct] : ev) {
                    Key nk = key;
                    nk[i] = t;
                    sym_add(out, nk, sc * ct, degA);
                }
                before += degA[key[i]];
            }
        }
        return out;
    };
    auto coder = [&](const Sym& s) {
        Sym out;
        for (auto& [key, coef] : s) {
            const int n = (int)key.size();
            std::vector<int> degs;
            for (int i : key) degs.push_back(degA[i]);
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                Key I, J;
                std::vector<int> p;
                for (int i = 0; i < n; ++i)
                    if (mask & (1u << i)) {
                        I.push_back(key[i]);
                        p.push_back(i);
                    }
                for (int i = 0; i < n; ++i)
                    if (!(mask & (1u << i))) {
                        J.push_back(key[i]);
                        p.push_back(i);
                    }
                Vec v = lamA.eval_basis(I);
                if (v.empty()) continue;
                Poly sc = coef * Poly(koszul_sign(degs, p));
                for (auto& [t, ct] : v) {
                    Key nk{t};
                    nk.insert(nk.end(), J.begin(), J.end());
                    sym_add(out, nk, sc * ct, degA);
                }
            }
        }
        return out;
    };
    std::map<Key, Vec> memo;
    auto pitA = [&](const Key& key) -> const Vec& {
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        Sym s{{key, Poly(1)}};
        Vec acc;
        for (int j = 0; !s.empty(); ++j) {
            if (j > 256) throw MathError("coalgebra perturbation series does not terminate");
            for (auto& [k, cf] : s)
                if (k.size() == 1) axpy(acc, Poly((j & 1) ? -1 : 1) * cf, piA.eval_basis(k));
            s = coder(homotopy(s));
        }
        return memo.emplace(key, acc).first->second;
    };

    Family out(L, c.H, 0);
    if (c.H.empty()) return out;
    const int bound = arity_bound(L, c.H, 0);
    auto Hdims = c.H.dims();
    for (int n = 1; n <= bound; ++n) {
        for (const Key& x : sorted_tuples(L, n, c.H.max_degree())) {
            if (!Hdims.count(degree_sum(L, x))) continue;
            Vec acc;
            std::function<void(size_t, Key&, Poly)> expand = [&](size_t pos, Key& bk, Poly cf) {
                if (pos == x.size()) {
                    Key k = bk;
                    int sg = sort_with_sign(k, degA);
                    if (sg) axpy(acc, cf * Poly(sg), pitA(k));
                    return;
                }
                for (int b = 0; b < A.dim(); ++b) {
                    const Q& e = (*Binv)(b, x[pos]);
                    if (e == 0) continue;
                    bk.push_back(b);
                    expand(pos + 1, bk, cf * Poly(e));
                    bk.pop_back();
                }
            };
            Key bk;
            expand(0, bk, Poly(1));
            if (!acc.empty()) out.set(x, acc);
        }
    }
    return out;
}

ClosedForms linear_closed_forms(const Contraction& c, const Family& lambda) {
    check_lambda(c, lambda);
    const int limit = series_limit(c);
    LinearFn el = [&](const Vec& v) { return c.eta(lambda.apply(v)); };
    LinearFn le = [&](const Vec& v) { return lambda.apply(c.eta(v)); };
    ClosedForms f;
    f.phi1 = linear_family(c.H, c.L, 0, [&](int j) { return neumann(c.iota(unit_vec(j)), el, limit); });
    f.mu1 = linear_family(c.H, c.H, 1, [&](int j) { return c.pi(lambda.apply(f.phi1.eval_basis({j}))); });
    f.pitilde1 = linear_family(c.L, c.H, 0, [&](int i) { return c.pi(neumann(unit_vec(i), le, limit)); });
    if (lambda.has_arity(0)) f.mu0 = c.pi(lambda.eval_basis({}));
    return f;
}

PerturbationReport perturbation_check(const Contraction& c, const Family& lambda) {
    check_lambda(c, lambda);
    for (int k = 0; k <= lambda.max_arity(); ++k)
        if (k != 1 && lambda.has_arity(k)) throw std::invalid_argument("perturbation_check: lambda must be linear");
    const int limit = series_limit(c);
    Family phi = transfer(c, lambda).phi.arity(1);
    Family pt = projection_morphism(c, lambda).arity(1);
    LinearFn le = [&](const Vec& v) { return lambda.apply(c.eta(v)); };
    auto eta_t = [&](const Vec& v) { return c.eta(neumann(v, le, limit)); };
    auto D = [&](const Vec& v) { return c.delta(v) + lambda.apply(v); };
    PerturbationReport r;
    for (int i = 0; i < c.L.dim() && r.phi_pitilde; ++i) {
        Vec e = unit_vec(i);
        Vec lhs = phi.apply(pt.apply(e));
        Vec rhs = e - (D(eta_t(e)) + eta_t(D(e)));
        if (lhs != rhs) {
            r.phi_pitilde = false;
            r.detail = "phi pi~ differs from 1 - [delta + lambda, eta~] on " + c.L.label[i];
        }
    }
    for (int j = 0; j < c.H.dim() && r.pitilde_phi; ++j)
        if (pt.apply(phi.eval_basis({j})) != unit_vec(j)) {
            r.pitilde_phi = false;
            if (r.detail.empty()) r.detail = "pi~ phi differs from the identity on " + c.H.label[j];
        }
    r.ok = r.phi_pitilde && r.pitilde_phi;
    return r;
}

}  // namespace linfty
