#include "linfty/graded.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace linfty {

void axpy(Vec& y, const Poly& a, const Vec& x) {
    if (a.is_zero()) return;
    for (auto& [i, c] : x) {
        auto [it, fresh] = y.emplace(i, Poly());
        it->second += a * c;
        if (it->second.is_zero()) y.erase(it);
    }
}

void axpy(Vec& y, const Q& a, const Vec& x) {
    if (a == 0) return;
    for (auto& [i, c] : x) {
        auto [it, fresh] = y.emplace(i, Poly());
        it->second += c * a;
        if (it->second.is_zero()) y.erase(it);
    }
}

Vec operator+(const Vec& a, const Vec& b) {
    Vec r = a;
    axpy(r, Q(1), b);
    return r;
}

Vec operator-(const Vec& a, const Vec& b) {
    Vec r = a;
    axpy(r, Q(-1), b);
    return r;
}

Vec operator-(const Vec& a) {
    Vec r = a;
    for (auto& [i, c] : r) c = -c;
    return r;
}

Vec operator*(const Poly& a, const Vec& x) {
    Vec r;
    axpy(r, a, x);
    return r;
}

Vec unit_vec(int i, const Poly& c) {
    Vec v;
    if (!c.is_zero()) v.emplace(i, c);
    return v;
}

std::string vec_str(const Vec& v, const std::vector<std::string>& labels, const std::vector<std::string>& coords) {
    if (v.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [i, c] : v) {
        if (!first) os << " + ";
        first = false;
        std::string name = i < (int)labels.size() ? labels[i] : "b" + std::to_string(i);
        if (c == Poly(1))
            os << name;
        else if (c.terms().size() == 1)
            os << c.str(coords) << "*" << name;
        else
            os << "(" << c.str(coords) << ")*" << name;
    }
    return os.str();
}

Vec compose_coeffs(const Vec& v, const std::vector<Poly>& values) {
    Vec r;
    for (auto& [i, c] : v) {
        Poly p = c.compose(values);
        if (!p.is_zero()) r.emplace(i, std::move(p));
    }
    return r;
}

int GradedSpace::add(int degree, std::string name) {
    deg.push_back(degree);
    label.push_back(std::move(name));
    return dim() - 1;
}

std::vector<int> GradedSpace::basis_of_degree(int d) const {
    std::vector<int> r;
    for (int i = 0; i < dim(); ++i)
        if (deg[i] == d) r.push_back(i);
    return r;
}

std::map<int, int> GradedSpace::dims() const {
    std::map<int, int> r;
    for (int d : deg) r[d]++;
    return r;
}

int GradedSpace::max_degree() const {
    if (deg.empty()) return 0;
    return *std::max_element(deg.begin(), deg.end());
}

int GradedSpace::min_degree() const {
    if (deg.empty()) return 0;
    return *std::min_element(deg.begin(), deg.end());
}

int GradedSpace::index_in_degree(int i) const {
    int c = 0;
    for (int j = 0; j < i; ++j)
        if (deg[j] == deg[i]) ++c;
    return c;
}

int GradedSpace::global_index(int degree, int idx) const {
    int c = 0;
    for (int j = 0; j < dim(); ++j)
        if (deg[j] == degree && c++ == idx) return j;
    throw std::out_of_range("no basis vector " + std::to_string(idx) + " in degree " + std::to_string(degree));
}

int GradedSpace::find(const std::string& name) const {
    for (int i = 0; i < dim(); ++i)
        if (label[i] == name) return i;
    return -1;
}

GradedSpace GradedSpace::from_dims(const std::map<int, int>& dims, const std::string& prefix) {
    GradedSpace s;
    for (auto& [d, n] : dims) {
        if (n < 0) throw std::invalid_argument("negative dimension");
        for (int i = 0; i < n; ++i) s.add(d, prefix + std::to_string(d) + "_" + std::to_string(i));
    }
    return s;
}

GradedSpace direct_sum(const GradedSpace& a, const GradedSpace& b) {
    GradedSpace s = a;
    for (int i = 0; i < b.dim(); ++i) s.add(b.deg[i], b.label[i]);
    return s;
}

int koszul_sign(const std::vector<int>& degrees, const std::vector<int>& perm) {
    const int n = (int)perm.size();
    if ((int)degrees.size() != n) throw std::invalid_argument("koszul_sign: length mismatch");
    std::vector<char> seen(n, 0);
    for (int p : perm) {
        if (p < 0 || p >= n || seen[p]) throw std::invalid_argument("koszul_sign: not a permutation");
        seen[p] = 1;
    }
    int sign = 1;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (perm[i] > perm[j] && (degrees[perm[i]] & 1) && (degrees[perm[j]] & 1)) sign = -sign;
    return sign;
}

int sort_with_sign(Key& idx, const std::vector<int>& deg) {
    int sign = 1;
    for (size_t i = 1; i < idx.size(); ++i) {
        for (size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
            if ((deg[idx[j - 1]] & 1) && (deg[idx[j]] & 1)) sign = -sign;
            std::swap(idx[j - 1], idx[j]);
        }
    }
    for (size_t i = 1; i < idx.size(); ++i)
        if (idx[i] == idx[i - 1] && (deg[idx[i]] & 1)) return 0;
    return sign;
}

namespace {

void tuples_rec(const GradedSpace& s, int n, int max_sum, int start, int sum, Key& cur, std::vector<Key>& out) {
    if ((int)cur.size() == n) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < s.dim(); ++i) {
        if (sum + s.deg[i] > max_sum) continue;
        if (!cur.empty() && cur.back() == i && (s.deg[i] & 1)) continue;
        cur.push_back(i);
        tuples_rec(s, n, max_sum, i, sum + s.deg[i], cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::vector<Key> sorted_tuples(const GradedSpace& s, int n, int max_sum) {
    std::vector<Key> out;
    Key cur;
    tuples_rec(s, n, max_sum, 0, 0, cur, out);
    return out;
}

int Family::max_arity() const {
    for (int k = (int)parts.size() - 1; k >= 0; --k)
        if (!parts[k].empty()) return k;
    return -1;
}

const std::map<Key, Vec>& Family::part(int k) const {
    static const std::map<Key, Vec> empty;
    if (k < 0 || k >= (int)parts.size()) return empty;
    return parts[k];
}

void Family::set(Key idx, const Vec& out) {
    int s = sort_with_sign(idx, src.deg);
    if (s == 0) {
        if (!out.empty()) throw std::invalid_argument("Family::set: value on a tuple with a repeated odd vector");
        return;
    }
    const size_t k = idx.size();
    if (parts.size() <= k) parts.resize(k + 1);
    if (out.empty())
        parts[k].erase(idx);
    else
        parts[k][idx] = Poly(s) * out;
}

void Family::add(Key idx, const Vec& out) {
    int s = sort_with_sign(idx, src.deg);
    if (s == 0) {
        if (!out.empty()) throw std::invalid_argument("Family::add: value on a tuple with a repeated odd vector");
        return;
    }
    const size_t k = idx.size();
    if (parts.size() <= k) parts.resize(k + 1);
    auto& slot = parts[k][idx];
    axpy(slot, Q(s), out);
    if (slot.empty()) parts[k].erase(idx);
}

Vec Family::eval_basis(Key idx) const {
    const size_t k = idx.size();
    if (k >= parts.size() || parts[k].empty()) return {};
    int s = sort_with_sign(idx, src.deg);
    if (s == 0) return {};
    auto it = parts[k].find(idx);
    if (it == parts[k].end()) return {};
    if (s == 1) return it->second;
    return -it->second;
}

namespace {

void eval_rec(const Family& f, const std::vector<Vec>& xs, size_t pos, Key& idx, const Poly& coef, Vec& out) {
    if (pos == xs.size()) {
        Vec v = f.eval_basis(idx);
        if (!v.empty()) axpy(out, coef, v);
        return;
    }
    for (auto& [i, c] : xs[pos]) {
        idx.push_back(i);
        eval_rec(f, xs, pos + 1, idx, coef * c, out);
        idx.pop_back();
    }
}

}  // namespace

Vec Family::eval(const std::vector<Vec>& xs) const {
    const size_t k = xs.size();
    if (k >= parts.size() || parts[k].empty()) return {};
    for (auto& x : xs)
        if (x.empty()) return {};
    Vec out;
    Key idx;
    eval_rec(*this, xs, 0, idx, Poly(1), out);
    return out;
}

Family Family::arity(int k) const {
    Family r(src, tgt, degree);
    if (has_arity(k)) {
        r.parts.resize(k + 1);
        r.parts[k] = parts[k];
    }
    return r;
}

Family Family::up_to(int k) const {
    Family r(src, tgt, degree);
    for (int j = 0; j <= k && j < (int)parts.size(); ++j) {
        if (parts[j].empty()) continue;
        r.parts.resize(j + 1);
        r.parts[j] = parts[j];
    }
    return r;
}

void Family::prune() {
    for (auto& p : parts)
        for (auto it = p.begin(); it != p.end();)
            it = it->second.empty() ? p.erase(it) : std::next(it);
    while (!parts.empty() && parts.back().empty()) parts.pop_back();
}

std::string Family::validate() const {
    for (size_t k = 0; k < parts.size(); ++k) {
        for (auto& [key, out] : parts[k]) {
            Key s = key;
            int sign = sort_with_sign(s, src.deg);
            if (s != key) return "arity " + std::to_string(k) + ": unsorted key";
            if (sign == 0) return "arity " + std::to_string(k) + ": repeated odd input";
            int d = degree;
            for (int i : key) {
                if (i < 0 || i >= src.dim()) return "input index out of range";
                d += src.deg[i];
            }
            for (auto& [j, c] : out) {
                if (j < 0 || j >= tgt.dim()) return "output index out of range";
                if (tgt.deg[j] != d)
                    return "arity " + std::to_string(k) + ": output degree " + std::to_string(tgt.deg[j]) +
                           " but expected " + std::to_string(d);
            }
        }
    }
    return {};
}

bool operator==(const Family& a, const Family& b) {
    if (a.src != b.src || a.tgt != b.tgt || a.degree != b.degree) return false;
    int n = std::max(a.max_arity(), b.max_arity());
    for (int k = 0; k <= n; ++k)
        if (a.part(k) != b.part(k)) return false;
    return true;
}

namespace {

Family combine(const Family& a, const Family& b, const Q& sb) {
    if (a.src != b.src || a.tgt != b.tgt || a.degree != b.degree)
        throw std::invalid_argument("Family: incompatible summands");
    Family r = a;
    for (int k = 0; k <= b.max_arity(); ++k)
        for (auto& [key, v] : b.part(k)) r.add(key, Poly(sb) * v);
    r.prune();
    return r;
}

}  // namespace

Family operator+(const Family& a, const Family& b) { return combine(a, b, Q(1)); }
Family operator-(const Family& a, const Family& b) { return combine(a, b, Q(-1)); }

Family operator*(const Poly& c, const Family& a) {
    Family r(a.src, a.tgt, a.degree);
    for (int k = 0; k <= a.max_arity(); ++k)
        for (auto& [key, v] : a.part(k)) r.add(key, c * v);
    r.prune();
    return r;
}

Family identity_family(const GradedSpace& s) {
    return linear_family(s, s, 0, [](int i) { return unit_vec(i); });
}

Family linear_family(const GradedSpace& src, const GradedSpace& tgt, int degree, const std::function<Vec(int)>& column) {
    Family f(src, tgt, degree);
    for (int i = 0; i < src.dim(); ++i) {
        Vec v = column(i);
        if (!v.empty()) f.set({i}, v);
    }
    return f;
}

Family compose_coeffs(const Family& f, const std::vector<Poly>& values) {
    Family r(f.src, f.tgt, f.degree);
    for (int k = 0; k <= f.max_arity(); ++k)
        for (auto& [key, v] : f.part(k)) {
            Vec w = compose_coeffs(v, values);
            if (!w.empty()) r.set(key, w);
        }
    return r;
}

Family rename_coeffs(const Family& f, const std::vector<int>& map) {
    Family r(f.src, f.tgt, f.degree);
    for (int k = 0; k <= f.max_arity(); ++k)
        for (auto& [key, v] : f.part(k)) {
            Vec w;
            for (auto& [i, c] : v) w.emplace(i, c.rename(map));
            r.set(key, w);
        }
    return r;
}

int arity_bound(const GradedSpace& src, const GradedSpace& tgt, int degree) {
    if (tgt.empty()) return -1;
    if (src.empty()) return 0;
    int dmin = src.min_degree();
    if (dmin < 1) throw std::invalid_argument("arity_bound: source has non-positive degrees");
    int room = tgt.max_degree() - degree;
    if (room < 0) return -1;
    return room / dmin;
}

Evaluator evaluator(const Family& f) {
    return [&f](const std::vector<Vec>& xs) { return f.eval(xs); };
}

namespace {

std::vector<Vec> pick(const std::vector<Vec>& xs, const std::vector<int>& p, size_t from, size_t to) {
    std::vector<Vec> r;
    r.reserve(to - from);
    for (size_t i = from; i < to; ++i) r.push_back(xs[p[i]]);
    return r;
}

void compositions(int n, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (n == 0) {
        out.push_back(cur);
        return;
    }
    for (int a = 1; a <= n; ++a) {
        cur.push_back(a);
        compositions(n - a, cur, out);
        cur.pop_back();
    }
}

void set_partitions(int n, int i, std::vector<int>& rgs, int nblocks, std::vector<std::vector<int>>& out) {
    if (i == n) {
        out.push_back(rgs);
        return;
    }
    for (int b = 0; b <= nblocks; ++b) {
        rgs[i] = b;
        set_partitions(n, i + 1, rgs, std::max(nblocks, b + 1), out);
    }
}

bool use_literal(SumMode mode, size_t n) {
    return mode == SumMode::Literal || (mode == SumMode::Auto && n <= 4);
}

}  // namespace

Vec circ_apply(const Evaluator& lam, const Evaluator& mu, const std::vector<Vec>& xs, const std::vector<int>& degs,
               SumMode mode) {
    const int n = (int)xs.size();
    Vec res;
    if (use_literal(mode, n)) {
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        do {
            int sign = koszul_sign(degs, p);
            for (int k = 0; k <= n; ++k) {
                Vec m = mu(pick(xs, p, 0, k));
                if (m.empty()) continue;
                std::vector<Vec> args{m};
                for (int j = k; j < n; ++j) args.push_back(xs[p[j]]);
                Vec r = lam(args);
                if (r.empty()) continue;
                axpy(res, Q(sign) / (factorial(k) * factorial(n - k)), r);
            }
        } while (std::next_permutation(p.begin(), p.end()));
        return res;
    }
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> p;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) p.push_back(i);
        const int k = (int)p.size();
        for (int i = 0; i < n; ++i)
            if (!(mask & (1u << i))) p.push_back(i);
        Vec m = mu(pick(xs, p, 0, k));
        if (m.empty()) continue;
        std::vector<Vec> args{m};
        for (int j = k; j < n; ++j) args.push_back(xs[p[j]]);
        Vec r = lam(args);
        if (!r.empty()) axpy(res, Q(koszul_sign(degs, p)), r);
    }
    return res;
}

Vec bullet_apply(const Evaluator& lam, const Evaluator& phi, const std::vector<Vec>& xs, const std::vector<int>& degs,
                 SumMode mode) {
    const int n = (int)xs.size();
    if (n == 0) return lam({});
    Vec res;
    if (use_literal(mode, n)) {
        std::vector<std::vector<int>> comps;
        std::vector<int> cur;
        compositions(n, cur, comps);
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        do {
            int sign = koszul_sign(degs, p);
            for (auto& c : comps) {
                std::vector<Vec> args;
                Q coef = factorial((int)c.size());
                size_t at = 0;
                bool zero = false;
                for (int len : c) {
                    Vec v = phi(pick(xs, p, at, at + len));
                    at += len;
                    coef *= factorial(len);
                    if (v.empty()) {
                        zero = true;
                        break;
                    }
                    args.push_back(std::move(v));
                }
                if (zero) continue;
                Vec r = lam(args);
                if (!r.empty()) axpy(res, Q(sign) / coef, r);
            }
        } while (std::next_permutation(p.begin(), p.end()));
        return res;
    }
    std::vector<std::vector<int>> parts;
    std::vector<int> rgs(n, 0);
    set_partitions(n, 0, rgs, 0, parts);
    for (auto& g : parts) {
        int nb = *std::max_element(g.begin(), g.end()) + 1;
        std::vector<int> p;
        std::vector<size_t> cut{0};
        for (int b = 0; b < nb; ++b) {
            for (int i = 0; i < n; ++i)
                if (g[i] == b) p.push_back(i);
            cut.push_back(p.size());
        }
        std::vector<Vec> args;
        bool zero = false;
        for (int b = 0; b < nb && !zero; ++b) {
            Vec v = phi(pick(xs, p, cut[b], cut[b + 1]));
            if (v.empty()) zero = true;
            args.push_back(std::move(v));
        }
        if (zero) continue;
        Vec r = lam(args);
        if (!r.empty()) axpy(res, Q(koszul_sign(degs, p)), r);
    }
    return res;
}

namespace {

std::vector<Vec> basis_inputs(const Key& x) {
    std::vector<Vec> xs;
    for (int i : x) xs.push_back(unit_vec(i));
    return xs;
}

std::vector<int> degrees_of(const GradedSpace& s, const Key& x) {
    std::vector<int> d;
    for (int i : x) d.push_back(s.deg[i]);
    return d;
}

template <class At>
Family materialise(const GradedSpace& src, const GradedSpace& tgt, int degree, int max_arity, At at) {
    Family r(src, tgt, degree);
    auto tdims = tgt.dims();
    for (int n = 0; n <= max_arity; ++n) {
        for (const Key& x : sorted_tuples(src, n, tgt.max_degree() - degree)) {
            int d = degree;
            for (int i : x) d += src.deg[i];
            if (!tdims.count(d)) continue;
            Vec v = at(x);
            if (!v.empty()) r.set(x, v);
        }
    }
    return r;
}

}  // namespace

Vec circ_at(const Family& lam, const Family& mu, const Key& x, SumMode mode) {
    return circ_apply(evaluator(lam), evaluator(mu), basis_inputs(x), degrees_of(mu.src, x), mode);
}

Vec bullet_at(const Family& lam, const Family& phi, const Key& x, SumMode mode) {
    return bullet_apply(evaluator(lam), evaluator(phi), basis_inputs(x), degrees_of(phi.src, x), mode);
}

Family circ(const Family& lam, const Family& mu, SumMode mode, int max_arity) {
    if (lam.src != mu.src || mu.src != mu.tgt) throw std::invalid_argument("circ: space mismatch");
    int deg = lam.degree + mu.degree;
    if (max_arity < 0) {
        if (lam.is_zero() || mu.is_zero()) return Family(mu.src, lam.tgt, deg);
        max_arity = std::min(arity_bound(mu.src, lam.tgt, deg), lam.max_arity() + mu.max_arity() - 1);
    }
    return materialise(mu.src, lam.tgt, deg, max_arity, [&](const Key& x) { return circ_at(lam, mu, x, mode); });
}

Family bullet(const Family& lam, const Family& phi, SumMode mode, int max_arity) {
    if (lam.src != phi.tgt) throw std::invalid_argument("bullet: space mismatch");
    int deg = lam.degree + phi.degree;
    if (max_arity < 0) {
        if (lam.is_zero()) return Family(phi.src, lam.tgt, deg);
        int pa = std::max(phi.max_arity(), 1);
        max_arity = std::min(arity_bound(phi.src, lam.tgt, deg), lam.max_arity() * pa);
    }
    return materialise(phi.src, lam.tgt, deg, max_arity, [&](const Key& x) { return bullet_at(lam, phi, x, mode); });
}

Family push_forward(const Family& lin, const Family& f) {
    Family r(f.src, lin.tgt, f.degree + lin.degree);
    for (int k = 0; k <= f.max_arity(); ++k)
        for (auto& [key, v] : f.part(k)) {
            Vec out;
            for (auto& [i, c] : v) axpy(out, c, lin.eval_basis({i}));
            if (!out.empty()) r.set(key, out);
        }
    return r;
}

Family commutator(const Family& lam, const Family& mu, SumMode mode) {
    Family a = circ(lam, mu, mode);
    Family b = circ(mu, lam, mode);
    bool odd = (lam.degree & 1) && (mu.degree & 1);
    return odd ? a + b : a - b;
}

}  // namespace linfty
