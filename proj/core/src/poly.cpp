#include "linfty/poly.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace linfty {

namespace {

void trim(Mono& m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
}

Mono mono_mul(const Mono& a, const Mono& b) {
    Mono r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

std::atomic<int> g_cap{-1};

}  // namespace

Poly::Poly(const Q& c) {
    if (c == 0) return;
    Q v = c;
    v.canonicalize();
    terms_.emplace(Mono{}, v);
}

Poly Poly::var(int i, int power) {
    if (i < 0 || power < 0) throw std::invalid_argument("Poly::var: negative index or power");
    Mono m(i + 1, 0);
    m[i] = power;
    trim(m);
    Poly p;
    p.terms_.emplace(std::move(m), Q(1));
    return p;
}

Poly Poly::monomial(Mono exps, const Q& c) {
    trim(exps);
    Poly p;
    Q v = c;
    v.canonicalize();
    if (v != 0) p.terms_.emplace(std::move(exps), v);
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Q Poly::constant_term() const {
    auto it = terms_.find(Mono{});
    return it == terms_.end() ? Q(0) : it->second;
}

int Poly::nvars() const {
    int n = 0;
    for (auto& [m, c] : terms_) n = std::max<int>(n, m.size());
    return n;
}

int Poly::total_degree() const {
    int d = -1;
    for (auto& [m, c] : terms_) {
        int s = 0;
        for (int e : m) s += e;
        d = std::max(d, s);
    }
    return d;
}

int Poly::degree_in(int var) const {
    int d = -1;
    for (auto& [m, c] : terms_) d = std::max(d, var < (int)m.size() ? m[var] : 0);
    return d;
}

void Poly::add_term(const Mono& m, const Q& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly& Poly::operator+=(const Poly& o) {
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    if (a.is_zero() || b.is_zero()) return r;
    if (a.is_constant()) return Poly(b) *= a.constant_term();
    if (b.is_constant()) return Poly(a) *= b.constant_term();
    for (auto& [ma, ca] : a.terms_)
        for (auto& [mb, cb] : b.terms_) r.add_term(mono_mul(ma, mb), ca * cb);
    return r;
}

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly& Poly::operator*=(const Q& c0) {
    Q c = c0;
    c.canonicalize();
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

Poly Poly::operator-() const {
    Poly r(*this);
    for (auto& [m, v] : r.terms_) v = -v;
    return r;
}

Poly Poly::derivative(int var) const {
    Poly r;
    for (auto& [m, c] : terms_) {
        if (var >= (int)m.size() || m[var] == 0) continue;
        Mono n = m;
        Q k = c * n[var];
        n[var] -= 1;
        trim(n);
        r.add_term(n, k);
    }
    return r;
}

Poly Poly::antiderivative(int var) const {
    Poly r;
    for (auto& [m, c] : terms_) {
        Mono n = m;
        if ((int)n.size() <= var) n.resize(var + 1, 0);
        n[var] += 1;
        r.add_term(n, c / Q(n[var]));
    }
    return r;
}

Poly Poly::substitute(int var, const Poly& value) const {
    Poly r;
    std::vector<Poly> powers{Poly(1)};
    for (auto& [m, c] : terms_) {
        int e = var < (int)m.size() ? m[var] : 0;
        while ((int)powers.size() <= e) powers.push_back(powers.back() * value);
        Mono rest = m;
        if (var < (int)rest.size()) rest[var] = 0;
        trim(rest);
        r += Poly::monomial(rest, c) * powers[e];
    }
    return r;
}

Poly Poly::compose(const std::vector<Poly>& values) const {
    if (nvars() > (int)values.size())
        throw std::invalid_argument("Poly::compose: too few substitution values");
    std::vector<std::vector<Poly>> powers(values.size(), std::vector<Poly>{Poly(1)});
    Poly r;
    for (auto& [m, c] : terms_) {
        Poly t(c);
        for (size_t i = 0; i < m.size(); ++i) {
            auto& pw = powers[i];
            while ((int)pw.size() <= m[i]) pw.push_back(pw.back() * values[i]);
            if (m[i] > 0) t *= pw[m[i]];
        }
        r += t;
    }
    return r;
}

Poly Poly::evaluate_var(int var, const Q& v) const { return substitute(var, Poly(v)); }

Q Poly::evaluate(const std::vector<Q>& point) const {
    if (nvars() > (int)point.size()) throw std::invalid_argument("Poly::evaluate: point too short");
    Q r = 0;
    for (auto& [m, c] : terms_) {
        Q t = c;
        for (size_t i = 0; i < m.size(); ++i)
            for (int k = 0; k < m[i]; ++k) t *= point[i];
        r += t;
    }
    return r;
}

double Poly::evaluate(const std::vector<double>& point) const {
    if (nvars() > (int)point.size()) throw std::invalid_argument("Poly::evaluate: point too short");
    double r = 0;
    for (auto& [m, c] : terms_) {
        double t = c.get_d();
        for (size_t i = 0; i < m.size(); ++i) t *= std::pow(point[i], m[i]);
        r += t;
    }
    return r;
}

Poly Poly::rename(const std::vector<int>& map) const {
    Poly r;
    for (auto& [m, c] : terms_) {
        Mono n;
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (i >= map.size()) throw std::invalid_argument("Poly::rename: variable not mapped");
            int j = map[i];
            if ((int)n.size() <= j) n.resize(j + 1, 0);
            n[j] += m[i];
        }
        trim(n);
        r.add_term(n, c);
    }
    return r;
}

std::string Poly::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        auto& [m, c] = *it;
        Q a = abs(c);
        os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
        bool unit = (a == 1) && !m.empty();
        if (!unit) os << q_to_string(a);
        bool star = !unit;
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (star) os << "*";
            os << (i < names.size() ? names[i] : "x" + std::to_string(i));
            if (m[i] > 1) os << "^" << m[i];
            star = true;
        }
        first = false;
    }
    return os.str();
}

Q factorial(int n) {
    mpz_class f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return Q(f);
}

std::string q_to_string(const Q& q0) {
    Q q = q0;
    q.canonicalize();
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Q q_from_string(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational");
    for (char ch : s)
        if (!(std::isdigit((unsigned char)ch) || ch == '-' || ch == '/' || ch == '+'))
            throw std::invalid_argument("malformed rational '" + s + "'");
    Q q;
    if (q.set_str(s[0] == '+' ? s.substr(1) : s, 10) != 0)
        throw std::invalid_argument("malformed rational '" + s + "'");
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

int degree_cap() {
    int c = g_cap.load();
    if (c < 0) {
        c = 16;
        if (const char* env = std::getenv("LINFTY_DEGREE_CAP")) {
            int v = std::atoi(env);
            if (v > 0) c = v;
        }
        g_cap.store(c);
    }
    return c;
}

void set_degree_cap(int cap) { g_cap.store(cap); }

void check_degree_cap(const Poly& p, int tvar, const char* where) {
    int d = p.degree_in(tvar);
    if (d > degree_cap())
        throw DegreeCapError(std::string(where) + ": t-degree " + std::to_string(d) +
                             " exceeds cap " + std::to_string(degree_cap()));
}

int PathSection::t_degree() const {
    int d = -1;
    for (auto& c : comp) d = std::max(d, c.degree_in(tvar));
    return d;
}

std::vector<Poly> path_coordinates(const AffinePath& path) {
    if (path.p.size() != path.q.size()) throw std::invalid_argument("path endpoints differ in dimension");
    std::vector<Poly> x;
    for (size_t i = 0; i < path.p.size(); ++i)
        x.push_back(Poly(path.p[i]) + Poly(path.q[i] - path.p[i]) * Poly::var(0));
    return x;
}

std::vector<Poly> symbolic_path_coordinates(int m) {
    std::vector<Poly> x;
    Poly t = Poly::var(2 * m);
    for (int i = 0; i < m; ++i) x.push_back(Poly::var(i) + t * (Poly::var(m + i) - Poly::var(i)));
    return x;
}

PathSection pullback(const std::vector<Poly>& section, const std::vector<Poly>& path_coords, int degree,
                     int tvar) {
    PathSection s;
    s.degree = degree;
    s.tvar = tvar;
    for (auto& c : section) {
        if (c.nvars() > (int)path_coords.size())
            throw std::invalid_argument("pullback: section uses more variables than the path has");
        s.comp.push_back(c.compose(path_coords));
        check_degree_cap(s.comp.back(), tvar, "pullback");
    }
    return s;
}

PathSection pullback(const std::vector<Poly>& section, const AffinePath& path, int degree) {
    return pullback(section, path_coordinates(path), degree, 0);
}

PathSection delta(const PathSection& s) {
    if (s.dt) throw std::invalid_argument("delta: section already carries dt");
    PathSection r = s;
    r.dt = true;
    Q sign = (s.degree % 2 == 0) ? Q(1) : Q(-1);
    for (auto& c : r.comp) c = c.derivative(s.tvar) * sign;
    return r;
}

Poly poly_interval_integral(const Poly& alpha, int tvar) {
    return alpha.antiderivative(tvar).evaluate_var(tvar, Q(1));
}

Poly poly_eta_part(const Poly& alpha, int tvar) {
    Poly r = alpha.antiderivative(tvar) - Poly::var(tvar) * poly_interval_integral(alpha, tvar);
    check_degree_cap(r, tvar, "eta");
    return r;
}

Poly poly_pi_lin(const Poly& alpha, int tvar) {
    Poly t = Poly::var(tvar);
    return (Poly(1) - t) * alpha.evaluate_var(tvar, Q(0)) + t * alpha.evaluate_var(tvar, Q(1));
}

PathSection eta(const PathSection& s) {
    if (!s.dt) throw std::invalid_argument("eta: section carries no dt");
    PathSection r = s;
    r.dt = false;
    Q sign = (s.degree % 2 == 0) ? Q(1) : Q(-1);
    for (auto& c : r.comp) c = poly_eta_part(c, s.tvar) * sign;
    return r;
}

PathSection pi_lin(const PathSection& s) {
    if (s.dt) throw std::invalid_argument("pi_lin: section carries dt");
    PathSection r = s;
    for (auto& c : r.comp) c = poly_pi_lin(c, s.tvar);
    return r;
}

PathSection pi_con(const PathSection& s) {
    if (!s.dt) throw std::invalid_argument("pi_con: section carries no dt");
    PathSection r = s;
    for (auto& c : r.comp) c = poly_interval_integral(c, s.tvar);
    return r;
}

}  // namespace linfty
