#pragma once
// Exact multivariate polynomials over Q, and polynomial sections along affine paths.

#include <gmpxx.h>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace linfty {

using Q = mpq_class;

// Exponent vector with trailing zeros trimmed, so every monomial has one key.
using Mono = std::vector<int>;

class Poly {
public:
    Poly() = default;
    Poly(const Q& c);
    Poly(long c) : Poly(Q(c)) {}
    Poly(int c) : Poly(Q(c)) {}

    static Poly var(int i, int power = 1);
    static Poly monomial(Mono exps, const Q& c);

    const std::map<Mono, Q>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Q constant_term() const;
    // 1 + highest variable index that occurs (0 for constants).
    int nvars() const;
    int total_degree() const;
    int degree_in(int var) const;

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    Poly& operator*=(const Q& c);
    Poly operator-() const;
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(Poly a, const Q& c) { return a *= c; }
    friend Poly operator*(const Q& c, Poly a) { return a *= c; }
    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }
    friend bool operator<(const Poly& a, const Poly& b) { return a.terms_ < b.terms_; }

    Poly derivative(int var) const;
    // Antiderivative in `var` vanishing at var = 0.
    Poly antiderivative(int var) const;
    Poly substitute(int var, const Poly& value) const;
    // x_i := values[i]; every variable of *this must be covered.
    Poly compose(const std::vector<Poly>& values) const;
    Poly evaluate_var(int var, const Q& v) const;
    Q evaluate(const std::vector<Q>& point) const;
    double evaluate(const std::vector<double>& point) const;
    // x_i -> x_{map[i]}
    Poly rename(const std::vector<int>& map) const;

    std::string str(const std::vector<std::string>& names = {}) const;

private:
    std::map<Mono, Q> terms_;
    void add_term(const Mono& m, const Q& c);
};

inline bool is_zero(const Poly& p) { return p.is_zero(); }

Q factorial(int n);
std::string q_to_string(const Q& q);
// Parses "a", "a/b" or a decimal-free integer form; throws std::invalid_argument.
Q q_from_string(const std::string& s);

// Polynomial degree cap for path sections (default 16, env LINFTY_DEGREE_CAP).
int degree_cap();
void set_degree_cap(int cap);

struct DegreeCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Affine path a(t) = p + t (q - p) with rational endpoints.
struct AffinePath {
    std::vector<Q> p, q;
};

// A section of a trivial bundle pulled back along a path: one polynomial per fiber
// component.  Components are polynomials in the variable `tvar`; other variables may
// occur as symbolic parameters (endpoint coordinates).
struct PathSection {
    std::vector<Poly> comp;
    int degree = 0;
    bool dt = false;
    int tvar = 0;

    int effective_degree() const { return degree + (dt ? 1 : 0); }
    int t_degree() const;
    bool operator==(const PathSection& o) const = default;
};

// Coordinates of the affine path as polynomials in t (variable index 0).
std::vector<Poly> path_coordinates(const AffinePath& path);
// Symbolic path: p_i = var i, q_i = var m+i, t = var 2m.
std::vector<Poly> symbolic_path_coordinates(int m);

PathSection pullback(const std::vector<Poly>& section, const AffinePath& path, int degree);
PathSection pullback(const std::vector<Poly>& section, const std::vector<Poly>& path_coords,
                     int degree, int tvar);

// delta(l) = (-1)^d l'(t) dt
PathSection delta(const PathSection& s);
// eta(alpha dt) = (-1)^d (int_0^t alpha - t int_0^1 alpha)
PathSection eta(const PathSection& s);
// (1-t) s(0) + t s(1)
PathSection pi_lin(const PathSection& s);
// (int_0^1 alpha) dt
PathSection pi_con(const PathSection& s);

// Single-polynomial versions of the above, in variable tvar.
Poly poly_eta_part(const Poly& alpha, int tvar);   // int_0^t alpha - t int_0^1 alpha
Poly poly_interval_integral(const Poly& alpha, int tvar);
Poly poly_pi_lin(const Poly& alpha, int tvar);

void check_degree_cap(const Poly& p, int tvar, const char* where);

}  // namespace linfty
