#pragma once
// Graded spaces, Koszul signs, graded symmetric multilinear maps and the two
// composition products on operation families.
//
// Scalars are polynomials over Q.  A constant polynomial is a rational number, so
// a curved algebra is the same data as a bundle over a point.

#include "linfty/poly.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace linfty {

// Sorted multi-index of basis vectors.
using Key = std::vector<int>;
// Sparse vector: basis index -> coefficient.  Zero entries are never stored.
using Vec = std::map<int, Poly>;

void axpy(Vec& y, const Poly& a, const Vec& x);
void axpy(Vec& y, const Q& a, const Vec& x);
Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator-(const Vec& a);
Vec operator*(const Poly& a, const Vec& x);
Vec unit_vec(int i, const Poly& c = Poly(1));
inline bool is_zero(const Vec& v) { return v.empty(); }
std::string vec_str(const Vec& v, const std::vector<std::string>& labels,
                    const std::vector<std::string>& coords = {});
Vec compose_coeffs(const Vec& v, const std::vector<Poly>& values);

struct GradedSpace {
    std::vector<int> deg;
    std::vector<std::string> label;

    int dim() const { return (int)deg.size(); }
    int add(int degree, std::string name);
    std::vector<int> basis_of_degree(int d) const;
    std::map<int, int> dims() const;
    int max_degree() const;
    int min_degree() const;
    bool empty() const { return deg.empty(); }
    // Position of basis vector i inside its degree block.
    int index_in_degree(int i) const;
    int global_index(int degree, int idx) const;
    int find(const std::string& name) const;

    static GradedSpace from_dims(const std::map<int, int>& dims, const std::string& prefix = "e");
    bool operator==(const GradedSpace& o) const { return deg == o.deg; }
    bool operator!=(const GradedSpace& o) const { return !(*this == o); }
};

// Basis of b follows basis of a; returns the offset of b.
GradedSpace direct_sum(const GradedSpace& a, const GradedSpace& b);

// Sign relating x_1...x_n to x_{perm[0]}...x_{perm[n-1]} in the graded symmetric
// algebra: (-1)^{d_a d_b} for every pair whose order is reversed.
int koszul_sign(const std::vector<int>& degrees, const std::vector<int>& perm);
// Sorts idx in place.  Returns the Koszul sign, or 0 if an odd vector repeats.
int sort_with_sign(Key& idx, const std::vector<int>& deg);

// Sorted multi-indices of arity n with no repeated odd vector and input degree
// sum <= max_sum.
std::vector<Key> sorted_tuples(const GradedSpace& s, int n, int max_sum);

// A family of graded symmetric multilinear maps src^k -> tgt, all of one degree.
class Family {
public:
    GradedSpace src, tgt;
    int degree = 0;
    std::vector<std::map<Key, Vec>> parts;  // parts[k] holds arity k

    Family() = default;
    Family(GradedSpace s, GradedSpace t, int d) : src(std::move(s)), tgt(std::move(t)), degree(d) {}

    int max_arity() const;
    const std::map<Key, Vec>& part(int k) const;
    bool has_arity(int k) const { return k < (int)parts.size() && !parts[k].empty(); }

    // idx in any order; the value is normalised by the Koszul sign.
    void set(Key idx, const Vec& out);
    void add(Key idx, const Vec& out);
    Vec eval_basis(Key idx) const;
    Vec eval(const std::vector<Vec>& xs) const;
    Vec apply(const Vec& x) const { return eval({x}); }

    Family arity(int k) const;
    Family up_to(int k) const;
    bool is_zero() const { return max_arity() < 0; }
    void prune();
    // Degree homogeneity and symmetry; returns an empty string when valid.
    std::string validate() const;

    friend bool operator==(const Family& a, const Family& b);
    friend bool operator!=(const Family& a, const Family& b) { return !(a == b); }
};

Family operator+(const Family& a, const Family& b);
Family operator-(const Family& a, const Family& b);
Family operator*(const Poly& c, const Family& a);

Family identity_family(const GradedSpace& s);
// Arity-1 family from the images of basis vectors.
Family linear_family(const GradedSpace& src, const GradedSpace& tgt, int degree,
                     const std::function<Vec(int)>& column);
// Substitutes x_i := values[i] in every coefficient.
Family compose_coeffs(const Family& f, const std::vector<Poly>& values);
// Renames coefficient variables.
Family rename_coeffs(const Family& f, const std::vector<int>& map);

// Largest arity whose output can land in tgt when every input has degree >= 1.
int arity_bound(const GradedSpace& src, const GradedSpace& tgt, int degree);

enum class SumMode { Auto, Literal, Unshuffle };

// Evaluators: maps a tuple of vectors (arity = size) to a vector.
using Evaluator = std::function<Vec(const std::vector<Vec>&)>;
Evaluator evaluator(const Family& f);

// (lam o mu)_n(x_1..x_n) for homogeneous inputs of the given degrees.
Vec circ_apply(const Evaluator& lam, const Evaluator& mu, const std::vector<Vec>& xs,
               const std::vector<int>& degs, SumMode mode = SumMode::Auto);
// (lam . phi)_n(x_1..x_n); phi has arities >= 1.
Vec bullet_apply(const Evaluator& lam, const Evaluator& phi, const std::vector<Vec>& xs,
                 const std::vector<int>& degs, SumMode mode = SumMode::Auto);

Vec circ_at(const Family& lam, const Family& mu, const Key& x, SumMode mode = SumMode::Auto);
Vec bullet_at(const Family& lam, const Family& phi, const Key& x, SumMode mode = SumMode::Auto);

// Materialised products; max_arity < 0 uses arity_bound.
Family circ(const Family& lam, const Family& mu, SumMode mode = SumMode::Auto, int max_arity = -1);
Family bullet(const Family& lam, const Family& phi, SumMode mode = SumMode::Auto, int max_arity = -1);
// lin (arity 1) applied to every output of f, arity 0 included.
Family push_forward(const Family& lin, const Family& f);
// [lam, mu] = lam o mu - (-1)^{|lam||mu|} mu o lam, for endomorphism families.
Family commutator(const Family& lam, const Family& mu, SumMode mode = SumMode::Auto);

}  // namespace linfty
