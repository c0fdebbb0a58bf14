#pragma once
// Pointwise geometry of L-infinity bundles: classical points, tangent complexes and
// their cohomology, etale / weak equivalence / fibration predicates, virtual
// dimension, the shifted tangent bundle and pullbacks of fibrations.

#include "linfty/curved.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace linfty {

// Scope caveats attached to sample-relative verdicts.
extern const char* const kLocusScope;
extern const char* const kFibrationScope;

// Bounded complex of finite dimensional spaces.  d.at(i) maps degree i to i + 1
// (rows = dim(i+1)).  tol > 0 switches ranks to floating point elimination.
struct CochainComplex {
    std::map<int, int> dims;
    std::map<int, Matrix> d;
    double tol = 0;

    int dim(int k) const;
    Matrix diff(int k) const;  // zero matrix when absent
    int lo() const;
    int hi() const;
    // Empty when d^2 = 0 and shapes agree.
    std::string check() const;
    std::map<int, int> betti() const;
    int euler() const;
};

// Cochain map A -> B; f.at(i) has rows = B.dim(i).
struct CochainMap {
    std::map<int, Matrix> f;
    Matrix at(int k, int rows, int cols) const;
};

int rank_with_tol(const Matrix& m, double tol);
// Cone^k = A^{k+1} + B^k, d(a, b) = (-d_A a, f a + d_B b).
CochainComplex mapping_cone(const CochainComplex& A, const CochainComplex& B, const CochainMap& f);
std::string check_chain_map(const CochainComplex& A, const CochainComplex& B, const CochainMap& f);
bool is_acyclic(const CochainComplex& c);

struct ClassicalPoint {
    std::vector<Q> coords;
    double residual = 0;  // max |lambda_0(P)|
    bool exact = true;
    double tol = 0;  // rank tolerance for numeric points

    std::vector<double> approx() const;
    std::string str() const;
};

// lambda_0 evaluated at P.
std::vector<Q> curvature_at(const LinftyBundle& b, const std::vector<Q>& P);
// Exact point when lambda_0(P) = 0; numeric point when tol > 0 and the residual is
// within tol.  Throws MathError otherwise.
ClassicalPoint classical_point(const LinftyBundle& b, const std::vector<Q>& P, double tol = 0);

PMatrix jacobian(const std::vector<Poly>& f, int nvars);
// Jacobian of lambda_0 at P, rows = degree 1 basis.
Matrix curvature_derivative(const LinftyBundle& b, const ClassicalPoint& P);
// TM|_P -> L^1|_P -> L^2|_P -> ...  Throws MathError when d^2 != 0.
CochainComplex tangent_complex(const LinftyBundle& b, const ClassicalPoint& P);
// Uses the Jacobian of f and phi_1 only.
CochainMap tangent_map(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor,
                       const ClassicalPoint& P);

int virtual_dimension(const LinftyBundle& b);

struct EtaleReport {
    bool ok = true;
    ClassicalPoint point, image;
    std::map<int, int> src_betti, dst_betti, cone_betti;
    std::string detail;
};
EtaleReport is_etale_at(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor,
                        const ClassicalPoint& P, double tol = 0);

struct WeakEquivalenceReport {
    bool ok = true;
    bool locus_ok = true;
    bool etale_ok = true;
    std::vector<EtaleReport> points;
    std::vector<int> matched;  // index of the image among the target candidates, -1 if none
    std::vector<std::string> notes;
    std::string scope = kLocusScope;
};
// Candidates are validated as classical points of the respective bundles.
WeakEquivalenceReport is_weak_equivalence(const LinftyBundle& src, const LinftyBundle& dst,
                                          const Morphism& mor,
                                          const std::vector<std::vector<Q>>& src_points,
                                          const std::vector<std::vector<Q>>& dst_points,
                                          double tol = 0);

struct FibrationReport {
    bool ok = true;
    bool submersion_ok = true;
    bool surjective_ok = true;
    bool rank_certified = true;  // phi_1 blocks reduce with constant pivots
    std::vector<std::string> notes;
    std::string scope = kFibrationScope;
};
FibrationReport is_fibration(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor,
                             const std::vector<std::vector<Q>>& samples);

// Fiber TM dt + L dt + L in this order, flat connection.
struct ShiftedTangent {
    LinftyBundle bundle;
    int tm_offset = 0, ldt_offset = 0, l_offset = 0;
};
ShiftedTangent shifted_tangent(const LinftyBundle& b);

// Fibered product of a fibration p: M -> N with g: M' -> N.  One of the two base
// maps must be affine and surjective, so that the base is parametrised by a graph.
struct PullbackResult {
    LinftyBundle bundle;
    Morphism to_source;  // to the source of the fibration
    Morphism to_other;   // to M', a linear fibration
    std::string base_description;
};
PullbackResult pullback_fibration(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& p,
                                  const LinftyBundle& other, const Morphism& g);

// Grid search plus Gauss-Newton for zeros of lambda_0, base dimension <= 3.
// Candidates that round to small rationals and vanish exactly are returned exact.
struct LocusSearch {
    double lo = -3, hi = 3;
    int grid = 7;
    double tol = 1e-9;
    int max_iter = 60;
    int max_denominator = 64;
};
std::vector<ClassicalPoint> find_classical_points(const LinftyBundle& b, const LocusSearch& opts = {});

}  // namespace linfty
