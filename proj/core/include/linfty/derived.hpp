#pragma once
// Derived path spaces over flat R^m, the factorisation of the diagonal, homotopy
// fibered products, derived intersections and zero loci of sections.
//
// Paths are straight lines a(t) = p + t (q - p).  All connections are flat, so
// covariantly constant sections are constant vectors and sections along a path
// are vectors whose coefficients are polynomials in t.

#include "linfty/geometry.hpp"
#include "linfty/transfer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace linfty {

// (P_g M, P_con TM dt, D) for M = R^m.  Base coordinates p_1..p_m, q_1..q_m,
// fiber of rank m in degree 1, D(p, q) = (q - p) dt.
LinftyBundle path_space_manifold(int m);

// Sections of a*(TM dt + L dt + L) along a path with the curved structure
// delta + a'dt + a*(lambda + lambda~ + nabla lambda).  TM dt only holds constant
// sections.  Coefficients are polynomials in `tvar` and possibly in symbolic
// endpoint coordinates.
struct PathStructure {
    GradedSpace space;  // shifted tangent fiber: TM dt, L dt, L
    int m = 0, nl = 0;
    int tm_offset = 0, ldt_offset = 0, l_offset = 0;
    int tvar = 0;
    std::vector<Poly> path;  // a(t)
    Family curvature;        // a'dt, arity 0
    Family lambda;           // a* lambda on the L part
    Family tilde;            // a* lambda~
    Family nabla;            // a* nabla lambda
    Family mu;               // sum of the four above
    std::vector<int> weight; // TM dt 0, L^k dt and L^k weight k

    // delta(l) = (-1)^k l' dt on the L part, zero elsewhere.
    Vec delta(const Vec& x) const;
    Vec total(const std::vector<Vec>& xs) const;  // delta + mu
    // MC equation on inputs e t^j with j <= max_t, checked arity by arity.
    CheckReport check_mc(int max_t) const;
};

PathStructure path_curved_structure(const LinftyBundle& b, const std::vector<Poly>& path_coords, int tvar);
PathStructure path_curved_structure(const LinftyBundle& b, const AffinePath& path);

// Transferred structure on H = TM dt + L dt + L@0 + L@1 over the symbolic path.
// L@0 and L@1 stand for the linear sections (1 - t) e and t e.
struct DerivedPathSpace {
    LinftyBundle bundle;  // base (p, q), structure delta_H + nu
    PathStructure full;   // t = variable 2m
    Contraction contraction;
    Transferred transferred;  // phi: H -> sections
    int m = 0, nl = 0;
    int tm_offset = 0, ldt_offset = 0, l0_offset = 0, l1_offset = 0;

    Vec iota(const Vec& h) const { return contraction.iota(h); }
    Vec pi(const Vec& x) const { return contraction.pi(x); }
};

DerivedPathSpace derived_path_space(const LinftyBundle& b);

// M -> PM -> M x M.
struct DiagonalFactorization {
    LinftyBundle source;
    DerivedPathSpace path;
    LinftyBundle square;  // M x M, coordinates of the second factor after the first
    Morphism constant;    // constant paths
    Morphism evaluation;  // (ev_0, ev_1)
    Morphism diagonal;
    bool composite_is_diagonal = false;
};

DiagonalFactorization factorize_diagonal(const LinftyBundle& b);

// Classical points of PM over the given points of M, found by solving D = 0
// first (q = p) and then lambda_0 at the common endpoint.
std::vector<std::vector<Q>> path_classical_points(const DiagonalFactorization& f,
                                                  const std::vector<std::vector<Q>>& points);

struct FactorizationReport {
    bool ok = true;
    CheckReport constant_morphism, evaluation_morphism;
    WeakEquivalenceReport constant;
    FibrationReport evaluation;
    bool composite_ok = true;
};

FactorizationReport verify_factorization(const DiagonalFactorization& f, const std::vector<std::vector<Q>>& points,
                                         const std::vector<std::vector<Q>>& samples);

// X x_Z PZ x_Z Y, as the pullback of PZ -> Z x Z along f x g.
struct HomotopyFiberedProduct {
    LinftyBundle bundle;
    Morphism to_x, to_y, to_path;
    int vdim = 0;
    int vdim_formula = 0;  // vdim X + vdim Y - vdim Z
    std::string base_description;
};

HomotopyFiberedProduct homotopy_fibered_product(const LinftyBundle& X, const Morphism& f, const LinftyBundle& Y,
                                                const Morphism& g, const LinftyBundle& Z);

// Morphism X x Y -> Z x Z.
Morphism product_morphism(const LinftyBundle& X, const Morphism& f, const LinftyBundle& Y, const Morphism& g,
                          const LinftyBundle& Z);

// Submanifold of R^m given by an affine parametrisation x = A s + b or as the
// graph of polynomials over a subset of the coordinates.
struct Submanifold {
    enum class Kind { Affine, Graph } kind = Kind::Affine;
    int ambient = 0;
    Matrix A;               // affine: ambient x dim, full column rank
    std::vector<Q> b;
    std::vector<int> free;  // graph: coordinates used as parameters
    std::vector<Poly> values;  // graph: the other coordinates, in order, as polynomials in the parameters
    std::string name;

    int dim() const;
    std::vector<Poly> embedding() const;  // ambient coordinates in the parameters
    std::optional<std::vector<Q>> locate(const std::vector<Q>& point) const;
    LinftyBundle as_bundle() const;

    static Submanifold affine(Matrix A, std::vector<Q> b, std::string name = {});
    static Submanifold graph(int ambient, std::vector<int> free, std::vector<Poly> values, std::string name = {});
    static Submanifold whole(int m);
};

struct IntersectionPoint {
    std::vector<Q> ambient;
    ClassicalPoint point;  // in the parameters of X x Y
    CochainComplex tangent;
    int h0 = 0, h1 = 0;
    bool transversal = false;
};

struct DerivedIntersection {
    Submanifold X, Y;
    LinftyBundle bundle;  // base X x Y, fiber TM dt, D = (y - x) dt
    Morphism to_x, to_y;
    int vdim = 0;
    std::vector<IntersectionPoint> points;
    // Affine X and Y: the classical intersection as a manifold mapping to the model.
    std::optional<WeakEquivalenceReport> classical_comparison;
    std::vector<std::string> notes;
    std::string scope = kLocusScope;
};

// Candidate ambient points in X cap Y; when none are given, the locus search runs
// on the model (parameter dimension <= 3).
DerivedIntersection derived_intersection(const Submanifold& X, const Submanifold& Y,
                                         const std::vector<std::vector<Q>>& points = {});

// Section s of the trivial bundle R^m x R^r: compares M cap^h_E s(M) with (M, E dt, s dt).
struct ZeroLocusComparison {
    LinftyBundle quasi_smooth;
    DerivedIntersection intersection;
    Morphism map;  // f(P) = path from 0_P to s(P), phi(e dt) = (0, e dt)
    CheckReport map_check;
    WeakEquivalenceReport weak_equivalence;
    bool ok = false;
};

ZeroLocusComparison zero_locus_model(const std::vector<Poly>& s, int m, const std::vector<std::vector<Q>>& points);

}  // namespace linfty
