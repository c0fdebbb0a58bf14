#pragma once
// Homotopy transfer of curved L-infinity[1] structures along a contraction.

#include "linfty/curved.hpp"

#include <functional>
#include <optional>

namespace linfty {

using LinearFn = std::function<Vec(const Vec&)>;

// Constant-coefficient data, when the contraction comes from families.
struct FiniteContraction {
    Family delta, eta, iota, pi;
};

// (L, delta) with homotopy eta, retract H, iota: H -> L and pi: L -> H.
// The maps are functions so that path sections (where eta integrates in t) fit too.
struct Contraction {
    GradedSpace L, H;
    LinearFn delta, eta, iota, pi;
    std::vector<int> weight;  // filtration weight per basis vector of L
    std::optional<FiniteContraction> finite;

    Vec delta_h(const Vec& h) const { return pi(delta(iota(h))); }
    Family delta_h_family() const;
    int weight_range() const;
};

struct DerivedH {
    GradedSpace H;
    Family iota, pi;
};

// H = im(1 - [delta, eta]) with inclusion and projection.  Throws MathError if
// eta is not a contraction of delta.
DerivedH derive_h(const GradedSpace& L, const Family& delta, const Family& eta);

// Contraction from families; weights default to the degrees.
Contraction make_contraction(const GradedSpace& L, const Family& delta, const Family& eta,
                             std::vector<int> weight = {});

struct Transferred {
    CurvedAlgebra algebra;  // (H, delta_H, mu)
    Family phi;             // H -> L, degree 0
    Family mu;              // degree 1 on H
};

// phi = iota - eta (lambda . phi), mu = pi (lambda . phi), arity by arity.
Transferred transfer(const Contraction& c, const Family& lambda);
// Same result as a sum over rooted trees with rational coefficients.
Transferred transfer_trees(const Contraction& c, const Family& lambda);

// Tree shapes used by transfer_trees.
struct TreeShape {
    std::vector<int> children;  // shape ids, sorted; empty for the leaf
    int leaves = 1;
    int nodes = 0;  // internal nodes
    Q coeff;        // c(T)
};
// All shapes with at most max_leaves leaves and max_nodes internal nodes; id 0 is the leaf.
std::vector<TreeShape> tree_shapes(int max_leaves, int max_nodes);

// Morphism pi~: (L, delta + lambda) -> (H, delta_H + mu).  Needs a finite contraction.
Family projection_morphism(const Contraction& c, const Family& lambda);

// Linear closed forms: phi_1 = (1 + eta lambda_1)^-1 iota, mu_1 = pi lambda_1 phi_1,
// mu_0 = pi(lambda_0), pi~_1 = pi (1 + lambda_1 eta)^-1.
struct ClosedForms {
    Family phi1, mu1, pitilde1;
    Vec mu0;
};
ClosedForms linear_closed_forms(const Contraction& c, const Family& lambda);

struct PerturbationReport {
    bool ok = true;
    bool phi_pitilde = true;  // phi pi~ = 1 - [delta + lambda, eta~]
    bool pitilde_phi = true;  // pi~ phi = id_H
    std::string detail;
};
// lambda must have arity 1 only.
PerturbationReport perturbation_check(const Contraction& c, const Family& lambda);

}  // namespace linfty
