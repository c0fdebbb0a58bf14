#pragma once
// Curved L-infinity[1] algebras and L-infinity bundles over polynomial base models:
// axiom checks, morphisms, composition, inversion and the fibration normal form.

#include "linfty/graded.hpp"
#include "linfty/linalg.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace linfty {

struct MathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CurvedAlgebra {
    GradedSpace space;
    Family delta;                 // arity 1, degree 1; may be empty
    Family lambda;                // degree 1
    std::vector<int> filtration;  // level per basis vector; empty means the natural one

    CurvedAlgebra() = default;
    CurvedAlgebra(GradedSpace s);
    Family total() const;  // delta + lambda
    int level(int i) const { return filtration.empty() ? space.deg[i] : filtration[i]; }
};

struct Base {
    std::vector<std::string> coords;
    int dim() const { return (int)coords.size(); }
    static Base euclidean(int m, const std::string& prefix = "x");
    bool operator==(const Base& o) const { return coords.size() == o.coords.size(); }
};

struct LinftyBundle {
    Base base;
    GradedSpace fiber;
    Family lambda;  // coefficients are polynomials in the base coordinates

    LinftyBundle() = default;
    LinftyBundle(Base b, GradedSpace f);
    int amplitude() const { return fiber.empty() ? 0 : fiber.max_degree(); }
    // Structural checks (degrees, symmetry, amplitude bound); empty when valid.
    std::string validate() const;
};

struct Morphism {
    std::vector<Poly> base_map;  // f, one component per target coordinate
    Family phi;                  // degree 0, arities >= 1

    bool is_linear() const { return phi.max_arity() <= 1; }
};

struct ArityCheck {
    int arity = 0;
    bool ok = true;
    Key witness;
    Vec residual;
};

struct CheckReport {
    bool ok = true;
    std::vector<ArityCheck> arities;
    std::vector<std::string> notes;

    const ArityCheck* first_failure() const;
    std::string describe(const GradedSpace& inputs, const GradedSpace& outputs,
                         const std::vector<std::string>& coords = {}) const;
};

// Arity-by-arity residual check of a family that should vanish.
CheckReport vanishing_report(const Family& residual, int max_arity);

// [delta, lambda] + lambda o lambda = 0, plus delta^2 = 0.
CheckReport check_mc(const CurvedAlgebra& alg, SumMode mode = SumMode::Auto);
// Fiberwise MC equation as a polynomial identity.
CheckReport check_mc(const LinftyBundle& b, SumMode mode = SumMode::Auto);
CheckReport check_mc_total(const Family& total, SumMode mode = SumMode::Auto);

// lambda_n raises the filtration by 1 (n >= 1); delta preserves it.
std::string check_filtration(const CurvedAlgebra& alg);

// phi o (delta + lambda) = (delta' + mu) . phi
CheckReport check_morphism(const CurvedAlgebra& src, const CurvedAlgebra& dst, const Family& phi,
                           SumMode mode = SumMode::Auto);
CheckReport check_morphism(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor,
                           SumMode mode = SumMode::Auto);

Morphism identity_morphism(const LinftyBundle& b);
// g after f.
Morphism compose(const Morphism& g, const Morphism& f);
Family compose_families(const Family& psi, const Family& phi);
bool same_morphism(const Morphism& a, const Morphism& b);

// Transports a degree-1 total structure D on L along phi: L -> L' (phi_1 invertible
// with constant determinant): returns D' with phi o D = D' . phi.
Family transport_structure(const Family& D, const Family& phi);

// Inverse of an isomorphism (affine invertible base map, phi_1 with constant
// nonzero determinant).  Throws MathError otherwise.
Morphism invert_iso(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor);
Family invert_family(const Family& phi);

// Affine base maps.
struct AffineMap {
    Matrix A;
    std::vector<Q> b;
};
std::optional<AffineMap> as_affine(const std::vector<Poly>& f, int src_dim);
std::vector<Poly> affine_polys(const AffineMap& a);

struct Linearization {
    LinftyBundle middle;  // L in the adapted basis f*E + F, with transported structure
    Morphism iso;         // (id, phi') from the source to middle
    Morphism linear;      // (f, projection) from middle to the target
    std::vector<int> lift_index;   // basis of middle lifting the target basis
    std::vector<int> kernel_index; // basis of middle spanning F
};

// Every fibration is a linear fibration after an isomorphism.
Linearization linearize_fibration(const LinftyBundle& src, const LinftyBundle& dst, const Morphism& mor);

// Bundle built from a curved algebra over a point, and back.
LinftyBundle as_bundle(const CurvedAlgebra& alg);

// Product of two bundles; coordinates of b are shifted after those of a.
LinftyBundle product_bundle(const LinftyBundle& a, const LinftyBundle& b);

}  // namespace linfty
