#pragma once
// JSON model files, morphisms, contractions and submanifolds, plus report
// serialisation.  Rationals are written as "num/den" strings, coefficients as
// polynomial expressions in the base coordinates.
//
// Basis vectors are addressed as (degree, index within degree), so a loaded fiber
// is always ordered by degree; writing is independent of the in-memory order.

#include "linfty/derived.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace linfty::io {

using json = nlohmann::json;

// Malformed input.  `where` is a JSON pointer or "line:col".
struct InputError : std::runtime_error {
    std::string where;
    InputError(const std::string& msg, std::string at = {})
        : std::runtime_error(at.empty() ? msg : at + ": " + msg), where(std::move(at)) {}
};

// Polynomial expressions: + - * ^, parentheses, rationals a/b, integer powers and
// the given variable names.
Poly parse_poly(const std::string& text, const std::vector<std::string>& names);
std::string poly_str(const Poly& p, const std::vector<std::string>& names);
Q parse_rational(const json& j, const std::string& where);

struct Model {
    LinftyBundle bundle;
    json metadata = json::object();
};

json read_json_file(const std::string& path);
json parse_json_text(const std::string& text, const std::string& source = "<input>");

Model model_from_json(const json& j);
json model_to_json(const LinftyBundle& b, const json& metadata = json::object());
Model load_model(const std::string& path);

// Canonical text: sorted keys, reduced fractions, one operation per line.
std::string canonical_dump(const json& j);
// Writes the same ordering as a loaded model would have.
std::string canonical_model(const LinftyBundle& b, const json& metadata = json::object());

// Ops list for a family src^k -> tgt with coefficients in the given names.
json ops_to_json(const Family& f, const std::vector<std::string>& coords);
Family ops_from_json(const json& ops, const GradedSpace& src, const GradedSpace& tgt, int degree,
                     const std::vector<std::string>& coords, const std::string& where);

// {base_map: [poly...], phi: ops, points?: [[q...]], target_points?, samples?}
struct MorphismFile {
    Morphism morphism;
    std::vector<std::vector<Q>> points, target_points, samples;
    bool has_points = false, has_target_points = false, has_samples = false;
};
MorphismFile morphism_from_json(const json& j, const LinftyBundle& src, const LinftyBundle& dst);
json morphism_to_json(const Morphism& m, const LinftyBundle& src, const LinftyBundle& dst);

// {delta: ops, eta: ops, weights?: {degree: [w...]}} on the fiber of the model.
// The model carries the total structure; lambda = total - delta.
struct ContractionFile {
    Contraction contraction;
    Family lambda;
};
ContractionFile contraction_from_json(const json& j, const LinftyBundle& model);

// Named submanifolds (axis-x, axis-y, axis-z, parabola, diagonal, origin, line-y1,
// whole) or {kind: affine, A, b} / {kind: graph, free, values}.
Submanifold submanifold_from_name(const std::string& name, int ambient);
Submanifold submanifold_from_json(const json& j, int ambient);

std::vector<std::vector<Q>> points_from_json(const json& j, int dim, const std::string& where);
// "1/2,0;1,1" -> points
std::vector<std::vector<Q>> points_from_string(const std::string& s, int dim);
json points_to_json(const std::vector<std::vector<Q>>& pts);

json report_to_json(const CheckReport& r, const GradedSpace& in, const GradedSpace& out,
                    const std::vector<std::string>& coords);
json betti_to_json(const std::map<int, int>& betti);
json report_to_json(const WeakEquivalenceReport& r);
json report_to_json(const FibrationReport& r);
json complex_to_json(const CochainComplex& c);

}  // namespace linfty::io
