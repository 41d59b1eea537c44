#pragma once

// JSON serialization of frames, charts, loops, pencils, polynomials,
// families and frame structures. Matrices are row-major nested arrays.

#include <json.hpp>

#include "maslovkit/core.hpp"
#include "maslovkit/maslov.hpp"
#include "maslovkit/morse.hpp"
#include "maslovkit/pencils.hpp"
#include "maslovkit/polynomial.hpp"
#include "maslovkit/srgeo.hpp"

namespace maslovkit::io {

using Json = nlohmann::json;

Json to_json(const Mat& m);
Mat matrix_from_json(const Json& j);
Json to_json(const Vec& v);
Vec vector_from_json(const Json& j);

/// {"n", "columns"}
Json frame_to_json(const LagrangianFrame& f);
LagrangianFrame frame_from_json(const Json& j);

/// {"n", "S"}
Json chart_to_json(const SymmetricChart& c);
SymmetricChart chart_from_json(const Json& j);

/// {"n", "closed", "samples": [{"t", "columns"}]}; "closed" defaults to true.
Json loop_to_json(const LagrangianLoop& loop);
LagrangianLoop loop_from_json(const Json& j);

/// {"t", "multiplicity", "sign"}
Json to_json(const Crossing& c);

/// {"n", "forms"}
Json pencil_to_json(const Pencil& p);
Pencil pencil_from_json(const Json& j);

/// {"variables", "terms": [{"coef", "powers"}]}
Json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j);

/// {"n", "polynomial", "box": {"t": [min, max], "x": [min, max]}, "name"?}; the polynomial is in (t, x).
MorseFamily family_from_json(const Json& j);
Json family_to_json(const MorseFamily& f);

/// {"n", "fields": [[polynomial per component] per field], "name"?}
FrameStructure structure_from_json(const Json& j);
Json structure_to_json(const FrameStructure& s);

}  // namespace maslovkit::io
