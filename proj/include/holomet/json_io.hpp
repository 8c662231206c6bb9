#pragma once

// JSON interchange and text parsing shared by the command-line front end and tests.
// Numbers are rounded to 12 significant digits before they are stored.

#include <string>
#include <vector>

#include <json.hpp>

#include "holomet/geodesic.hpp"
#include "holomet/metric_lab.hpp"
#include "holomet/solver.hpp"
#include "holomet/verifier.hpp"

namespace holomet {

using Json = nlohmann::ordered_json;

/// v rounded to 12 significant digits; non-finite values become null.
Json number(double v);

/// "re", "re+imi", "re-imi", "imi". ContractError on anything else.
cplx parse_complex(const std::string& text);
/// Comma-separated list of parse_complex literals.
std::vector<cplx> parse_complex_list(const std::string& text);
/// "inf" or a number >= 1.
Exponent parse_exponent(const std::string& text);

/// {"p", "gamma": [re, im], "alpha": [[re, im]...], "beta": [0|1...], "c": [[re, im]...]}
Json to_json(const GeodesicParams& params);
/// Inverse of to_json; extra keys are ignored. ContractError on missing or malformed fields.
GeodesicParams params_from_json(const Json& j);

/// {"space", "re", "im"}
Json to_json(const ComplexVector& v);
ComplexVector vector_from_json(const Json& j);

/// Params plus "s", "distance" and "residual".
Json to_json(const NormalizedGeodesic& g);
Json to_json(const VerificationReport& r);
Json to_json(const MetricEstimate& e);
Json to_json(const ConvexityModulus& m);
Json to_json(const CurvatureResult& c);

}  // namespace holomet
