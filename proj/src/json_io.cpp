#include "holomet/json_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "holomet/errors.hpp"

namespace holomet {

namespace {

Json pair_of(cplx z) { return Json::array({number(z.real()), number(z.imag())}); }

cplx pair_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ContractError(std::string("expected [re, im] for ") + what);
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ContractError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double parse_real(const std::string& s) {
  if (s.empty()) throw ContractError("empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) throw ContractError("malformed number \"" + s + "\"");
  return v;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

Json witness_json(const LowerWitness& w) {
  Json j{{"kind", to_string(w.kind)}};
  if (w.kind == LowerWitness::Kind::linear) {
    Json re = Json::array(), im = Json::array();
    for (cplx e : w.functional.entries) {
      re.push_back(number(e.real()));
      im.push_back(number(e.imag()));
    }
    j["functional"] = {{"re", re}, {"im", im}};
  } else if (w.kind == LowerWitness::Kind::retraction) {
    j["geodesic"] = to_json(w.retraction);
  }
  return j;
}

Json witness_json(const UpperWitness& w) {
  Json j{{"kind", to_string(w.kind)}};
  if (w.kind == UpperWitness::Kind::none) return j;
  if (w.kind == UpperWitness::Kind::affine) {
    j["center"] = to_json(w.center);
    j["radius_vector"] = to_json(w.radius_vector);
  } else {
    j["disc"] = to_json(w.disc);
  }
  j["sup_norm"] = number(w.sup_norm);
  j["u"] = pair_of(w.u);
  j["v"] = pair_of(w.v);
  j["correction"] = number(w.correction);
  return j;
}

}  // namespace

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

cplx parse_complex(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ContractError("empty complex literal");
  if (s.back() != 'i') return {parse_real(s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not an exponent sign or the leading sign
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  const auto imag_part = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t);
  };
  if (split == std::string::npos) return {0.0, imag_part(body)};
  return {parse_real(body.substr(0, split)), imag_part(body.substr(split))};
}

std::vector<cplx> parse_complex_list(const std::string& text) {
  std::vector<cplx> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_complex(item));
  if (out.empty()) throw ContractError("empty point literal");
  return out;
}

Exponent parse_exponent(const std::string& text) {
  const std::string s = trim(text);
  if (s == "inf" || s == "infinity") return Exponent::infinity();
  return Exponent::of(parse_real(s));
}

Json to_json(const GeodesicParams& params) {
  Json alpha = Json::array(), beta = Json::array(), c = Json::array();
  for (std::size_t j = 0; j < params.dimension(); ++j) {
    alpha.push_back(pair_of(params.alpha[j]));
    beta.push_back(static_cast<int>(params.beta[j]));
    c.push_back(pair_of(params.c[j]));
  }
  return Json{{"p", number(params.p)}, {"gamma", pair_of(params.gamma)}, {"alpha", alpha}, {"beta", beta}, {"c", c}};
}

GeodesicParams params_from_json(const Json& j) {
  GeodesicParams g;
  const Json& p = field(j, "p");
  if (!p.is_number()) throw ContractError("\"p\" must be a number");
  g.p = p.get<double>();
  g.gamma = pair_from(field(j, "gamma"), "gamma");
  const Json& alpha = field(j, "alpha");
  const Json& beta = field(j, "beta");
  const Json& c = field(j, "c");
  if (!alpha.is_array() || !beta.is_array() || !c.is_array()) throw ContractError("alpha, beta and c must be arrays");
  for (const auto& a : alpha) g.alpha.push_back(pair_from(a, "alpha"));
  for (const auto& b : beta) {
    if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) throw ContractError("beta entries must be 0 or 1");
    g.beta.push_back(static_cast<std::uint8_t>(b.get<int>()));
  }
  for (const auto& e : c) g.c.push_back(pair_from(e, "c"));
  g.validate();
  return g;
}

Json to_json(const ComplexVector& v) {
  Json re = Json::array(), im = Json::array();
  for (cplx e : v.entries) {
    re.push_back(number(e.real()));
    im.push_back(number(e.imag()));
  }
  return Json{{"space", v.space.describe()}, {"re", re}, {"im", im}};
}

ComplexVector vector_from_json(const Json& j) {
  const Json& re = field(j, "re");
  const Json& im = field(j, "im");
  if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty()) {
    throw ContractError("\"re\" and \"im\" must be arrays of equal, nonzero length");
  }
  std::vector<cplx> e;
  for (std::size_t k = 0; k < re.size(); ++k) e.emplace_back(re[k].get<double>(), im[k].get<double>());
  double p = 2.0;
  if (j.contains("p")) p = j.at("p").get<double>();
  return ComplexVector(SpaceSignature::lp(e.size(), p), e);
}

Json to_json(const NormalizedGeodesic& g) {
  Json j = to_json(g.params);
  j["s"] = number(g.s);
  j["distance"] = number(g.distance());
  j["residual"] = number(g.residual_norm);
  return j;
}

Json to_json(const VerificationReport& r) {
  return Json{{"pass", r.pass()},
              {"constraint_residual", number(r.constraint_residual)},
              {"boundary_norm_max_dev", number(r.boundary_norm_max_dev)},
              {"alignment_max_dev", number(r.alignment_max_dev)},
              {"alignment_skipped", r.alignment_skipped},
              {"poisson_min_real", number(r.poisson_min_real)},
              {"poisson_reconstruction_max_err", number(r.poisson_reconstruction_max_err)},
              {"verdict",
               {{"constraints", r.constraints_pass},
                {"boundary", r.boundary_pass},
                {"alignment", r.alignment_pass},
                {"poisson", r.poisson_pass}}}};
}

Json to_json(const MetricEstimate& e) {
  return Json{{"lower", number(e.lower)},
              {"upper", number(e.upper)},
              {"gap", number(e.gap())},
              {"lower_witness", witness_json(e.lower_witness)},
              {"upper_witness", witness_json(e.upper_witness)}};
}

Json to_json(const ConvexityModulus& m) {
  return Json{{"epsilon", number(m.epsilon)}, {"delta", number(m.delta_value)}, {"z", to_json(m.z)},
              {"v", to_json(m.v)}, {"r", number(m.r)}};
}

Json to_json(const CurvatureResult& c) {
  return Json{{"kappa", number(c.kappa)}, {"metric", number(c.metric)}, {"check_gap", number(c.check_gap)}};
}

}  // namespace holomet
