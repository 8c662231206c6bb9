// holomet: command-line front end for distances, geodesics, verification, modulus sweeps
// and curvature tables.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "holomet/disc.hpp"
#include "holomet/errors.hpp"
#include "holomet/json_io.hpp"
#include "holomet/metric_lab.hpp"
#include "holomet/solver.hpp"
#include "holomet/verifier.hpp"

namespace {

using namespace holomet;

constexpr int kExitContract = 2;
constexpr int kExitNonconvergence = 3;
constexpr int kExitVerification = 4;

struct Options {
  std::string p = "2";
  std::string r = "2";
  std::optional<std::size_t> n;
  std::optional<std::size_t> n1, n2;
  std::string p1 = "2", p2 = "2";
  std::string x, y, v;
  double tol = 1e-10;
  int multistarts = 16;
  std::string beta = "adaptive";
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string params_file;
  std::string eps;
  int trials = 16;
  int samples = 20;
  bool bracket = false;
  int degree = 6;
};

bool direct_sum_requested(const Options& o) { return o.n1.has_value() || o.n2.has_value(); }

SpaceSignature space_for(const Options& o, std::size_t inferred_n) {
  if (direct_sum_requested(o)) {
    if (!o.n1 || !o.n2) throw ContractError("direct sums need both --n1 and --n2");
    return SpaceSignature::direct_sum(parse_exponent(o.p1), *o.n1, parse_exponent(o.p2), *o.n2, parse_exponent(o.r));
  }
  const std::size_t n = o.n.value_or(inferred_n);
  if (n == 0) throw ContractError("--n is required when no point is given");
  return SpaceSignature::lp(n, parse_exponent(o.p));
}

ComplexVector point(const Options& o, const std::string& literal, const char* flag) {
  if (literal.empty()) throw ContractError(std::string("missing ") + flag);
  std::vector<cplx> e = parse_complex_list(literal);
  const SpaceSignature space = space_for(o, e.size());
  if (e.size() != space.dimension()) {
    throw ContractError(std::string(flag) + " has " + std::to_string(e.size()) + " entries, the space has dimension " +
                        std::to_string(space.dimension()));
  }
  return ComplexVector(space, std::move(e));
}

SolveConfig solve_config(const Options& o) {
  SolveConfig c;
  c.tolerance = o.tol;
  c.multistarts = o.multistarts;
  c.beta_strategy = parse_beta_strategy(o.beta);
  c.seed = o.seed;
  c.validate();
  return c;
}

std::vector<double> epsilons(const Options& o) {
  if (o.eps.empty()) return {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
  std::vector<double> out;
  std::stringstream ss(o.eps);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const cplx e = parse_complex(item);
    if (e.imag() != 0.0) throw ContractError("epsilon must be real");
    out.push_back(e.real());
  }
  return out;
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json read_json_file(const std::string& path) {
  if (path.empty()) throw ContractError("missing --params");
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot open " + path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ContractError(std::string("malformed JSON: ") + e.what());
  }
}

int emit(const Json& j) {
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_distance(const Options& o) {
  const ComplexVector x = point(o, o.x, "--x");
  const ComplexVector y = point(o, o.y, "--y");
  if (x.space.is_direct_sum()) {
    const DirectSumGeodesic g = solve_direct_sum_experimental(x, y, solve_config(o));
    return emit(Json{{"space", x.space.describe()},
                     {"distance", number(atanh_clamped(g.s))},
                     {"s", number(g.s)},
                     {"residual", number(g.residual_norm)},
                     {"experimental", true}});
  }
  if (x.space.as_lp().p.is_infinite()) {
    return emit(Json{{"space", x.space.describe()}, {"distance", number(polydisc_distance(x, y))}});
  }
  const NormalizedGeodesic g = solve(x, y, solve_config(o));
  Json out{{"space", x.space.describe()},
           {"distance", number(g.distance())},
           {"s", number(g.s)},
           {"residual", number(g.residual_norm)}};
  if (o.bracket) out["bracket"] = to_json(metric_bracket(x, y, o.degree, o.trials, o.seed));
  return emit(out);
}

int cmd_polydisc(Options o) {
  o.p = "inf";
  const ComplexVector x = point(o, o.x, "--x");
  const ComplexVector y = point(o, o.y, "--y");
  return emit(Json{{"space", x.space.describe()}, {"distance", number(polydisc_distance(x, y))}});
}

int cmd_solve(const Options& o) {
  const ComplexVector x = point(o, o.x, "--x");
  const ComplexVector y = point(o, o.y, "--y");
  return emit(to_json(solve(x, y, solve_config(o))));
}

int cmd_verify(const Options& o) {
  const GeodesicParams params = params_from_json(read_json_file(o.params_file));
  VerifyOptions vo;
  vo.seed = o.seed;
  const VerificationReport report = verify(params, vo);
  emit(to_json(report));
  return report.pass() ? 0 : kExitVerification;
}

int cmd_modulus(const Options& o) {
  const SpaceSignature space = space_for(o, 0);
  const std::vector<ModulusRow> rows = modulus_sweep(space, epsilons(o), o.trials, o.seed);
  if (o.format == "csv") {
    std::cout << "epsilon,delta,omega_c,slope\n";
    for (const auto& r : rows) {
      std::cout << csv_number(r.epsilon) << ',' << csv_number(r.delta) << ',' << csv_number(r.omega_c) << ','
                << csv_number(r.slope) << '\n';
    }
    return 0;
  }
  Json out{{"space", space.describe()}, {"rows", Json::array()}};
  for (const auto& r : rows) {
    out["rows"].push_back(Json{{"epsilon", number(r.epsilon)},
                               {"delta", number(r.delta)},
                               {"omega_c", number(r.omega_c)},
                               {"slope", number(r.slope)}});
  }
  return emit(out);
}

// explicit (x, v), or `samples` seeded random pairs with |x| < 0.8
int cmd_curvature(const Options& o) {
  std::vector<std::pair<ComplexVector, ComplexVector>> cases;
  if (!o.x.empty() || !o.v.empty()) {
    cases.emplace_back(point(o, o.x, "--x"), point(o, o.v, "--v"));
  } else {
    const SpaceSignature space = space_for(o, 0);
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const std::size_t n = space.dimension();
    for (int k = 0; k < o.samples; ++k) {
      std::vector<cplx> xe(n), ve(n);
      for (auto& e : xe) e = {g(rng), g(rng)};
      for (auto& e : ve) e = {g(rng), g(rng)};
      ComplexVector x(space, xe);
      x = cplx(0.8 * uni(rng) / norm(x)) * x;
      cases.emplace_back(x, ComplexVector(space, ve));
    }
  }
  const SolveConfig config = solve_config(o);
  std::vector<CurvatureResult> results;
  for (const auto& [x, v] : cases) results.push_back(curvature(x, v, config));
  if (o.format == "csv") {
    std::cout << "index,kappa,metric,check_gap\n";
    for (std::size_t k = 0; k < results.size(); ++k) {
      std::cout << k << ',' << csv_number(results[k].kappa) << ',' << csv_number(results[k].metric) << ','
                << csv_number(results[k].check_gap) << '\n';
    }
    return 0;
  }
  if (results.size() == 1) return emit(to_json(results.front()));
  Json rows = Json::array();
  for (std::size_t k = 0; k < results.size(); ++k) {
    Json row = to_json(results[k]);
    row["x"] = to_json(cases[k].first);
    row["v"] = to_json(cases[k].second);
    rows.push_back(row);
  }
  return emit(Json{{"rows", rows}});
}

int fail(const Options& o, int code, const std::string& kind, const std::string& message,
         std::optional<double> value = std::nullopt) {
  if (o.format == "csv") {
    std::cerr << "error: " << message << '\n';
  } else {
    Json j{{"error", message}, {"kind", kind}};
    if (value) j["value"] = number(*value);
    std::cerr << j.dump() << '\n';
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Invariant metrics and complex geodesics of l^p balls"};
  app.require_subcommand(1);

  const auto add_space = [&](CLI::App* c) {
    c->add_option("--p", o.p, "exponent (number >= 1 or inf)");
    c->add_option("--n", o.n, "dimension (default: length of --x)");
    c->add_option("--n1", o.n1, "direct sum: first block dimension");
    c->add_option("--n2", o.n2, "direct sum: second block dimension");
    c->add_option("--p1", o.p1, "direct sum: first block exponent");
    c->add_option("--p2", o.p2, "direct sum: second block exponent");
    c->add_option("--r", o.r, "direct sum: outer exponent");
  };
  const auto add_solver = [&](CLI::App* c) {
    c->add_option("--tol", o.tol, "residual tolerance");
    c->add_option("--multistarts", o.multistarts, "solver multistarts");
    c->add_option("--beta", o.beta, "ones | enum | adaptive");
  };
  const auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "random seed");
    c->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* distance_cmd = app.add_subcommand("distance", "Caratheodory = Kobayashi distance between --x and --y");
  add_space(distance_cmd);
  add_solver(distance_cmd);
  add_common(distance_cmd);
  distance_cmd->add_option("--x", o.x, "first point");
  distance_cmd->add_option("--y", o.y, "second point");
  distance_cmd->add_flag("--bracket", o.bracket, "also report the independent lower/upper bracket");
  distance_cmd->add_option("--degree", o.degree, "bracket: disc class (1 = affine only)");
  distance_cmd->add_option("--trials", o.trials, "bracket: random starts");

  auto* solve_cmd = app.add_subcommand("solve", "normalized complex geodesic through --x and --y");
  add_space(solve_cmd);
  add_solver(solve_cmd);
  add_common(solve_cmd);
  solve_cmd->add_option("--x", o.x, "first point");
  solve_cmd->add_option("--y", o.y, "second point");

  auto* verify_cmd = app.add_subcommand("verify", "certify geodesic parameters read from --params");
  add_common(verify_cmd);
  verify_cmd->add_option("--params", o.params_file, "JSON file, - for stdin");

  auto* modulus_cmd = app.add_subcommand("modulus", "modulus of complex convexity sweep");
  add_space(modulus_cmd);
  add_common(modulus_cmd);
  modulus_cmd->add_option("--eps", o.eps, "comma-separated epsilons (default 1e-1 ... 1e-3)");
  modulus_cmd->add_option("--trials", o.trials, "random starts per epsilon");

  auto* curvature_cmd = app.add_subcommand("curvature", "holomorphic sectional curvature of the Kobayashi metric");
  add_space(curvature_cmd);
  add_solver(curvature_cmd);
  add_common(curvature_cmd);
  curvature_cmd->add_option("--x", o.x, "base point");
  curvature_cmd->add_option("--v", o.v, "tangent vector");
  curvature_cmd->add_option("--samples", o.samples, "random (x, v) pairs when --x/--v are absent");

  auto* polydisc_cmd = app.add_subcommand("polydisc", "polydisc distance max_j rho(x_j, y_j)");
  polydisc_cmd->add_option("--n", o.n, "dimension (default: length of --x)");
  add_common(polydisc_cmd);
  polydisc_cmd->add_option("--x", o.x, "first point");
  polydisc_cmd->add_option("--y", o.y, "second point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(o, kExitContract, "usage", e.what());
  }

  try {
    if (*distance_cmd) return cmd_distance(o);
    if (*solve_cmd) return cmd_solve(o);
    if (*verify_cmd) return cmd_verify(o);
    if (*modulus_cmd) return cmd_modulus(o);
    if (*curvature_cmd) return cmd_curvature(o);
    return cmd_polydisc(o);
  } catch (const NonConvergence& e) {
    return fail(o, kExitNonconvergence, "nonconvergence", e.what(), e.best_residual());
  } catch (const PrecisionError& e) {
    return fail(o, kExitNonconvergence, "precision", e.what(), e.gap());
  } catch (const EvaluationError& e) {
    return fail(o, kExitNonconvergence, "evaluation", e.what(), e.theta());
  } catch (const DomainError& e) {
    return fail(o, kExitContract, "domain", e.what());
  } catch (const ContractError& e) {
    return fail(o, kExitContract, "contract", e.what());
  } catch (const std::exception& e) {
    return fail(o, kExitContract, "contract", e.what());
  }
}
