// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "holomet/disc.hpp"
#include "holomet/errors.hpp"
#include "holomet/metric_lab.hpp"
#include "holomet/solver.hpp"
#include "holomet/verifier.hpp"
#include "support.hpp"

using namespace holomet;
using testsupport::plain_atanh;
using testsupport::random_point;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const std::vector<double> kExponents = {1.0, 1.5, 2.0, 3.0};

// solver outputs shared by criteria 4, 5 and 11
std::vector<NormalizedGeodesic>& pool() {
  static std::vector<NormalizedGeodesic> geodesics = [] {
    std::vector<NormalizedGeodesic> out;
    std::mt19937_64 rng(104);
    for (double p : kExponents) {
      for (std::size_t n : {2u, 3u, 4u}) {
        for (int k = 0; k < 3; ++k) {
          const auto s = SpaceSignature::lp(n, p);
          out.push_back(solve(random_point(s, rng), random_point(s, rng)));
        }
      }
    }
    return out;
  }();
  return geodesics;
}

Outcome origin_identity() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = std::vector<std::size_t>{1, 2, 4}[k % 3];
    const double p = kExponents[(k / 3) % 4];
    const auto s = SpaceSignature::lp(n, p);
    const ComplexVector z = random_point(s, rng, 0.01, 0.95);
    const double expect = plain_atanh(testsupport::plain_lp_norm(z.entries, p));
    worst = std::max(worst, std::abs(distance(ComplexVector(s), z) - expect));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-8 && secs < 60.0, fmt("max |d - atanh|z|| = %.3g, %.1f s", worst, secs)};
}

Outcome hilbert_oracle() {
  const double spot = testsupport::hilbert_ball_tanh({0.5, 0.0}, {0.0, 0.5});
  if (std::abs(spot - std::sqrt(7.0) / 4.0) > 1e-12) return {false, fmt("oracle spot value %.12g", spot)};
  std::mt19937_64 rng(102);
  double worst = 0.0;
  for (std::size_t n : {2u, 3u}) {
    const auto s = SpaceSignature::lp(n, 2.0);
    for (int k = 0; k < 50; ++k) {
      const ComplexVector x = random_point(s, rng), y = random_point(s, rng);
      const double oracle = plain_atanh(testsupport::hilbert_ball_tanh(x.entries, y.entries));
      worst = std::max(worst, std::abs(distance(x, y) - oracle));
    }
  }
  return {worst < 1e-6, fmt("oracle spot %.10f, max deviation %.3g over 100 pairs", spot, worst)};
}

Outcome polydisc_formula() {
  std::mt19937_64 rng(103);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto s = SpaceSignature::lp(2 + k % 3, Exponent::infinity());
    const ComplexVector x = random_point(s, rng, 0.0, 0.99), y = random_point(s, rng, 0.0, 0.99);
    worst = std::max(worst, std::abs(polydisc_distance(x, y) - testsupport::polydisc_oracle(x.entries, y.entries)));
  }
  return {worst <= 1e-12, fmt("max deviation %.3g", worst)};
}

Outcome admissibility() {
  double res = 0.0, dev = 0.0;
  for (const auto& g : pool()) {
    res = std::max(res, constraint_residuals(g.params).max_abs());
    for (const auto& t : boundary_trace(g.params, 512)) dev = std::max(dev, std::abs(t.norm - 1.0));
  }
  return {res < 1e-9 && dev < 1e-8,
          fmt("%.0f geodesics: max constraint residual %.3g, max boundary deviation %.3g",
              static_cast<double>(pool().size()), res, dev)};
}

Outcome dual_certification() {
  double align = 0.0, min_real = 1e300;
  bool all = true;
  for (const auto& g : pool()) {
    VerifyOptions o;
    o.competitors = 20;
    const VerificationReport r = verify(g.params, o);
    align = std::max(align, r.alignment_max_dev);
    min_real = std::min(min_real, r.poisson_min_real);
    all = all && r.alignment_pass && r.poisson_pass;
  }
  return {all && align < 1e-8 && min_real > 0.0, fmt("max alignment %.3g, min Re H %.3g", align, min_real)};
}

Outcome bracket_closure() {
  std::mt19937_64 rng(106);
  double gap = 0.0, outside = 0.0;
  int pairs = 0;
  for (double p : kExponents) {
    for (std::size_t n : {2u, 3u, 4u}) {
      for (int k = 0; k < 2; ++k) {
        const auto s = SpaceSignature::lp(n, p);
        const ComplexVector x = random_point(s, rng), y = random_point(s, rng);
        const double d = distance(x, y);
        const MetricEstimate e = metric_bracket(x, y, 6, 32);
        gap = std::max(gap, e.gap());
        outside = std::max({outside, e.lower - d, d - e.upper});
        ++pairs;
      }
    }
  }
  return {gap < 1e-4 && outside <= 1e-9,
          fmt("%.0f pairs: max gap %.3g, max containment violation %.3g", pairs, gap, std::max(outside, 0.0))};
}

Outcome uniqueness() {
  std::mt19937_64 rng(107);
  double worst = 0.0;
  bool partial = false;
  for (double p : kExponents) {
    for (int k = 0; k < 2; ++k) {
      const auto s = SpaceSignature::lp(3, p);
      const UniquenessReport r = uniqueness_probe(random_point(s, rng), random_point(s, rng), 10);
      worst = std::max(worst, r.max_map_discrepancy);
      partial = partial || r.partial;
    }
  }
  return {!partial && worst < 1e-6, fmt("max map discrepancy %.3g over 64-point grids", worst)};
}

Outcome curvature_constant() {
  std::mt19937_64 rng(108);
  std::string detail;
  bool ok = true;
  for (double p : kExponents) {
    const double tol = p == 1.0 ? 1e-2 : 5e-3;
    double worst = 0.0;
    int failures = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < 20; ++k) {
      const auto s = SpaceSignature::lp(2 + k % 2, p);
      const ComplexVector x = random_point(s, rng, 0.0, 0.8);
      const ComplexVector v = testsupport::random_unit(s, rng);
      try {
        worst = std::max(worst, std::abs(curvature(x, v).kappa + 4.0));
      } catch (const Error&) {
        ++failures;
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && failures == 0 && worst < tol && secs < 300.0;
    detail += fmt("p=%g: %.2g", p, worst) + fmt(" (%.1f s)", secs) + (failures ? " with errors" : "") + "; ";
  }
  return {ok, detail.substr(0, detail.size() - 2)};
}

Outcome modulus_scaling() {
  const auto l1 = SpaceSignature::lp(2, 1.0);
  const std::vector<double> eps = {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
  const std::vector<ModulusRow> rows = modulus_sweep(l1, eps);
  const double slope = rows.back().slope;
  double violation = 0.0;
  for (const auto& r : rows) {
    const double half = convexity_modulus(l1, r.epsilon / 2.0).delta_value;
    violation = std::max({violation, half - r.omega_c, r.omega_c - 2.0 * r.delta});
  }
  return {slope >= 0.4 && slope <= 0.6 && violation <= 1e-6,
          fmt("slope %.4f, worst sandwich excess %.3g", slope, std::max(violation, 0.0))};
}

Outcome projection_monotonicity() {
  std::mt19937_64 rng(110);
  double worst = -1e300;
  for (int k = 0; k < 100; ++k) {
    const auto s = SpaceSignature::lp(4, kExponents[k % 4]);
    const ComplexVector x = random_point(s, rng), y = random_point(s, rng);
    const ComplexVector hx = project_head(x, 2), hy = project_head(y, 2);
    if (norm(hx - hy) == 0.0) continue;
    worst = std::max(worst, distance(hx, hy) - distance(x, y));
  }
  return {worst <= 1e-8, fmt("max d(head) - d(full) = %.3g", worst)};
}

Outcome holder_floor() {
  double lowest = 1e300;
  int count = 0;
  for (const auto& g : pool()) {
    if (g.params.p != 1.0) continue;
    lowest = std::min(lowest, holder_exponent_estimate(g.params, 0.5).slope);
    ++count;
  }
  // a geodesic through a boundary-touching Blaschke zero exercises the square-root regime
  std::mt19937_64 rng(111);
  for (int k = 0; k < 4; ++k) {
    lowest = std::min(lowest, holder_exponent_estimate(testsupport::random_admissible(1.0, 3, rng, true), 0.5).slope);
    ++count;
  }
  return {lowest >= 0.45, fmt("lowest fitted exponent %.4f over %.0f p=1 geodesics", lowest, count)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"origin-distance identity", origin_identity},
      {"Hilbert-ball oracle match", hilbert_oracle},
      {"polydisc formula", polydisc_formula},
      {"geodesic admissibility", admissibility},
      {"dual-criterion certification", dual_certification},
      {"bracket closure", bracket_closure},
      {"uniqueness property", uniqueness},
      {"curvature constant", curvature_constant},
      {"convexity-modulus scaling", modulus_scaling},
      {"projection monotonicity", projection_monotonicity},
      {"Hoelder floor", holder_floor},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
