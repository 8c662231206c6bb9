#pragma once

// Endpoint solver: finds a normalized complex geodesic phi of the l^p family with
// phi(0) = x and phi(s) = y, which gives the Caratheodory = Kobayashi distance atanh(s).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holomet/geodesic.hpp"

namespace holomet {

enum class BetaStrategy { all_ones, enumerate, adaptive };

std::string to_string(BetaStrategy b);
/// Accepts "ones"/"all_ones", "enum"/"enumerate", "adaptive". ContractError otherwise.
BetaStrategy parse_beta_strategy(const std::string& s);

struct SolveConfig {
  double tolerance = 1e-10;
  int max_iterations = 200;
  int multistarts = 16;
  BetaStrategy beta_strategy = BetaStrategy::adaptive;
  std::uint64_t seed = 0;

  void validate() const;
};

struct NormalizedGeodesic {
  GeodesicParams params;
  double s = 0.0;
  ComplexVector x;
  ComplexVector y;
  double residual_norm = 0.0;

  double distance() const;
};

/// ContractError for x == y, mismatched or non-l^p spaces, p = inf; DomainError outside the ball;
/// NonConvergence with the best residual if no start reaches config.tolerance.
NormalizedGeodesic solve(const ComplexVector& x, const ComplexVector& y, const SolveConfig& config = {});

/// atanh(solve(x, y).s).
double distance(const ComplexVector& x, const ComplexVector& y, const SolveConfig& config = {});

struct UniquenessReport {
  int runs = 0;
  int converged_runs = 0;
  /// max over run pairs of sup over the 64-point grid of |phi_a(zeta) - phi_b(zeta)|.
  double max_map_discrepancy = 0.0;
  double max_s_discrepancy = 0.0;
  bool partial = false;  // some run did not converge
  std::vector<NormalizedGeodesic> geodesics;
};

/// Independent solves with seeds config.seed + k; compares the maps on the grid
/// {0.9 * e^{2 pi i k / 16} * (m + 1) / 4 : m < 4, k < 16}.
UniquenessReport uniqueness_probe(const ComplexVector& x, const ComplexVector& y, int runs,
                                  const SolveConfig& config = {});

// ---------------------------------------------------------------------------
// Infinitesimal mode

struct TangentGeodesic {
  GeodesicParams params;
  /// phi'(0) = mu * v / |v|, so k(x, v) = |v| / mu.
  double mu = 0.0;
  ComplexVector x;
  ComplexVector v;
  double residual_norm = 0.0;

  double metric() const;
};

/// Geodesic with phi(0) = x and phi'(0) parallel to v. Warm-started from a finite solve
/// towards x + t v / |v|.
TangentGeodesic solve_tangent(const ComplexVector& x, const ComplexVector& v, const SolveConfig& config = {});

// ---------------------------------------------------------------------------
// Direct sums (experimental: no existence theorem backs the endpoint problem)

struct DirectSumGeodesic {
  DirectSumGeodesicParams params;
  double s = 0.0;
  double residual_norm = 0.0;
};

DirectSumGeodesic solve_direct_sum_experimental(const ComplexVector& x, const ComplexVector& y,
                                                const SolveConfig& config = {});

}  // namespace holomet
