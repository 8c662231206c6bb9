#pragma once

// Certification of candidate geodesics of the l^p ball: alignment of the dual map h with
// supporting functionals on the circle, positivity of
//
//   H(zeta) = < (phi(zeta) - g(zeta)) / zeta, h(zeta) >
//
// against competitor discs g with g(0) = phi(0), Schwarz-Pick equality spot checks,
// the ray test for scalar boundary quotients and a boundary Hoelder fit.
//
// "Almost every theta" is checked on equispaced grids; isolated zeros of phi_j between grid
// points are assumed not to hide sign changes (the traces generated here are smooth).

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "holomet/geodesic.hpp"

namespace holomet {

/// h(zeta)_j = ct_j (1 - conj(alpha_j) zeta)^{2-2/p} (1 - conj(gamma) zeta)^{2/p} B_j(zeta)^{1-beta_j},
/// ct_j = |c_j|^{p-2} conj(c_j) (0 where c_j = 0). InadmissibleParams past kAdmissibleGate.
DualFunctional dual_map_eval(const GeodesicParams& params, cplx zeta);

/// |1 - conj(gamma) e^{i theta}|^2.
double dual_weight(const GeodesicParams& params, double theta);

struct AlignmentResult {
  /// max over the grid of max_j |h_j - e^{i theta} w(theta) N_j|.
  double max_dev = 0.0;
  /// Grid points where some coordinate of phi vanished and was left out (p = 1 ambiguity).
  int skipped = 0;
};

AlignmentResult alignment_check(const GeodesicParams& params, int grid = 256);

struct PoissonResult {
  /// min over the grid of Re H(e^{i theta}).
  double min_real = 0.0;
  /// H(0) = < phi'(0) - g'(0), h(0) >, with g'(0) from a Cauchy integral at radius 1/2.
  cplx h0_direct{};
  /// Mean of H over the boundary grid, doubled (up to 16x) until two successive means agree to 1e-10.
  cplx h0_poisson{};
  double reconstruction_error = 0.0;
  /// H vanished identically on the grid: the competitor is phi itself.
  bool equality_case = false;
};

/// ContractError if |g(0) - phi(0)| > 1e-10.
PoissonResult poisson_positivity_check(const GeodesicParams& params, const DiscMap& competitor, int grid = 1024);

/// Random polynomial disc of the given degree with g(0) = phi(0) and g'(0) = lambda phi'(0)
/// (|lambda| <= 1), scaled about phi(0) so that sampled boundary norms stay below 1 - shrink.
DiscMap random_polynomial_competitor(const GeodesicParams& params, int degree, double shrink, std::mt19937_64& rng);

using DistanceOracle = std::function<double(const ComplexVector&, const ComplexVector&)>;

/// max over pairs of |rho(u, v) - oracle(map(u), map(v))|.
double schwarz_pick_certificate(const DiscMap& map, const std::vector<std::pair<cplx, cplx>>& pairs,
                                const DistanceOracle& oracle);

/// samples[k] = f(e^{2 pi i k / N}). True iff every f / ((zeta - gamma) / (1 - conj(gamma) zeta))
/// has |Im| < tol and Re >= -tol.
bool gentili_ray_check(const std::vector<cplx>& samples, cplx gamma, double tol = 1e-8);

struct HolderFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// slope >= s_expected - 0.05
  bool meets_expected = false;
};

/// Log-log fit of max_theta |phi(e^{i theta}) - phi(e^{i(theta + h)})| against h over
/// h = 10^{-1}, ..., 10^{-4}. The grid includes the arguments of boundary alphas.
HolderFit holder_exponent_estimate(const GeodesicParams& params, double s_expected);

struct VerifyOptions {
  double tolerance = 1e-8;
  int boundary_samples = 512;
  int alignment_grid = 256;
  int poisson_grid = 1024;
  int competitors = 20;
  int competitor_degree = 6;
  double shrink = 1e-3;
  std::uint64_t seed = 0;
};

struct VerificationReport {
  double constraint_residual = 0.0;
  double boundary_norm_max_dev = 0.0;
  double alignment_max_dev = 0.0;
  int alignment_skipped = 0;
  /// Over the constant competitor, phi(t zeta) with t = 0.9 and the random polynomial ones.
  double poisson_min_real = 0.0;
  double poisson_reconstruction_max_err = 0.0;

  bool constraints_pass = false;
  bool boundary_pass = false;
  bool alignment_pass = false;
  bool poisson_pass = false;

  bool pass() const noexcept { return constraints_pass && boundary_pass && alignment_pass && poisson_pass; }
};

/// Full report. Never throws for inadmissible params: the failing checks are marked instead.
VerificationReport verify(const GeodesicParams& params, const VerifyOptions& options = {});

}  // namespace holomet
