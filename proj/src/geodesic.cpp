#include "holomet/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "holomet/disc.hpp"
#include "holomet/errors.hpp"

namespace holomet {

namespace {

constexpr double kBoundarySlack = 1e-14;

// (1 - conj(a) zeta)^e on the principal branch. Re(1 - conj(a) zeta) >= 0 on the closed disc.
struct PowerFactor {
  cplx a;
  double e;
};

void require_closed_disc(cplx zeta) {
  if (std::abs(zeta) > 1.0 + kBoundarySlack) {
    std::ostringstream os;
    os << "zeta = " << zeta << " lies outside the closed unit disc";
    throw DomainError(os.str());
  }
}

void require_open_disc(cplx zeta) {
  if (!(std::abs(zeta) < 1.0)) {
    std::ostringstream os;
    os << "derivative requested at zeta = " << zeta << " outside the open disc";
    throw DomainError(os.str());
  }
}

cplx product_of_powers(std::initializer_list<PowerFactor> factors, cplx zeta) {
  cplx log_sum{};
  for (const auto& f : factors) {
    if (f.e == 0.0) continue;
    const cplx w = 1.0 - std::conj(f.a) * zeta;
    if (w.real() < -1e-12) {
      std::ostringstream os;
      os << "branch guard: Re(1 - conj(a) zeta) = " << w.real() << " < 0";
      throw InvariantViolation(os.str());
    }
    if (w == cplx{}) {
      if (f.e > 0.0) return cplx{};
      throw DomainError("power factor with negative exponent vanishes");
    }
    log_sum += f.e * std::log(w);
  }
  return std::exp(log_sum);
}

// d/dzeta log of the product above.
cplx log_derivative(std::initializer_list<PowerFactor> factors, cplx zeta) {
  cplx acc{};
  for (const auto& f : factors) {
    if (f.e == 0.0) continue;
    acc += -f.e * std::conj(f.a) / (1.0 - std::conj(f.a) * zeta);
  }
  return acc;
}

cplx blaschke(cplx a, cplx zeta) { return (zeta - a) / (1.0 - std::conj(a) * zeta); }

cplx blaschke_derivative(cplx a, cplx zeta) {
  const cplx d = 1.0 - std::conj(a) * zeta;
  return (1.0 - std::norm(a)) / (d * d);
}

// c B^beta P(zeta) and its derivative for one coordinate.
cplx coordinate(cplx c, cplx a, bool beta, std::initializer_list<PowerFactor> factors, cplx zeta) {
  if (c == cplx{}) return {};
  cplx v = c * product_of_powers(factors, zeta);
  if (beta) v *= blaschke(a, zeta);
  return v;
}

cplx coordinate_derivative(cplx c, cplx a, bool beta, std::initializer_list<PowerFactor> factors, cplx zeta) {
  if (c == cplx{}) return {};
  const cplx P = c * product_of_powers(factors, zeta);
  const cplx dlog = log_derivative(factors, zeta);
  if (!beta) return P * dlog;
  return P * (blaschke_derivative(a, zeta) + blaschke(a, zeta) * dlog);
}

void check_sizes(std::size_t n, std::size_t na, std::size_t nb, const char* what) {
  if (n == 0 || na != n || nb != n) {
    std::ostringstream os;
    os << what << ": need equally many alpha, beta and c entries (got " << na << ", " << nb << ", " << n << ")";
    throw InvariantViolation(os.str());
  }
}

void check_coordinate(cplx a, std::uint8_t b, std::size_t j) {
  if (b > 1) {
    std::ostringstream os;
    os << "beta[" << j << "] must be 0 or 1";
    throw InvariantViolation(os.str());
  }
  const double m = std::abs(a);
  if (!(m <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "|alpha[" << j << "]| = " << m << " exceeds 1";
    throw InvariantViolation(os.str());
  }
  if (b == 1 && !(m < 1.0)) {
    std::ostringstream os;
    os << "beta[" << j << "] = 1 requires |alpha[" << j << "]| < 1";
    throw InvariantViolation(os.str());
  }
}

void check_gamma(cplx g, const char* name) {
  if (!(std::abs(g) < 1.0)) {
    std::ostringstream os;
    os << "|" << name << "| = " << std::abs(g) << " must be < 1";
    throw InvariantViolation(os.str());
  }
}

// Smallest positive root t of |B|^2 t^2 - A t + 1 = 0, i.e. the scale that makes
// sum t w (1+|a|^2) = 1 + |t B|^2 with gamma = t B inside the disc.
double elimination_scale(double A, cplx B) {
  const double b2 = std::norm(B);
  const double disc = std::max(A * A - 4.0 * b2, 0.0);
  return 2.0 / (A + std::sqrt(disc));
}

}  // namespace

// ---------------------------------------------------------------------------

void GeodesicParams::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvariantViolation("geodesic exponent must be finite and >= 1");
  check_sizes(c.size(), alpha.size(), beta.size(), "GeodesicParams");
  check_gamma(gamma, "gamma");
  for (std::size_t j = 0; j < c.size(); ++j) check_coordinate(alpha[j], beta[j], j);
}

void GeodesicParams::canonicalize() {
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == cplx{}) {
      alpha[j] = gamma;
      beta[j] = 0;
    }
  }
}

double ConstraintResiduals::max_abs() const noexcept { return std::max(scalar_residual, std::abs(vector_residual)); }

ComplexVector eval(const GeodesicParams& params, cplx zeta) {
  params.validate();
  require_closed_disc(zeta);
  const double k = 2.0 / params.p;
  ComplexVector out(params.space());
  for (std::size_t j = 0; j < params.dimension(); ++j) {
    out[j] = coordinate(params.c[j], params.alpha[j], params.beta[j] != 0,
                        {{params.alpha[j], k}, {params.gamma, -k}}, zeta);
  }
  return out;
}

ComplexVector eval_derivative(const GeodesicParams& params, cplx zeta) {
  params.validate();
  require_open_disc(zeta);
  const double k = 2.0 / params.p;
  ComplexVector out(params.space());
  for (std::size_t j = 0; j < params.dimension(); ++j) {
    out[j] = coordinate_derivative(params.c[j], params.alpha[j], params.beta[j] != 0,
                                   {{params.alpha[j], k}, {params.gamma, -k}}, zeta);
  }
  return out;
}

ConstraintResiduals constraint_residuals(const GeodesicParams& params) {
  double mass = 0.0;
  cplx first{};
  for (std::size_t j = 0; j < params.dimension(); ++j) {
    const double w = std::pow(std::abs(params.c[j]), params.p);
    mass += w * (1.0 + std::norm(params.alpha[j]));
    first += w * params.alpha[j];
  }
  return {std::abs(mass - (1.0 + std::norm(params.gamma))), first - params.gamma};
}

bool is_nonconstant(const GeodesicParams& params) {
  for (std::size_t j = 0; j < params.dimension(); ++j) {
    if (params.c[j] == cplx{}) continue;
    if (params.beta[j] == 1 || params.alpha[j] != params.gamma) return true;
  }
  return false;
}

std::vector<TracePoint> boundary_trace(const GeodesicParams& params, int samples, double gate) {
  if (samples < 1) throw ContractError("boundary_trace: samples must be positive");
  params.validate();
  const auto r = constraint_residuals(params);
  if (r.max_abs() >= gate) {
    std::ostringstream os;
    os.precision(6);
    os << "boundary_trace: inadmissible parameters (scalar residual " << r.scalar_residual << ", vector residual "
       << std::abs(r.vector_residual) << ")";
    throw InadmissibleParams(os.str(), r.scalar_residual, std::abs(r.vector_residual));
  }
  std::vector<TracePoint> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / samples;
    ComplexVector v = eval(params, std::polar(1.0, theta));
    const double nv = norm(v);
    out.push_back({theta, std::move(v), nv});
  }
  return out;
}

GeodesicParams linear_geodesic(const ComplexVector& unit_direction) {
  const auto& lp = unit_direction.space.as_lp();
  if (lp.p.is_infinite()) throw UnsupportedError("linear_geodesic: p = inf is outside the geodesic family");
  const double nu = norm(unit_direction);
  if (!(std::abs(nu - 1.0) <= kUnitTolerance)) throw ContractError("linear_geodesic: direction must have norm 1");
  GeodesicParams g;
  g.p = lp.p.value();
  g.gamma = 0.0;
  const std::size_t n = unit_direction.size();
  g.alpha.assign(n, cplx{});
  g.beta.assign(n, 0);
  g.c.assign(n, cplx{});
  for (std::size_t j = 0; j < n; ++j) {
    if (unit_direction[j] == cplx{}) continue;
    g.beta[j] = 1;
    g.c[j] = unit_direction[j] / nu;
  }
  return g;
}

GeodesicParams admissible_from_weights(double p, const std::vector<cplx>& alpha, const std::vector<double>& weights,
                                       const std::vector<double>& phases, const std::vector<std::uint8_t>& beta) {
  const std::size_t n = alpha.size();
  if (weights.size() != n || phases.size() != n || beta.size() != n) {
    throw ContractError("admissible_from_weights: size mismatch");
  }
  double A = 0.0;
  cplx B{};
  for (std::size_t j = 0; j < n; ++j) {
    if (!(weights[j] >= 0.0)) throw ContractError("admissible_from_weights: weights must be nonnegative");
    A += weights[j] * (1.0 + std::norm(alpha[j]));
    B += weights[j] * alpha[j];
  }
  if (!(A > 0.0)) throw ContractError("admissible_from_weights: all weights vanish");
  const double t = elimination_scale(A, B);
  GeodesicParams g;
  g.p = p;
  g.gamma = t * B;
  g.alpha = alpha;
  g.beta = beta;
  g.c.resize(n);
  for (std::size_t j = 0; j < n; ++j) g.c[j] = std::polar(std::pow(t * weights[j], 1.0 / p), phases[j]);
  g.canonicalize();
  return g;
}

DiscMap as_disc_map(const GeodesicParams& params) {
  return [params](cplx zeta) { return eval(params, zeta); };
}

// ---------------------------------------------------------------------------
// Direct sums

SpaceSignature DirectSumGeodesicParams::space() const {
  return SpaceSignature::direct_sum(signature.p1, signature.n1, signature.p2, signature.n2, signature.r);
}

void DirectSumGeodesicParams::validate() const {
  const std::size_t n = signature.n1 + signature.n2;
  if (signature.p1.is_infinite() || signature.p2.is_infinite() || signature.r.is_infinite()) {
    throw InvariantViolation("direct-sum geodesics need finite exponents");
  }
  check_sizes(n, alpha.size(), beta.size(), "DirectSumGeodesicParams");
  if (c.size() != n) throw InvariantViolation("DirectSumGeodesicParams: c has the wrong length");
  check_gamma(gamma, "gamma");
  check_gamma(block_gamma[0], "gamma_1");
  check_gamma(block_gamma[1], "gamma_2");
  for (std::size_t j = 0; j < n; ++j) check_coordinate(alpha[j], beta[j], j);
}

double DirectSumResiduals::max_abs() const noexcept {
  return std::max({std::abs(block_vector[0]), std::abs(block_vector[1]), std::abs(outer_vector), outer_scalar});
}

namespace {

struct BlockView {
  std::size_t begin;
  std::size_t end;
  double p;
  cplx gamma_i;
};

std::array<BlockView, 2> blocks_of(const DirectSumGeodesicParams& g) {
  const auto& s = g.signature;
  return {BlockView{0, s.n1, s.p1.value(), g.block_gamma[0]},
          BlockView{s.n1, s.n1 + s.n2, s.p2.value(), g.block_gamma[1]}};
}

template <class F>
ComplexVector direct_sum_apply(const DirectSumGeodesicParams& g, F&& coord) {
  ComplexVector out(g.space());
  const double kr = 2.0 / g.signature.r.value();
  for (const auto& b : blocks_of(g)) {
    const double ki = 2.0 / b.p;
    for (std::size_t j = b.begin; j < b.end; ++j) {
      out[j] = coord(g.c[j], g.alpha[j], g.beta[j] != 0, ki, kr, b.gamma_i);
    }
  }
  return out;
}

}  // namespace

ComplexVector eval_direct_sum(const DirectSumGeodesicParams& params, cplx zeta) {
  params.validate();
  require_closed_disc(zeta);
  return direct_sum_apply(params, [&](cplx c, cplx a, bool beta, double ki, double kr, cplx gi) {
    return coordinate(c, a, beta, {{a, ki}, {gi, kr - ki}, {params.gamma, -kr}}, zeta);
  });
}

ComplexVector eval_direct_sum_derivative(const DirectSumGeodesicParams& params, cplx zeta) {
  params.validate();
  require_open_disc(zeta);
  return direct_sum_apply(params, [&](cplx c, cplx a, bool beta, double ki, double kr, cplx gi) {
    return coordinate_derivative(c, a, beta, {{a, ki}, {gi, kr - ki}, {params.gamma, -kr}}, zeta);
  });
}

DirectSumResiduals direct_sum_residuals(const DirectSumGeodesicParams& params) {
  params.validate();
  DirectSumResiduals out;
  const double r = params.signature.r.value();
  double outer_mass = 0.0;
  cplx outer_first{};
  const auto blocks = blocks_of(params);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& b = blocks[i];
    double mass = 0.0;
    cplx first{};
    for (std::size_t j = b.begin; j < b.end; ++j) {
      const double w = std::pow(std::abs(params.c[j]), b.p);
      mass += w * (1.0 + std::norm(params.alpha[j]));
      first += w * params.alpha[j];
    }
    const double ci_p = mass / (1.0 + std::norm(b.gamma_i));
    out.block_scale[i] = std::pow(ci_p, 1.0 / b.p);
    out.degenerate[i] = ci_p == 0.0;
    out.block_vector[i] = out.degenerate[i] ? cplx{} : first - b.gamma_i * ci_p;
    const double ci_r = std::pow(out.block_scale[i], r);
    outer_mass += ci_r * (1.0 + std::norm(b.gamma_i));
    outer_first += ci_r * b.gamma_i;
  }
  out.outer_vector = outer_first - params.gamma;
  out.outer_scalar = std::abs(outer_mass - (1.0 + std::norm(params.gamma)));
  return out;
}

bool is_nonconstant(const DirectSumGeodesicParams& params) {
  params.validate();
  for (std::size_t j = 0; j < params.c.size(); ++j) {
    if (params.c[j] != cplx{} && params.beta[j] == 1) return true;
  }
  // All remaining coordinates are c * product of powers; constant iff the log-derivative
  // vanishes identically, which for these rational functions is detected at a few points.
  const std::array<cplx, 3> probes{cplx{0.0, 0.0}, cplx{0.31, -0.17}, cplx{-0.23, 0.41}};
  double scale = 0.0;
  for (cplx v : params.c) scale = std::max(scale, std::abs(v));
  for (cplx z : probes) {
    const auto d = eval_direct_sum_derivative(params, z);
    for (cplx v : d.entries) {
      if (std::abs(v) > 1e-13 * std::max(scale, 1.0)) return true;
    }
  }
  return false;
}

DirectSumGeodesicParams admissible_direct_sum(const DirectSumSignature& sig, const std::vector<cplx>& alpha,
                                              const std::vector<double>& weights, const std::vector<double>& phases,
                                              const std::vector<std::uint8_t>& beta, double mix) {
  const std::size_t n = sig.n1 + sig.n2;
  if (alpha.size() != n || weights.size() != n || phases.size() != n || beta.size() != n) {
    throw ContractError("admissible_direct_sum: size mismatch");
  }
  if (!(mix > 0.0 && mix < 1.0)) throw ContractError("admissible_direct_sum: mix must lie in (0, 1)");
  DirectSumGeodesicParams g;
  g.signature = sig;
  g.alpha = alpha;
  g.beta = beta;
  g.c.resize(n);
  const double r = sig.r.value();
  const std::array<std::size_t, 3> cut{0, sig.n1, n};
  const std::array<double, 2> pv{sig.p1.value(), sig.p2.value()};
  std::array<double, 2> unit_t{};
  for (std::size_t i = 0; i < 2; ++i) {
    double A = 0.0;
    cplx B{};
    for (std::size_t j = cut[i]; j < cut[i + 1]; ++j) {
      A += weights[j] * (1.0 + std::norm(alpha[j]));
      B += weights[j] * alpha[j];
    }
    if (!(A > 0.0)) throw ContractError("admissible_direct_sum: a block has no positive weight");
    unit_t[i] = elimination_scale(A, B);
    g.block_gamma[i] = unit_t[i] * B;
  }
  // Outer weights mix, 1 - mix placed at gamma_1, gamma_2.
  const double A = mix * (1.0 + std::norm(g.block_gamma[0])) + (1.0 - mix) * (1.0 + std::norm(g.block_gamma[1]));
  const cplx B = mix * g.block_gamma[0] + (1.0 - mix) * g.block_gamma[1];
  const double T = elimination_scale(A, B);
  g.gamma = T * B;
  const std::array<double, 2> ci_r{T * mix, T * (1.0 - mix)};
  for (std::size_t i = 0; i < 2; ++i) {
    // c_i^{p_i} multiplies the unit block masses.
    const double ci_p = std::pow(ci_r[i], pv[i] / r);
    for (std::size_t j = cut[i]; j < cut[i + 1]; ++j) {
      g.c[j] = std::polar(std::pow(ci_p * unit_t[i] * weights[j], 1.0 / pv[i]), phases[j]);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

double polydisc_distance(const ComplexVector& x, const ComplexVector& y) {
  if (!(x.space == y.space)) throw ContractError("polydisc_distance: space mismatch");
  if (!x.space.is_lp() || !x.space.as_lp().p.is_infinite()) {
    throw ContractError("polydisc_distance: needs an l^inf signature, got " + x.space.describe());
  }
  double best = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) best = std::max(best, poincare_distance(x[j], y[j]));
  return best;
}

}  // namespace holomet
