#include "holomet/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "holomet/disc.hpp"
#include "holomet/errors.hpp"

namespace holomet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx unit(double theta) { return std::polar(1.0, theta); }

// (1 - conj(a) zeta)^e, principal branch; 0 at the zero for e > 0.
cplx half_plane_power(cplx a, double e, cplx zeta) {
  if (e == 0.0) return 1.0;
  const cplx w = 1.0 - std::conj(a) * zeta;
  if (w == cplx{}) return {};
  return std::exp(e * std::log(w));
}

void require_admissible(const GeodesicParams& params) {
  params.validate();
  const auto r = constraint_residuals(params);
  if (r.max_abs() > kAdmissibleGate) {
    throw InadmissibleParams("dual map: constraint residuals above the admissibility gate", r.scalar_residual,
                             std::abs(r.vector_residual));
  }
}

DualFunctional dual_map_unchecked(const GeodesicParams& params, cplx zeta) {
  const double p = params.p;
  const std::size_t n = params.dimension();
  DualFunctional h(params.space(), std::vector<cplx>(n));
  const cplx tail = half_plane_power(params.gamma, 2.0 / p, zeta);
  for (std::size_t j = 0; j < n; ++j) {
    const cplx c = params.c[j];
    if (c == cplx{}) continue;
    const cplx ct = std::pow(std::abs(c), p - 2.0) * std::conj(c);
    const cplx a = params.alpha[j];
    cplx v = ct * half_plane_power(a, 2.0 - 2.0 / p, zeta) * tail;
    if (params.beta[j] == 0) {
      // B_j; identically -alpha when |alpha| = 1
      v *= std::abs(a) >= 1.0 ? -a : (zeta - a) / (1.0 - std::conj(a) * zeta);
    }
    h.entries[j] = v;
  }
  return h;
}

double max_entry_gap(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

ComplexVector cauchy_derivative_at_zero(const DiscMap& g, double radius, int nodes) {
  ComplexVector acc = g(cplx{});
  for (auto& e : acc.entries) e = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double th = kTwoPi * k / nodes;
    const ComplexVector v = g(radius * unit(th));
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += v[j] * unit(-th);
  }
  for (auto& e : acc.entries) e /= radius * nodes;
  return acc;
}

double max_boundary_norm(const DiscMap& g, int grid) {
  double m = 0.0;
  for (int k = 0; k < grid; ++k) m = std::max(m, norm(g(unit(kTwoPi * k / grid))));
  return m;
}

}  // namespace

DualFunctional dual_map_eval(const GeodesicParams& params, cplx zeta) {
  require_admissible(params);
  if (std::abs(zeta) > 1.0 + 1e-14) {
    std::ostringstream os;
    os << "dual_map_eval: zeta = " << zeta << " outside the closed disc";
    throw DomainError(os.str());
  }
  return dual_map_unchecked(params, zeta);
}

double dual_weight(const GeodesicParams& params, double theta) {
  return std::norm(1.0 - std::conj(params.gamma) * unit(theta));
}

AlignmentResult alignment_check(const GeodesicParams& params, int grid) {
  require_admissible(params);
  if (grid < 1) throw ContractError("alignment_check: grid must be positive");
  AlignmentResult out;
  for (int k = 0; k < grid; ++k) {
    const double th = kTwoPi * k / grid;
    const ComplexVector x = eval(params, unit(th));
    const DualFunctional h = dual_map_unchecked(params, unit(th));
    const double nx = norm(x);
    const ComplexVector u = (1.0 / nx) * x;
    const DualFunctional N = support_functional(u);
    const cplx scale = unit(th) * dual_weight(params, th);
    bool zero_coordinate = false;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (std::abs(x[j]) < 1e-12) {
        zero_coordinate = zero_coordinate || h.entries[j] != cplx{};
        continue;
      }
      // N was built from x / |x|; |x| differs from 1 by the boundary deviation only
      out.max_dev = std::max(out.max_dev, std::abs(h.entries[j] - scale * N.entries[j]));
    }
    if (zero_coordinate) ++out.skipped;
  }
  return out;
}

PoissonResult poisson_positivity_check(const GeodesicParams& params, const DiscMap& competitor, int grid) {
  require_admissible(params);
  if (grid < 8) throw ContractError("poisson_positivity_check: grid must be at least 8");
  const ComplexVector x = eval(params, cplx{});
  const ComplexVector g0 = competitor(cplx{});
  if (g0.size() != x.size() || max_entry_gap(g0.entries, x.entries) > 1e-10) {
    throw ContractError("poisson_positivity_check: competitor must satisfy g(0) = phi(0)");
  }

  PoissonResult out;
  double max_abs = 0.0;
  const auto boundary_mean = [&](int points) {
    cplx mean{};
    double lowest = std::numeric_limits<double>::infinity();
    for (int k = 0; k < points; ++k) {
      const double th = kTwoPi * k / points;
      const cplx z = unit(th);
      const ComplexVector d = eval(params, z) - competitor(z);
      const DualFunctional h = dual_map_unchecked(params, z);
      cplx H{};
      for (std::size_t j = 0; j < d.size(); ++j) H += d[j] * h.entries[j];
      H /= z;
      if (!std::isfinite(H.real()) || !std::isfinite(H.imag())) throw EvaluationError("H is not finite", th);
      lowest = std::min(lowest, H.real());
      mean += H;
      max_abs = std::max(max_abs, std::abs(H));
    }
    out.min_real = std::min(out.min_real, lowest);
    return mean / static_cast<double>(points);
  };
  out.min_real = std::numeric_limits<double>::infinity();
  out.h0_poisson = boundary_mean(grid);
  // poles of (1 - conj(gamma) zeta)^{-2/p} close to the circle slow the trapezoid rule down
  for (int points = 2 * grid; points <= 16 * grid; points *= 2) {
    const cplx finer = boundary_mean(points);
    const bool settled = std::abs(finer - out.h0_poisson) < 1e-10;
    out.h0_poisson = finer;
    if (settled) break;
  }

  const ComplexVector dphi = eval_derivative(params, cplx{});
  const ComplexVector dg = cauchy_derivative_at_zero(competitor, 0.5, 64);
  const DualFunctional h0 = dual_map_unchecked(params, cplx{});
  for (std::size_t j = 0; j < dphi.size(); ++j) out.h0_direct += (dphi[j] - dg[j]) * h0.entries[j];
  out.reconstruction_error = std::abs(out.h0_direct - out.h0_poisson);
  out.equality_case = max_abs < 1e-12;
  return out;
}

DiscMap random_polynomial_competitor(const GeodesicParams& params, int degree, double shrink, std::mt19937_64& rng) {
  if (degree < 1) throw ContractError("competitor degree must be at least 1");
  const ComplexVector x = eval(params, cplx{});
  const ComplexVector d1 = eval_derivative(params, cplx{});
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const cplx lambda = std::polar(std::sqrt(uni(rng)), kTwoPi * uni(rng));

  std::vector<ComplexVector> coeffs;
  coeffs.push_back(lambda * d1);
  for (int k = 2; k <= degree; ++k) {
    ComplexVector a(x.space);
    for (auto& e : a.entries) e = cplx(gauss(rng), gauss(rng)) * (0.5 / k);
    coeffs.push_back(a);
  }
  const auto poly = [x, coeffs](double tau) {
    return [x, coeffs, tau](cplx z) {
      ComplexVector v = x;
      cplx zk = 1.0;
      for (const auto& a : coeffs) {
        zk *= z;
        for (std::size_t j = 0; j < v.size(); ++j) v[j] += tau * zk * a[j];
      }
      return v;
    };
  };

  // boundary norm is convex in tau, so the feasible taus form an interval [0, tau*]
  const double cap = 1.0 - shrink;
  if (norm(x) >= cap) return poly(0.0);
  double lo = 0.0, hi = 1.0;
  if (max_boundary_norm(poly(hi), 1024) > cap) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (max_boundary_norm(poly(mid), 1024) <= cap ? lo : hi) = mid;
    }
    hi = lo;
  }
  return poly(hi);
}

double schwarz_pick_certificate(const DiscMap& map, const std::vector<std::pair<cplx, cplx>>& pairs,
                                const DistanceOracle& oracle) {
  double dev = 0.0;
  for (const auto& [u, v] : pairs) {
    dev = std::max(dev, std::abs(poincare_distance(u, v) - oracle(map(u), map(v))));
  }
  return dev;
}

bool gentili_ray_check(const std::vector<cplx>& samples, cplx gamma, double tol) {
  const int N = static_cast<int>(samples.size());
  for (int k = 0; k < N; ++k) {
    const cplx z = unit(kTwoPi * k / N);
    const cplx q = samples[k] * (1.0 - std::conj(gamma) * z) / (z - gamma);
    if (!(std::abs(q.imag()) < tol) || !(q.real() >= -tol)) return false;
  }
  return true;
}

HolderFit holder_exponent_estimate(const GeodesicParams& params, double s_expected) {
  require_admissible(params);
  std::vector<double> thetas;
  for (int k = 0; k < 256; ++k) thetas.push_back(kTwoPi * k / 256);
  for (std::size_t j = 0; j < params.dimension(); ++j) {
    if (params.c[j] != cplx{} && std::abs(params.alpha[j]) > 0.9) thetas.push_back(std::arg(params.alpha[j]));
  }

  std::vector<double> lx, ly;
  for (int e = 0; e <= 12; ++e) {
    const double h = std::pow(10.0, -1.0 - 0.25 * e);
    double worst = 0.0;
    for (double th : thetas) {
      for (double shift : {0.0, -h, -0.5 * h}) {
        const double a = th + shift;
        worst = std::max(worst, norm(eval(params, unit(a)) - eval(params, unit(a + h))));
      }
    }
    if (worst <= 0.0) continue;
    lx.push_back(std::log(2.0 * std::sin(0.5 * h)));
    ly.push_back(std::log(worst));
  }

  HolderFit fit;
  if (lx.size() < 2) {
    // constant boundary map: any exponent works
    fit.slope = 1.0;
    fit.meets_expected = true;
    return fit;
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.meets_expected = fit.slope >= s_expected - 0.05;
  return fit;
}

VerificationReport verify(const GeodesicParams& params, const VerifyOptions& options) {
  VerificationReport rep;
  const double inf = std::numeric_limits<double>::infinity();
  try {
    params.validate();
  } catch (const ContractError&) {
    rep.constraint_residual = rep.boundary_norm_max_dev = rep.alignment_max_dev = inf;
    rep.poisson_min_real = -inf;
    return rep;
  }
  rep.constraint_residual = constraint_residuals(params).max_abs();
  rep.constraints_pass = rep.constraint_residual <= kAdmissibleGate;

  for (int k = 0; k < options.boundary_samples; ++k) {
    const double nx = norm(eval(params, unit(kTwoPi * k / options.boundary_samples)));
    rep.boundary_norm_max_dev = std::max(rep.boundary_norm_max_dev, std::abs(nx - 1.0));
  }
  rep.boundary_pass = rep.boundary_norm_max_dev < options.tolerance;
  if (!rep.constraints_pass || !is_nonconstant(params)) {
    rep.alignment_max_dev = inf;
    rep.poisson_min_real = -inf;
    return rep;
  }

  const auto al = alignment_check(params, options.alignment_grid);
  rep.alignment_max_dev = al.max_dev;
  rep.alignment_skipped = al.skipped;
  rep.alignment_pass = al.max_dev < options.tolerance;

  const ComplexVector x = eval(params, cplx{});
  std::vector<DiscMap> competitors;
  competitors.push_back([x](cplx) { return x; });
  competitors.push_back([params](cplx z) { return eval(params, 0.9 * z); });
  std::mt19937_64 rng(options.seed);
  for (int k = 0; k < options.competitors; ++k) {
    competitors.push_back(random_polynomial_competitor(params, options.competitor_degree, options.shrink, rng));
  }
  rep.poisson_min_real = inf;
  for (const auto& g : competitors) {
    const auto r = poisson_positivity_check(params, g, options.poisson_grid);
    rep.poisson_min_real = std::min(rep.poisson_min_real, r.min_real);
    rep.poisson_reconstruction_max_err = std::max(rep.poisson_reconstruction_max_err, r.reconstruction_error);
  }
  rep.poisson_pass = rep.poisson_min_real > 0.0 && rep.poisson_reconstruction_max_err < 1e-6;
  return rep;
}

}  // namespace holomet
