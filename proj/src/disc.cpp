#include "holomet/disc.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "holomet/errors.hpp"

namespace holomet {

namespace {

void require_in_disc(cplx z, const char* name) {
  if (!(std::norm(z) < 1.0)) {
    std::ostringstream os;
    os << name << " = " << z << " is not inside the open unit disc";
    throw DomainError(os.str());
  }
}

}  // namespace

void MobiusMap::validate() const { require_in_disc(a, "MobiusMap::a"); }

MobiusMap MobiusMap::inverse() const {
  // z = e^{-it} (w - b) / (1 - conj(b) w) with b = -e^{it} a.
  const cplx rot = std::polar(1.0, phase);
  return MobiusMap{-rot * a, -phase};
}

double atanh_clamped(double t) {
  if (t < 0.0) t = 0.0;
  if (t > kTanhClamp) t = kTanhClamp;
  return 0.5 * std::log1p(2.0 * t / (1.0 - t));
}

double pseudo_hyperbolic(cplx z, cplx w) { return std::abs(z - w) / std::abs(1.0 - std::conj(w) * z); }

double poincare_distance(cplx z, cplx w) {
  require_in_disc(z, "z");
  require_in_disc(w, "w");
  // 1 - t^2 = (1-|z|^2)(1-|w|^2)/|1 - conj(w) z|^2 keeps precision near the circle.
  const double t = pseudo_hyperbolic(z, w);
  const double one_minus_t2 = (1.0 - std::norm(z)) * (1.0 - std::norm(w)) / std::norm(1.0 - std::conj(w) * z);
  const double one_minus_t = one_minus_t2 / (1.0 + t);
  if (one_minus_t < 1.0 - kTanhClamp) return atanh_clamped(kTanhClamp);
  return 0.5 * std::log((1.0 + t) / one_minus_t);
}

double poincare_infinitesimal(cplx z, cplx v) {
  require_in_disc(z, "z");
  return std::abs(v) / (1.0 - std::norm(z));
}

cplx mobius_apply(const MobiusMap& m, cplx z) {
  return std::polar(1.0, m.phase) * (z - m.a) / (1.0 - std::conj(m.a) * z);
}

double circle_mean_laplacian(const RealField& u, cplx z, double r, int samples) {
  if (samples < 1) throw ContractError("circle_mean_laplacian: samples must be positive");
  if (!(r > 0.0)) throw ContractError("circle_mean_laplacian: radius must be positive");
  const double centre = u(z);
  if (!std::isfinite(centre)) throw EvaluationError("circle_mean_laplacian: u(z) is not finite", 0.0);
  // Sum deviations from the centre value to limit cancellation at small r.
  double acc = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / samples;
    const double value = u(z + std::polar(r, theta));
    if (!std::isfinite(value)) {
      std::ostringstream os;
      os << "circle_mean_laplacian: non-finite sample at theta = " << theta;
      throw EvaluationError(os.str(), theta);
    }
    acc += value - centre;
  }
  return 4.0 / (r * r) * (acc / samples);
}

double richardson_laplacian(const RealField& u, cplx z, int samples) {
  const std::array<double, 3> radii{1e-2, std::pow(10.0, -2.5), 1e-3};
  std::array<double, 3> h{};
  std::array<double, 3> v{};
  for (std::size_t i = 0; i < radii.size(); ++i) {
    h[i] = radii[i] * radii[i];
    v[i] = circle_mean_laplacian(u, z, radii[i], samples);
  }
  // Neville's scheme, quadratic in h = r^2, evaluated at h = 0.
  for (std::size_t level = 1; level < radii.size(); ++level) {
    for (std::size_t i = radii.size() - 1; i >= level; --i) {
      v[i] = (h[i - level] * v[i] - h[i] * v[i - 1]) / (h[i - level] - h[i]);
    }
  }
  return v.back();
}

}  // namespace holomet
