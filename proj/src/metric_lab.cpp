#include "holomet/metric_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

#include "holomet/disc.hpp"
#include "holomet/errors.hpp"
#include "holomet/optimize.hpp"
#include "holomet/parallel.hpp"

namespace holomet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

cplx unit(double theta) { return std::polar(1.0, theta); }

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

cplx chart(cplx u) { return u / std::sqrt(1.0 + std::norm(u)); }

cplx chart_inverse(cplx a) { return a / std::sqrt(std::max(1.0 - std::norm(a), 1e-12)); }

void require_pair(const ComplexVector& x, const ComplexVector& y) {
  if (!(x.space == y.space)) throw ContractError("points live in different spaces");
  if (!(norm(x) < 1.0) || !(norm(y) < 1.0)) throw DomainError("points must lie in the open unit ball");
}

using Curve = std::function<ComplexVector(cplx)>;

// Sampled max of |f| on the circle plus an allowance for the excess between samples,
// from the second differences of the sampled norms.
double certified_sup(const Curve& f, int samples) {
  std::vector<double> N(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) N[k] = norm(f(unit(kTwoPi * k / samples)));
  double top = 0.0, bend = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double prev = N[(k + samples - 1) % samples], next = N[(k + 1) % samples];
    top = std::max(top, N[k]);
    bend = std::max(bend, -(prev - 2.0 * N[k] + next));
  }
  return top + 0.25 * bend;
}

// Distance bound for moving a by |a - b| inside the ball: the affine disc of radius 1 - |a|
// about a stays in the ball.
double shift_charge(const ComplexVector& a, const ComplexVector& b) {
  const double e = norm(a - b);
  const double room = 1.0 - norm(a);
  if (e == 0.0) return 0.0;
  if (!(e < room)) return kInf;
  return std::atanh(e / room);
}

struct Charged {
  double value = kInf;
  double sup = 0.0;
  double correction = 0.0;
};

// Upper bound from a disc f with f(u) ~ x, f(v) ~ y: f / sup is a disc in the closed ball.
Charged charge_disc(const Curve& f, cplx u, cplx v, const ComplexVector& x, const ComplexVector& y) {
  Charged out;
  out.sup = certified_sup(f, 4096);
  if (!(out.sup > 0.0) || !std::isfinite(out.sup)) return out;
  const ComplexVector xh = (1.0 / out.sup) * f(u);
  const ComplexVector yh = (1.0 / out.sup) * f(v);
  out.correction = shift_charge(x, xh) + shift_charge(y, yh);
  if (!(std::abs(u) < 1.0 && std::abs(v) < 1.0)) return out;
  out.value = poincare_distance(u, v) + out.correction;
  return out;
}

// ---------------------------------------------------------------------------
// Linear functionals

DualFunctional normalized_functional(const SpaceSignature& space, const Eigen::VectorXd& w) {
  const std::size_t n = space.dimension();
  DualFunctional f(space, std::vector<cplx>(n));
  for (std::size_t j = 0; j < n; ++j) f.entries[j] = cplx(w[2 * j], w[2 * j + 1]);
  const double dn = dual_norm(f);
  for (auto& e : f.entries) e /= dn;
  return f;
}

double functional_value(const ComplexVector& x, const ComplexVector& y, const DualFunctional& f) {
  return poincare_distance(pairing(x, f), pairing(y, f));
}

Eigen::VectorXd flatten(const std::vector<cplx>& v) {
  Eigen::VectorXd out(2 * v.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    out[2 * j] = v[j].real();
    out[2 * j + 1] = v[j].imag();
  }
  return out;
}

LowerBound linear_lower(const ComplexVector& x, const ComplexVector& y, int trials, std::uint64_t seed) {
  const SpaceSignature space = x.space;
  const std::size_t n = space.dimension();
  std::vector<Eigen::VectorXd> starts;
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * n));
    e[static_cast<Eigen::Index>(2 * j)] = 1.0;
    starts.push_back(e);
  }
  const bool finite = !space.is_lp() || !space.as_lp().p.is_infinite();
  if (finite) {
    for (const ComplexVector& d : {x, y, y - x}) {
      const double nd = norm(d);
      if (nd > 0.0) starts.push_back(flatten(support_functional((1.0 / nd) * d).entries));
    }
  }
  const int random = std::min(trials, 8);
  for (int k = 0; k < random; ++k) {
    auto rng = make_rng(seed, 11, static_cast<std::uint64_t>(k));
    std::normal_distribution<double> g;
    Eigen::VectorXd w(static_cast<Eigen::Index>(2 * n));
    for (auto& e : w) e = g(rng);
    starts.push_back(w);
  }

  std::vector<LowerBound> found(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    const auto objective = [&](const Eigen::VectorXd& w) {
      if (w.norm() < 1e-12) return kInf;
      return -functional_value(x, y, normalized_functional(space, w));
    };
    BfgsOptions opts;
    opts.max_iterations = 100;
    const BfgsResult r = bfgs_minimize(objective, starts[i], opts);
    const Eigen::VectorXd& best = std::isfinite(r.value) ? r.x : starts[i];
    if (best.norm() < 1e-12) return;
    found[i].witness.kind = LowerWitness::Kind::linear;
    found[i].witness.functional = normalized_functional(space, best);
    found[i].value = functional_value(x, y, found[i].witness.functional);
  });
  LowerBound out;
  for (const auto& f : found) {
    if (f.value > out.value) out = f;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Retractions

struct DualJet {
  cplx G;
  cplx dG;
  double scale;
};

// G and G' for the left-inverse equation of psi at the point z.
DualJet left_inverse_jet(const GeodesicParams& psi, const ComplexVector& z, cplx zeta) {
  const double p = psi.p;
  const cplx gbar = std::conj(psi.gamma);
  const cplx lg = 1.0 - gbar * zeta;
  DualJet out{{}, {}, 0.0};
  for (std::size_t j = 0; j < psi.dimension(); ++j) {
    const cplx c = psi.c[j];
    if (c == cplx{} || z[j] == cplx{}) continue;
    const cplx abar = std::conj(psi.alpha[j]);
    const cplx la = 1.0 - abar * zeta;
    const cplx ct = std::pow(std::abs(c), p - 2.0) * std::conj(c);
    cplx P = ct * std::exp((2.0 / p) * std::log(lg));
    cplx L = -(2.0 / p) * gbar / lg;
    if (p != 1.0) {
      P *= std::exp((2.0 - 2.0 / p) * std::log(la));
      L += -(2.0 - 2.0 / p) * abar / la;
    }
    cplx h = P, dh = P * L;
    if (psi.beta[j] == 0) {
      const cplx B = (zeta - psi.alpha[j]) / la;
      const cplx dB = (1.0 - std::norm(psi.alpha[j])) / (la * la);
      h = P * B;
      dh = P * L * B + P * dB;
    }
    out.G += z[j] * h;
    out.dG += z[j] * dh;
    out.scale += std::abs(z[j] * h);
  }
  const cplx q = (zeta - psi.gamma) * lg;
  out.G -= q;
  out.dG -= 1.0 - 2.0 * gbar * zeta + std::norm(psi.gamma);
  out.scale += std::abs(q);
  return out;
}

// Elimination parametrization of admissible geodesics: [chart(alpha) 2n | log w n | phase n].
GeodesicParams retraction_params(double p, const Eigen::VectorXd& v, const std::vector<std::uint8_t>& beta) {
  const std::size_t n = beta.size();
  std::vector<cplx> alpha(n);
  std::vector<double> w(n), phase(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    alpha[j] = chart(cplx(v[2 * i], v[2 * i + 1]));
    w[j] = std::exp(std::clamp(v[static_cast<Eigen::Index>(2 * n) + i], -60.0, 60.0));
    phase[j] = v[static_cast<Eigen::Index>(3 * n) + i];
  }
  return admissible_from_weights(p, alpha, w, phase, beta);
}

Eigen::VectorXd retraction_vector(const GeodesicParams& psi) {
  const std::size_t n = psi.dimension();
  Eigen::VectorXd v(static_cast<Eigen::Index>(4 * n));
  for (std::size_t j = 0; j < n; ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    const cplx u = chart_inverse(psi.alpha[j]);
    v[2 * i] = u.real();
    v[2 * i + 1] = u.imag();
    const double a = std::abs(psi.c[j]);
    v[static_cast<Eigen::Index>(2 * n) + i] = a > 0.0 ? std::max(psi.p * std::log(a), -60.0) : -60.0;
    v[static_cast<Eigen::Index>(3 * n) + i] = std::arg(psi.c[j]);
  }
  return v;
}

double retraction_value(const GeodesicParams& psi, const ComplexVector& x, const ComplexVector& y) {
  const auto fx = retraction_eval(psi, x);
  if (!fx) return -kInf;
  const auto fy = retraction_eval(psi, y);
  if (!fy) return -kInf;
  return poincare_distance(*fx, *fy);
}

struct RetractionRun {
  double value = -kInf;
  GeodesicParams psi;
};

RetractionRun polish_retraction(const ComplexVector& x, const ComplexVector& y, double p, Eigen::VectorXd v0,
                                const std::vector<std::uint8_t>& beta, int iterations) {
  const auto objective = [&](const Eigen::VectorXd& v) {
    try {
      return -retraction_value(retraction_params(p, v, beta), x, y);
    } catch (const Error&) {
      return kInf;
    }
  };
  BfgsOptions opts;
  opts.max_iterations = iterations;
  const BfgsResult r = bfgs_minimize(objective, std::move(v0), opts);
  RetractionRun out;
  if (!std::isfinite(r.value)) return out;
  out.psi = retraction_params(p, r.x, beta);
  out.value = retraction_value(out.psi, x, y);
  return out;
}

// ---------------------------------------------------------------------------
// Rational discs
//
// f_j = c_j B_j^{beta_j} ((1 - conj(alpha_j) zeta) / (1 - conj(omega) zeta))^{2/p} on the coordinates
// where x or y is nonzero, fitted to f(0) = x, f(t) = y and |f| = 1 at M circle points.
// Unknowns: [chart(omega) 2 | chart(alpha) 2m | c 2m | sigma], t = tanh(sigma^2 + 1e-6).

constexpr int kFitSamples = 128;

struct RationalFit {
  double p;
  std::vector<std::size_t> active;
  std::vector<std::uint8_t> beta;
  ComplexVector x, y;

  std::size_t m() const { return active.size(); }

  GeodesicParams disc(const Eigen::VectorXd& v) const {
    GeodesicParams g;
    g.p = p;
    g.gamma = chart(cplx(v[0], v[1]));
    const std::size_t n = x.size();
    g.alpha.assign(n, g.gamma);
    g.beta.assign(n, 0);
    g.c.assign(n, cplx{});
    for (std::size_t k = 0; k < m(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const std::size_t j = active[k];
      g.alpha[j] = chart(cplx(v[2 + 2 * i], v[3 + 2 * i]));
      g.beta[j] = beta[k];
      const auto off = static_cast<Eigen::Index>(2 + 2 * m());
      g.c[j] = cplx(v[off + 2 * i], v[off + 2 * i + 1]);
    }
    return g;
  }

  static double parameter(const Eigen::VectorXd& v) { return std::tanh(v[v.size() - 1] * v[v.size() - 1] + 1e-6); }

  cplx coord(const GeodesicParams& g, std::size_t j, cplx zeta) const {
    const cplx a = g.alpha[j];
    const cplx la = 1.0 - std::conj(a) * zeta;
    const cplx lg = 1.0 - std::conj(g.gamma) * zeta;
    cplx v = g.c[j] * std::exp((2.0 / p) * (std::log(la) - std::log(lg)));
    if (g.beta[j]) v *= (zeta - a) / la;
    return v;
  }

  bool residuals(const Eigen::VectorXd& v, Eigen::VectorXd& r) const {
    const GeodesicParams g = disc(v);
    const double t = parameter(v);
    const auto mm = static_cast<Eigen::Index>(m());
    r.resize(4 * mm + kFitSamples);
    for (std::size_t k = 0; k < m(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const std::size_t j = active[k];
      const cplx r0 = coord(g, j, 0.0) - x[j];
      const cplx r1 = coord(g, j, t) - y[j];
      r[2 * i] = r0.real();
      r[2 * i + 1] = r0.imag();
      r[2 * mm + 2 * i] = r1.real();
      r[2 * mm + 2 * i + 1] = r1.imag();
    }
    const double w = 1.0 / std::sqrt(static_cast<double>(kFitSamples));
    for (int s = 0; s < kFitSamples; ++s) {
      const cplx z = unit(kTwoPi * s / kFitSamples);
      double acc = 0.0;
      for (std::size_t k = 0; k < m(); ++k) acc += std::pow(std::abs(coord(g, active[k], z)), p);
      r[4 * mm + s] = (acc - 1.0) * w;
    }
    return r.allFinite();
  }

  // Wirtinger derivatives of the coordinates, chained through the charts.
  bool jacobian(const Eigen::VectorXd& v, Eigen::MatrixXd& J) const {
    const GeodesicParams g = disc(v);
    const double t = parameter(v);
    const auto mm = static_cast<Eigen::Index>(m());
    const Eigen::Index cols = 4 * mm + 3;
    J.setZero(4 * mm + kFitSamples, cols);
    const double k = 2.0 / p;
    const cplx wbar = std::conj(g.gamma);

    // d(alpha)/d(u_re), d(alpha)/d(u_im) for alpha = chart(u)
    const auto chart_jet = [](cplx u) {
      const double s = 1.0 / std::sqrt(1.0 + std::norm(u));
      const double s3 = s * s * s;
      return std::array<cplx, 2>{s - u * u.real() * s3, cplx(0.0, s) - u * u.imag() * s3};
    };
    const auto om_jet = chart_jet(cplx(v[0], v[1]));
    const double dt = (1.0 - t * t) * 2.0 * v[cols - 1];

    // fills d f_j(zeta) / d(params) into a row of complex partials
    std::vector<cplx> row(static_cast<std::size_t>(cols));
    const auto partials = [&](std::size_t kk, cplx zeta, bool with_t) {
      std::fill(row.begin(), row.end(), cplx{});
      const auto i = static_cast<Eigen::Index>(kk);
      const std::size_t j = active[kk];
      const cplx a = g.alpha[j];
      const cplx la = 1.0 - std::conj(a) * zeta;
      const cplx lw = 1.0 - wbar * zeta;
      const cplx E = std::exp(k * (std::log(la) - std::log(lw)));
      const bool b = beta[kk] != 0;
      const cplx B = b ? (zeta - a) / la : cplx(1.0);
      const cplx f = g.c[j] * B * E;
      const cplx df_da = b ? g.c[j] * E * (-1.0 / la) : cplx{};
      const cplx df_dabar = f * (-k * zeta / la + (b ? zeta / la : cplx{}));
      const cplx df_dwbar = f * (k * zeta / lw);
      const auto aj = chart_jet(chart_inverse(a));
      for (int r = 0; r < 2; ++r) {
        row[static_cast<std::size_t>(r)] = df_dwbar * std::conj(om_jet[r]);
        row[static_cast<std::size_t>(2 + 2 * i + r)] = df_da * aj[r] + df_dabar * std::conj(aj[r]);
      }
      const cplx df_dc = B * E;
      row[static_cast<std::size_t>(2 + 2 * mm + 2 * i)] = df_dc;
      row[static_cast<std::size_t>(2 + 2 * mm + 2 * i + 1)] = cplx(0.0, 1.0) * df_dc;
      if (with_t) {
        cplx d = f * (-k * std::conj(a) / la + k * wbar / lw);
        if (b) d += g.c[j] * E * (1.0 - std::norm(a)) / (la * la);
        row[static_cast<std::size_t>(cols - 1)] = d * dt;
      }
      return f;
    };

    for (std::size_t kk = 0; kk < m(); ++kk) {
      const auto i = static_cast<Eigen::Index>(kk);
      partials(kk, 0.0, false);
      for (Eigen::Index c = 0; c < cols; ++c) {
        J(2 * i, c) = row[static_cast<std::size_t>(c)].real();
        J(2 * i + 1, c) = row[static_cast<std::size_t>(c)].imag();
      }
      partials(kk, t, true);
      for (Eigen::Index c = 0; c < cols; ++c) {
        J(2 * mm + 2 * i, c) = row[static_cast<std::size_t>(c)].real();
        J(2 * mm + 2 * i + 1, c) = row[static_cast<std::size_t>(c)].imag();
      }
    }
    const double w = 1.0 / std::sqrt(static_cast<double>(kFitSamples));
    for (int s = 0; s < kFitSamples; ++s) {
      const cplx z = unit(kTwoPi * s / kFitSamples);
      for (std::size_t kk = 0; kk < m(); ++kk) {
        const cplx f = partials(kk, z, false);
        const double af = std::abs(f);
        if (af < 1e-300) continue;
        const double scale = p * std::pow(af, p - 2.0) * w;
        for (Eigen::Index c = 0; c < cols; ++c) {
          const cplx d = row[static_cast<std::size_t>(c)];
          if (d != cplx{}) J(4 * mm + s, c) += scale * (std::conj(f) * d).real();
        }
      }
    }
    return J.allFinite();
  }

  Eigen::VectorXd initial(double s0, double jitter, std::mt19937_64& rng) const {
    const auto mm = static_cast<Eigen::Index>(m());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(4 * mm + 3);
    for (std::size_t k = 0; k < m(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const std::size_t j = active[k];
      const cplx d = y[j] - x[j];
      // zero of the affine interpolant x + zeta d / s0, reflected into the disc
      cplx a = std::abs(d) > 1e-14 ? -x[j] * s0 / d : cplx{};
      if (std::abs(a) >= 1.0) a /= std::norm(a);
      a *= 0.95;
      cplx c = x[j];
      if (beta[k]) c = std::abs(a) > 1e-3 ? x[j] / (-a) : d / s0;
      if (std::abs(c) < 1e-12) c = d / s0;
      const cplx u = chart_inverse(a);
      v[2 + 2 * i] = u.real();
      v[3 + 2 * i] = u.imag();
      v[2 + 2 * mm + 2 * i] = c.real();
      v[3 + 2 * mm + 2 * i] = c.imag();
    }
    v[4 * mm + 2] = std::sqrt(std::atanh(s0));
    if (jitter > 0.0) {
      std::normal_distribution<double> g;
      for (auto& e : v) e += jitter * g(rng);
    }
    return v;
  }
};

struct RationalCandidate {
  double value = kInf;
  bool exact = false;
  UpperWitness witness;
};

RationalCandidate run_rational(const RationalFit& fit, double s0, double jitter, std::mt19937_64& rng) {
  RationalCandidate out;
  const Eigen::VectorXd v0 = fit.initial(s0, jitter, rng);
  LmOptions opts;
  opts.max_iterations = 300;
  opts.tolerance = 1e-13;
  const ResidualFn f = [&fit](const Eigen::VectorXd& v, Eigen::VectorXd& r) { return fit.residuals(v, r); };
  const JacobianFn jac = [&fit](const Eigen::VectorXd& v, Eigen::MatrixXd& J) { return fit.jacobian(v, J); };
  const LmResult lm = levenberg_marquardt(f, jac, v0, opts);
  if (!lm.x.allFinite()) return out;
  const GeodesicParams g = fit.disc(lm.x);
  const double t = RationalFit::parameter(lm.x);
  const Curve curve = [&](cplx z) {
    ComplexVector v(fit.x.space);
    for (std::size_t j : fit.active) v[j] = fit.coord(g, j, z);
    return v;
  };
  const Charged ch = charge_disc(curve, 0.0, t, fit.x, fit.y);
  out.value = ch.value;
  out.exact = lm.residual_norm < 1e-10 && ch.sup < 1.0 + 1e-10;
  out.witness.kind = UpperWitness::Kind::rational;
  out.witness.disc = g;
  out.witness.sup_norm = ch.sup;
  out.witness.u = 0.0;
  out.witness.v = t;
  out.witness.correction = ch.correction;
  return out;
}

double quick_linear_guess(const ComplexVector& x, const ComplexVector& y) {
  double best = 0.0;
  for (const ComplexVector& d : {x, y, y - x}) {
    const double nd = norm(d);
    if (nd == 0.0) continue;
    best = std::max(best, functional_value(x, y, support_functional((1.0 / nd) * d)));
  }
  return best;
}

UpperBound rational_upper(const ComplexVector& x, const ComplexVector& y, int trials, std::uint64_t seed) {
  RationalFit fit{x.space.as_lp().p.value(), {}, {}, x, y};
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != cplx{} || y[j] != cplx{}) fit.active.push_back(j);
  }
  const std::size_t m = fit.active.size();
  const std::size_t patterns = m >= 12 ? std::size_t{1} << 12 : std::size_t{1} << m;
  const double s0 = std::clamp(std::tanh(1.05 * std::max(quick_linear_guess(x, y), 0.05)), 0.05, 0.99);

  const auto tasks = static_cast<std::size_t>(std::max(trials, 1));
  const std::size_t batch = 8;
  UpperBound best;
  best.value = kInf;
  for (std::size_t first = 0; first < tasks; first += batch) {
    const std::size_t count = std::min(batch, tasks - first);
    std::vector<RationalCandidate> results(count);
    parallel_for(count, [&](std::size_t i) {
      const std::size_t task = first + i;
      const std::size_t pattern = task % patterns;
      const std::size_t start = task / patterns;
      RationalFit local = fit;
      local.beta.resize(m);
      // pattern 0 is all ones
      for (std::size_t k = 0; k < m; ++k) local.beta[k] = ((pattern >> k) & 1U) ? 0 : 1;
      auto rng = make_rng(seed, 23, task);
      try {
        results[i] = run_rational(local, s0, 0.3 * static_cast<double>(start), rng);
      } catch (const Error&) {
        results[i] = {};
      }
    });
    bool exact = false;
    for (const auto& r : results) {
      if (r.value < best.value) {
        best.value = r.value;
        best.witness = r.witness;
      }
      exact = exact || r.exact;
    }
    if (exact) break;
  }
  return best;
}

// Largest disc about x + w0 (y - x) in the complex line through x and y.
UpperBound affine_upper(const ComplexVector& x, const ComplexVector& y) {
  const ComplexVector d = y - x;
  const auto evaluate = [&](cplx w0, UpperWitness* witness) {
    const ComplexVector center = x + w0 * d;
    if (!(norm(center) < 1.0)) return kInf;
    const double R = inner_radius(center, d);
    if (!(R > 0.0)) return kInf;
    const cplx u = -w0 / R, v = (1.0 - w0) / R;
    if (!(std::abs(u) < 1.0 && std::abs(v) < 1.0)) return kInf;
    if (!witness) return poincare_distance(u, v);
    const ComplexVector rv = R * d;
    const Curve f = [&](cplx z) { return center + z * rv; };
    const Charged ch = charge_disc(f, u, v, x, y);
    witness->kind = UpperWitness::Kind::affine;
    witness->center = center;
    witness->radius_vector = rv;
    witness->sup_norm = ch.sup;
    witness->u = u;
    witness->v = v;
    witness->correction = ch.correction;
    return ch.value;
  };
  const ObjectiveFn objective = [&](const Eigen::VectorXd& w) { return evaluate(cplx(w[0], w[1]), nullptr); };
  Eigen::VectorXd w0(2);
  w0 << 0.5, 0.0;
  NelderMeadOptions opts;
  opts.max_evaluations = 600;
  opts.initial_step = 0.2;
  const BfgsResult r = nelder_mead_minimize(objective, w0, opts);
  UpperBound out;
  out.value = evaluate(cplx(r.x[0], r.x[1]), &out.witness);
  if (!std::isfinite(out.value)) out.value = evaluate(cplx(0.5, 0.0), &out.witness);
  return out;
}

// ---------------------------------------------------------------------------
// Convexity search

ConvexityModulus radius_search(const SpaceSignature& space, double epsilon, double base_norm, double level, int trials,
                               std::uint64_t seed, std::uint64_t stream) {
  const std::size_t n = space.dimension();
  const auto unpack = [&](const Eigen::VectorXd& w, ComplexVector& z, ComplexVector& v) {
    z = ComplexVector(space);
    v = ComplexVector(space);
    for (std::size_t j = 0; j < n; ++j) {
      const auto i = static_cast<Eigen::Index>(2 * j);
      z[j] = cplx(w[i], w[i + 1]);
      v[j] = cplx(w[static_cast<Eigen::Index>(2 * n) + i], w[static_cast<Eigen::Index>(2 * n) + i + 1]);
    }
    const double nz = norm(z), nv = norm(v);
    if (!(nz > 1e-12) || !(nv > 1e-12)) return false;
    z = (base_norm / nz) * z;
    v = (1.0 / nv) * v;
    return true;
  };

  std::vector<Eigen::VectorXd> starts;
  const auto add = [&](std::vector<cplx> z, std::vector<cplx> v) {
    z.insert(z.end(), v.begin(), v.end());
    starts.push_back(flatten(z));
  };
  std::vector<cplx> ones(n, 1.0), e1(n, 0.0), e2(n, 0.0), alt(n, 0.0), rot(n, 0.0);
  e1[0] = 1.0;
  e2[n > 1 ? 1 : 0] = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    alt[j] = j % 2 ? -1.0 : 1.0;
    rot[j] = unit(kTwoPi * static_cast<double>(j) / static_cast<double>(n) / 4.0);
  }
  add(ones, alt);
  add(ones, e1);
  add(e1, e1);
  add(e1, e2);
  add(ones, rot);
  for (int k = 0; k < trials; ++k) {
    auto rng = make_rng(seed, stream, static_cast<std::uint64_t>(k));
    std::normal_distribution<double> g;
    Eigen::VectorXd w(static_cast<Eigen::Index>(4 * n));
    for (auto& e : w) e = g(rng);
    starts.push_back(w);
  }

  std::vector<ConvexityModulus> found(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    const ObjectiveFn objective = [&](const Eigen::VectorXd& w) {
      ComplexVector z, v;
      if (!unpack(w, z, v)) return kInf;
      return -inner_radius(z, v, level);
    };
    NelderMeadOptions opts;
    opts.max_evaluations = n == 1 ? 50 : 1500;
    opts.initial_step = 0.3;
    const BfgsResult r = nelder_mead_minimize(objective, starts[i], opts);
    ComplexVector z, v;
    if (!unpack(r.x, z, v)) return;
    found[i].epsilon = epsilon;
    found[i].z = z;
    found[i].v = v;
    found[i].r = inner_radius(z, v, level);
    found[i].delta_value = found[i].r;
  });
  ConvexityModulus best = found.front();
  for (const auto& f : found) {
    if (f.delta_value > best.delta_value) best = f;
  }
  return best;
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    std::ostringstream os;
    os << "epsilon = " << epsilon << " must lie in (0, 1]";
    throw ContractError(os.str());
  }
}

}  // namespace

std::string to_string(LowerWitness::Kind k) {
  switch (k) {
    case LowerWitness::Kind::linear:
      return "linear";
    case LowerWitness::Kind::retraction:
      return "retraction";
    default:
      return "none";
  }
}

std::string to_string(UpperWitness::Kind k) {
  switch (k) {
    case UpperWitness::Kind::affine:
      return "affine";
    case UpperWitness::Kind::rational:
      return "rational";
    default:
      return "none";
  }
}

std::optional<cplx> retraction_eval(const GeodesicParams& psi, const ComplexVector& z) {
  if (z.size() != psi.dimension()) throw ContractError("retraction_eval: dimension mismatch");
  // The zero in the disc is unique for admissible psi, so any certified Newton limit inside the
  // disc is F(z). The argument principle supplies the first guess; Blaschke poles just outside
  // the circle need a finer contour.
  std::vector<cplx> guesses;
  for (int M = 256; M <= 4096; M *= 4) {
    cplx wind{}, centroid{};
    bool clean = true;
    for (int k = 0; k < M && clean; ++k) {
      const cplx zeta = unit(kTwoPi * k / M);
      const DualJet j = left_inverse_jet(psi, z, zeta);
      clean = std::abs(j.G) > 1e-14 * j.scale;
      const cplx q = zeta * j.dG / j.G;
      wind += q;
      centroid += zeta * q;
    }
    if (!clean) break;
    wind /= static_cast<double>(M);
    centroid /= static_cast<double>(M);
    if (std::abs(centroid) < 1.0) guesses.push_back(centroid);
    if (std::abs(wind - 1.0) < 1e-6) break;
  }
  for (double r : {0.0, 0.5, 0.9}) {
    for (int k = 0; k < (r == 0.0 ? 1 : 4); ++k) guesses.push_back(r * unit(kTwoPi * k / 4.0 + 0.3));
  }

  for (cplx root : guesses) {
    double step = kInf;
    bool inside = true;
    for (int it = 0; it < 60 && step > 1e-15 && inside; ++it) {
      const DualJet j = left_inverse_jet(psi, z, root);
      if (j.dG == cplx{}) {
        inside = false;
        break;
      }
      cplx delta = j.G / j.dG;
      // damp steps that would leave the disc
      while (std::abs(root - delta) >= 1.0 && std::abs(delta) > 1e-16) delta *= 0.5;
      root -= delta;
      step = std::abs(delta);
      inside = std::abs(root) < 1.0;
    }
    if (!inside) continue;
    const DualJet j = left_inverse_jet(psi, z, root);
    if (std::abs(j.G) <= 1e-12 * std::max(1.0, j.scale) && step < 1e-10) return root;
  }
  return std::nullopt;
}

LowerBound caratheodory_lower(const ComplexVector& x, const ComplexVector& y, int trials, std::uint64_t seed,
                              const std::vector<GeodesicParams>& hints, double stop_at) {
  require_pair(x, y);
  LowerBound best;
  if (norm(x - y) == 0.0) return best;
  best = linear_lower(x, y, trials, seed);
  if (!x.space.is_lp() || x.space.as_lp().p.is_infinite() || best.value >= stop_at - 1e-12) return best;

  const double p = x.space.as_lp().p.value();
  const auto consider = [&](const RetractionRun& r) {
    if (r.value > best.value) {
      best.value = r.value;
      best.witness.kind = LowerWitness::Kind::retraction;
      best.witness.retraction = r.psi;
    }
  };
  for (const auto& h : hints) {
    if (h.dimension() != x.size() || h.p != p) continue;
    try {
      const Eigen::VectorXd v = retraction_vector(h);
      RetractionRun r;
      r.psi = retraction_params(p, v, h.beta);
      r.value = retraction_value(r.psi, x, y);
      consider(r);
      if (best.value >= stop_at - 1e-12) return best;
      consider(polish_retraction(x, y, p, v, h.beta, 60));
      if (best.value >= stop_at - 1e-12) return best;
    } catch (const Error&) {
    }
  }

  const std::size_t n = x.size();
  const std::size_t batch = 8;
  for (std::size_t first = 0; first < static_cast<std::size_t>(std::max(trials, 0)); first += batch) {
    const std::size_t count = std::min(batch, static_cast<std::size_t>(trials) - first);
    std::vector<RetractionRun> runs(count);
    parallel_for(count, [&](std::size_t i) {
      auto rng = make_rng(seed, 31, first + i);
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      std::normal_distribution<double> g;
      std::vector<std::uint8_t> beta(n);
      Eigen::VectorXd v(static_cast<Eigen::Index>(4 * n));
      for (std::size_t j = 0; j < n; ++j) {
        const auto k = static_cast<Eigen::Index>(j);
        beta[j] = uni(rng) < 0.5 ? 1 : 0;
        const cplx u = chart_inverse(std::polar(0.8 * std::sqrt(uni(rng)), kTwoPi * uni(rng)));
        v[2 * k] = u.real();
        v[2 * k + 1] = u.imag();
        v[static_cast<Eigen::Index>(2 * n) + k] = g(rng);
        v[static_cast<Eigen::Index>(3 * n) + k] = kTwoPi * uni(rng);
      }
      try {
        runs[i] = polish_retraction(x, y, p, v, beta, 100);
      } catch (const Error&) {
      }
    });
    for (const auto& r : runs) consider(r);
    if (best.value >= stop_at - 1e-12) break;
  }
  return best;
}

UpperBound kobayashi_upper(const ComplexVector& x, const ComplexVector& y, int degree, int trials,
                           std::uint64_t seed) {
  require_pair(x, y);
  if (degree < 1) throw ContractError("kobayashi_upper: degree must be at least 1");
  UpperBound best;
  if (norm(x - y) == 0.0) return best;
  const bool rational = degree >= 2 && x.space.is_lp() && !x.space.as_lp().p.is_infinite();
  if (rational) {
    best = rational_upper(x, y, trials, seed);
    if (best.witness.kind == UpperWitness::Kind::rational && best.witness.sup_norm < 1.0 + 1e-10 &&
        best.witness.correction < 1e-9) {
      return best;
    }
  } else {
    best.value = kInf;
  }
  const UpperBound a = affine_upper(x, y);
  if (a.value < best.value) best = a;
  return best;
}

MetricEstimate metric_bracket(const ComplexVector& x, const ComplexVector& y, int degree, int trials,
                              std::uint64_t seed) {
  const UpperBound up = kobayashi_upper(x, y, degree, trials, seed);
  std::vector<GeodesicParams> hints;
  if (up.witness.kind == UpperWitness::Kind::rational && constraint_residuals(up.witness.disc).max_abs() < 1e-6) {
    hints.push_back(up.witness.disc);
  }
  const LowerBound lo = caratheodory_lower(x, y, trials, seed, hints, up.value);
  MetricEstimate out;
  out.lower = lo.value;
  out.upper = up.value;
  out.lower_witness = lo.witness;
  out.upper_witness = up.witness;
  return out;
}

namespace {

const std::vector<cplx>& phase_table(int phases) {
  static const auto make = [](int m) {
    std::vector<cplx> t(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) t[static_cast<std::size_t>(k)] = unit(kTwoPi * k / m);
    return t;
  };
  static const std::vector<cplx> t128 = make(128), t512 = make(512);
  return phases == 128 ? t128 : t512;
}

// max over the phase table of |z + r e^{i theta} v| without allocating per sample
class CircleNorm {
 public:
  CircleNorm(const ComplexVector& z, const ComplexVector& v) : z_(z.entries), v_(v.entries), space_(z.space) {
    buf_.resize(z_.size());
    if (space_.is_lp()) {
      const Exponent e = space_.as_lp().p;
      smooth_ = !e.is_infinite();
      p_ = smooth_ ? e.value() : 0.0;
    }
  }

  bool smooth() const { return smooth_; }

  /// with `slope`, also d/dr of the norm at the maximizing phase (finite p only). phases == 0
  /// takes the 512-sample max and polishes the highest local maxima by golden-section search.
  double max_norm(double r, int phases, double* slope = nullptr) {
    const auto& table = phase_table(phases == 0 ? 512 : phases);
    const std::size_t m = table.size();
    vals_.resize(m);
    std::size_t best = 0;
    for (std::size_t k = 0; k < m; ++k) {
      vals_[k] = at(r * table[k]);
      if (vals_[k] > vals_[best]) best = k;
    }
    double top = vals_[best];
    cplx arg = table[best];
    if (phases == 0) {
      peaks_.clear();
      for (std::size_t k = 0; k < m; ++k) {
        if (vals_[k] >= vals_[(k + m - 1) % m] && vals_[k] >= vals_[(k + 1) % m]) peaks_.push_back(k);
      }
      const std::size_t keep = std::min<std::size_t>(peaks_.size(), 6);
      std::partial_sort(peaks_.begin(), peaks_.begin() + static_cast<std::ptrdiff_t>(keep), peaks_.end(),
                        [&](std::size_t i, std::size_t j) { return vals_[i] > vals_[j]; });
      const double h = kTwoPi / static_cast<double>(m);
      for (std::size_t q = 0; q < keep; ++q) {
        const auto [theta, val] = golden(r, static_cast<double>(peaks_[q]) * h, h);
        if (val > top) {
          top = val;
          arg = unit(theta);
        }
      }
    }
    if (slope) *slope = derivative(r * arg, arg, top);
    return top;
  }

 private:
  // max of the norm over phases in [center - h, center + h]
  std::pair<double, double> golden(double r, double center, double h) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = center - h, b = center + h;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = at(r * unit(c)), fd = at(r * unit(d));
    for (int it = 0; it < 48; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = at(r * unit(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = at(r * unit(d));
      }
    }
    return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
  }

  double at(cplx w) {
    const std::size_t n = z_.size();
    double acc = 0.0;
    if (!space_.is_lp()) {
      for (std::size_t j = 0; j < n; ++j) buf_[j] = z_[j] + w * v_[j];
      return norm(ComplexVector(space_, buf_));
    }
    if (!smooth_) {
      for (std::size_t j = 0; j < n; ++j) acc = std::max(acc, std::norm(z_[j] + w * v_[j]));
      return std::sqrt(acc);
    }
    if (p_ == 1.0) {
      for (std::size_t j = 0; j < n; ++j) acc += std::sqrt(std::norm(z_[j] + w * v_[j]));
      return acc;
    }
    if (p_ == 2.0) {
      for (std::size_t j = 0; j < n; ++j) acc += std::norm(z_[j] + w * v_[j]);
      return std::sqrt(acc);
    }
    for (std::size_t j = 0; j < n; ++j) acc += std::pow(std::norm(z_[j] + w * v_[j]), 0.5 * p_);
    return std::pow(acc, 1.0 / p_);
  }

  double derivative(cplx rw, cplx w, double value) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < z_.size(); ++j) {
      const cplx u = z_[j] + rw * v_[j];
      const double a = std::abs(u);
      if (a == 0.0) continue;
      acc += std::pow(a, p_ - 2.0) * (std::conj(u) * w * v_[j]).real();
    }
    return acc * std::pow(value, 1.0 - p_);
  }

  const std::vector<cplx>& z_;
  const std::vector<cplx>& v_;
  SpaceSignature space_;
  bool smooth_ = false;
  double p_ = 0.0;
  std::vector<cplx> buf_;
  std::vector<double> vals_;
  std::vector<std::size_t> peaks_;
};

}  // namespace

double inner_radius(const ComplexVector& z, const ComplexVector& v, double level) {
  const double nv = norm(v);
  if (!(nv > 0.0)) throw ContractError("inner_radius: direction must be nonzero");
  const double nz = norm(z);
  if (!(nz < level)) return 0.0;
  CircleNorm circle(z, v);
  const auto excess = [&](double r, int phases) { return circle.max_norm(r, phases) - level; };
  // The sampled max is convex in r and negative at 0, so there is one sign change. Newton from
  // the infeasible side descends monotonically onto it; Illinois steps handle the rest.
  const auto newton = [&](double r, int phases) {
    for (int it = 0; it < 60; ++it) {
      double slope = 0.0;
      const double f = circle.max_norm(r, phases, &slope) - level;
      if (f <= 0.0) return r;
      if (!(slope > 0.0)) return -1.0;
      const double next = r - f / slope;
      if (!(next < r && next > 0.0)) return -1.0;
      const bool done = r - next <= 1e-14 * r;
      r = next;
      if (done) break;
    }
    for (int k = 0; k < 40 && excess(r, phases) > 0.0; ++k) r *= 1.0 - std::ldexp(1e-16, k);
    return excess(r, phases) <= 0.0 ? r : -1.0;
  };
  const auto illinois = [&](double hi, int phases) {
    double lo = 0.0, flo = nz - level, fhi = excess(hi, phases);
    if (fhi <= 0.0) return hi;
    int side = 0;
    for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
      double r = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(r > lo && r < hi)) r = 0.5 * (lo + hi);
      const double fr = excess(r, phases);
      if (fr <= 0.0) {
        lo = r;
        flo = fr;
        if (side == -1) fhi *= 0.5;
        side = -1;
      } else {
        hi = r;
        fhi = fr;
        if (side == 1) flo *= 0.5;
        side = 1;
      }
    }
    return lo;
  };
  const auto crossing = [&](double hi, int phases) {
    if (circle.smooth()) {
      const double r = newton(hi, phases);
      if (r >= 0.0) return r;
    }
    return illinois(hi, phases);
  };
  // the sampled max under-reads the true one, so the coarse crossing is an upper bracket
  const double r = crossing((level + nz) / nv, 128);
  return crossing(r, 0);
}

ConvexityModulus convexity_modulus(const SpaceSignature& space, double epsilon, int trials, std::uint64_t seed) {
  require_epsilon(epsilon);
  return radius_search(space, epsilon, 1.0 - epsilon, 1.0, trials, seed, 41);
}

ConvexityModulus omega_c(const SpaceSignature& space, double epsilon, int trials, std::uint64_t seed) {
  require_epsilon(epsilon);
  return radius_search(space, epsilon, 1.0, 1.0 + epsilon, trials, seed, 43);
}

std::vector<ModulusRow> modulus_sweep(const SpaceSignature& space, const std::vector<double>& epsilons, int trials,
                                      std::uint64_t seed) {
  std::vector<ModulusRow> rows;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double eps : epsilons) {
    ModulusRow row;
    row.epsilon = eps;
    row.delta = convexity_modulus(space, eps, trials, seed).delta_value;
    row.omega_c = omega_c(space, eps, trials, seed).delta_value;
    const double lx = std::log(eps), ly = std::log(row.delta);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    const double k = static_cast<double>(rows.size() + 1);
    const double den = k * sxx - sx * sx;
    row.slope = rows.empty() || den == 0.0 ? 0.0 : (k * sxy - sx * sy) / den;
    rows.push_back(row);
  }
  return rows;
}

double infinitesimal_lower(const ComplexVector& z, const ComplexVector& v, int trials) {
  const double nz = norm(z);
  if (!(nz < 1.0)) throw DomainError("infinitesimal_lower: z must lie in the open ball");
  const double nv = norm(v);
  if (!(nv > 0.0)) throw ContractError("infinitesimal_lower: v must be nonzero");
  return nv / (2.0 * convexity_modulus(z.space, 1.0 - nz, trials).delta_value);
}

CurvatureResult curvature(const ComplexVector& x, const ComplexVector& v, const SolveConfig& config) {
  if (!x.space.is_lp() || x.space.as_lp().p.is_infinite()) {
    throw UnsupportedError("curvature: only l^p balls with finite p");
  }
  const TangentGeodesic tg = solve_tangent(x, v, config);
  CurvatureResult out;
  out.metric = tg.metric();

  // along f = phi the metric should be 1 / (1 - |z|^2); confirm with independent tangent solves
  constexpr double radius = 1e-2;
  for (int k = 0; k < 8; ++k) {
    const cplx z = radius * unit(kTwoPi * (k + 0.5) / 8.0);
    const ComplexVector pz = eval(tg.params, z);
    const ComplexVector dz = eval_derivative(tg.params, z);
    const TangentGeodesic local = solve_tangent(pz, dz, config);
    const double expected = 1.0 / (1.0 - std::norm(z));
    out.check_gap = std::max(out.check_gap, std::abs(local.metric() / expected - 1.0));
  }
  if (out.check_gap > 1e-6) throw PrecisionError("curvature: metric along the geodesic disagrees", out.check_gap);

  // f'(0) = v / k(x, v), so k(f(0), f'(0)) = 1
  const double k0 = norm(eval_derivative(tg.params, cplx{})) * out.metric / norm(v);
  const RealField u = [k0](cplx z) { return 2.0 * std::log(k0) - 2.0 * std::log(1.0 - std::norm(z)); };
  out.kappa = richardson_laplacian(u, cplx{}) / (-2.0 * std::exp(u(cplx{})));
  return out;
}

}  // namespace holomet
