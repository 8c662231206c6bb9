#include "holomet/solver.hpp"

#include <algorithm>
#include <bit>
#include <numbers>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "holomet/disc.hpp"
#include "holomet/errors.hpp"
#include "holomet/optimize.hpp"
#include "holomet/parallel.hpp"

namespace holomet {

std::string to_string(BetaStrategy b) {
  switch (b) {
    case BetaStrategy::all_ones:
      return "ones";
    case BetaStrategy::enumerate:
      return "enum";
    case BetaStrategy::adaptive:
      return "adaptive";
  }
  return "adaptive";
}

BetaStrategy parse_beta_strategy(const std::string& s) {
  if (s == "ones" || s == "all_ones") return BetaStrategy::all_ones;
  if (s == "enum" || s == "enumerate") return BetaStrategy::enumerate;
  if (s == "adaptive") return BetaStrategy::adaptive;
  throw ContractError("unknown beta strategy '" + s + "' (expected ones, enum or adaptive)");
}

void SolveConfig::validate() const {
  if (!(tolerance > 0.0)) throw ContractError("SolveConfig: tolerance must be positive");
  if (max_iterations < 1) throw ContractError("SolveConfig: max_iterations must be >= 1");
  if (multistarts < 1) throw ContractError("SolveConfig: multistarts must be >= 1");
}

double NormalizedGeodesic::distance() const { return atanh_clamped(s); }
double TangentGeodesic::metric() const { return norm(v) / mu; }

namespace {

constexpr double kSigmaOffset = 1e-9;
constexpr double kFlipThreshold = 0.999;
constexpr std::size_t kBatch = 8;
constexpr std::size_t kEnumerateLimit = 12;

// Open-disc chart w = u / sqrt(1 + |u|^2).
cplx chart(cplx u) { return u / std::sqrt(1.0 + std::norm(u)); }

cplx chart_inverse(cplx w) {
  const double m2 = std::min(std::norm(w), 1.0 - 1e-12);
  return w / std::sqrt(1.0 - m2);
}

// dw/du_r and dw/du_i as complex numbers.
void chart_derivatives(cplx u, cplx& d_r, cplx& d_i) {
  const double d = 1.0 + std::norm(u);
  const double inv_sqrt = 1.0 / std::sqrt(d);
  const double inv_32 = inv_sqrt / d;
  d_r = inv_sqrt - u * u.real() * inv_32;
  d_i = cplx(0.0, inv_sqrt) - u * u.imag() * inv_32;
}

// Value of one coordinate and its real-direction derivatives.
struct CoordJet {
  cplx value;
  cplx d_gr, d_gi;  // gamma real / imaginary direction
  cplx d_ar, d_ai;  // alpha
  cplx d_cr, d_ci;  // c
  cplx d_zeta;
};

CoordJet coord_jet(cplx c, cplx a, bool beta, cplx g, double kappa, cplx zeta) {
  const cplx num = 1.0 - std::conj(a) * zeta;
  const cplx den = 1.0 - std::conj(g) * zeta;
  const cplx E = std::exp(kappa * (std::log(num) - std::log(den)));
  const cplx B = (zeta - a) / num;
  const cplx core = beta ? B * E : E;
  CoordJet j;
  j.value = c * core;
  j.d_cr = core;
  j.d_ci = cplx(0.0, 1.0) * core;
  const cplx d_alpha = beta ? -c * E / num : cplx{};
  const cplx d_alpha_bar = (beta ? c * B * zeta / num * E : cplx{}) - j.value * kappa * zeta / num;
  j.d_ar = d_alpha + d_alpha_bar;
  j.d_ai = cplx(0.0, 1.0) * (d_alpha - d_alpha_bar);
  const cplx d_gamma_bar = j.value * kappa * zeta / den;
  j.d_gr = d_gamma_bar;
  j.d_gi = cplx(0.0, -1.0) * d_gamma_bar;
  const cplx dlog = kappa * (-std::conj(a) / num + std::conj(g) / den);
  j.d_zeta = beta ? c * ((1.0 - std::norm(a)) / (num * num) * E + B * E * dlog) : j.value * dlog;
  return j;
}

// phi'(0) and its derivatives (closed form at zeta = 0).
CoordJet tangent_jet(cplx c, cplx a, bool beta, cplx g, double kappa) {
  CoordJet j;
  cplx core, d_alpha, d_alpha_bar, d_gamma_bar;
  if (beta) {
    core = 1.0 + (kappa - 1.0) * std::norm(a) - kappa * std::conj(g) * a;
    d_alpha = c * ((kappa - 1.0) * std::conj(a) - kappa * std::conj(g));
    d_alpha_bar = c * (kappa - 1.0) * a;
    d_gamma_bar = -c * kappa * a;
  } else {
    core = kappa * (std::conj(g) - std::conj(a));
    d_alpha = 0.0;
    d_alpha_bar = -c * kappa;
    d_gamma_bar = c * kappa;
  }
  j.value = c * core;
  j.d_cr = core;
  j.d_ci = cplx(0.0, 1.0) * core;
  j.d_ar = d_alpha + d_alpha_bar;
  j.d_ai = cplx(0.0, 1.0) * (d_alpha - d_alpha_bar);
  j.d_gr = d_gamma_bar;
  j.d_gi = cplx(0.0, -1.0) * d_gamma_bar;
  return j;
}

enum class Mode { endpoint, tangent };

// Square residual system in the unknowns
//   [u_gamma (2), u_alpha_k (2m), c_k (2m), last]
// where last = sigma (s = tanh(sigma^2 + offset)) or log(mu) in tangent mode.
class System {
 public:
  System(Mode mode, double p, std::vector<cplx> x, std::vector<cplx> second, std::vector<std::uint8_t> beta)
      : mode_(mode), p_(p), kappa_(2.0 / p), x_(std::move(x)), second_(std::move(second)), beta_(std::move(beta)) {}

  std::size_t m() const { return x_.size(); }
  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(4 * m() + 3); }
  const std::vector<std::uint8_t>& beta() const { return beta_; }
  std::vector<std::uint8_t>& beta() { return beta_; }

  cplx gamma(const Eigen::VectorXd& v) const { return chart({v[0], v[1]}); }
  cplx alpha(const Eigen::VectorXd& v, std::size_t k) const { return chart({v[ia(k)], v[ia(k) + 1]}); }
  cplx c(const Eigen::VectorXd& v, std::size_t k) const { return {v[ic(k)], v[ic(k) + 1]}; }
  double last(const Eigen::VectorXd& v) const { return v[unknowns() - 1]; }
  double s(const Eigen::VectorXd& v) const { return std::tanh(last(v) * last(v) + kSigmaOffset); }
  double mu(const Eigen::VectorXd& v) const { return std::exp(last(v)); }

  void set_alpha(Eigen::VectorXd& v, std::size_t k, cplx a) const {
    const cplx u = chart_inverse(a);
    v[ia(k)] = u.real();
    v[ia(k) + 1] = u.imag();
  }
  void set_c(Eigen::VectorXd& v, std::size_t k, cplx cv) const {
    v[ic(k)] = cv.real();
    v[ic(k) + 1] = cv.imag();
  }

  Eigen::VectorXd encode(cplx g, const std::vector<cplx>& a, const std::vector<cplx>& cs, double last_value) const {
    Eigen::VectorXd v(unknowns());
    const cplx ug = chart_inverse(g);
    v[0] = ug.real();
    v[1] = ug.imag();
    for (std::size_t k = 0; k < m(); ++k) {
      set_alpha(v, k, a[k]);
      set_c(v, k, cs[k]);
    }
    v[unknowns() - 1] = last_value;
    return v;
  }

  static double sigma_for(double s) { return std::sqrt(std::max(std::atanh(std::min(s, 0.999999)) - kSigmaOffset, 0.0)); }

  bool residual(const Eigen::VectorXd& v, Eigen::VectorXd& r) const {
    r.resize(unknowns());
    const cplx g = gamma(v);
    const double s_val = s(v);
    double S = -(1.0 + std::norm(g));
    cplx V = -g;
    const std::size_t mm = m();
    for (std::size_t k = 0; k < mm; ++k) {
      const cplx a = alpha(v, k);
      const cplx cv = c(v, k);
      const bool b = beta_[k] != 0;
      const cplx f0 = cv * (b ? -a : cplx(1.0));
      put(r, 2 * k, f0 - x_[k]);
      cplx f1;
      if (mode_ == Mode::endpoint) {
        f1 = coord_jet(cv, a, b, g, kappa_, s_val).value - second_[k];
      } else {
        f1 = tangent_jet(cv, a, b, g, kappa_).value - mu(v) * second_[k];
      }
      put(r, 2 * mm + 2 * k, f1);
      const double w = std::pow(std::abs(cv), p_);
      S += w * (1.0 + std::norm(a));
      V += w * a;
    }
    r[4 * mm] = S;
    r[4 * mm + 1] = V.real();
    r[4 * mm + 2] = V.imag();
    return r.allFinite();
  }

  bool jacobian(const Eigen::VectorXd& v, Eigen::MatrixXd& J) const {
    const Eigen::Index n = unknowns();
    J.setZero(n, n);
    const cplx ug(v[0], v[1]);
    const cplx g = chart(ug);
    cplx dg_r, dg_i;
    chart_derivatives(ug, dg_r, dg_i);
    const double s_val = s(v);
    const double ds = (1.0 - s_val * s_val) * 2.0 * last(v);
    const std::size_t mm = m();
    const Eigen::Index last_col = n - 1;
    const Eigen::Index row_S = static_cast<Eigen::Index>(4 * mm);

    // Chain rule from real directions (x, y) of a disc variable to its chart coordinates.
    auto chain = [](cplx d_r, cplx d_i, cplx w_r, cplx w_i, cplx& out_r, cplx& out_i) {
      out_r = d_r * w_r.real() + d_i * w_r.imag();
      out_i = d_r * w_i.real() + d_i * w_i.imag();
    };

    for (std::size_t k = 0; k < mm; ++k) {
      const cplx ua(v[ia(k)], v[ia(k) + 1]);
      const cplx a = chart(ua);
      cplx da_r, da_i;
      chart_derivatives(ua, da_r, da_i);
      const cplx cv = c(v, k);
      const bool b = beta_[k] != 0;
      const Eigen::Index row0 = static_cast<Eigen::Index>(2 * k);
      const Eigen::Index row1 = static_cast<Eigen::Index>(2 * mm + 2 * k);
      const Eigen::Index ca = static_cast<Eigen::Index>(ia(k));
      const Eigen::Index cc = static_cast<Eigen::Index>(ic(k));

      // phi_k(0) = c (-alpha)^beta
      cplx o_r, o_i;
      if (b) {
        chain(-cv, cplx(0.0, -1.0) * cv, da_r, da_i, o_r, o_i);
        put_col(J, row0, ca, o_r);
        put_col(J, row0, ca + 1, o_i);
        put_col(J, row0, cc, -a);
        put_col(J, row0, cc + 1, cplx(0.0, 1.0) * -a);
      } else {
        put_col(J, row0, cc, 1.0);
        put_col(J, row0, cc + 1, cplx(0.0, 1.0));
      }

      const CoordJet jet = mode_ == Mode::endpoint ? coord_jet(cv, a, b, g, kappa_, s_val) : tangent_jet(cv, a, b, g, kappa_);
      chain(jet.d_gr, jet.d_gi, dg_r, dg_i, o_r, o_i);
      put_col(J, row1, 0, o_r);
      put_col(J, row1, 1, o_i);
      chain(jet.d_ar, jet.d_ai, da_r, da_i, o_r, o_i);
      put_col(J, row1, ca, o_r);
      put_col(J, row1, ca + 1, o_i);
      put_col(J, row1, cc, jet.d_cr);
      put_col(J, row1, cc + 1, jet.d_ci);
      if (mode_ == Mode::endpoint) {
        put_col(J, row1, last_col, jet.d_zeta * ds);
      } else {
        put_col(J, row1, last_col, -mu(v) * second_[k]);
      }

      // Constraints.
      const double ac = std::abs(cv);
      const double w = std::pow(ac, p_);
      const double dw_scale = ac > 0.0 ? p_ * std::pow(ac, p_ - 2.0) : 0.0;
      const double dw_r = dw_scale * cv.real();
      const double dw_i = dw_scale * cv.imag();
      J(row_S, cc) += dw_r * (1.0 + std::norm(a));
      J(row_S, cc + 1) += dw_i * (1.0 + std::norm(a));
      put_col_add(J, row_S + 1, cc, dw_r * a);
      put_col_add(J, row_S + 1, cc + 1, dw_i * a);
      // S and V as functions of alpha (real directions), chained.
      const cplx S_r(2.0 * w * a.real(), 0.0);
      const cplx S_i(2.0 * w * a.imag(), 0.0);
      chain(S_r, S_i, da_r, da_i, o_r, o_i);
      J(row_S, ca) += o_r.real();
      J(row_S, ca + 1) += o_i.real();
      chain(cplx(w, 0.0), cplx(0.0, w), da_r, da_i, o_r, o_i);
      put_col_add(J, row_S + 1, ca, o_r);
      put_col_add(J, row_S + 1, ca + 1, o_i);
    }
    cplx o_r, o_i;
    chain(cplx(-2.0 * g.real(), 0.0), cplx(-2.0 * g.imag(), 0.0), dg_r, dg_i, o_r, o_i);
    J(row_S, 0) += o_r.real();
    J(row_S, 1) += o_i.real();
    chain(cplx(-1.0, 0.0), cplx(0.0, -1.0), dg_r, dg_i, o_r, o_i);
    put_col_add(J, row_S + 1, 0, o_r);
    put_col_add(J, row_S + 1, 1, o_i);
    return J.allFinite();
  }

 private:
  static std::size_t ia(std::size_t k) { return 2 + 2 * k; }
  std::size_t ic(std::size_t k) const { return 2 + 2 * m() + 2 * k; }

  static void put(Eigen::VectorXd& r, std::size_t row, cplx z) {
    r[static_cast<Eigen::Index>(row)] = z.real();
    r[static_cast<Eigen::Index>(row) + 1] = z.imag();
  }
  static void put_col(Eigen::MatrixXd& J, Eigen::Index row, Eigen::Index col, cplx z) {
    J(row, col) = z.real();
    J(row + 1, col) = z.imag();
  }
  static void put_col_add(Eigen::MatrixXd& J, Eigen::Index row, Eigen::Index col, cplx z) {
    J(row, col) += z.real();
    J(row + 1, col) += z.imag();
  }

  Mode mode_;
  double p_;
  double kappa_;
  std::vector<cplx> x_;
  std::vector<cplx> second_;
  std::vector<std::uint8_t> beta_;
};

struct RunResult {
  Eigen::VectorXd v;
  std::vector<std::uint8_t> beta;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
};

LmResult run_lm(const System& sys, const Eigen::VectorXd& v0, const SolveConfig& cfg) {
  LmOptions opt;
  opt.tolerance = cfg.tolerance;
  opt.max_iterations = cfg.max_iterations;
  return levenberg_marquardt([&](const Eigen::VectorXd& v, Eigen::VectorXd& r) { return sys.residual(v, r); },
                             [&](const Eigen::VectorXd& v, Eigen::MatrixXd& J) { return sys.jacobian(v, J); }, v0,
                             opt);
}

// LM with beta flips for coordinates whose Blaschke zero reaches the circle:
// at |alpha| = 1 the two forms agree with c_new = -alpha c_old (or -conj(alpha) c_old back).
RunResult adaptive_run(System sys, Eigen::VectorXd v, const SolveConfig& cfg, bool allow_flips) {
  RunResult out;
  for (std::size_t round = 0; round <= (allow_flips ? sys.m() : 0); ++round) {
    LmResult lm = run_lm(sys, v, cfg);
    if (lm.converged) {
      // a few more steps past the tolerance: distances near the boundary amplify the residual
      SolveConfig fine = cfg;
      fine.tolerance = 1e-15;
      fine.max_iterations = 8;
      const LmResult polished = run_lm(sys, lm.x, fine);
      if (polished.residual_norm < lm.residual_norm) {
        lm.x = polished.x;
        lm.residual_norm = polished.residual_norm;
      }
    }
    if (lm.residual_norm < out.residual || round == 0) {
      out.v = lm.x;
      out.beta = sys.beta();
      out.residual = lm.residual_norm;
      out.converged = lm.converged;
    }
    if (lm.converged || !allow_flips) break;
    v = lm.x;
    bool flipped = false;
    for (std::size_t k = 0; k < sys.m(); ++k) {
      const cplx a = sys.alpha(v, k);
      if (std::abs(a) <= kFlipThreshold) continue;
      const cplx cv = sys.c(v, k);
      if (sys.beta()[k]) {
        sys.beta()[k] = 0;
        sys.set_c(v, k, -a * cv);
      } else {
        sys.beta()[k] = 1;
        sys.set_c(v, k, -std::conj(a) * cv / std::norm(a));
      }
      // Pull alpha back inside so the chart is well conditioned.
      sys.set_alpha(v, k, a * (0.98 / std::abs(a)));
      flipped = true;
    }
    if (!flipped) break;
  }
  return out;
}

struct Problem {
  double p;
  std::vector<std::size_t> active;
  std::vector<cplx> x;  // active entries
  std::vector<cplx> y;
  double s_guess;
};

double linear_lower_guess(const ComplexVector& x, const ComplexVector& y) {
  double best = 0.0;
  for (const ComplexVector* dir : {&x, &y}) {
    const double nd = norm(*dir);
    if (nd == 0.0) continue;
    const DualFunctional f = support_functional((1.0 / nd) * *dir);
    best = std::max(best, pseudo_hyperbolic(pairing(x, f), pairing(y, f)));
  }
  const ComplexVector d = y - x;
  const DualFunctional f = support_functional((1.0 / norm(d)) * d);
  best = std::max(best, pseudo_hyperbolic(pairing(x, f), pairing(y, f)));
  return best;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

// Heuristic start: Blaschke zeros near the zero of the affine interpolant, c from phi(0) = x.
Eigen::VectorXd initial_guess(const System& sys, const Problem& pr, double jitter, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double s0 = std::clamp(std::tanh(std::atanh(std::min(pr.s_guess, 0.999)) * (1.0 + 0.3 * jitter * std::abs(gauss(rng)))),
                               1e-6, 0.9999);
  std::vector<cplx> a(sys.m());
  std::vector<cplx> cs(sys.m());
  for (std::size_t k = 0; k < sys.m(); ++k) {
    const cplx d = pr.y[k] - pr.x[k];
    cplx z0 = std::abs(d) > 1e-14 ? -pr.x[k] * s0 / d : cplx{};
    if (std::abs(z0) >= 1.0) z0 /= std::norm(z0);
    a[k] = 0.95 * z0 + jitter * cplx(gauss(rng), gauss(rng)) * 0.3;
    if (std::abs(a[k]) > 0.95) a[k] *= 0.95 / std::abs(a[k]);
    if (sys.beta()[k]) {
      cs[k] = std::abs(a[k]) > 1e-3 ? pr.x[k] / -a[k] : d / s0;
      if (std::abs(cs[k]) < 1e-12) cs[k] = d / s0;
    } else {
      cs[k] = std::abs(pr.x[k]) > 1e-12 ? pr.x[k] : d / s0;
    }
    cs[k] *= 1.0 + jitter * 0.2 * cplx(gauss(rng), gauss(rng));
  }
  return sys.encode(cplx(jitter * 0.2 * gauss(rng), jitter * 0.2 * gauss(rng)), a, cs, System::sigma_for(s0));
}

Problem make_problem(const ComplexVector& x, const ComplexVector& y) {
  if (!(x.space == y.space)) throw ContractError("solve: x and y live in different spaces");
  if (!x.space.is_lp()) throw ContractError("solve: only l^p signatures are supported (see the experimental direct-sum solver)");
  const auto& lp = x.space.as_lp();
  if (lp.p.is_infinite()) throw ContractError("solve: p = inf has no geodesic family; use polydisc_distance");
  if (!(norm(x) < 1.0) || !(norm(y) < 1.0)) throw DomainError("solve: endpoints must lie in the open unit ball");
  if (x.entries == y.entries) throw ContractError("solve: endpoints coincide");
  Problem pr;
  pr.p = lp.p.value();
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == cplx{} && y[j] == cplx{}) continue;
    pr.active.push_back(j);
    pr.x.push_back(x[j]);
    pr.y.push_back(y[j]);
  }
  pr.s_guess = linear_lower_guess(x, y);
  return pr;
}

std::vector<std::vector<std::uint8_t>> beta_patterns(std::size_t m, BetaStrategy strategy) {
  std::vector<std::vector<std::uint8_t>> out;
  out.emplace_back(m, 1);
  if (strategy == BetaStrategy::all_ones || m > kEnumerateLimit) return out;
  // Remaining patterns ordered by number of zeros, then lexicographically.
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) masks.push_back(mask);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
  for (std::uint32_t mask : masks) {
    std::vector<std::uint8_t> pat(m, 1);
    for (std::size_t k = 0; k < m; ++k) {
      if (mask & (1u << k)) pat[k] = 0;
    }
    out.push_back(std::move(pat));
  }
  return out;
}

// Runs batches of starts; returns the best run, stopping after the first batch with a converged run.
RunResult search(Mode mode, const Problem& pr, const std::vector<cplx>& second, const SolveConfig& cfg) {
  const auto patterns = beta_patterns(pr.x.size(), cfg.beta_strategy);
  const bool adaptive = cfg.beta_strategy == BetaStrategy::adaptive;
  // Adaptive: all starts on the all-ones pattern with flips; then the enumerated patterns two starts each.
  struct Task {
    std::size_t pattern;
    std::size_t start;
  };
  std::vector<Task> tasks;
  const std::size_t first_starts = static_cast<std::size_t>(cfg.multistarts);
  for (std::size_t k = 0; k < first_starts; ++k) tasks.push_back({0, k});
  const std::size_t per_pattern = cfg.beta_strategy == BetaStrategy::enumerate ? std::max<std::size_t>(2, first_starts / 4) : 2;
  for (std::size_t pi = 1; pi < patterns.size(); ++pi) {
    for (std::size_t k = 0; k < per_pattern; ++k) tasks.push_back({pi, k});
  }

  RunResult best;
  for (std::size_t begin = 0; begin < tasks.size(); begin += kBatch) {
    const std::size_t count = std::min(kBatch, tasks.size() - begin);
    std::vector<RunResult> slots(count);
    parallel_for(count, [&](std::size_t i) {
      const Task& t = tasks[begin + i];
      System sys(mode, pr.p, pr.x, second, patterns[t.pattern]);
      auto rng = make_rng(cfg.seed, t.pattern, t.start);
      const double jitter = (t.start == 0 && cfg.seed == 0) ? 0.0 : (t.start == 0 ? 0.5 : 1.0);
      const Eigen::VectorXd v0 = initial_guess(sys, pr, jitter, rng);
      slots[i] = adaptive_run(sys, v0, cfg, adaptive && t.pattern == 0);
    });
    for (auto& r : slots) {
      if (r.residual < best.residual) best = std::move(r);
    }
    if (best.converged) break;
  }
  return best;
}

GeodesicParams assemble(const Problem& pr, std::size_t n, const System& sys, const Eigen::VectorXd& v) {
  GeodesicParams g;
  g.p = pr.p;
  g.gamma = sys.gamma(v);
  g.alpha.assign(n, cplx{});
  g.beta.assign(n, 0);
  g.c.assign(n, cplx{});
  for (std::size_t k = 0; k < pr.active.size(); ++k) {
    const std::size_t j = pr.active[k];
    g.alpha[j] = sys.alpha(v, k);
    g.beta[j] = sys.beta()[k];
    g.c[j] = sys.c(v, k);
  }
  g.canonicalize();
  return g;
}

}  // namespace

NormalizedGeodesic solve(const ComplexVector& x, const ComplexVector& y, const SolveConfig& config) {
  config.validate();
  const Problem pr = make_problem(x, y);
  const RunResult best = search(Mode::endpoint, pr, pr.y, config);
  if (!best.converged) {
    std::ostringstream os;
    os.precision(3);
    os << "solve: no start converged (best residual " << best.residual << ")";
    throw NonConvergence(os.str(), best.residual);
  }
  System sys(Mode::endpoint, pr.p, pr.x, pr.y, best.beta);
  NormalizedGeodesic out;
  out.params = assemble(pr, x.size(), sys, best.v);
  out.s = sys.s(best.v);
  out.x = x;
  out.y = y;
  out.residual_norm = best.residual;
  return out;
}

double distance(const ComplexVector& x, const ComplexVector& y, const SolveConfig& config) {
  return solve(x, y, config).distance();
}

UniquenessReport uniqueness_probe(const ComplexVector& x, const ComplexVector& y, int runs, const SolveConfig& config) {
  if (runs < 1) throw ContractError("uniqueness_probe: runs must be >= 1");
  UniquenessReport rep;
  rep.runs = runs;
  std::vector<cplx> grid;
  for (int m = 0; m < 4; ++m) {
    for (int k = 0; k < 16; ++k) grid.push_back(std::polar(0.9 * (m + 1) / 4.0, 2.0 * std::numbers::pi * k / 16.0));
  }
  std::vector<std::vector<ComplexVector>> samples;
  for (int r = 0; r < runs; ++r) {
    SolveConfig cfg = config;
    cfg.seed = config.seed + static_cast<std::uint64_t>(r) + 1;
    try {
      NormalizedGeodesic g = solve(x, y, cfg);
      std::vector<ComplexVector> vals;
      vals.reserve(grid.size());
      for (cplx z : grid) vals.push_back(eval(g.params, z));
      samples.push_back(std::move(vals));
      rep.geodesics.push_back(std::move(g));
      ++rep.converged_runs;
    } catch (const NonConvergence&) {
      rep.partial = true;
    }
  }
  for (std::size_t a = 0; a < samples.size(); ++a) {
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        rep.max_map_discrepancy = std::max(rep.max_map_discrepancy, norm(samples[a][k] - samples[b][k]));
      }
      rep.max_s_discrepancy = std::max(rep.max_s_discrepancy, std::abs(rep.geodesics[a].s - rep.geodesics[b].s));
    }
  }
  return rep;
}

TangentGeodesic solve_tangent(const ComplexVector& x, const ComplexVector& v, const SolveConfig& config) {
  config.validate();
  if (!(x.space == v.space)) throw ContractError("solve_tangent: x and v live in different spaces");
  const double nv = norm(v);
  if (!(nv > 0.0)) throw ContractError("solve_tangent: v must be nonzero");
  const double nx = norm(x);
  if (!(nx < 1.0)) throw DomainError("solve_tangent: x must lie in the open unit ball");
  const ComplexVector u = (1.0 / nv) * v;
  const double t = std::min(1e-2, 0.5 * (1.0 - nx));
  const ComplexVector y = x + cplx(t) * u;
  const NormalizedGeodesic finite = solve(x, y, config);

  Problem pr = make_problem(x, y);
  std::vector<cplx> dir;
  for (std::size_t j : pr.active) dir.push_back(u[j]);
  std::vector<std::uint8_t> beta;
  std::vector<cplx> a;
  std::vector<cplx> cs;
  for (std::size_t j : pr.active) {
    beta.push_back(finite.params.beta[j]);
    a.push_back(finite.params.alpha[j]);
    cs.push_back(finite.params.c[j]);
  }
  System sys(Mode::tangent, pr.p, pr.x, dir, beta);
  const ComplexVector d0 = eval_derivative(finite.params, 0.0);
  const Eigen::VectorXd v0 = sys.encode(finite.params.gamma, a, cs, std::log(norm(d0)));
  RunResult best = adaptive_run(sys, v0, config, config.beta_strategy == BetaStrategy::adaptive);
  if (!best.converged) {
    std::ostringstream os;
    os.precision(3);
    os << "solve_tangent: tangent system did not converge (residual " << best.residual << ")";
    throw NonConvergence(os.str(), best.residual);
  }
  System final_sys(Mode::tangent, pr.p, pr.x, dir, best.beta);
  TangentGeodesic out;
  out.params = assemble(pr, x.size(), final_sys, best.v);
  out.mu = final_sys.mu(best.v);
  out.x = x;
  out.v = v;
  out.residual_norm = best.residual;
  return out;
}

// ---------------------------------------------------------------------------
// Direct sums: elimination parametrization, finite-difference LM.

namespace {

struct DirectSumLayout {
  std::size_t n;
  // [u_alpha (2n), log w (n), phase (n), mix logit, sigma]
  Eigen::Index size() const { return static_cast<Eigen::Index>(4 * n + 2); }
};

DirectSumGeodesicParams decode_direct_sum(const DirectSumSignature& sig, const DirectSumLayout& L,
                                          const std::vector<std::uint8_t>& beta, const Eigen::VectorXd& v) {
  std::vector<cplx> a(L.n);
  std::vector<double> w(L.n);
  std::vector<double> ph(L.n);
  for (std::size_t j = 0; j < L.n; ++j) {
    a[j] = chart({v[2 * j], v[2 * j + 1]});
    w[j] = std::exp(std::clamp(v[2 * L.n + j], -60.0, 60.0));
    ph[j] = v[3 * L.n + j];
  }
  const double mix = 1.0 / (1.0 + std::exp(-v[4 * L.n]));
  return admissible_direct_sum(sig, a, w, ph, beta, std::clamp(mix, 1e-12, 1.0 - 1e-12));
}

}  // namespace

DirectSumGeodesic solve_direct_sum_experimental(const ComplexVector& x, const ComplexVector& y,
                                                const SolveConfig& config) {
  config.validate();
  if (!(x.space == y.space) || !x.space.is_direct_sum()) {
    throw ContractError("solve_direct_sum_experimental: needs two points of the same direct-sum space");
  }
  if (!(norm(x) < 1.0) || !(norm(y) < 1.0)) throw DomainError("endpoints must lie in the open unit ball");
  if (x.entries == y.entries) throw ContractError("endpoints coincide");
  const DirectSumSignature sig = x.space.as_direct_sum();
  const DirectSumLayout L{sig.n1 + sig.n2};
  const double s_guess = linear_lower_guess(x, y);

  auto residual_for = [&](const std::vector<std::uint8_t>& beta) {
    return [&, beta](const Eigen::VectorXd& v, Eigen::VectorXd& r) {
      r.resize(static_cast<Eigen::Index>(4 * L.n));
      try {
        const auto g = decode_direct_sum(sig, L, beta, v);
        const double s = std::tanh(v[4 * L.n + 1] * v[4 * L.n + 1] + kSigmaOffset);
        const auto f0 = eval_direct_sum(g, 0.0);
        const auto f1 = eval_direct_sum(g, s);
        for (std::size_t j = 0; j < L.n; ++j) {
          const cplx d0 = f0[j] - x[j];
          const cplx d1 = f1[j] - y[j];
          r[static_cast<Eigen::Index>(2 * j)] = d0.real();
          r[static_cast<Eigen::Index>(2 * j + 1)] = d0.imag();
          r[static_cast<Eigen::Index>(2 * L.n + 2 * j)] = d1.real();
          r[static_cast<Eigen::Index>(2 * L.n + 2 * j + 1)] = d1.imag();
        }
      } catch (const Error&) {
        return false;
      }
      return r.allFinite();
    };
  };

  const auto patterns = beta_patterns(L.n, config.beta_strategy == BetaStrategy::all_ones ? BetaStrategy::all_ones
                                                                                            : BetaStrategy::enumerate);
  DirectSumGeodesic best;
  best.residual_norm = std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> best_beta;
  Eigen::VectorXd best_v;
  LmOptions opt;
  opt.tolerance = config.tolerance;
  opt.max_iterations = config.max_iterations;
  for (std::size_t pi = 0; pi < patterns.size() && !(best.residual_norm < config.tolerance); ++pi) {
    const auto f = residual_for(patterns[pi]);
    for (int k = 0; k < config.multistarts; ++k) {
      auto rng = make_rng(config.seed, 1000 + pi, static_cast<std::uint64_t>(k));
      std::normal_distribution<double> gauss(0.0, 1.0);
      Eigen::VectorXd v0(L.size());
      for (std::size_t j = 0; j < L.n; ++j) {
        const cplx target = x[j] != cplx{} ? x[j] : y[j];
        v0[2 * j] = 0.5 * gauss(rng);
        v0[2 * j + 1] = 0.5 * gauss(rng);
        v0[2 * L.n + j] = std::log(std::max(std::abs(target), 1e-3)) + 0.3 * gauss(rng);
        v0[3 * L.n + j] = std::arg(target) + std::numbers::pi + 0.3 * gauss(rng);
      }
      v0[4 * L.n] = 0.3 * gauss(rng);
      v0[4 * L.n + 1] = System::sigma_for(std::max(s_guess, 1e-3));
      const LmResult lm = levenberg_marquardt(f, {}, v0, opt);
      if (lm.residual_norm < best.residual_norm) {
        best.residual_norm = lm.residual_norm;
        best_v = lm.x;
        best_beta = patterns[pi];
      }
      if (lm.converged) break;
    }
  }
  if (!(best.residual_norm < config.tolerance)) {
    std::ostringstream os;
    os.precision(3);
    os << "solve_direct_sum_experimental: no start converged (best residual " << best.residual_norm << ")";
    throw NonConvergence(os.str(), best.residual_norm);
  }
  best.params = decode_direct_sum(sig, L, best_beta, best_v);
  best.s = std::tanh(best_v[4 * L.n + 1] * best_v[4 * L.n + 1] + kSigmaOffset);
  best.residual_norm = std::max(best.residual_norm, direct_sum_residuals(best.params).max_abs());
  return best;
}

}  // namespace holomet
