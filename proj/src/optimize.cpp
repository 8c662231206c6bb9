#include "holomet/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>
#include <limits>

namespace holomet {

bool fd_jacobian(const ResidualFn& f, const Eigen::VectorXd& x, Eigen::Index rows, Eigen::MatrixXd& J, double h) {
  J.resize(rows, x.size());
  Eigen::VectorXd xp = x;
  Eigen::VectorXd rp(rows);
  Eigen::VectorXd rm(rows);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + step;
    const bool okp = f(xp, rp);
    xp[i] = x[i] - step;
    const bool okm = f(xp, rm);
    xp[i] = x[i];
    if (!okp || !okm) return false;
    J.col(i) = (rp - rm) / (2.0 * step);
  }
  return true;
}

LmResult levenberg_marquardt(const ResidualFn& f, const JacobianFn& jac, Eigen::VectorXd x0,
                             const LmOptions& options) {
  LmResult out;
  out.x = std::move(x0);
  Eigen::VectorXd r;
  if (!f(out.x, r) || !r.allFinite()) {
    out.residual_norm = std::numeric_limits<double>::infinity();
    return out;
  }
  const Eigen::Index m = r.size();
  const Eigen::Index n = out.x.size();
  double cost = 0.5 * r.squaredNorm();
  Eigen::MatrixXd J;
  double mu = -1.0;
  double nu = 2.0;
  Eigen::MatrixXd aug(m + n, n);
  Eigen::VectorXd rhs(m + n);
  Eigen::VectorXd r_new(m);
  bool need_jacobian = true;

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    if (std::sqrt(2.0 * cost) < options.tolerance) break;
    if (need_jacobian) {
      bool ok = jac && jac(out.x, J);
      if (!ok) ok = fd_jacobian(f, out.x, m, J);
      if (!ok || !J.allFinite()) break;
      need_jacobian = false;
    }
    const Eigen::VectorXd g = J.transpose() * r;
    Eigen::VectorXd d = J.colwise().squaredNorm().transpose();
    const double dmax = d.maxCoeff();
    if (!(dmax > 0.0)) break;
    d = d.cwiseMax(1e-12 * dmax);
    if (mu < 0.0) mu = options.initial_damping;

    aug.topRows(m) = J;
    aug.bottomRows(n).setZero();
    aug.bottomRows(n).diagonal() = (mu * d).cwiseSqrt();
    rhs.head(m) = -r;
    rhs.tail(n).setZero();
    const Eigen::VectorXd delta = aug.colPivHouseholderQr().solve(rhs);
    if (!delta.allFinite()) break;
    if (delta.norm() <= options.step_tolerance * (out.x.norm() + options.step_tolerance)) break;

    const Eigen::VectorXd x_new = out.x + delta;
    const bool ok = f(x_new, r_new) && r_new.allFinite();
    const double cost_new = ok ? 0.5 * r_new.squaredNorm() : std::numeric_limits<double>::infinity();
    const double predicted = 0.5 * delta.dot(mu * d.cwiseProduct(delta) - g);
    const double gain = predicted > 0.0 ? (cost - cost_new) / predicted : -1.0;
    if (ok && gain > 0.0 && cost_new < cost) {
      out.x = x_new;
      r = r_new;
      cost = cost_new;
      need_jacobian = true;
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * gain - 1.0, 3));
      nu = 2.0;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (mu > 1e20) break;
    }
  }
  out.residual_norm = std::sqrt(2.0 * cost);
  out.converged = out.residual_norm < options.tolerance;
  return out;
}

namespace {

double safe(const ObjectiveFn& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd fd_gradient(const ObjectiveFn& f, const Eigen::VectorXd& x, double fx, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + step;
    const double fp = safe(f, xp);
    xp[i] = x[i] - step;
    const double fm = safe(f, xp);
    xp[i] = x[i];
    if (std::isfinite(fp) && std::isfinite(fm)) {
      g[i] = (fp - fm) / (2.0 * step);
    } else if (std::isfinite(fp)) {
      g[i] = (fp - fx) / step;
    } else if (std::isfinite(fm)) {
      g[i] = (fx - fm) / step;
    } else {
      g[i] = 0.0;
    }
  }
  return g;
}

}  // namespace

BfgsResult bfgs_minimize(const ObjectiveFn& f, Eigen::VectorXd x0, const BfgsOptions& options) {
  BfgsResult out;
  out.x = std::move(x0);
  out.value = safe(f, out.x);
  if (!std::isfinite(out.value)) return out;
  const Eigen::Index n = out.x.size();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = fd_gradient(f, out.x, out.value, options.fd_step);
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    if (g.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) break;
    Eigen::VectorXd dir = -H * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      H.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new;
    for (int k = 0; k < 50; ++k) {
      x_new = out.x + step * dir;
      f_new = safe(f, x_new);
      if (f_new <= out.value + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    if (!(f_new <= out.value + 1e-4 * step * slope)) {
      if (H.isIdentity()) break;
      H.setIdentity();
      continue;
    }
    const Eigen::VectorXd g_new = fd_gradient(f, x_new, f_new, options.fd_step);
    const Eigen::VectorXd s = x_new - out.x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    const double previous = out.value;
    out.x = x_new;
    out.value = f_new;
    g = g_new;
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    } else {
      H.setIdentity();
    }
    if (std::abs(previous - f_new) <= 1e-15 * std::max(1.0, std::abs(f_new)) && s.norm() < 1e-12) break;
  }
  return out;
}

namespace {

BfgsResult nelder_mead_pass(const ObjectiveFn& f, const Eigen::VectorXd& x0, const NelderMeadOptions& options,
                            int budget) {
  const Eigen::Index n = x0.size();
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> vals(static_cast<std::size_t>(n + 1));
  int evals = 0;
  const auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return safe(f, x);
  };
  for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<std::size_t>(i + 1)][i] += options.initial_step;
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(pts.size());
  int iterations = 0;
  while (evals < budget) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    if (std::isfinite(vals[worst]) && vals[worst] - vals[best] <= options.value_tolerance) break;
    ++iterations;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += pts[order[i]];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc =
        outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid)) : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  BfgsResult out;
  out.x = pts[static_cast<std::size_t>(it - vals.begin())];
  out.value = *it;
  out.iterations = iterations;
  return out;
}

}  // namespace

BfgsResult nelder_mead_minimize(const ObjectiveFn& f, Eigen::VectorXd x0, const NelderMeadOptions& options) {
  const int half = options.max_evaluations / 2;
  BfgsResult first = nelder_mead_pass(f, x0, options, half);
  NelderMeadOptions again = options;
  again.initial_step = options.initial_step * 0.1;
  BfgsResult second = nelder_mead_pass(f, first.x, again, options.max_evaluations - half);
  second.iterations += first.iterations;
  return second.value <= first.value ? second : first;
}

}  // namespace holomet
