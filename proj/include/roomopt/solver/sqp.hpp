#pragma once

// Box-constrained SQP: a quasi-Newton (damped BFGS) model solved as a
// bound-constrained QP by a primal active-set method, followed by a
// monotone backtracking line search. Gradients are central differences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace roomopt::sqp {

using Objective = std::function<double(std::span<const double>)>;

struct Options {
  int max_iterations = 300;
  double improvement_tol = 1e-6;
  int stall_iterations = 3;
  double fd_step = 1e-4;
  int max_backtracks = 30;
  double armijo = 1e-4;
};

struct Result {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed_at_start = false;      // line search never succeeded
  std::vector<double> accepted;      // objective after every accepted step, starting with f(x0)
};

/// Central-difference gradient with step h. `x` is restored on return.
inline void central_gradient(const Objective& f, std::vector<double>& x, std::span<double> grad, double h) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double fp = f(x);
    x[i] = xi - h;
    const double fm = f(x);
    x[i] = xi;
    grad[i] = (fp - fm) / (2.0 * h);
  }
}

/// Minimizes g'd + d'Bd/2 subject to lo <= d <= hi (lo <= 0 <= hi) with a
/// primal active-set method. B must be symmetric positive definite.
inline Eigen::VectorXd solve_box_qp(const Eigen::MatrixXd& B, const Eigen::VectorXd& g,
                                    const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const Eigen::Index n = g.size();
  enum State : char { kFree, kLower, kUpper };
  std::vector<State> state(static_cast<std::size_t>(n), kFree);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lo[i] >= 0.0 && g[i] > 0.0) state[i] = kLower;
    if (hi[i] <= 0.0 && g[i] < 0.0) state[i] = kUpper;
  }
  const int max_iter = static_cast<int>(10 * n + 10);
  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<Eigen::Index> free_idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (state[i] == kFree) free_idx.push_back(i);
    Eigen::VectorXd target = d;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] == kLower) target[i] = lo[i];
      if (state[i] == kUpper) target[i] = hi[i];
    }
    const auto nf = static_cast<Eigen::Index>(free_idx.size());
    if (nf > 0) {
      Eigen::MatrixXd Bff(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        double r = -g[free_idx[a]];
        for (Eigen::Index k = 0; k < n; ++k)
          if (state[k] != kFree) r -= B(free_idx[a], k) * target[k];
        rhs[a] = r;
        for (Eigen::Index b = 0; b < nf; ++b) Bff(a, b) = B(free_idx[a], free_idx[b]);
      }
      const Eigen::VectorXd pf = Bff.ldlt().solve(rhs);
      for (Eigen::Index a = 0; a < nf; ++a) target[free_idx[a]] = pf[a];
    }
    // Walk from d toward target, stopping at the first bound hit.
    double t = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (state[i] != kFree) continue;
      const double step = target[i] - d[i];
      if (target[i] > hi[i] && step > 0.0) {
        const double ti = (hi[i] - d[i]) / step;
        if (ti < t) { t = ti; blocking = i; }
      } else if (target[i] < lo[i] && step < 0.0) {
        const double ti = (lo[i] - d[i]) / step;
        if (ti < t) { t = ti; blocking = i; }
      }
    }
    t = std::clamp(t, 0.0, 1.0);
    d += t * (target - d);
    if (blocking >= 0) {
      state[blocking] = target[blocking] > hi[blocking] ? kUpper : kLower;
      d[blocking] = state[blocking] == kUpper ? hi[blocking] : lo[blocking];
      continue;
    }
    // Subspace optimum is feasible; check multiplier signs on the active set.
    const Eigen::VectorXd q = g + B * d;
    Eigen::Index worst = -1;
    double worst_v = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = state[i] == kLower ? -q[i] : state[i] == kUpper ? q[i] : 0.0;
      if (v > worst_v + 1e-14) { worst_v = v; worst = i; }
    }
    if (worst < 0) break;
    state[worst] = kFree;
  }
  return d.cwiseMax(lo).cwiseMin(hi);
}

/// Local minimization from x0 within [lower, upper]. Accepted iterates never
/// increase the objective.
inline Result minimize(const Objective& f, std::vector<double> x0, std::span<const double> lower,
                       std::span<const double> upper, const Options& opt = {}) {
  const std::size_t n = x0.size();
  Result res;
  for (std::size_t i = 0; i < n; ++i) x0[i] = std::clamp(x0[i], lower[i], upper[i]);
  res.x = x0;
  res.value = f(res.x);
  res.accepted.push_back(res.value);
  if (n == 0) {
    res.converged = true;
    return res;
  }

  Eigen::Map<const Eigen::VectorXd> lo_b(lower.data(), static_cast<Eigen::Index>(n));
  Eigen::Map<const Eigen::VectorXd> hi_b(upper.data(), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> work = res.x;
  std::vector<double> grad(n);
  central_gradient(f, work, grad, opt.fd_step);
  bool fresh_hessian = true;
  int stall = 0;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (res.value <= 0.0) {
      res.converged = true;
      break;
    }
    Eigen::Map<Eigen::VectorXd> xv(res.x.data(), static_cast<Eigen::Index>(n));
    Eigen::Map<Eigen::VectorXd> gv(grad.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd d = solve_box_qp(B, gv, lo_b - xv, hi_b - xv);
    const double slope = gv.dot(d);
    if (d.lpNorm<Eigen::Infinity>() < 1e-12 || !(slope < 0.0)) {
      if (!fresh_hessian) {
        B.setIdentity();
        fresh_hessian = true;
        continue;
      }
      res.converged = true;
      break;
    }

    double alpha = 1.0;
    double best_alpha = 0.0;
    double best_f = res.value;
    std::vector<double> trial(n);
    for (int k = 0; k < opt.max_backtracks; ++k) {
      for (std::size_t i = 0; i < n; ++i)
        trial[i] = std::clamp(res.x[i] + alpha * d[static_cast<Eigen::Index>(i)], lower[i], upper[i]);
      const double ft = f(trial);
      if (ft < best_f) {
        best_f = ft;
        best_alpha = alpha;
      }
      if (ft <= res.value + opt.armijo * alpha * slope) break;
      alpha *= 0.5;
    }
    if (best_alpha == 0.0) {
      if (!fresh_hessian) {
        B.setIdentity();
        fresh_hessian = true;
        continue;
      }
      if (res.iterations == 0) {
        res.failed_at_start = true;
        res.converged = false;
      } else {
        res.converged = true;
      }
      break;
    }

    std::vector<double> x_new(n);
    for (std::size_t i = 0; i < n; ++i)
      x_new[i] = std::clamp(res.x[i] + best_alpha * d[static_cast<Eigen::Index>(i)], lower[i], upper[i]);
    std::vector<double> g_new(n);
    work = x_new;
    central_gradient(f, work, g_new, opt.fd_step);

    // Damped BFGS update keeps B positive definite on nonconvex terrain.
    Eigen::VectorXd s(static_cast<Eigen::Index>(n));
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      s[static_cast<Eigen::Index>(i)] = x_new[i] - res.x[i];
      y[static_cast<Eigen::Index>(i)] = g_new[i] - grad[i];
    }
    const Eigen::VectorXd Bs = B * s;
    const double sBs = s.dot(Bs);
    const double sy = s.dot(y);
    if (sBs > 1e-16) {
      if (fresh_hessian && sy > 1e-12) {
        B *= y.squaredNorm() / sy;  // first update rescales the identity
      }
      const Eigen::VectorXd Bs2 = B * s;
      const double sBs2 = s.dot(Bs2);
      double theta = 1.0;
      if (sy < 0.2 * sBs2) theta = 0.8 * sBs2 / (sBs2 - sy);
      const Eigen::VectorXd r = theta * y + (1.0 - theta) * Bs2;
      const double sr = s.dot(r);
      if (sr > 1e-16 && sBs2 > 1e-16) {
        B += r * r.transpose() / sr - Bs2 * Bs2.transpose() / sBs2;
        fresh_hessian = false;
      }
    }
    if (!B.allFinite() || B.diagonal().minCoeff() <= 0.0) {
      B.setIdentity();
      fresh_hessian = true;
    }

    const double improvement = res.value - best_f;
    res.x = std::move(x_new);
    res.value = best_f;
    grad = std::move(g_new);
    res.accepted.push_back(res.value);
    ++res.iterations;
    stall = improvement < opt.improvement_tol ? stall + 1 : 0;
    if (stall >= opt.stall_iterations) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace roomopt::sqp
