#include <algorithm>
#include <cmath>
#include <limits>

#include "clipcs/cs_model.hpp"

namespace clipcs {
namespace {

struct Quadratic {
  const RMat& gram;
  const RVec& corr;
  double y_energy;

  // ‖y - Ψ̃ a‖² given G a.
  double value(const RVec& a, const RVec& ga) const { return y_energy - 2.0 * corr.dot(a) + a.dot(ga); }
};

// G a using only the nonzero entries of a.
void sparse_product(const RMat& gram, const RVec& a, RVec& out) {
  out.setZero(gram.rows());
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a[j] != 0.0) out.noalias() += gram.col(j) * a[j];
  }
}

// Solves the KKT system on the current support. Succeeds only when the
// result is a certified optimum of the penalized problem.
bool polish(const RMat& gram, const RVec& corr, const RVec& weights, double lambda, RVec& a,
            double tol) {
  std::vector<Eigen::Index> s;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) s.push_back(i);
  }
  if (s.empty()) return false;
  const auto k = static_cast<Eigen::Index>(s.size());
  RMat gs(k, k);
  RVec rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    rhs[i] = corr[s[i]] - 0.5 * lambda * weights[s[i]];
    for (Eigen::Index j = 0; j < k; ++j) gs(i, j) = gram(s[i], s[j]);
  }
  Eigen::LDLT<RMat> ldlt(gs);
  if (ldlt.info() != Eigen::Success) return false;
  const RVec as = ldlt.solve(rhs);
  if (!as.allFinite() || (gs * as - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) return false;
  if ((as.array() <= 0.0).any()) return false;
  RVec candidate = RVec::Zero(a.size());
  for (Eigen::Index i = 0; i < k; ++i) candidate[s[i]] = as[i];
  const RVec grad = 2.0 * (gram * candidate - corr) + lambda * weights;
  const double scale = 1.0 + corr.cwiseAbs().maxCoeff() + lambda * weights.maxCoeff();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (candidate[i] == 0.0 && grad[i] < -tol * scale) return false;
  }
  a = std::move(candidate);
  return true;
}

}  // namespace

PenalizedResult wpal_penalized(const RMat& gram, const RVec& corr, double y_energy,
                               const RVec& weights, double lambda, const RVec& warm_start,
                               int max_iters, double tolerance, bool trace) {
  const Eigen::Index n = corr.size();
  const Quadratic f{gram, corr, y_energy};
  PenalizedResult out;

  RVec x = warm_start.size() == n ? RVec(warm_start.cwiseMax(0.0)) : RVec(RVec::Zero(n));
  RVec gx;
  sparse_product(gram, x, gx);
  auto objective = [&](const RVec& a, const RVec& ga) { return f.value(a, ga) + lambda * weights.dot(a); };
  double fx = objective(x, gx);

  RVec x_prev = x, gx_prev = gx;
  RVec y = x, gy = gx;
  RVec z(n), gz(n);
  double t = 1.0;
  double lip = 0.5;
  if (trace) out.objective_trace.push_back(fx);

  for (int it = 1; it <= max_iters; ++it) {
    const RVec grad = 2.0 * (gy - corr);
    const double fy = f.value(y, gy);
    // Backtracking on the Lipschitz estimate. gy is carried by recurrence, so
    // the test needs rounding slack, and a zero step always passes.
    for (int bt = 0; bt < 200; ++bt) {
      z = (y - grad / lip - (lambda / lip) * weights).cwiseMax(0.0);
      sparse_product(gram, z, gz);
      const RVec d = z - y;
      const double dd = d.squaredNorm();
      if (dd == 0.0) break;
      if (f.value(z, gz) <= fy + grad.dot(d) + 0.5 * lip * dd + 1e-12 * (1.0 + std::abs(fy))) break;
      lip *= 2.0;
    }
    const double fz = objective(z, gz);
    x_prev = x;
    gx_prev = gx;
    const bool accepted = fz <= fx;
    if (accepted) {
      x = z;
      gx = gz;
      fx = fz;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - x_prev);
    gy = gx + (t / t_next) * (gz - gx) + ((t - 1.0) / t_next) * (gx - gx_prev);
    t = t_next;
    if (trace) out.objective_trace.push_back(fx);
    out.iterations = it;

    const double change = (x - x_prev).norm();
    if (accepted && it > 1 && change <= tolerance * std::max(1.0, x.norm())) {
      out.converged = true;
      break;
    }
    if (it % 25 == 0) {
      RVec p = x;
      if (polish(gram, corr, weights, lambda, p, 1e-9)) {
        RVec gp;
        sparse_product(gram, p, gp);
        const double fp = objective(p, gp);
        if (fp <= fx) {
          x = p;
          fx = fp;
          if (trace) out.objective_trace.push_back(fx);
          out.converged = true;
          break;
        }
      }
    }
  }
  out.amplitudes = std::move(x);
  return out;
}

double default_epsilon(const CsModel& model) {
  const double m = model.m();
  return m * model.mean_noise_variance() * (1.0 + 2.0 / std::sqrt(m));
}

RecoveryResult wpal_solve(const CsModel& model, const WpalOptions& opts) {
  if (opts.epsilon == 0.0 || opts.epsilon_scale <= 0.0) throw InvalidInput("epsilon must be positive");
  const RMat gram = model.augmented_gram();
  const RVec corr = model.augmented_adjoint(model.observations);
  const double yy = model.observations.squaredNorm();
  const RVec weights = model.wpal_weights.cwiseMax(1e-12);

  double eps = opts.epsilon > 0.0 ? opts.epsilon : opts.epsilon_scale * default_epsilon(model);
  eps = std::max(eps, 1e-16 * yy);

  RecoveryResult res;
  res.amplitudes = RVec::Zero(model.n);
  res.clip_estimate = CVec::Zero(model.n);
  res.residual_norm = std::sqrt(yy);
  if (yy <= eps) {
    res.status = SolverStatus::converged;
    return res;
  }

  double lambda_max = 0.0;
  for (Eigen::Index i = 0; i < corr.size(); ++i) lambda_max = std::max(lambda_max, 2.0 * corr[i] / weights[i]);
  if (!(lambda_max > 0.0)) {
    // No nonnegative direction reduces the residual.
    res.status = SolverStatus::infeasible;
    return res;
  }

  const double lo_target = (1.0 - opts.residual_window) * eps;
  int total_iters = 0;
  bool all_converged = true;

  struct Eval {
    double lambda;
    RVec a;
    double residual;
  };
  auto solve_at = [&](double lambda, const RVec& warm) {
    auto p = wpal_penalized(gram, corr, yy, weights, lambda, warm, opts.max_iters, opts.tolerance);
    total_iters += p.iterations;
    all_converged = all_converged && p.converged;
    const CVec r = model.observations - model.augmented_apply(p.amplitudes);
    return Eval{lambda, std::move(p.amplitudes), r.squaredNorm()};
  };

  // Walk down from λ_max until the residual constraint holds.
  Eval hi{lambda_max, RVec::Zero(model.n), yy};
  Eval lo = hi;
  const double lambda_floor = lambda_max * 1e-14;
  bool bracketed = false;
  for (double lambda = lambda_max * 0.1; lambda >= lambda_floor; lambda *= 0.1) {
    lo = solve_at(lambda, hi.a);
    if (lo.residual <= eps) {
      bracketed = true;
      break;
    }
    hi = lo;
  }

  Eval best = lo;
  if (!bracketed) {
    res.status = SolverStatus::infeasible;
  } else {
    // Geometric bisection until the constraint is active within the window.
    for (int b = 0; b < opts.max_bisections && best.residual < lo_target; ++b) {
      const double mid = std::sqrt(lo.lambda * hi.lambda);
      Eval e = solve_at(mid, lo.a);
      if (e.residual <= eps) {
        lo = std::move(e);
        best = lo;
      } else {
        hi = std::move(e);
      }
      if (hi.lambda / lo.lambda < 1.0 + 1e-12) break;
    }
    res.status = all_converged ? SolverStatus::converged : SolverStatus::max_iterations;
  }

  res.amplitudes = best.a;
  res.lambda = best.lambda;
  res.iterations = total_iters;
  res.residual_norm = std::sqrt(best.residual);
  res.clip_estimate = model.to_clip(res.amplitudes);
  const double amax = res.amplitudes.maxCoeff();
  for (Eigen::Index i = 0; i < res.amplitudes.size(); ++i) {
    if (res.amplitudes[i] > opts.support_threshold * std::max(amax, 1.0)) res.support.push_back(static_cast<int>(i));
  }
  return res;
}

}  // namespace clipcs
