#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "clipcs/channel.hpp"
#include "clipcs/cs_model.hpp"

namespace clipcs {
namespace {

// One node of the support search. The Cholesky factor is of
// K_s = G_ss + ρ I with ρ = σ²/σ_a², σ² the per-component noise variance.
struct Hypothesis {
  std::vector<int> support;
  RMat chol;         // lower triangular, k x k
  RMat cross;        // L^{-1} G_{s,:}, k x N
  RVec whitened;     // L^{-1} b_s
  double metric = 0.0;
};

struct Child {
  std::size_t parent;
  int index;
  double metric;
  std::vector<int> support;  // sorted, for deduplication
};

}  // namespace

std::string_view to_string(BmpPrior p) {
  return p == BmpPrior::uniform ? "uniform" : "data_aided";
}

BmpPrior parse_bmp_prior(std::string_view s) {
  if (s == "uniform") return BmpPrior::uniform;
  if (s == "data_aided") return BmpPrior::data_aided;
  throw InvalidInput("unknown BMP prior: " + std::string(s));
}

double clip_posterior(double magnitude, double gamma, double noise_variance, double sigma_x) {
  constexpr double kMin = 1e-6;
  if (!std::isfinite(gamma)) return kMin;
  // Work in units of σ_x. The radial noise is approximated as real Gaussian
  // with variance s2 = σ_e²/2.
  const double r = magnitude / sigma_x;
  const double g = gamma / sigma_x;
  const double s2 = std::max(noise_variance / (2.0 * sigma_x * sigma_x), 1e-12);
  const double log_clip = -g * g - 0.5 * std::log(2.0 * std::numbers::pi * s2) - (r - g) * (r - g) / (2.0 * s2);
  // Unclipped: ∫_0^γ 2s e^{-s²} N(r; s, s2) ds. The Gaussian product in s has
  // mean mu and variance v.
  const double mu = r / (1.0 + 2.0 * s2);
  const double v = s2 / (1.0 + 2.0 * s2);
  const double sv = std::sqrt(v);
  const double lo = -mu / sv, hi = (g - mu) / sv;
  const double gauss_part = v * (std::exp(-0.5 * lo * lo) - std::exp(-0.5 * hi * hi));
  const double phi_part = mu * std::sqrt(2.0 * std::numbers::pi * v) *
                          0.5 * (std::erfc(-hi / std::numbers::sqrt2) - std::erfc(-lo / std::numbers::sqrt2));
  const double integral = gauss_part + phi_part;
  if (!(integral > 0.0)) return 1.0 - kMin;
  const double log_free = std::log(2.0 / std::sqrt(2.0 * std::numbers::pi * s2)) - r * r / (1.0 + 2.0 * s2) +
                          std::log(integral);
  const double p = 1.0 / (1.0 + std::exp(log_free - log_clip));
  return std::clamp(p, kMin, 1.0 - kMin);
}

BmpPriors default_bmp_priors(const CsModel& model, double sigma_x, BmpPrior kind) {
  BmpPriors p;
  p.activity = std::clamp(clip_probability(model.gamma, sigma_x), 1e-6, 1.0 - 1e-6);
  const double v = clip_distortion_variance(model.gamma, sigma_x);
  p.amplitude_variance = v > 0.0 ? v / p.activity : 1e-6;
  p.noise_variance = std::max(model.mean_noise_variance(), 1e-10);
  if (kind == BmpPrior::data_aided && model.time_magnitudes.size() == model.n) {
    p.activity_map.resize(model.n);
    for (int i = 0; i < model.n; ++i) {
      p.activity_map[i] =
          clip_posterior(model.time_magnitudes[i], model.gamma, model.time_noise_variance, sigma_x);
    }
  }
  return p;
}

double support_log_posterior(const CsModel& model, const std::vector<int>& support,
                             const BmpPriors& priors) {
  const int m = model.m();
  const CMat psi = model.op.dense();
  RMat a(2 * m, static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    const CVec col = psi.col(support[j]) * model.phase_terms[support[j]];
    a.col(static_cast<Eigen::Index>(j)) << col.real(), col.imag();
  }
  RVec y(2 * m);
  y << model.observations.real(), model.observations.imag();
  const double s2 = priors.noise_variance / 2.0;
  RMat phi = s2 * RMat::Identity(2 * m, 2 * m) + priors.amplitude_variance * a * a.transpose();
  Eigen::LLT<RMat> llt(phi);
  const RMat l = llt.matrixL();
  const double logdet = 2.0 * l.diagonal().array().log().sum();
  const double quad = y.dot(llt.solve(y));
  double log_prior = 0.0;
  for (int i = 0; i < model.n; ++i) {
    const bool on = std::find(support.begin(), support.end(), i) != support.end();
    log_prior += on ? std::log(priors.activity_at(i)) : std::log1p(-priors.activity_at(i));
  }
  return -0.5 * (2.0 * m * std::log(2.0 * std::numbers::pi) + logdet + quad) + log_prior;
}

RecoveryResult bmp_solve(const CsModel& model, const BmpPriors& priors, const BmpOptions& opts) {
  if (!(priors.activity > 0.0 && priors.activity < 1.0)) throw InvalidInput("p1 must lie in (0, 1)");
  if (priors.activity_map.size() && priors.activity_map.size() != model.n) {
    throw InvalidInput("activity map length must equal N");
  }
  for (Eigen::Index i = 0; i < priors.activity_map.size(); ++i) {
    if (!(priors.activity_map[i] > 0.0 && priors.activity_map[i] < 1.0)) {
      throw InvalidInput("p1(n) must lie in (0, 1)");
    }
  }
  if (!(priors.amplitude_variance > 0.0) || !(priors.noise_variance > 0.0)) {
    throw InvalidInput("prior variances must be positive");
  }
  if (opts.beam < 1) throw InvalidInput("beam width must be positive");

  const int n = model.n;
  const int m = model.m();
  const RMat gram = model.augmented_gram();
  const RVec corr = model.augmented_adjoint(model.observations);
  const double yy = model.observations.squaredNorm();
  const double s2 = priors.noise_variance / 2.0;
  const double rho = s2 / priors.amplitude_variance;
  RVec log_odds(n);
  double log_empty = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p1 = priors.activity_at(i);
    log_odds[i] = std::log(p1) - std::log1p(-p1);
    log_empty += std::log1p(-p1);
  }
  const int max_support =
      std::min(n, static_cast<int>(std::ceil(opts.max_support_fraction * m - 1e-12)));

  Hypothesis root;
  root.chol.resize(0, 0);
  root.cross.resize(0, n);
  root.whitened.resize(0);
  root.metric = -0.5 * (2.0 * m * std::log(2.0 * std::numbers::pi * s2) + yy / s2) + log_empty;

  Hypothesis best = root;
  std::vector<Hypothesis> beam{root};
  RecoveryResult res;
  int levels = 0;

  for (int level = 1; level <= max_support; ++level) {
    std::vector<Child> children;
    for (std::size_t h = 0; h < beam.size(); ++h) {
      const Hypothesis& hyp = beam[h];
      const auto k = static_cast<Eigen::Index>(hyp.support.size());
      for (int i = 0; i < n; ++i) {
        if (std::find(hyp.support.begin(), hyp.support.end(), i) != hyp.support.end()) continue;
        const double d2 = gram(i, i) + rho - (k ? hyp.cross.col(i).squaredNorm() : 0.0);
        if (!(d2 > 0.0)) continue;
        const double q = (corr[i] - (k ? hyp.cross.col(i).dot(hyp.whitened) : 0.0)) / std::sqrt(d2);
        const double delta = -0.5 * (std::log(d2) - std::log(rho) - q * q / s2) + log_odds[i];
        Child c{h, i, hyp.metric + delta, hyp.support};
        c.support.insert(std::upper_bound(c.support.begin(), c.support.end(), i), i);
        children.push_back(std::move(c));
      }
    }
    if (children.empty()) break;
    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) { return a.metric > b.metric; });
    if (children.front().metric < beam.front().metric) break;  // metric decreased

    std::vector<Hypothesis> next;
    std::set<std::vector<int>> seen;
    for (const auto& c : children) {
      if (static_cast<int>(next.size()) >= opts.beam) break;
      if (!seen.insert(c.support).second) continue;
      const Hypothesis& p = beam[c.parent];
      const auto k = static_cast<Eigen::Index>(p.support.size());
      Hypothesis h;
      h.support = p.support;
      h.support.push_back(c.index);
      const RVec l = k ? RVec(p.cross.col(c.index)) : RVec();
      const double d = std::sqrt(gram(c.index, c.index) + rho - (k ? l.squaredNorm() : 0.0));
      h.chol = RMat::Zero(k + 1, k + 1);
      h.chol.topLeftCorner(k, k) = p.chol;
      if (k) h.chol.block(k, 0, 1, k) = l.transpose();
      h.chol(k, k) = d;
      h.cross.resize(k + 1, n);
      h.cross.topRows(k) = p.cross;
      RVec row = gram.row(c.index).transpose();
      if (k) row -= p.cross.transpose() * l;
      h.cross.row(k) = row.transpose() / d;
      h.whitened.resize(k + 1);
      h.whitened.head(k) = p.whitened;
      h.whitened[k] = (corr[c.index] - (k ? l.dot(p.whitened) : 0.0)) / d;
      h.metric = c.metric;
      next.push_back(std::move(h));
    }
    beam = std::move(next);
    levels = level;
    if (beam.front().metric > best.metric) best = beam.front();
  }

  res.amplitudes = RVec::Zero(n);
  if (!best.support.empty()) {
    // Posterior mean on the support: K_s^{-1} b_s = L^{-T} (L^{-1} b_s).
    const RVec coeff = best.chol.transpose().triangularView<Eigen::Upper>().solve(best.whitened);
    for (std::size_t j = 0; j < best.support.size(); ++j) {
      res.amplitudes[best.support[j]] = coeff[static_cast<Eigen::Index>(j)];
    }
  }
  res.support = best.support;  // selection order
  res.clip_estimate = model.to_clip(res.amplitudes);
  res.residual_norm = (model.observations - model.augmented_apply(res.amplitudes)).norm();
  res.iterations = levels;
  res.status = SolverStatus::converged;
  res.log_posterior = best.metric;
  return res;
}

}  // namespace clipcs
