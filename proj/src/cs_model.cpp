#include "clipcs/cs_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "clipcs/ofdm.hpp"

namespace clipcs {

PartialFourier::PartialFourier(int n, std::vector<int> tones) : n_(n), tones_(std::move(tones)) {
  if (n < 1) throw InvalidInput("transform size must be positive");
  if (tones_.empty()) throw InvalidInput("tone set must be nonempty");
  std::sort(tones_.begin(), tones_.end());
  if (std::adjacent_find(tones_.begin(), tones_.end()) != tones_.end()) {
    throw InvalidInput("tone set contains duplicates");
  }
  if (tones_.front() < 0 || tones_.back() >= n) throw InvalidInput("tone index out of range");
}

CVec PartialFourier::apply(const CVec& c) const {
  if (c.size() != n_) throw InvalidInput("operand length must equal N");
  const CVec full = dft(c);
  CVec out(rows());
  for (int j = 0; j < rows(); ++j) out[j] = full[tones_[static_cast<std::size_t>(j)]];
  return out;
}

CVec PartialFourier::adjoint(const CVec& y) const {
  if (y.size() != rows()) throw InvalidInput("operand length must equal m");
  CVec full = CVec::Zero(n_);
  for (int j = 0; j < rows(); ++j) full[tones_[static_cast<std::size_t>(j)]] = y[j];
  return idft(full);
}

CMat PartialFourier::dense() const {
  CMat a(rows(), n_);
  const double s = 1.0 / std::sqrt(static_cast<double>(n_));
  for (int j = 0; j < rows(); ++j) {
    const int k = tones_[static_cast<std::size_t>(j)];
    for (int n = 0; n < n_; ++n) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(k) * n) % n_) / n_;
      a(j, n) = std::polar(s, ang);
    }
  }
  return a;
}

CVec PartialFourier::gram_kernel() const {
  CVec g = CVec::Zero(n_);
  for (int d = 0; d < n_; ++d) {
    cplx acc{};
    for (int k : tones_) {
      const double ang = 2.0 * std::numbers::pi * static_cast<double>((static_cast<long>(k) * d) % n_) / n_;
      acc += std::polar(1.0, ang);
    }
    g[d] = acc / static_cast<double>(n_);
  }
  return g;
}

CVec CsModel::augmented_apply(const RVec& a) const { return op.apply(to_clip(a)); }

RVec CsModel::augmented_adjoint(const CVec& y) const {
  const CVec back = op.adjoint(y);
  return (phase_terms.conjugate().cwiseProduct(back)).real();
}

RMat CsModel::augmented_gram() const {
  const CVec g = op.gram_kernel();
  RMat gram(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      // (Ψ^H Ψ)(i, j) = g(i - j mod N)
      const cplx v = std::conj(phase_terms[i]) * g[((i - j) % n + n) % n] * phase_terms[j];
      gram(i, j) = v.real();
      gram(j, i) = v.real();
    }
  }
  return gram;
}

CVec CsModel::to_clip(const RVec& a) const {
  if (a.size() != n) throw InvalidInput("amplitude vector length must equal N");
  return phase_terms.cwiseProduct(a.cast<cplx>());
}

double CsModel::mean_noise_variance() const { return noise_scales.array().square().mean(); }

CsModel build_model(const CVec& equalized, const CVec& decided, const std::vector<int>& tones,
                    const ChannelRealization& ch, double gamma) {
  if (tones.empty()) throw InvalidInput("tone set must be nonempty");
  if (equalized.size() != decided.size() || equalized.size() != ch.gains.size()) {
    throw InvalidInput("frame, decision and channel sizes differ");
  }
  const int n = static_cast<int>(equalized.size());
  CsModel model;
  model.n = n;
  model.gamma = gamma;
  model.op = PartialFourier(n, tones);
  const auto& sel = model.op.tones();
  const int m = model.op.rows();
  model.observations.resize(m);
  model.noise_scales.resize(m);
  const RVec noise_std = ch.equalized_noise_std();
  for (int j = 0; j < m; ++j) {
    const int k = sel[static_cast<std::size_t>(j)];
    model.observations[j] = equalized[k] - decided[k];
    model.noise_scales[j] = noise_std[k];
  }
  const CVec time = idft(equalized);
  model.wpal_weights.resize(n);
  model.phase_estimates.resize(n);
  model.phase_terms.resize(n);
  model.time_magnitudes.resize(n);
  model.time_noise_variance = ch.noise_variance * ch.gains.cwiseAbs2().cwiseInverse().mean();
  for (int i = 0; i < n; ++i) {
    const double mag = std::abs(time[i]);
    model.time_magnitudes[i] = mag;
    model.wpal_weights[i] = std::abs(mag - gamma);
    model.phase_estimates[i] = std::arg(time[i]);
    model.phase_terms[i] = -std::polar(1.0, model.phase_estimates[i]);
  }
  return model;
}

std::string_view to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iterations: return "max_iterations";
    case SolverStatus::infeasible: return "infeasible";
  }
  return "?";
}

CVec correct(const CVec& equalized, const CVec& clip_estimate) {
  if (equalized.size() != clip_estimate.size()) throw InvalidInput("size mismatch");
  return equalized - dft(clip_estimate);
}

std::vector<int> correct_and_decode(const CVec& equalized, const CVec& clip_estimate,
                                    const QamConstellation& c) {
  return c.hard_decisions(correct(equalized, clip_estimate));
}

}  // namespace clipcs
