#include "clipcs/channel.hpp"

#include <cmath>
#include <numbers>

#include "clipcs/ofdm.hpp"

namespace clipcs {

RVec ChannelRealization::equalized_noise_std() const {
  return (std::sqrt(noise_variance) / gains.array().abs()).matrix();
}

CVec channel_gains(const CVec& taps, int n) {
  if (taps.size() > n) throw InvalidInput("more channel taps than subcarriers");
  CVec padded = CVec::Zero(n);
  padded.head(taps.size()) = taps;
  return dft(padded) * std::sqrt(static_cast<double>(n));
}

ChannelRealization draw_channel(int n, int taps, double noise_variance, Rng& rng) {
  if (taps < 1 || taps > n) throw InvalidInput("tap count must satisfy 1 <= P <= N");
  if (noise_variance < 0.0) throw InvalidInput("noise variance must be non-negative");
  ChannelRealization ch;
  ch.noise_variance = noise_variance;
  ch.taps.resize(taps);
  do {
    for (int p = 0; p < taps; ++p) ch.taps[p] = complex_gaussian(rng, 1.0 / taps);
    ch.gains = channel_gains(ch.taps, n);
  } while (ch.gains.cwiseAbs().minCoeff() < 1e-9);
  return ch;
}

double noise_variance_for_snr(double snr_db_per_bit, int bits_per_symbol, double symbol_energy) {
  if (bits_per_symbol < 1) throw InvalidInput("bits per symbol must be positive");
  return symbol_energy / (bits_per_symbol * std::pow(10.0, snr_db_per_bit / 10.0));
}

CVec apply_channel_noiseless(const CVec& freq, const ChannelRealization& ch) {
  if (freq.size() != ch.gains.size()) throw InvalidInput("frame and channel sizes differ");
  return freq.cwiseProduct(ch.gains);
}

CVec apply_channel(const CVec& freq, const ChannelRealization& ch, Rng& rng) {
  CVec y = apply_channel_noiseless(freq, ch);
  if (ch.noise_variance > 0.0) {
    for (Eigen::Index k = 0; k < y.size(); ++k) y[k] += complex_gaussian(rng, ch.noise_variance);
  }
  return y;
}

CVec convolve_with_cyclic_prefix(const CVec& time, const ChannelRealization& ch) {
  const Eigen::Index n = time.size();
  const Eigen::Index p = ch.taps.size();
  const Eigen::Index cp = p - 1;
  CVec tx(n + cp);
  tx.head(cp) = time.tail(cp);
  tx.tail(n) = time;
  CVec rx = CVec::Zero(n + cp);
  for (Eigen::Index i = 0; i < n + cp; ++i) {
    for (Eigen::Index t = 0; t < p && t <= i; ++t) rx[i] += ch.taps[t] * tx[i - t];
  }
  return rx.tail(n);
}

CVec equalize(const CVec& received, const ChannelRealization& ch) {
  if (received.size() != ch.gains.size()) throw InvalidInput("frame and channel sizes differ");
  if (ch.gains.cwiseAbs().minCoeff() < 1e-12) {
    throw ConditioningError("channel gain too close to zero for equalization");
  }
  return received.cwiseQuotient(ch.gains);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double clip_probability(double gamma, double sigma_x) {
  return std::exp(-(gamma * gamma) / (sigma_x * sigma_x));
}

double clip_distortion_variance(double gamma, double sigma_x) {
  if (!(gamma > 0.0) || !(sigma_x > 0.0)) throw InvalidInput("gamma and sigma_x must be positive");
  if (std::isinf(gamma)) return 0.0;
  // ∫_γ^∞ (r-γ)² (2r/σ²) e^{-r²/σ²} dr in closed form.
  const double s2 = sigma_x * sigma_x;
  const double v = s2 * std::exp(-gamma * gamma / s2) -
                   gamma * sigma_x * std::sqrt(std::numbers::pi) * std::erfc(gamma / sigma_x);
  return std::max(v, 0.0);
}

DistortionModel distortion_sigma(const ChannelRealization& ch, double gamma, double sigma_x) {
  DistortionModel dm;
  dm.clip_variance = clip_distortion_variance(gamma, sigma_x);
  // Floored so the densities stay finite in the distortion-free limit.
  dm.sigma = (dm.clip_variance + ch.noise_variance / ch.gains.array().abs2()).sqrt().max(1e-12).matrix();
  return dm;
}

RVec DistortionModel::decision_error_probability(double d_min) const {
  RVec p(sigma.size());
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    p[k] = sigma[k] > 0.0 ? 2.0 * q_function(d_min / (2.0 * sigma[k])) : 0.0;
  }
  return p;
}

}  // namespace clipcs
