#pragma once

#include "clipcs/rng.hpp"
#include "clipcs/types.hpp"

namespace clipcs {

/// Block-fading frequency-selective channel for one frame.
struct ChannelRealization {
  CVec taps;                    // h, length P
  CVec gains;                   // Λ(k) = sum_n h(n) e^{-j2pi kn/N}
  double noise_variance = 0.0;  // σ_Z² per complex sample

  int size() const { return static_cast<int>(gains.size()); }
  /// σ_Z / |Λ(k)| per tone.
  RVec equalized_noise_std() const;
};

/// Gains Λ of the taps zero-padded to N (non-unitary DFT).
CVec channel_gains(const CVec& taps, int n);

/// Draws P i.i.d. circular Gaussian taps with a uniform power-delay profile
/// and unit total mean energy. Redraws while any |Λ(k)| < 1e-9.
ChannelRealization draw_channel(int n, int taps, double noise_variance, Rng& rng);

/// σ_Z² = E_s / (log2(M) 10^{snr_db/10}).
double noise_variance_for_snr(double snr_db_per_bit, int bits_per_symbol, double symbol_energy = 1.0);

/// Y(k) = Λ(k) X̄(k) + Z(k).
CVec apply_channel(const CVec& freq, const ChannelRealization& ch, Rng& rng);
/// Noise-free Λ X̄.
CVec apply_channel_noiseless(const CVec& freq, const ChannelRealization& ch);

/// Time-domain path: cyclic prefix of length P-1, linear convolution with the
/// taps, prefix removal. Returns the N received samples before noise.
CVec convolve_with_cyclic_prefix(const CVec& time, const ChannelRealization& ch);

/// X̂̄(k) = Y(k) / Λ(k). Throws ConditioningError on a vanishing gain.
CVec equalize(const CVec& received, const ChannelRealization& ch);

/// Standard normal upper tail Q(x).
double q_function(double x);

/// E[(R - γ)_+^2] for a Rayleigh envelope with E[R²] = σ_x².
double clip_distortion_variance(double gamma, double sigma_x = 1.0);
/// Pr(R > γ) = exp(-γ²/σ_x²).
double clip_probability(double gamma, double sigma_x = 1.0);

/// Per-tone scale of D(k) = C(k) + Λ^{-1}(k) Z(k), modeled circular Gaussian
/// with total variance σ_D(k)².
struct DistortionModel {
  double clip_variance = 0.0;  // σ_C²
  RVec sigma;                  // σ_D(k)

  /// 2 Q(d_min / (2 σ_D(k))) per tone.
  RVec decision_error_probability(double d_min) const;
};

DistortionModel distortion_sigma(const ChannelRealization& ch, double gamma, double sigma_x = 1.0);

}  // namespace clipcs
