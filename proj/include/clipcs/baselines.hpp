#pragma once

#include <vector>

#include "clipcs/channel.hpp"
#include "clipcs/constellation.hpp"
#include "clipcs/types.hpp"

namespace clipcs {

struct BaselineConfig {
  int iterations = 4;
  double quasi_eps_fraction = 0.5;

  void validate() const;
};

std::vector<int> zf_decode(const CVec& equalized, const QamConstellation& c);

/// Iterative ML: decide, regenerate x, re-clip to estimate c, subtract F ĉ.
std::vector<int> itml(const CVec& equalized, double gamma, const QamConstellation& c,
                      const BaselineConfig& cfg);

/// ItML started from X̂̄ - F ĉ_init. The distortion is always re-estimated
/// against the uncorrected X̂̄.
std::vector<int> itml_from(const CVec& equalized, const CVec& clip_init, double gamma,
                           const QamConstellation& c, const BaselineConfig& cfg);

/// Decision-aided reconstruction on the equalized time-domain frame.
std::vector<int> dar(const CVec& received, const ChannelRealization& ch, double gamma,
                     const QamConstellation& c, const BaselineConfig& cfg);

/// ItML that keeps the soft value of tones whose deviation exceeds
/// quasi_eps_fraction * d_min on either axis.
std::vector<int> quasi_ml(const CVec& equalized, double gamma, const QamConstellation& c,
                          const BaselineConfig& cfg);

std::vector<int> cs_then_itml(const CVec& equalized, const CVec& clip_estimate, double gamma,
                              const QamConstellation& c, const BaselineConfig& cfg);

}  // namespace clipcs
