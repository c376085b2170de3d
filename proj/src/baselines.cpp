#include "clipcs/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "clipcs/cs_model.hpp"
#include "clipcs/ofdm.hpp"

namespace clipcs {

void BaselineConfig::validate() const {
  if (iterations < 1) throw InvalidInput("iterations must be >= 1");
  if (!(quasi_eps_fraction > 0.0 && quasi_eps_fraction <= 1.0)) {
    throw InvalidInput("quasi_eps_fraction must lie in (0, 1]");
  }
}

std::vector<int> zf_decode(const CVec& equalized, const QamConstellation& c) {
  return c.hard_decisions(equalized);
}

namespace {

// Shared loop of ItML and Quasi-ML. With a threshold, tones whose deviation
// exceeds it on either axis enter the waveform with their soft value.
std::vector<int> iterate(const CVec& equalized, CVec estimate, double gamma,
                         const QamConstellation& c, const BaselineConfig& cfg,
                         double skip_threshold) {
  cfg.validate();
  for (int it = 0; it < cfg.iterations; ++it) {
    CVec synth = c.decide(estimate);
    if (skip_threshold > 0.0) {
      for (Eigen::Index k = 0; k < synth.size(); ++k) {
        const cplx dev = estimate[k] - synth[k];
        if (std::max(std::abs(dev.real()), std::abs(dev.imag())) > skip_threshold) synth[k] = estimate[k];
      }
    }
    const CVec clip_est = clip(idft(synth), gamma).clip;
    estimate = equalized - dft(clip_est);
  }
  return c.hard_decisions(estimate);
}

}  // namespace

std::vector<int> itml(const CVec& equalized, double gamma, const QamConstellation& c,
                      const BaselineConfig& cfg) {
  return iterate(equalized, equalized, gamma, c, cfg, 0.0);
}

std::vector<int> itml_from(const CVec& equalized, const CVec& clip_init, double gamma,
                           const QamConstellation& c, const BaselineConfig& cfg) {
  return iterate(equalized, correct(equalized, clip_init), gamma, c, cfg, 0.0);
}

std::vector<int> cs_then_itml(const CVec& equalized, const CVec& clip_estimate, double gamma,
                              const QamConstellation& c, const BaselineConfig& cfg) {
  return itml_from(equalized, clip_estimate, gamma, c, cfg);
}

std::vector<int> quasi_ml(const CVec& equalized, double gamma, const QamConstellation& c,
                          const BaselineConfig& cfg) {
  cfg.validate();
  return iterate(equalized, equalized, gamma, c, cfg, cfg.quasi_eps_fraction * c.d_min());
}

std::vector<int> dar(const CVec& received, const ChannelRealization& ch, double gamma,
                     const QamConstellation& c, const BaselineConfig& cfg) {
  cfg.validate();
  const CVec equalized = equalize(received, ch);
  const CVec base = idft(equalized);  // x̄ + noise in time
  CVec estimate = equalized;
  for (int it = 0; it < cfg.iterations; ++it) {
    const CVec regenerated = idft(c.decide(estimate));
    CVec rebuilt = base;
    for (Eigen::Index n = 0; n < rebuilt.size(); ++n) {
      if (std::abs(regenerated[n]) > gamma) rebuilt[n] = regenerated[n];
    }
    estimate = dft(rebuilt);
  }
  return c.hard_decisions(estimate);
}

}  // namespace clipcs
