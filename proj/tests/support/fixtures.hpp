#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "clipcs/channel.hpp"
#include "clipcs/cs_model.hpp"
#include "clipcs/ofdm.hpp"

// Shared fixtures for the sparse-recovery tests and the acceptance suite.
namespace clipcs::fixtures {

inline const QamConstellation kQam(16);

inline ChannelRealization unit_channel(int n, double noise_var = 0.0) {
  ChannelRealization ch;
  ch.taps = CVec::Ones(1);
  ch.gains = CVec::Ones(n);
  ch.noise_variance = noise_var;
  return ch;
}

inline CVec random_symbols(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, kQam.order() - 1);
  CVec x(n);
  for (int k = 0; k < n; ++k) x[k] = kQam.point(pick(rng));
  return x;
}

inline std::vector<int> random_tones(int n, int m, std::mt19937_64& rng) {
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(m));
  std::sort(all.begin(), all.end());
  return all;
}

// A frame whose limiter clips exactly `k` samples by a visible margin: γ sits
// just above the (k+1)-th largest magnitude, and frames with a small gap to
// the k-th are redrawn.
inline FrameState frame_with_clips(int n, int k, std::mt19937_64& rng) {
  for (;;) {
    const CVec symbols = random_symbols(n, rng);
    const CVec x = modulate(symbols);
    std::vector<double> mags(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) mags[static_cast<std::size_t>(i)] = std::abs(x[i]);
    std::sort(mags.rbegin(), mags.rend());
    const double lo = mags[static_cast<std::size_t>(k)], hi = mags[static_cast<std::size_t>(k - 1)];
    if (hi - lo < 0.05) continue;
    return transmit(symbols, lo + 0.2 * (hi - lo));
  }
}

// Noiseless model with every decision correct.
inline CsModel clean_model(const FrameState& f, const std::vector<int>& tones) {
  const CVec eq = dft(f.clipped);
  return build_model(eq, f.symbols, tones, unit_channel(static_cast<int>(eq.size())), f.gamma);
}

// Least squares on a fixed support for the real amplitude problem.
inline RVec support_least_squares(const CsModel& model, const std::vector<int>& support) {
  const RMat g = model.augmented_gram();
  const RVec b = model.augmented_adjoint(model.observations);
  const auto k = static_cast<Eigen::Index>(support.size());
  RMat gs(k, k);
  RVec bs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    bs[i] = b[support[static_cast<std::size_t>(i)]];
    for (Eigen::Index j = 0; j < k; ++j) gs(i, j) = g(support[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(j)]);
  }
  const RVec as = gs.ldlt().solve(bs);
  RVec a = RVec::Zero(model.n);
  for (Eigen::Index i = 0; i < k; ++i) a[support[static_cast<std::size_t>(i)]] = as[i];
  return a;
}

inline std::vector<std::vector<int>> supports_up_to(int n, int k) {
  std::vector<std::vector<int>> out{{}};
  for (int i = 0; i < n; ++i) out.push_back({i});
  if (k >= 2) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) out.push_back({i, j});
    }
  }
  return out;
}


}  // namespace clipcs::fixtures
