#pragma once

#include <vector>

#include "clipcs/types.hpp"

namespace clipcs {

/// Unitary N-point DFT, X(k) = N^{-1/2} sum_n x(n) e^{-j2pi kn/N}.
CVec dft(const CVec& x);
/// Inverse of dft, x(n) = N^{-1/2} sum_k X(k) e^{+j2pi kn/N}.
CVec idft(const CVec& X);

/// Time signal x = F^H X. For L > 1 the N symbols are placed symmetrically
/// around DC of an LN-point grid and the N^{-1/2} scaling is kept, so the
/// per-sample power matches the L = 1 case.
CVec modulate(const CVec& X, int oversampling = 1);
/// Recovers the N frequency symbols from an (oversampled) time signal.
CVec demodulate(const CVec& x, int oversampling = 1);

struct ClipResult {
  CVec clipped;                 // x̄
  CVec clip;                    // c = x̄ - x
  std::vector<int> support;     // samples altered by the limiter, ascending
};

/// Soft magnitude limiter. Samples with |x(n)| > gamma are saturated to
/// gamma keeping their phase.
ClipResult clip(const CVec& x, double gamma);

/// One frame through the transmitter.
struct FrameState {
  CVec symbols;       // X
  CVec time;          // x
  CVec clipped;       // x̄
  CVec clip;          // c
  std::vector<int> support;
  double gamma = 0.0;
  int oversampling = 1;
};

FrameState transmit(const CVec& symbols, double gamma, int oversampling = 1);

/// gamma = sigma_x * 10^{level_db/20}.
double gamma_from_clip_level(double level_db, double sigma_x = 1.0);

/// Peak-to-average power ratio in dB.
double papr_db(const CVec& x);

}  // namespace clipcs
