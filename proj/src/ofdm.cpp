#include "clipcs/ofdm.hpp"

#include <cmath>
#include <limits>
#include <unsupported/Eigen/FFT>

namespace clipcs {
namespace {

std::vector<cplx> to_std(const CVec& v) { return {v.data(), v.data() + v.size()}; }

CVec from_std(const std::vector<cplx>& v) {
  return Eigen::Map<const CVec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Unnormalized forward and inverse transforms.
std::vector<cplx> fft_raw(const std::vector<cplx>& in) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.fwd(out, in);
  return out;
}

std::vector<cplx> ifft_raw(const std::vector<cplx>& in) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cplx> out;
  fft.inv(out, in);
  return out;
}

}  // namespace

CVec dft(const CVec& x) {
  if (x.size() <= 1) return x;  // kissfft faults on length 1
  return from_std(fft_raw(to_std(x))) / std::sqrt(static_cast<double>(x.size()));
}

CVec idft(const CVec& X) {
  if (X.size() <= 1) return X;
  return from_std(ifft_raw(to_std(X))) / std::sqrt(static_cast<double>(X.size()));
}

CVec modulate(const CVec& X, int oversampling) {
  if (oversampling < 1) throw InvalidInput("oversampling factor must be >= 1");
  if (oversampling == 1) return idft(X);
  const Eigen::Index n = X.size();
  const Eigen::Index ln = n * oversampling;
  const Eigen::Index pos = (n + 1) / 2;  // bins 0 .. pos-1 stay at DC side
  std::vector<cplx> padded(static_cast<std::size_t>(ln), cplx{});
  for (Eigen::Index k = 0; k < pos; ++k) padded[static_cast<std::size_t>(k)] = X[k];
  for (Eigen::Index k = pos; k < n; ++k) padded[static_cast<std::size_t>(ln - n + k)] = X[k];
  return from_std(ifft_raw(padded)) / std::sqrt(static_cast<double>(n));
}

CVec demodulate(const CVec& x, int oversampling) {
  if (oversampling < 1) throw InvalidInput("oversampling factor must be >= 1");
  if (oversampling == 1) return dft(x);
  if (x.size() % oversampling != 0) throw InvalidInput("signal length is not a multiple of L");
  const Eigen::Index ln = x.size();
  const Eigen::Index n = ln / oversampling;
  const Eigen::Index pos = (n + 1) / 2;
  const auto spec = fft_raw(to_std(x));
  CVec X(n);
  const double s = std::sqrt(static_cast<double>(n)) / static_cast<double>(ln);
  for (Eigen::Index k = 0; k < pos; ++k) X[k] = spec[static_cast<std::size_t>(k)] * s;
  for (Eigen::Index k = pos; k < n; ++k) X[k] = spec[static_cast<std::size_t>(ln - n + k)] * s;
  return X;
}

ClipResult clip(const CVec& x, double gamma) {
  if (!(gamma > 0.0)) throw InvalidInput("clip threshold must be positive");
  ClipResult r{x, CVec::Zero(x.size()), {}};
  // A saturated sample can come out a few ulps above gamma; the slack keeps
  // the limiter idempotent.
  const double limit = gamma * (1.0 + 8.0 * std::numeric_limits<double>::epsilon());
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double mag = std::abs(x[n]);
    if (mag > limit) {
      r.clipped[n] = x[n] * (gamma / mag);
      r.clip[n] = r.clipped[n] - x[n];
      r.support.push_back(static_cast<int>(n));
    }
  }
  return r;
}

FrameState transmit(const CVec& symbols, double gamma, int oversampling) {
  FrameState f;
  f.symbols = symbols;
  f.time = modulate(symbols, oversampling);
  auto r = clip(f.time, gamma);
  f.clipped = std::move(r.clipped);
  f.clip = std::move(r.clip);
  f.support = std::move(r.support);
  f.gamma = gamma;
  f.oversampling = oversampling;
  return f;
}

double gamma_from_clip_level(double level_db, double sigma_x) {
  if (!(sigma_x > 0.0)) throw InvalidInput("sigma_x must be positive");
  return sigma_x * std::pow(10.0, level_db / 20.0);
}

double papr_db(const CVec& x) {
  if (x.size() == 0) throw InvalidInput("PAPR of an empty signal");
  const double peak = x.cwiseAbs2().maxCoeff();
  if (peak == 0.0) throw InvalidInput("PAPR of an all-zero signal");
  const double mean = x.squaredNorm() / static_cast<double>(x.size());
  return 10.0 * std::log10(peak / mean);
}

}  // namespace clipcs
