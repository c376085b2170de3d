#include "clipcs/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clipcs {
namespace {

int gray_to_position(int g) {
  int p = 0;
  for (; g; g >>= 1) p ^= g;
  return p;
}

bool is_power_of_four(int m) {
  if (m < 4) return false;
  while (m % 4 == 0) m /= 4;
  return m == 1;
}

}  // namespace

QamConstellation::QamConstellation(int order) : order_(order) {
  if (!is_power_of_four(order)) {
    throw InvalidInput("QAM order must be a square power of two (4, 16, 64, ...)");
  }
  bits_per_symbol_ = static_cast<int>(std::lround(std::log2(order)));
  side_ = static_cast<int>(std::lround(std::sqrt(order)));
  scale_ = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
  d_min_ = 2.0 * scale_;

  const int half = bits_per_symbol_ / 2;
  const int mask = (1 << half) - 1;
  points_.resize(static_cast<std::size_t>(order));
  interior_.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    const int pi = gray_to_position(i >> half);
    const int pq = gray_to_position(i & mask);
    const double re = (2.0 * pi - (side_ - 1)) * scale_;
    const double im = (2.0 * pq - (side_ - 1)) * scale_;
    points_[static_cast<std::size_t>(i)] = {re, im};
    interior_[static_cast<std::size_t>(i)] = pi > 0 && pi < side_ - 1 && pq > 0 && pq < side_ - 1;
  }
}

std::vector<std::uint8_t> QamConstellation::bits_of(int i) const {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(bits_per_symbol_));
  for (int b = 0; b < bits_per_symbol_; ++b) {
    bits[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>((i >> (bits_per_symbol_ - 1 - b)) & 1);
  }
  return bits;
}

Decision QamConstellation::hard_decision(cplx v) const {
  // Near-ties within a few ulps resolve to the lower index.
  const double tie = 1e-12 * d_min_ * d_min_;
  int best = 0;
  double best_d = std::norm(v - points_[0]);
  for (int i = 1; i < order_; ++i) {
    const double d = std::norm(v - points_[static_cast<std::size_t>(i)]);
    if (d < best_d - tie) {
      best_d = d;
      best = i;
    }
  }
  return {best, points_[static_cast<std::size_t>(best)]};
}

std::vector<int> QamConstellation::hard_decisions(const CVec& v) const {
  std::vector<int> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) out[static_cast<std::size_t>(k)] = hard_decision(v[k]).index;
  return out;
}

CVec QamConstellation::decide(const CVec& v) const {
  CVec out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out[k] = hard_decision(v[k]).point;
  return out;
}

NeighborDistances QamConstellation::neighbor_distances(int i) const {
  if (i < 0 || i >= order_) throw InvalidInput("constellation index out of range");
  const cplx p = point(i);
  const double tol = 1e-9 * d_min_;
  double nn = std::numeric_limits<double>::infinity();
  for (int j = 0; j < order_; ++j) {
    if (j != i) nn = std::min(nn, std::abs(p - point(j)));
  }
  double nnn = std::numeric_limits<double>::infinity();
  int count = 0;
  for (int j = 0; j < order_; ++j) {
    if (j == i) continue;
    const double d = std::abs(p - point(j));
    if (std::abs(d - nn) <= tol) {
      ++count;
    } else if (d > nn + tol) {
      nnn = std::min(nnn, d);
    }
  }
  return {nn, nnn, count};
}

CVec map_bits(std::span<const std::uint8_t> bits, const QamConstellation& c) {
  const auto k = static_cast<std::size_t>(c.bits_per_symbol());
  if (bits.size() % k != 0) {
    throw InvalidInput("bit count is not a multiple of log2(M)");
  }
  CVec out(static_cast<Eigen::Index>(bits.size() / k));
  for (std::size_t s = 0; s < bits.size() / k; ++s) {
    int idx = 0;
    for (std::size_t b = 0; b < k; ++b) {
      const auto bit = bits[s * k + b];
      if (bit > 1) throw InvalidInput("bits must be 0 or 1");
      idx = (idx << 1) | bit;
    }
    out[static_cast<Eigen::Index>(s)] = c.point(idx);
  }
  return out;
}

std::vector<std::uint8_t> demap_indices(std::span<const int> indices, const QamConstellation& c) {
  std::vector<std::uint8_t> bits;
  bits.reserve(indices.size() * static_cast<std::size_t>(c.bits_per_symbol()));
  for (int i : indices) {
    const auto b = c.bits_of(i);
    bits.insert(bits.end(), b.begin(), b.end());
  }
  return bits;
}

}  // namespace clipcs
