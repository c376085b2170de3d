#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "clipcs/types.hpp"

namespace clipcs {

struct Decision {
  int index = 0;
  cplx point;
};

struct NeighborDistances {
  double nearest = 0.0;       // d_NN
  double next_nearest = 0.0;  // d_NNN
  int nearest_count = 0;
};

/// Square M-QAM alphabet with unit average energy and per-axis Gray mapping.
///
/// Point index i carries the log2(M)-bit word i (MSB first). The upper half of
/// the word selects the in-phase level and the lower half the quadrature
/// level, each through a reflected Gray code, so horizontally or vertically
/// adjacent points differ in exactly one bit.
class QamConstellation {
 public:
  explicit QamConstellation(int order = 16);

  int order() const { return order_; }
  int bits_per_symbol() const { return bits_per_symbol_; }
  double d_min() const { return d_min_; }
  const std::vector<cplx>& points() const { return points_; }
  const cplx& point(int i) const { return points_.at(static_cast<std::size_t>(i)); }
  bool is_interior(int i) const { return interior_.at(static_cast<std::size_t>(i)); }
  const std::vector<bool>& interior_mask() const { return interior_; }

  /// Bits of point i, MSB first.
  std::vector<std::uint8_t> bits_of(int i) const;

  /// Nearest alphabet point; exact ties go to the lower index.
  Decision hard_decision(cplx v) const;
  std::vector<int> hard_decisions(const CVec& v) const;
  CVec decide(const CVec& v) const;

  NeighborDistances neighbor_distances(int i) const;

 private:
  int order_;
  int bits_per_symbol_;
  int side_;
  double scale_;
  double d_min_;
  std::vector<cplx> points_;
  std::vector<bool> interior_;
};

/// Maps a bit sequence (one bit per byte, values 0/1) to constellation points.
CVec map_bits(std::span<const std::uint8_t> bits, const QamConstellation& c);

/// Inverse of map_bits for alphabet indices.
std::vector<std::uint8_t> demap_indices(std::span<const int> indices, const QamConstellation& c);

}  // namespace clipcs
