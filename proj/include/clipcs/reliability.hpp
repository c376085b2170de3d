#pragma once

#include <string_view>
#include <vector>

#include "clipcs/channel.hpp"
#include "clipcs/constellation.hpp"
#include "clipcs/types.hpp"

namespace clipcs {

enum class ReliabilityMethod { bayes, mag_phase, mag };
enum class SelectionMode { most, least };

std::string_view to_string(ReliabilityMethod m);
std::string_view to_string(SelectionMode m);
ReliabilityMethod parse_reliability(std::string_view s);
SelectionMode parse_selection(std::string_view s);

/// Default ℛ_min used by the exact reliability.
inline constexpr double kReliabilityFloor = 1.0 / 3.0;

struct ReliabilityScores {
  RVec scores;
  ReliabilityMethod method = ReliabilityMethod::mag;
  CVec deviations;        // X̂̄(k) - <X̂̄(k)>
  std::vector<int> decisions;
};

/// Circular Gaussian density with total variance σ², evaluated at d.
double circular_density(cplx d, double sigma);
double log_circular_density(cplx d, double sigma);

/// Phase penalty for a deviation of magnitude r and phase theta. The
/// magnitude is clamped to d_min/√2 so the result lies in [0, 1].
double phase_penalty(double r, double theta, double d_min);

ReliabilityScores reliability_bayes(const CVec& equalized, const QamConstellation& c,
                                    const DistortionModel& dm,
                                    double floor = kReliabilityFloor);
ReliabilityScores reliability_mag_phase(const CVec& equalized, const QamConstellation& c,
                                        const DistortionModel& dm);
ReliabilityScores reliability_mag(const CVec& equalized, const QamConstellation& c,
                                  const DistortionModel& dm);

ReliabilityScores compute_reliability(ReliabilityMethod method, const CVec& equalized,
                                      const QamConstellation& c, const DistortionModel& dm);

/// Indices of the m highest (most) or lowest (least) scores. Ties go to the
/// lower tone index; the result is sorted ascending.
std::vector<int> select_tones(const RVec& scores, int m, SelectionMode mode = SelectionMode::most);

}  // namespace clipcs
