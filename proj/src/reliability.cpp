#include "clipcs/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace clipcs {

std::string_view to_string(ReliabilityMethod m) {
  switch (m) {
    case ReliabilityMethod::bayes: return "bayes";
    case ReliabilityMethod::mag_phase: return "mag_phase";
    case ReliabilityMethod::mag: return "mag";
  }
  return "?";
}

std::string_view to_string(SelectionMode m) { return m == SelectionMode::most ? "most" : "least"; }

ReliabilityMethod parse_reliability(std::string_view s) {
  if (s == "bayes") return ReliabilityMethod::bayes;
  if (s == "mag_phase") return ReliabilityMethod::mag_phase;
  if (s == "mag") return ReliabilityMethod::mag;
  throw InvalidInput("unknown reliability method: " + std::string(s));
}

SelectionMode parse_selection(std::string_view s) {
  if (s == "most") return SelectionMode::most;
  if (s == "least") return SelectionMode::least;
  throw InvalidInput("unknown selection mode: " + std::string(s));
}

double log_circular_density(cplx d, double sigma) {
  const double s2 = sigma * sigma;
  return -std::norm(d) / s2 - std::log(std::numbers::pi * s2);
}

double circular_density(cplx d, double sigma) { return std::exp(log_circular_density(d, sigma)); }

double phase_penalty(double r, double theta, double d_min) {
  // (s - r)/s + (r/s) cos(4θ + π) with s = √2 d_min, written as 1 - u(1 - cos)
  // so the corner cases come out exact.
  const double corner = d_min / std::numbers::sqrt2;
  const double u = 0.5 * std::clamp(r, 0.0, corner) / corner;
  return 1.0 - u * (1.0 - std::cos(4.0 * theta + std::numbers::pi));
}

namespace {

ReliabilityScores prepare(ReliabilityMethod method, const CVec& equalized, const QamConstellation& c,
                          const DistortionModel& dm) {
  if (dm.sigma.size() != equalized.size()) throw InvalidInput("distortion model size mismatch");
  if ((dm.sigma.array() <= 0.0).any()) throw InvalidInput("sigma_D must be positive");
  ReliabilityScores r;
  r.method = method;
  r.scores = RVec::Zero(equalized.size());
  r.deviations.resize(equalized.size());
  r.decisions = c.hard_decisions(equalized);
  for (Eigen::Index k = 0; k < equalized.size(); ++k) {
    r.deviations[k] = equalized[k] - c.point(r.decisions[static_cast<std::size_t>(k)]);
  }
  return r;
}

}  // namespace

ReliabilityScores reliability_bayes(const CVec& equalized, const QamConstellation& c,
                                    const DistortionModel& dm, double floor) {
  auto r = prepare(ReliabilityMethod::bayes, equalized, c, dm);
  std::vector<double> logs(static_cast<std::size_t>(c.order()));
  for (Eigen::Index k = 0; k < equalized.size(); ++k) {
    const int best = r.decisions[static_cast<std::size_t>(k)];
    const double sigma = dm.sigma[k];
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < c.order(); ++i) {
      if (i == best) continue;
      logs[static_cast<std::size_t>(i)] = log_circular_density(equalized[k] - c.point(i), sigma);
      peak = std::max(peak, logs[static_cast<std::size_t>(i)]);
    }
    double acc = 0.0;
    for (int i = 0; i < c.order(); ++i) {
      if (i != best) acc += std::exp(logs[static_cast<std::size_t>(i)] - peak);
    }
    const double log_others = peak + std::log(acc);
    const double value = log_circular_density(r.deviations[k], sigma) - std::log(floor) - log_others;
    r.scores[k] = std::max(value, 0.0);
  }
  return r;
}

ReliabilityScores reliability_mag_phase(const CVec& equalized, const QamConstellation& c,
                                        const DistortionModel& dm) {
  auto r = prepare(ReliabilityMethod::mag_phase, equalized, c, dm);
  for (Eigen::Index k = 0; k < equalized.size(); ++k) {
    const cplx d = r.deviations[k];
    r.scores[k] = circular_density(d, dm.sigma[k]) * phase_penalty(std::abs(d), std::arg(d), c.d_min());
  }
  return r;
}

ReliabilityScores reliability_mag(const CVec& equalized, const QamConstellation& c,
                                  const DistortionModel& dm) {
  auto r = prepare(ReliabilityMethod::mag, equalized, c, dm);
  for (Eigen::Index k = 0; k < equalized.size(); ++k) {
    r.scores[k] = circular_density(r.deviations[k], dm.sigma[k]);
  }
  return r;
}

ReliabilityScores compute_reliability(ReliabilityMethod method, const CVec& equalized,
                                      const QamConstellation& c, const DistortionModel& dm) {
  switch (method) {
    case ReliabilityMethod::bayes: return reliability_bayes(equalized, c, dm);
    case ReliabilityMethod::mag_phase: return reliability_mag_phase(equalized, c, dm);
    case ReliabilityMethod::mag: return reliability_mag(equalized, c, dm);
  }
  throw InvalidInput("unknown reliability method");
}

std::vector<int> select_tones(const RVec& scores, int m, SelectionMode mode) {
  const int n = static_cast<int>(scores.size());
  if (m < 1 || m > n) throw InvalidInput("tone count m must satisfy 1 <= m <= N");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto before = [&](int a, int b) {
    if (scores[a] != scores[b]) {
      return mode == SelectionMode::most ? scores[a] > scores[b] : scores[a] < scores[b];
    }
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + m, order.end(), before);
  order.resize(static_cast<std::size_t>(m));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace clipcs
