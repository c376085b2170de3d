#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clipcs/config.hpp"

namespace clipcs {

struct SerRecord {
  Method method = Method::zf;
  ReliabilityMethod reliability = ReliabilityMethod::mag_phase;
  int m = 0;
  int frames = 0;
  std::int64_t symbol_errors = 0;
  double ser = 0.0;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
};

/// Ground-truth quantities for one frame. Never used by the receivers.
struct TrialDiagnostics {
  int omega_t_size = 0;          // |Ω_T|
  int clip_support_size = 0;     // |ℐ_c|
  double mean_decision_error_probability = 0.0;  // mean_k 2Q(d_min / 2σ_D(k))
  double received_energy = 0.0;  // ‖Λ X̄‖²
  double noise_energy = 0.0;     // ‖Z‖²
  double clip_energy = 0.0;      // ‖c‖²
};

struct TrialResult {
  std::vector<int> errors;          // symbol errors per cell
  std::vector<int> selected_correct;  // |Ω_m ∩ Ω_T| per cell (0 for non-selective methods)
  std::vector<std::uint8_t> solver_flagged;  // non-converged or infeasible solve per cell
  std::vector<double> cell_time_ms;
  TrialDiagnostics diagnostics;
};

/// Flattened index of (method, reliability, m) in the order used for CSV rows.
std::size_t cell_index(const ExperimentConfig& cfg, std::size_t method, std::size_t reliability,
                       std::size_t m);

/// One frame: bits → symbols → clip → channel → equalize → every receiver.
/// Deterministic in (cfg, trial_index).
TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t trial_index);

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SerRecord> records;
  /// per_frame_errors[cell][frame]
  std::vector<std::vector<int>> per_frame_errors;
  std::vector<TrialDiagnostics> diagnostics;
  std::vector<int> flagged_solves;  // per cell
};

struct RunOptions {
  int threads = 0;  // 0: hardware concurrency
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

void write_csv(std::ostream& out, const std::vector<SerRecord>& records,
               bool include_timing = true);
void write_csv_file(const std::string& path, const std::vector<SerRecord>& records);

struct OmegaTPoint {
  double alpha = 0.0;
  double empirical = 0.0;  // fraction of frames with |Ω_T| >= αN
  double binomial = 0.0;   // sum_{l=0}^{floor(N(1-α))} C(N,l) P^l (1-P)^{N-l}
};

double binomial_lower_tail(int n, int k_max, double p);

std::vector<OmegaTPoint> omega_t_stats(const std::vector<int>& omega_t_sizes, int n,
                                       double decision_error_probability,
                                       const std::vector<double>& alphas);
std::vector<OmegaTPoint> omega_t_stats(const std::vector<TrialDiagnostics>& diagnostics, int n,
                                       const std::vector<double>& alphas);

/// Standard error of a SER estimate treating frames as independent clusters.
double ser_standard_error(const std::vector<int>& per_frame_errors, int n);
/// Standard error of SER(a) - SER(b) over the same frames.
double paired_standard_error(const std::vector<int>& a, const std::vector<int>& b, int n);

}  // namespace clipcs
