#pragma once

#include <vector>

#include "clipcs/channel.hpp"
#include "clipcs/constellation.hpp"
#include "clipcs/types.hpp"

namespace clipcs {

/// Rows Ω of the N-point unitary DFT, Ψ = S_Ω F, applied without storage.
class PartialFourier {
 public:
  PartialFourier(int n, std::vector<int> tones);

  int size() const { return n_; }
  int rows() const { return static_cast<int>(tones_.size()); }
  const std::vector<int>& tones() const { return tones_; }

  CVec apply(const CVec& c) const;          // Ψ c, length m
  CVec adjoint(const CVec& y) const;        // Ψ^H y, length N
  CMat dense() const;

  /// First column of the circulant Ψ^H Ψ: g(d) = N^{-1} sum_{k∈Ω} e^{j2pi kd/N}.
  CVec gram_kernel() const;

 private:
  int n_;
  std::vector<int> tones_;
};

/// The compressive sensing problem posed over the selected tones.
///
/// The clip signal is written c(n) = a(n) u(n) with a(n) >= 0 real and
/// u(n) = -e^{jθ̂(n)}, θ̂ the phase of the receiver's time estimate
/// x̂ = F^H X̂̄. The real operator Ψ̃ = Ψ diag(u) acts on a.
struct CsModel {
  int n = 0;
  double gamma = 0.0;
  PartialFourier op{1, {0}};
  CVec observations;            // Y'_{Ω_m}
  RVec noise_scales;            // σ_Z / |Λ(k)| on Ω_m
  RVec wpal_weights;            // | |x̂(n)| - γ |
  RVec phase_estimates;         // θ̂(n)
  CVec phase_terms;             // u(n)
  RVec time_magnitudes;         // |x̂(n)|
  double time_noise_variance = 0.0;  // per-sample variance of x̂ - x̄

  const std::vector<int>& tones() const { return op.tones(); }
  int m() const { return op.rows(); }

  CVec augmented_apply(const RVec& a) const;     // Ψ̃ a
  RVec augmented_adjoint(const CVec& y) const;   // Re(Ψ̃^H y)
  /// Re(Ψ̃^H Ψ̃), the Gram matrix of the real amplitude problem.
  RMat augmented_gram() const;
  CVec to_clip(const RVec& a) const;             // c = diag(u) a
  double mean_noise_variance() const;
};

CsModel build_model(const CVec& equalized, const CVec& decided, const std::vector<int>& tones,
                    const ChannelRealization& ch, double gamma);

enum class SolverStatus { converged, max_iterations, infeasible };
std::string_view to_string(SolverStatus s);

struct RecoveryResult {
  CVec clip_estimate;           // ĉ, length N
  RVec amplitudes;              // a(n) >= 0 for WPAL
  std::vector<int> support;
  SolverStatus status = SolverStatus::converged;
  int iterations = 0;
  double residual_norm = 0.0;   // ‖Y' - Ψ ĉ‖₂
  double lambda = 0.0;          // WPAL penalty at exit
  double log_posterior = 0.0;   // BMP metric of the chosen support
};

struct WpalOptions {
  double epsilon = -1.0;          // < 0: noise-derived default
  double epsilon_scale = 1.0;
  int max_iters = 2000;
  double tolerance = 1e-8;
  double residual_window = 0.05;  // accept ε(1 - window) <= r <= ε
  int max_bisections = 60;
  double support_threshold = 1e-9;
};

/// m σ̄² (1 + 2/√m).
double default_epsilon(const CsModel& model);

/// Weighted phase-augmented LASSO:
///   min Σ w(n) a(n)  s.t. ‖Y' - Ψ̃ a‖² <= ε, a >= 0,
/// solved through its penalized form with monotone accelerated proximal
/// gradient steps and a bisection over the penalty.
RecoveryResult wpal_solve(const CsModel& model, const WpalOptions& opts = {});

/// Penalized subproblem used by wpal_solve, exposed for testing:
///   min ‖Y' - Ψ̃ a‖² + λ Σ w(n) a(n), a >= 0.
struct PenalizedResult {
  RVec amplitudes;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;
};
PenalizedResult wpal_penalized(const RMat& gram, const RVec& correlation, double y_energy,
                               const RVec& weights, double lambda, const RVec& warm_start,
                               int max_iters, double tolerance, bool trace = false);

struct BmpPriors {
  double activity = 0.2;            // p₁
  double amplitude_variance = 0.2;  // σ_a²
  double noise_variance = 1e-3;     // σ_n²
  RVec activity_map;                // per-sample p₁(n); overrides activity when nonempty

  double activity_at(int i) const { return activity_map.size() ? activity_map[i] : activity; }
};

enum class BmpPrior { uniform, data_aided };
std::string_view to_string(BmpPrior p);
BmpPrior parse_bmp_prior(std::string_view s);

/// P(sample n clipped | |x̂(n)|) for the soft limiter at γ, with Rayleigh
/// amplitudes of scale σ_x and circular noise of variance σ_e² on x̂.
double clip_posterior(double magnitude, double gamma, double noise_variance, double sigma_x = 1.0);

struct BmpOptions {
  int beam = 4;
  double max_support_fraction = 1.0;  // cap ceil(fraction * m)
};

BmpPriors default_bmp_priors(const CsModel& model, double sigma_x = 1.0,
                             BmpPrior kind = BmpPrior::data_aided);

/// Log support posterior (up to a constant) of support s under the
/// Bernoulli-Gaussian prior, evaluated directly from the covariance. Slow;
/// used as an oracle and for diagnostics.
double support_log_posterior(const CsModel& model, const std::vector<int>& support,
                             const BmpPriors& priors);

/// Greedy beam search over supports maximizing the support posterior.
RecoveryResult bmp_solve(const CsModel& model, const BmpPriors& priors, const BmpOptions& opts = {});

/// X̂ = X̂̄ - F ĉ.
CVec correct(const CVec& equalized, const CVec& clip_estimate);
std::vector<int> correct_and_decode(const CVec& equalized, const CVec& clip_estimate,
                                    const QamConstellation& c);

}  // namespace clipcs
