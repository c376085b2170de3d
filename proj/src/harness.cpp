#include "clipcs/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <thread>

#include "clipcs/baselines.hpp"
#include "clipcs/channel.hpp"
#include "clipcs/constellation.hpp"
#include "clipcs/cs_model.hpp"
#include "clipcs/ofdm.hpp"
#include "clipcs/reliability.hpp"
#include "clipcs/rng.hpp"

namespace clipcs {

std::size_t cell_index(const ExperimentConfig& cfg, std::size_t method, std::size_t reliability,
                       std::size_t m) {
  return (method * cfg.reliability_methods.size() + reliability) * cfg.m_sweep.size() + m;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

int count_errors(const std::vector<int>& decided, const std::vector<int>& truth) {
  int e = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) e += decided[k] != truth[k];
  return e;
}

bool contains(const std::vector<Method>& v, Method m) { return std::find(v.begin(), v.end(), m) != v.end(); }

}  // namespace

TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t trial_index) {
  const QamConstellation qam(cfg.M);
  const int n = cfg.N;
  const int bps = qam.bits_per_symbol();
  Rng rng = trial_stream(cfg.master_seed, trial_index);

  // Transmitter.
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n * bps));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() >> 63);
  const CVec symbols = map_bits(bits, qam);
  std::vector<int> truth(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    int idx = 0;
    for (int b = 0; b < bps; ++b) idx = (idx << 1) | bits[static_cast<std::size_t>(k * bps + b)];
    truth[static_cast<std::size_t>(k)] = idx;
  }
  const double gamma = gamma_from_clip_level(cfg.clip_level_db, 1.0);
  const FrameState frame = transmit(symbols, gamma);
  const CVec tx = dft(frame.clipped);

  // Channel and equalizer.
  const double es = std::isinf(gamma) ? 1.0 : 1.0 - clip_probability(gamma);
  const double noise_var = std::isinf(cfg.snr_db_per_bit) ? 0.0
                                                          : noise_variance_for_snr(cfg.snr_db_per_bit, bps, es);
  const ChannelRealization ch = draw_channel(n, cfg.taps, noise_var, rng);
  const CVec clean = apply_channel_noiseless(tx, ch);
  const CVec received = apply_channel(tx, ch, rng);
  const CVec equalized = equalize(received, ch);
  const DistortionModel dm = distortion_sigma(ch, gamma);

  TrialResult out;
  const std::size_t cells = cfg.cell_count();
  out.errors.assign(cells, 0);
  out.selected_correct.assign(cells, 0);
  out.solver_flagged.assign(cells, 0);
  out.cell_time_ms.assign(cells, 0.0);

  const std::vector<int> zf = zf_decode(equalized, qam);
  std::vector<bool> in_omega_t(static_cast<std::size_t>(n));
  int omega_t = 0;
  for (std::size_t k = 0; k < zf.size(); ++k) {
    in_omega_t[k] = zf[k] == truth[k];
    omega_t += in_omega_t[k];
  }
  out.diagnostics.omega_t_size = omega_t;
  out.diagnostics.clip_support_size = static_cast<int>(frame.support.size());
  out.diagnostics.mean_decision_error_probability = dm.decision_error_probability(qam.d_min()).mean();
  out.diagnostics.received_energy = clean.squaredNorm();
  out.diagnostics.noise_energy = (received - clean).squaredNorm();
  out.diagnostics.clip_energy = frame.clip.squaredNorm();

  BaselineConfig base{cfg.iterations, cfg.quasi_eps_fraction};
  WpalOptions wopts;
  wopts.epsilon_scale = cfg.wpal_epsilon_scale;
  wopts.max_iters = cfg.wpal_max_iters;
  BmpOptions bopts{cfg.bmp_beam, cfg.bmp_max_support_fraction};
  const CVec decided = qam.decide(equalized);

  const bool need_wpal = contains(cfg.methods, Method::wpal) || contains(cfg.methods, Method::wpal_itml);
  const bool need_bmp = contains(cfg.methods, Method::bmp) || contains(cfg.methods, Method::bmp_itml);

  // CS solutions per (reliability, m), shared by the plain and +ItML methods.
  struct Solved {
    std::optional<RecoveryResult> wpal, bmp;
    double wpal_ms = 0.0, bmp_ms = 0.0;
    int selected_correct = 0;
  };
  std::vector<Solved> solved(cfg.reliability_methods.size() * cfg.m_sweep.size());
  if (need_wpal || need_bmp) {
    for (std::size_t r = 0; r < cfg.reliability_methods.size(); ++r) {
      const auto scores = compute_reliability(cfg.reliability_methods[r], equalized, qam, dm);
      for (std::size_t mi = 0; mi < cfg.m_sweep.size(); ++mi) {
        Solved& s = solved[r * cfg.m_sweep.size() + mi];
        const auto tones = select_tones(scores.scores, cfg.m_sweep[mi], cfg.selection_mode);
        for (int k : tones) s.selected_correct += in_omega_t[static_cast<std::size_t>(k)];
        const CsModel model = build_model(equalized, decided, tones, ch, gamma);
        if (need_wpal) {
          const auto t0 = Clock::now();
          s.wpal = wpal_solve(model, wopts);
          s.wpal_ms = elapsed_ms(t0);
        }
        if (need_bmp) {
          const auto t0 = Clock::now();
          s.bmp = bmp_solve(model, default_bmp_priors(model, 1.0, cfg.bmp_prior), bopts);
          s.bmp_ms = elapsed_ms(t0);
        }
      }
    }
  }

  for (std::size_t mth = 0; mth < cfg.methods.size(); ++mth) {
    const Method method = cfg.methods[mth];
    if (!uses_tone_selection(method)) {
      const auto t0 = Clock::now();
      std::vector<int> dec;
      switch (method) {
        case Method::zf: dec = zf; break;
        case Method::itml: dec = itml(equalized, gamma, qam, base); break;
        case Method::dar: dec = dar(received, ch, gamma, qam, base); break;
        case Method::quasi_ml: dec = quasi_ml(equalized, gamma, qam, base); break;
        default: break;
      }
      const double ms = elapsed_ms(t0);
      const int e = count_errors(dec, truth);
      for (std::size_t r = 0; r < cfg.reliability_methods.size(); ++r) {
        for (std::size_t mi = 0; mi < cfg.m_sweep.size(); ++mi) {
          const auto c = cell_index(cfg, mth, r, mi);
          out.errors[c] = e;
          out.cell_time_ms[c] = ms;
        }
      }
      continue;
    }
    for (std::size_t r = 0; r < cfg.reliability_methods.size(); ++r) {
      for (std::size_t mi = 0; mi < cfg.m_sweep.size(); ++mi) {
        const Solved& s = solved[r * cfg.m_sweep.size() + mi];
        const bool wpal_based = method == Method::wpal || method == Method::wpal_itml;
        const RecoveryResult& rec = wpal_based ? *s.wpal : *s.bmp;
        const auto t0 = Clock::now();
        std::vector<int> dec;
        if (method == Method::wpal || method == Method::bmp) {
          dec = correct_and_decode(equalized, rec.clip_estimate, qam);
        } else {
          dec = cs_then_itml(equalized, rec.clip_estimate, gamma, qam, base);
        }
        const auto c = cell_index(cfg, mth, r, mi);
        out.errors[c] = count_errors(dec, truth);
        out.selected_correct[c] = s.selected_correct;
        out.solver_flagged[c] = rec.status != SolverStatus::converged;
        out.cell_time_ms[c] = elapsed_ms(t0) + (wpal_based ? s.wpal_ms : s.bmp_ms);
      }
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  const auto frames = static_cast<std::size_t>(cfg.frames);
  std::vector<TrialResult> trials(frames);
  int threads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, cfg.frames));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < frames; i = next++) trials[i] = run_trial(cfg, i);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ExperimentResult res;
  res.config = cfg;
  const std::size_t cells = cfg.cell_count();
  res.per_frame_errors.assign(cells, std::vector<int>(frames));
  res.flagged_solves.assign(cells, 0);
  res.diagnostics.reserve(frames);
  std::vector<double> time(cells, 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < cells; ++c) {
      res.per_frame_errors[c][f] = trials[f].errors[c];
      res.flagged_solves[c] += trials[f].solver_flagged[c];
      time[c] += trials[f].cell_time_ms[c];
    }
    res.diagnostics.push_back(trials[f].diagnostics);
  }
  for (std::size_t mth = 0; mth < cfg.methods.size(); ++mth) {
    for (std::size_t r = 0; r < cfg.reliability_methods.size(); ++r) {
      for (std::size_t mi = 0; mi < cfg.m_sweep.size(); ++mi) {
        const auto c = cell_index(cfg, mth, r, mi);
        SerRecord rec;
        rec.method = cfg.methods[mth];
        rec.reliability = cfg.reliability_methods[r];
        rec.m = cfg.m_sweep[mi];
        rec.frames = cfg.frames;
        for (int e : res.per_frame_errors[c]) rec.symbol_errors += e;
        rec.ser = static_cast<double>(rec.symbol_errors) / (static_cast<double>(cfg.frames) * cfg.N);
        rec.wall_time_ms = time[c];
        rec.seed = cfg.master_seed;
        res.records.push_back(rec);
      }
    }
  }
  return res;
}

void write_csv(std::ostream& out, const std::vector<SerRecord>& records, bool include_timing) {
  out << "method,reliability,m,frames,symbol_errors,ser,wall_time_ms,seed\n";
  char buf[32];
  for (const auto& r : records) {
    out << to_string(r.method) << ',' << to_string(r.reliability) << ',' << r.m << ',' << r.frames << ','
        << r.symbol_errors << ',' << format_double(r.ser) << ',';
    if (include_timing) {
      std::snprintf(buf, sizeof buf, "%.3f", r.wall_time_ms);
      out << buf;
    }
    out << ',' << r.seed << '\n';
  }
}

void write_csv_file(const std::string& path, const std::vector<SerRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_csv(out, records);
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

double binomial_lower_tail(int n, int k_max, double p) {
  if (k_max < 0) return 0.0;
  if (k_max >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  double total = 0.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  for (int l = 0; l <= k_max; ++l) {
    const double logc = std::lgamma(n + 1.0) - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0);
    total += std::exp(logc + l * lp + (n - l) * lq);
  }
  return std::min(total, 1.0);
}

std::vector<OmegaTPoint> omega_t_stats(const std::vector<int>& sizes, int n, double pe,
                                       const std::vector<double>& alphas) {
  std::vector<OmegaTPoint> out;
  for (double alpha : alphas) {
    OmegaTPoint p;
    p.alpha = alpha;
    const double threshold = alpha * n - 1e-9;
    std::size_t hits = 0;
    for (int s : sizes) hits += s >= threshold;
    p.empirical = sizes.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(sizes.size());
    p.binomial = binomial_lower_tail(n, static_cast<int>(std::floor(n * (1.0 - alpha) + 1e-9)), pe);
    out.push_back(p);
  }
  return out;
}

std::vector<OmegaTPoint> omega_t_stats(const std::vector<TrialDiagnostics>& diagnostics, int n,
                                       const std::vector<double>& alphas) {
  std::vector<int> sizes;
  double pe = 0.0;
  for (const auto& d : diagnostics) {
    sizes.push_back(d.omega_t_size);
    pe += d.mean_decision_error_probability;
  }
  if (!diagnostics.empty()) pe /= static_cast<double>(diagnostics.size());
  return omega_t_stats(sizes, n, pe, alphas);
}

double ser_standard_error(const std::vector<int>& e, int n) {
  if (e.size() < 2) return 0.0;
  double mean = 0.0;
  for (int v : e) mean += v;
  mean /= static_cast<double>(e.size());
  double var = 0.0;
  for (int v : e) var += (v - mean) * (v - mean);
  var /= static_cast<double>(e.size() - 1);
  return std::sqrt(var / static_cast<double>(e.size())) / n;
}

double paired_standard_error(const std::vector<int>& a, const std::vector<int>& b, int n) {
  if (a.size() != b.size()) throw InvalidInput("paired series differ in length");
  std::vector<int> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return ser_standard_error(d, n);
}

}  // namespace clipcs
