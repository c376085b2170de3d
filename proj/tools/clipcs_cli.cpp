// Monte Carlo driver for clipped-OFDM recovery experiments.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "clipcs/harness.hpp"

namespace {

using namespace clipcs;

void apply_overrides(ExperimentConfig& cfg, const std::optional<std::uint64_t>& seed,
                     const std::optional<int>& frames) {
  if (seed) cfg.master_seed = *seed;
  if (frames) cfg.frames = *frames;
  cfg.validate();
}

void report(const ExperimentResult& res, std::ostream& log) {
  int flagged = 0;
  for (int f : res.flagged_solves) flagged += f;
  const auto omega = omega_t_stats(res.diagnostics, res.config.N, {0.8, 0.9});
  log << "frames=" << res.config.frames << " flagged_solves=" << flagged;
  for (const auto& p : omega) {
    log << " Pr(|Omega_T|>=" << p.alpha << "N): empirical=" << p.empirical << " binomial=" << p.binomial;
  }
  log << '\n';
}

void emit(const std::string& out, const ExperimentResult& res) {
  if (out.empty() || out == "-") {
    write_csv(std::cout, res.records);
  } else {
    write_csv_file(out, res.records);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressive-sensing recovery of clipped OFDM frames: Monte Carlo SER experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> frames;
  int threads = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value experiment config (defaults when omitted)");
    sub->add_option("--out", out_path, "CSV output path ('-' for stdout)");
    sub->add_option("--seed", seed, "override master_seed");
    sub->add_option("--frames", frames, "override frames");
    sub->add_option("--threads", threads, "worker threads (0: all cores)");
  };

  auto* run = app.add_subcommand("run", "run one experiment and write the SER table");
  common(run);

  std::string param;
  std::vector<std::string> values;
  auto* sweep = app.add_subcommand("sweep", "run an experiment per value of one config key");
  common(sweep);
  sweep->add_option("--param", param, "config key to sweep ('m' sets m_sweep)")->required();
  sweep->add_option("--values", values, "values, comma or space separated")->required()->delimiter(',');

  auto* show = app.add_subcommand("config", "print the effective configuration");
  show->add_option("--config", config_path, "config file to load");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (*show) {
      std::cout << serialize(cfg);
      return 0;
    }
    apply_overrides(cfg, seed, frames);
    const RunOptions opts{threads};

    if (*run) {
      const auto res = run_experiment(cfg, opts);
      emit(out_path, res);
      report(res, std::cerr);
      return 0;
    }

    if (param == "m" || param == "m_sweep") {
      std::string joined;
      for (const auto& v : values) joined += (joined.empty() ? "" : ",") + v;
      set_config_value(cfg, "m_sweep", joined);
      cfg.validate();
      const auto res = run_experiment(cfg, opts);
      emit(out_path, res);
      report(res, std::cerr);
      return 0;
    }

    // One CSV per value of a scalar key: <stem>_<param>=<value><ext>.
    const std::filesystem::path base(out_path.empty() ? "sweep.csv" : out_path);
    for (const auto& v : values) {
      ExperimentConfig c = cfg;
      set_config_value(c, param, v);
      c.validate();
      const auto res = run_experiment(c, opts);
      auto path = base.parent_path() / (base.stem().string() + "_" + param + "=" + v + base.extension().string());
      write_csv_file(path.string(), res.records);
      std::cerr << param << '=' << v << ": ";
      report(res, std::cerr);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
