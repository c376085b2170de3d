#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "clipcs/cs_model.hpp"
#include "clipcs/reliability.hpp"

namespace clipcs {

enum class Method { zf, itml, dar, quasi_ml, wpal, bmp, wpal_itml, bmp_itml };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);
/// True for methods whose output depends on the selected tone set.
bool uses_tone_selection(Method m);

/// Everything that defines one Monte Carlo experiment. Serialized as flat
/// key=value text; the keys are the field names below.
struct ExperimentConfig {
  int N = 64;
  int M = 16;
  double clip_level_db = 2.0;
  double snr_db_per_bit = 25.0;
  int taps = 8;
  int frames = 2000;
  std::uint64_t master_seed = 1;
  std::vector<Method> methods{Method::zf, Method::itml, Method::dar, Method::quasi_ml,
                              Method::wpal, Method::bmp, Method::wpal_itml, Method::bmp_itml};
  std::vector<int> m_sweep{8, 16, 24, 32, 40, 48, 56, 64};
  std::vector<ReliabilityMethod> reliability_methods{ReliabilityMethod::mag_phase};
  SelectionMode selection_mode = SelectionMode::most;

  // Baselines.
  int iterations = 4;
  double quasi_eps_fraction = 0.5;
  // WPAL.
  double wpal_epsilon_scale = 1.0;
  int wpal_max_iters = 2000;
  // BMP.
  int bmp_beam = 4;
  double bmp_max_support_fraction = 1.0;
  BmpPrior bmp_prior = BmpPrior::data_aided;

  /// Throws InvalidInput if any field is out of range.
  void validate() const;
  std::size_t cell_count() const {
    return methods.size() * reliability_methods.size() * m_sweep.size();
  }
};

std::string serialize(const ExperimentConfig& cfg);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Applies one key=value assignment; throws InvalidInput on an unknown key or
/// malformed value.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace clipcs
