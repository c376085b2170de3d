#include "clipcs/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace clipcs {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::zf: return "zf";
    case Method::itml: return "itml";
    case Method::dar: return "dar";
    case Method::quasi_ml: return "quasi_ml";
    case Method::wpal: return "wpal";
    case Method::bmp: return "bmp";
    case Method::wpal_itml: return "wpal+itml";
    case Method::bmp_itml: return "bmp+itml";
  }
  return "?";
}

Method parse_method(std::string_view s) {
  for (Method m : {Method::zf, Method::itml, Method::dar, Method::quasi_ml, Method::wpal, Method::bmp,
                   Method::wpal_itml, Method::bmp_itml}) {
    if (s == to_string(m)) return m;
  }
  throw InvalidInput("unknown method: " + std::string(s));
}

bool uses_tone_selection(Method m) {
  return m == Method::wpal || m == Method::bmp || m == Method::wpal_itml || m == Method::bmp_itml;
}

void ExperimentConfig::validate() const {
  if (N < 2) throw InvalidInput("N must be >= 2");
  if (taps < 1 || taps > N) throw InvalidInput("taps must satisfy 1 <= taps <= N");
  if (frames < 1) throw InvalidInput("frames must be positive");
  if (methods.empty()) throw InvalidInput("methods must be nonempty");
  if (m_sweep.empty()) throw InvalidInput("m_sweep must be nonempty");
  for (int m : m_sweep) {
    if (m < 1 || m > N) throw InvalidInput("m_sweep values must lie in [1, N]");
  }
  if (reliability_methods.empty()) throw InvalidInput("reliability_methods must be nonempty");
  if (iterations < 1) throw InvalidInput("iterations must be >= 1");
  if (!(quasi_eps_fraction > 0.0 && quasi_eps_fraction <= 1.0)) {
    throw InvalidInput("quasi_eps_fraction must lie in (0, 1]");
  }
  if (!(wpal_epsilon_scale > 0.0)) throw InvalidInput("wpal_epsilon_scale must be positive");
  if (wpal_max_iters < 1) throw InvalidInput("wpal_max_iters must be positive");
  if (bmp_beam < 1) throw InvalidInput("bmp_beam must be positive");
  if (!(bmp_max_support_fraction > 0.0 && bmp_max_support_fraction <= 1.0)) {
    throw InvalidInput("bmp_max_support_fraction must lie in (0, 1]");
  }
  // Constellation order is checked by QamConstellation; repeat here for early failure.
  int m = M;
  while (m > 1 && m % 4 == 0) m /= 4;
  if (M < 4 || m != 1) throw InvalidInput("M must be a square QAM order (4, 16, 64, ...)");
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) {
    throw InvalidInput("malformed value for " + std::string(key) + ": '" + std::string(v) + "'");
  }
  return out;
}

template <class F>
void for_each_item(std::string_view list, F&& f) {
  while (!list.empty()) {
    const auto comma = list.find(',');
    const auto item = trim(list.substr(0, comma));
    if (!item.empty()) f(item);
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
}

template <class T, class F>
std::string join(const std::vector<T>& v, F&& fmt) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i]);
  }
  return s;
}

}  // namespace

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "N") cfg.N = parse_number<int>(key, value);
  else if (key == "M") cfg.M = parse_number<int>(key, value);
  else if (key == "clip_level_db") cfg.clip_level_db = parse_number<double>(key, value);
  else if (key == "snr_db_per_bit") cfg.snr_db_per_bit = parse_number<double>(key, value);
  else if (key == "taps") cfg.taps = parse_number<int>(key, value);
  else if (key == "frames") cfg.frames = parse_number<int>(key, value);
  else if (key == "master_seed") cfg.master_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "methods") {
    cfg.methods.clear();
    for_each_item(value, [&](std::string_view s) { cfg.methods.push_back(parse_method(s)); });
  } else if (key == "m_sweep") {
    cfg.m_sweep.clear();
    for_each_item(value, [&](std::string_view s) { cfg.m_sweep.push_back(parse_number<int>(key, s)); });
  } else if (key == "reliability_methods") {
    cfg.reliability_methods.clear();
    for_each_item(value, [&](std::string_view s) { cfg.reliability_methods.push_back(parse_reliability(s)); });
  } else if (key == "selection_mode") cfg.selection_mode = parse_selection(value);
  else if (key == "iterations") cfg.iterations = parse_number<int>(key, value);
  else if (key == "quasi_eps_fraction") cfg.quasi_eps_fraction = parse_number<double>(key, value);
  else if (key == "wpal_epsilon_scale") cfg.wpal_epsilon_scale = parse_number<double>(key, value);
  else if (key == "wpal_max_iters") cfg.wpal_max_iters = parse_number<int>(key, value);
  else if (key == "bmp_beam") cfg.bmp_beam = parse_number<int>(key, value);
  else if (key == "bmp_max_support_fraction") cfg.bmp_max_support_fraction = parse_number<double>(key, value);
  else if (key == "bmp_prior") cfg.bmp_prior = parse_bmp_prior(value);
  else throw InvalidInput("unknown config key: " + std::string(key));
}

std::string serialize(const ExperimentConfig& cfg) {
  std::ostringstream o;
  o << "N=" << cfg.N << '\n'
    << "M=" << cfg.M << '\n'
    << "clip_level_db=" << format_double(cfg.clip_level_db) << '\n'
    << "snr_db_per_bit=" << format_double(cfg.snr_db_per_bit) << '\n'
    << "taps=" << cfg.taps << '\n'
    << "frames=" << cfg.frames << '\n'
    << "master_seed=" << cfg.master_seed << '\n'
    << "methods=" << join(cfg.methods, [](Method m) { return std::string(to_string(m)); }) << '\n'
    << "m_sweep=" << join(cfg.m_sweep, [](int m) { return std::to_string(m); }) << '\n'
    << "reliability_methods="
    << join(cfg.reliability_methods, [](ReliabilityMethod r) { return std::string(to_string(r)); }) << '\n'
    << "selection_mode=" << to_string(cfg.selection_mode) << '\n'
    << "iterations=" << cfg.iterations << '\n'
    << "quasi_eps_fraction=" << format_double(cfg.quasi_eps_fraction) << '\n'
    << "wpal_epsilon_scale=" << format_double(cfg.wpal_epsilon_scale) << '\n'
    << "wpal_max_iters=" << cfg.wpal_max_iters << '\n'
    << "bmp_beam=" << cfg.bmp_beam << '\n'
    << "bmp_max_support_fraction=" << format_double(cfg.bmp_max_support_fraction) << '\n'
    << "bmp_prior=" << to_string(cfg.bmp_prior) << '\n';
  return o.str();
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidInput("config line " + std::to_string(line_no) + " is not key=value");
    }
    set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace clipcs
