#include "thetactl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "thetactl/errors.hpp"

namespace thetactl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class Int>
Int parse_integer(std::string_view text, std::string_view what) {
  Int value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config: invalid integer for " + std::string(what) + ": '" +
                      std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text, std::string_view what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config: invalid boolean for " + std::string(what) + ": '" +
                    std::string(text) + "'");
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? s.size() - start : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

void validate_density_spec(std::string_view spec) {
  if (spec == "paper_cossin2" || spec == "paper_clipped" || spec == "uniform") return;
  if (spec.starts_with("table:") && spec.size() > 6) return;
  if (spec.starts_with("vonmises:")) {
    const auto parts = split(spec, ':');
    if (parts.size() == 3) {
      const double kappa = parse_real(parts[1], "vonmises kappa");
      parse_real(parts[2], "vonmises mean");
      if (kappa < 0.0) throw ConfigError("config: vonmises kappa must be >= 0");
      return;
    }
  }
  throw ConfigError("config: unknown initial_density '" + std::string(spec) + "'");
}

void validate_target_spec(std::string_view spec) {
  if (spec.starts_with("constant:")) {
    parse_real(spec.substr(9), "target constant");
    return;
  }
  if (spec.starts_with("table:") && spec.size() > 6) return;
  throw ConfigError("config: unknown target '" + std::string(spec) + "'");
}

void validate_control_spec(std::string_view spec, std::string_view key) {
  if (spec == "zero") return;
  if (spec.starts_with("constant:")) {
    parse_real(spec.substr(9), key);
    return;
  }
  if (spec.starts_with("sine:")) {
    parse_real(spec.substr(5), key);
    return;
  }
  if (spec.starts_with("table:") && spec.size() > 6) return;
  throw ConfigError("config: unknown " + std::string(key) + " '" + std::string(spec) + "'");
}

}  // namespace

double parse_real(std::string_view text, std::string_view what) {
  text = trim(text);
  constexpr double pi = std::numbers::pi;
  if (text == "pi") return pi;
  if (text == "-pi") return -pi;
  if (text == "2pi") return 2.0 * pi;
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw ConfigError("config: invalid number for " + std::string(what) + ": '" +
                      std::string(text) + "'");
  }
  return value;
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "n_modes") grid.n_modes = parse_integer<int>(value, key);
  else if (key == "n_eta") grid.n_eta = parse_integer<int>(value, key);
  else if (key == "eta_min") grid.eta_min = parse_real(value, key);
  else if (key == "eta_max") grid.eta_max = parse_real(value, key);
  else if (key == "horizon") grid.horizon = parse_real(value, key);
  else if (key == "n_steps") grid.n_steps = parse_integer<int>(value, key);
  else if (key == "dealias") grid.dealias = parse_bool(value, key);
  else if (key == "alpha") alpha = parse_real(value, key);
  else if (key == "epsilon") epsilon = parse_real(value, key);
  else if (key == "max_iters") max_iters = parse_integer<int>(value, key);
  else if (key == "initial_density") initial_density = std::string(value);
  else if (key == "normalize") normalize = parse_bool(value, key);
  else if (key == "target") target = std::string(value);
  else if (key == "control") control = std::string(value);
  else if (key == "probe_control") probe_control = std::string(value);
  else if (key == "storage_stride") storage_stride = parse_integer<int>(value, key);
  else if (key == "preset") preset = std::string(value);
  else if (key == "seed") seed = parse_integer<std::uint64_t>(value, key);
  else if (key == "particles_n") particles_n = parse_integer<std::size_t>(value, key);
  else throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

void RunConfig::validate() const {
  grid.validate();
  if (!(grid.horizon > 0.0)) throw ConfigError("config: horizon must be > 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("config: alpha must be > 0");
  if (!(epsilon > 0.0)) throw ConfigError("config: epsilon must be > 0");
  if (max_iters < 0) throw ConfigError("config: max_iters must be >= 0");
  if (storage_stride < 0 || (storage_stride > 0 && grid.n_steps % storage_stride != 0)) {
    throw ConfigError("config: storage_stride must divide n_steps");
  }
  if (preset != "desk" && preset != "paper") {
    throw ConfigError("config: unknown preset '" + preset + "'");
  }
  if (particles_n == 0) throw ConfigError("config: particles_n must be >= 1");
  validate_density_spec(initial_density);
  validate_target_spec(target);
  validate_control_spec(control, "control");
  validate_control_spec(probe_control, "probe_control");
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out << "preset=" << preset << '\n'
      << "n_modes=" << grid.n_modes << '\n'
      << "n_eta=" << grid.n_eta << '\n'
      << "eta_min=" << format_real(grid.eta_min) << '\n'
      << "eta_max=" << format_real(grid.eta_max) << '\n'
      << "horizon=" << format_real(grid.horizon) << '\n'
      << "n_steps=" << grid.n_steps << '\n'
      << "dealias=" << (grid.dealias ? "true" : "false") << '\n'
      << "alpha=" << format_real(alpha) << '\n'
      << "epsilon=" << format_real(epsilon) << '\n'
      << "max_iters=" << max_iters << '\n'
      << "initial_density=" << initial_density << '\n'
      << "normalize=" << (normalize ? "true" : "false") << '\n'
      << "target=" << target << '\n'
      << "control=" << control << '\n'
      << "probe_control=" << probe_control << '\n'
      << "storage_stride=" << storage_stride << '\n'
      << "seed=" << seed << '\n'
      << "particles_n=" << particles_n << '\n';
  return out.str();
}

RunConfig preset_config(std::string_view name) {
  RunConfig c;
  if (name == "desk") {
    c.grid = desk_grid();
  } else if (name == "paper") {
    c.grid = paper_grid();
  } else {
    throw ConfigError("config: unknown preset '" + std::string(name) + "'");
  }
  c.preset = std::string(name);
  c.alpha = 1.0;
  c.epsilon = 0.01;
  c.initial_density = "paper_cossin2";
  c.target = "constant:pi";
  c.control = "zero";
  return c;
}

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> entries;
  int line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) + " is not key=value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config: line " + std::to_string(line_no) + " has no key");
    entries.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return entries;
}

RunConfig load_config(const ConfigSources& sources) {
  std::vector<std::pair<std::string, std::string>> file_entries;
  if (sources.config_file) {
    std::ifstream in(*sources.config_file, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read " + sources.config_file->string());
    std::ostringstream buf;
    buf << in.rdbuf();
    file_entries = parse_config_text(buf.str());
  }
  std::vector<std::pair<std::string, std::string>> override_entries;
  for (const auto& o : sources.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("config: override '" + o + "' is not key=value");
    }
    override_entries.emplace_back(std::string(trim(std::string_view(o).substr(0, eq))),
                                  std::string(trim(std::string_view(o).substr(eq + 1))));
  }

  std::string preset = "desk";
  for (const auto& [k, v] : file_entries) {
    if (k == "preset") preset = v;
  }
  for (const auto& [k, v] : override_entries) {
    if (k == "preset") preset = v;
  }
  if (sources.preset) preset = *sources.preset;

  RunConfig config = preset_config(preset);
  for (const auto& [k, v] : file_entries) {
    if (k != "preset") config.set(k, v);
  }
  for (const auto& [k, v] : override_entries) {
    if (k != "preset") config.set(k, v);
  }
  if (sources.seed) config.seed = *sources.seed;
  config.validate();
  return config;
}

}  // namespace thetactl
