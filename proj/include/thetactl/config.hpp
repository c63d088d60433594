#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "thetactl/grid.hpp"

namespace thetactl {

/// Flat run configuration. Text form is one `key=value` per line; `#`
/// starts a comment. Keys are applied in the order preset, file, overrides.
struct RunConfig {
  GridSpec grid = desk_grid();
  double alpha = 1.0;
  double epsilon = 0.01;
  int max_iters = 100;
  std::string initial_density = "paper_cossin2";
  bool normalize = true;
  std::string target = "constant:pi";
  std::string control = "zero";
  std::string probe_control = "sine:0.2";
  int storage_stride = 0;
  std::string preset = "desk";
  std::uint64_t seed = 0;
  std::size_t particles_n = 200000;

  /// Throws ConfigError for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// Grid, problem and string-spec syntax checks; no file access.
  void validate() const;
  /// Every key in a fixed order; parses back to an identical config.
  [[nodiscard]] std::string to_text() const;
};

/// "desk" or "paper"; throws ConfigError otherwise.
RunConfig preset_config(std::string_view name);

/// key=value pairs in file order. Throws ConfigError on malformed lines.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);

struct ConfigSources {
  std::optional<std::filesystem::path> config_file;
  std::optional<std::string> preset;
  std::vector<std::string> overrides;  // "key=value"
  std::optional<std::uint64_t> seed;
};

/// Resolves preset (flag > override > file > "desk"), then file keys, then
/// overrides, then the seed flag; validates the result.
RunConfig load_config(const ConfigSources& sources);

/// Parses a real number; accepts "pi", "-pi", "2pi".
double parse_real(std::string_view text, std::string_view what);

/// Shortest round-trip decimal representation.
std::string format_real(double value);

}  // namespace thetactl
