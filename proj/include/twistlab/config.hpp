#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/defs.hpp"

namespace twistlab::cli {

// Resolved run settings shared by every subcommand. Each field has a usable
// default, so an empty config file (or none at all) is a valid run; the
// resolved values are echoed into every report so a result file is
// self-describing.
struct RunConfig {
  std::string subcommand;          // filled by the front-end, not the file
  std::string eigenform = "delta"; // builtin name or eigenform file path
  std::vector<u64> Q_grid = {11};
  std::vector<double> t_grid = {0.0};
  std::optional<u64> chi_index;    // absent: first nonprincipal character
  std::optional<double> x;         // absent: 3 Q (1 + |t|)
  std::optional<double> G;         // absent: derived from (t, theta, Q)
  std::optional<double> L;         // absent: Q^{1/4}
  double theta = 7.0 / 64.0;
  int threads = 1;
  u64 seed = 42;
  std::string format = "auto";     // auto | json | csv (scan honors csv)
  std::string out = "-";           // "-" writes to stdout

  bool grid_explicit = false; // a Q or t key appeared in config or flags
};

// "lo:hi[:step]" (inclusive), "a,b,c", or a single value. Values must be
// positive; ranges must be nonempty.
std::vector<u64> parse_u64_grid(const std::string& text);
std::vector<double> parse_double_grid(const std::string& text);

// #-comment / [section] / key = value text. Sections: [run], [grid],
// [amplifier]. Unknown sections, unknown keys, and unparsable values are
// reported with the file name and line number.
RunConfig parse_config_text(const std::string& text, const std::string& name);
RunConfig parse_config_file(const std::string& path);

// resolved key/value pairs in a fixed order; the source of both the report
// echo and the fingerprint
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg);

// FNV-1a over the echo lines, rendered as 0x + 16 hex digits
std::string config_fingerprint(const RunConfig& cfg);

// deterministic shortest decimal that parses back to exactly d
std::string format_double(double d);

} // namespace twistlab::cli
