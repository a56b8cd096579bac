#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "twistlab/config.hpp"

namespace twistlab::cli {

// One verification check: what was measured, what it was held against, and a
// deterministic one-line account. No wall-clock data lives here on purpose;
// reports must be byte-identical across reruns.
struct CheckResult {
  std::string id;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

using ordered_json = nlohmann::ordered_json;

// the resolved config as an object, key order matching config_echo
ordered_json config_json(const RunConfig& cfg);

// standard report skeleton: command, config echo, fingerprint
ordered_json report_header(const std::string& command, const RunConfig& cfg);

ordered_json checks_json(const std::vector<CheckResult>& checks);

// serialize with a trailing newline; out == "-" writes to stdout
void write_output(const std::string& out, const std::string& text);
void write_json(const std::string& out, const ordered_json& doc);

} // namespace twistlab::cli
