#include "twistlab/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace twistlab::cli {

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  for (const auto& [k, v] : config_echo(cfg)) j[k] = v;
  return j;
}

ordered_json report_header(const std::string& command, const RunConfig& cfg) {
  ordered_json j;
  j["command"] = command;
  j["config"] = config_json(cfg);
  j["fingerprint"] = config_fingerprint(cfg);
  return j;
}

ordered_json checks_json(const std::vector<CheckResult>& checks) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json j;
    j["id"] = c.id;
    j["pass"] = c.pass;
    j["measured"] = c.measured;
    j["tolerance"] = c.tolerance;
    j["detail"] = c.detail;
    arr.push_back(std::move(j));
  }
  return arr;
}

void write_output(const std::string& out, const std::string& text) {
  if (out == "-") {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file '" + out + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + out + "'");
}

void write_json(const std::string& out, const ordered_json& doc) {
  write_output(out, doc.dump(2) + "\n");
}

} // namespace twistlab::cli
