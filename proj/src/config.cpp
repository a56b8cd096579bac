#include "twistlab/config.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twistlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail_at(const std::string& name, int line,
                          const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

u64 to_u64(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

} // namespace

std::string format_double(double d) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, d);
    if (std::strtod(buf, nullptr) == d) break;
  }
  return buf;
}

std::vector<u64> parse_u64_grid(const std::string& text) {
  std::vector<u64> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 2 && parts.size() != 3)
      throw std::invalid_argument("range must be lo:hi or lo:hi:step");
    const u64 lo = to_u64(parts[0]), hi = to_u64(parts[1]);
    const u64 step = parts.size() == 3 ? to_u64(parts[2]) : 1;
    if (step == 0) throw std::invalid_argument("range step must be positive");
    if (lo > hi) throw std::invalid_argument("range is empty (lo > hi)");
    for (u64 v = lo; v <= hi; v += step) {
      out.push_back(v);
      if (v > hi - step) break; // u64 wrap guard
    }
  } else {
    for (const auto& piece : split(text, ',')) out.push_back(to_u64(piece));
  }
  for (u64 v : out)
    if (v == 0) throw std::invalid_argument("values must be positive");
  return out;
}

std::vector<double> parse_double_grid(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("real range must be lo:hi:step");
    const double lo = to_double(parts[0]), hi = to_double(parts[1]);
    const double step = to_double(parts[2]);
    if (!(step > 0)) throw std::invalid_argument("range step must be positive");
    if (lo > hi) throw std::invalid_argument("range is empty (lo > hi)");
    for (double v = lo; v <= hi + 1e-9 * step; v += step) out.push_back(v);
  } else {
    for (const auto& piece : split(text, ',')) out.push_back(to_double(piece));
  }
  return out;
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail_at(name, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "grid" && section != "amplifier")
        fail_at(name, lineno, "unknown section '" + section + "'");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail_at(name, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (section.empty())
      fail_at(name, lineno, "key '" + key + "' appears before any [section]");
    if (key.empty() || val.empty())
      fail_at(name, lineno, "empty key or value");

    try {
      if (section == "run") {
        if (key == "eigenform") {
          cfg.eigenform = val;
        } else if (key == "threads") {
          cfg.threads = int(to_u64(val));
          if (cfg.threads < 1) throw std::invalid_argument("threads must be >= 1");
        } else if (key == "seed") {
          cfg.seed = to_u64(val);
        } else if (key == "theta") {
          cfg.theta = to_double(val);
          if (!(cfg.theta >= 0.0) || cfg.theta >= 0.5)
            throw std::invalid_argument("theta must lie in [0, 1/2)");
        } else if (key == "format") {
          if (val != "auto" && val != "json" && val != "csv")
            throw std::invalid_argument("format must be auto, json, or csv");
          cfg.format = val;
        } else if (key == "out") {
          cfg.out = val;
        } else {
          fail_at(name, lineno, "unknown key '" + key + "' in [run]");
        }
      } else if (section == "grid") {
        if (key == "Q") {
          cfg.Q_grid = parse_u64_grid(val);
          cfg.grid_explicit = true;
        } else if (key == "t") {
          cfg.t_grid = parse_double_grid(val);
          cfg.grid_explicit = true;
        } else if (key == "chi_index") {
          if (val != "auto") cfg.chi_index = to_u64(val);
        } else {
          fail_at(name, lineno, "unknown key '" + key + "' in [grid]");
        }
      } else { // amplifier
        auto opt = [&](const std::string& v) -> std::optional<double> {
          if (v == "auto") return std::nullopt;
          const double d = to_double(v);
          if (!(d > 0)) throw std::invalid_argument("value must be positive");
          return d;
        };
        if (key == "G") {
          cfg.G = opt(val);
        } else if (key == "L") {
          cfg.L = opt(val);
        } else if (key == "x") {
          cfg.x = opt(val);
        } else {
          fail_at(name, lineno, "unknown key '" + key + "' in [amplifier]");
        }
      }
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception& e) {
      fail_at(name, lineno, "bad value '" + val + "' for '" + key + "': " + e.what());
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
  auto join_u = [](const std::vector<u64>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  auto join_d = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += (i ? "," : "") + format_double(v[i]);
    return s;
  };
  auto opt_d = [](const std::optional<double>& o) {
    return o ? format_double(*o) : std::string("auto");
  };
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("subcommand", cfg.subcommand);
  kv.emplace_back("eigenform", cfg.eigenform);
  kv.emplace_back("Q", join_u(cfg.Q_grid));
  kv.emplace_back("t", join_d(cfg.t_grid));
  kv.emplace_back("chi_index",
                  cfg.chi_index ? std::to_string(*cfg.chi_index) : "auto");
  kv.emplace_back("x", opt_d(cfg.x));
  kv.emplace_back("G", opt_d(cfg.G));
  kv.emplace_back("L", opt_d(cfg.L));
  kv.emplace_back("theta", format_double(cfg.theta));
  kv.emplace_back("threads", std::to_string(cfg.threads));
  kv.emplace_back("seed", std::to_string(cfg.seed));
  kv.emplace_back("format", cfg.format);
  kv.emplace_back("out", cfg.out);
  return kv;
}

std::string config_fingerprint(const RunConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : config_echo(cfg)) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace twistlab::cli
