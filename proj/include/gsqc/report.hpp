#pragma once

#include <map>
#include <string>
#include <vector>

#include "gsqc/types.hpp"

namespace gsqc {

// Line-based experiment description: `key = value` pairs, `#` comments.
struct Config {
  std::string text;    // raw bytes, hashed into the manifest
  std::string origin;  // file the config came from; anchors relative paths
  std::map<std::string, std::string> kv;

  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  std::string str(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double num(const std::string& key, double fallback) const;
  long integer(const std::string& key, long fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> num_list(const std::string& key,
                               const std::vector<double>& fallback) const;
  std::vector<int> int_list(const std::string& key,
                            const std::vector<int>& fallback) const;
};

// %.15g, the precision used by every artifact.
std::string format_double(double v);

// RFC-4180-style: comma separated, \n line ends, header first.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

void write_text_file(const std::string& path, const std::string& content);

std::string fnv1a_hex(const std::string& bytes);

// Executes the experiment named by the config and writes its artifacts.
// exit_code: 0 all assertions pass, 1 assertion failures, 2 config error,
// 3 resource budget exceeded.
struct RunOutcome {
  int exit_code = 0;
  std::vector<std::string> failures;
  std::vector<std::string> artifacts;
  std::string summary;
};

RunOutcome run_experiment(const std::string& config_path);
RunOutcome run_experiment_config(const Config& cfg,
                                 const std::string& out_dir_override = "");

}  // namespace gsqc
