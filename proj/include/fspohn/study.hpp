#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Study runner: parses flat key=value configuration files, evaluates
// parameter sweeps on a worker pool, and writes deterministic CSV artifacts
// (header row, config-hash comment, fixed 12-significant-digit formatting).

namespace fspohn::study {

struct StudyConfig {
  std::string kind;
  std::string out_dir = ".";
  std::map<std::string, std::string> params;
};

// key=value per line; blank lines and '#' comments ignored; duplicate,
// unknown, or malformed keys raise usage errors naming the key
StudyConfig parse_config_text(const std::string& text);
StudyConfig parse_config_file(const std::string& path);

// command-line override "key=value", validated like a config line
void apply_override(StudyConfig& config, const std::string& assignment);

// FNV-1a over the canonical "key=value\n" serialization; out_dir excluded so
// the same parameters hash identically wherever the artifacts land
std::uint64_t config_hash(const StudyConfig& config);

// runs the configured study and writes <kind>.csv into out_dir; returns the
// number of rows whose computation failed (each reported as a comment line)
int run_study(const StudyConfig& config);

// worker-pool width: FS_AIRY_THREADS when set, else hardware concurrency
int worker_count();

// shortest round-trippable 12-significant-digit decimal
std::string format_csv_number(double v);

// grid syntax "a:b:n": n evenly spaced points from a to b inclusive
std::vector<double> parse_grid(const std::string& text, const std::string& key);

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& key);
std::vector<int> parse_int_list(const std::string& text, const std::string& key);

}  // namespace fspohn::study
