#pragma once
// CSV and metadata output. Numbers use the shortest decimal representation
// that round-trips to double, so reruns are byte-comparable.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fptrack {

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double x);
std::string format_int(std::int64_t x);

// Row schema shared by the noisy and delayed sweep commands.
struct CsvRow {
  std::string experiment;      // "noisy" | "delayed"
  std::string estimator;       // rule name
  double level_or_delay = 0.0; // ell (noisy) or d (delayed)
  double p = 0.0;
  double s = 0.0;
  double epsilon = 0.0;
  std::string q;               // exponent for single_observation, else empty
  std::int64_t n_trials = 0;
  double empirical_moment = 0.0;
  double theory_constant = 0.0;
  double ratio = 0.0;
  double stderr_ = 0.0;
  std::int64_t truncated_count = 0;
  std::uint64_t master_seed = 0;

  static const char* header();
  std::string to_line() const;
};

// Writes lines with '\n' endings; throws std::runtime_error on I/O failure.
void write_text_file(const std::string& path,
                     const std::vector<std::string>& lines);

// Sidecar "<out>.meta" with the resolved configuration, key=value per line.
void write_meta_file(const std::string& csv_path,
                     const std::map<std::string, std::string>& entries);

}  // namespace fptrack
