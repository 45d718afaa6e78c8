#include "fptrack/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace fptrack {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_int(std::int64_t x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {
std::string format_uint(std::uint64_t x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}
}  // namespace

const char* CsvRow::header() {
  return "experiment,estimator,level_or_delay,p,s,epsilon,q,n_trials,"
         "empirical_moment,theory_constant,ratio,stderr,truncated_count,"
         "master_seed";
}

std::string CsvRow::to_line() const {
  std::string line;
  line.reserve(160);
  line += experiment;
  line += ',';
  line += estimator;
  line += ',';
  line += format_double(level_or_delay);
  line += ',';
  line += format_double(p);
  line += ',';
  line += format_double(s);
  line += ',';
  line += format_double(epsilon);
  line += ',';
  line += q;
  line += ',';
  line += format_int(n_trials);
  line += ',';
  line += format_double(empirical_moment);
  line += ',';
  line += format_double(theory_constant);
  line += ',';
  line += format_double(ratio);
  line += ',';
  line += format_double(stderr_);
  line += ',';
  line += format_int(truncated_count);
  line += ',';
  line += format_uint(master_seed);
  return line;
}

void write_text_file(const std::string& path,
                     const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  for (const auto& line : lines) {
    out << line << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_meta_file(const std::string& csv_path,
                     const std::map<std::string, std::string>& entries) {
  std::vector<std::string> lines;
  lines.reserve(entries.size());
  for (const auto& [key, value] : entries) lines.push_back(key + "=" + value);
  write_text_file(csv_path + ".meta", lines);
}

}  // namespace fptrack
