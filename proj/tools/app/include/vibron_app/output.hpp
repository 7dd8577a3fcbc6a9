#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vibron::app {

/// Buffered CSV table with a fixed header and locale-independent numbers.
class CsvTable {
 public:
  CsvTable(std::vector<std::string> header, int precision);

  CsvTable& row();
  CsvTable& add(double v);
  CsvTable& add(long long v);
  CsvTable& add(int v) { return add(static_cast<long long>(v)); }
  CsvTable& add(std::size_t v) { return add(static_cast<long long>(v)); }
  CsvTable& add(const std::string& s);
  CsvTable& add(const char* s) { return add(std::string(s)); }

  [[nodiscard]] std::string str() const;
  [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  int precision_;
};

struct OutputRecord {
  std::string file;    ///< relative to the output directory
  std::string sha256;  ///< lowercase hex
  std::size_t bytes = 0;
};

std::string sha256_hex(const std::string& data);

/// Collects files written during one run and the run summary.
class RunManifest {
 public:
  RunManifest(std::string command, std::filesystem::path out_dir);

  /// Writes `table` to out_dir/name (header check included) and records its checksum.
  void write(const std::string& name, const CsvTable& table);
  void result(const std::string& key, const std::string& value);
  void result(const std::string& key, double value);
  void set_config(const std::map<std::string, std::string>& resolved,
                  const std::map<std::string, std::string>& origins);
  /// Prints the message to stderr and keeps it for the manifest.
  void warn(const std::string& message);
  void set_wall_time(double seconds) { wall_time_ = seconds; }

  [[nodiscard]] const std::vector<OutputRecord>& outputs() const noexcept { return outputs_; }
  [[nodiscard]] const std::map<std::string, std::string>& results() const noexcept {
    return results_;
  }
  [[nodiscard]] std::string json() const;
  /// Writes manifest.json next to the outputs.
  void finish() const;

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  std::map<std::string, std::string> config_;
  std::map<std::string, std::string> origins_;
  std::vector<std::string> warnings_;
  std::map<std::string, std::string> results_;
  std::vector<OutputRecord> outputs_;
  double wall_time_ = 0.0;
};

}  // namespace vibron::app
