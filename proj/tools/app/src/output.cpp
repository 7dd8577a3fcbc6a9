#include "vibron_app/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "vibron_app/version.hpp"

namespace vibron::app {

CsvTable::CsvTable(std::vector<std::string> header, int precision)
    : header_(std::move(header)), precision_(precision) {}

CsvTable& CsvTable::row() {
  if (!rows_.empty() && rows_.back().size() != header_.size()) {
    throw std::logic_error("CSV row has " + std::to_string(rows_.back().size()) +
                           " fields, header has " + std::to_string(header_.size()));
  }
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::add(double v) {
  // Normalize negative zero so byte-level diffs stay meaningful.
  if (v == 0.0) v = 0.0;
  rows_.back().push_back(std::isfinite(v) ? fmt::format("{:.{}g}", v, precision_)
                                          : std::string(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")));
  return *this;
}

CsvTable& CsvTable::add(long long v) {
  rows_.back().push_back(fmt::format("{}", v));
  return *this;
}

CsvTable& CsvTable::add(const std::string& s) {
  rows_.back().push_back(s);
  return *this;
}

std::string CsvTable::str() const {
  std::string out = fmt::format("{}\n", fmt::join(header_, ","));
  for (const auto& r : rows_) {
    if (r.size() != header_.size()) {
      throw std::logic_error("CSV row width does not match header");
    }
    out += fmt::format("{}\n", fmt::join(r, ","));
  }
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

RunManifest::RunManifest(std::string command, std::filesystem::path out_dir)
    : command_(std::move(command)), out_dir_(std::move(out_dir)) {}

void RunManifest::write(const std::string& name, const CsvTable& table) {
  const std::string data = table.str();
  std::filesystem::create_directories(out_dir_);
  const auto path = out_dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
  outputs_.push_back({name, sha256_hex(data), data.size()});
}

void RunManifest::result(const std::string& key, const std::string& value) {
  results_[key] = value;
}

void RunManifest::result(const std::string& key, double value) {
  results_[key] = fmt::format("{:.12g}", value);
}

void RunManifest::set_config(const std::map<std::string, std::string>& resolved,
                             const std::map<std::string, std::string>& origins) {
  config_ = resolved;
  origins_ = origins;
}

void RunManifest::warn(const std::string& message) {
  fmt::print(stderr, "warning: {}\n", message);
  warnings_.push_back(message);
}

std::string RunManifest::json() const {
  nlohmann::ordered_json j;
  j["software"] = {{"name", "vibron"}, {"version", kVersion}};
  j["command"] = command_;
  j["config"] = config_;
  j["config_origin"] = origins_;
  j["warnings"] = warnings_;
  j["results"] = results_;
  auto outs = nlohmann::ordered_json::array();
  for (const auto& o : outputs_) {
    outs.push_back({{"file", o.file}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  }
  j["outputs"] = outs;
  j["wall_time_s"] = wall_time_;
  return j.dump(2) + "\n";
}

void RunManifest::finish() const {
  std::filesystem::create_directories(out_dir_);
  std::ofstream out(out_dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
  out << json();
  if (!out) throw std::runtime_error("cannot write manifest.json");
}

}  // namespace vibron::app
