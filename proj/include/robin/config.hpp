#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "robin/domain.hpp"

namespace robin {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimal TOML reader covering the configuration surface of this project:
// comments, bare key = value pairs (strings, booleans, integers, floats,
// homogeneous/nested arrays), [section] tables and [[section]] arrays of
// tables. Returns the equivalent JSON document.
nlohmann::json parse_toml(const std::string& text);

// Loads a domain description from a .toml or .json file.
DomainPtr load_domain_file(const std::string& path);
nlohmann::json load_config_file(const std::string& path);

struct RunConfig {
  std::string domain_file;
  std::string backend = "auto";  // auto | ball | halfspace | mfs
  uint64_t seed = 20240601;
  int threads = 1;
  std::string out_dir = ".";
  std::map<std::string, double> overrides;

  nlohmann::json to_json() const;
};

// Stable FNV-1a hash of the canonical JSON dump; embedded in every report.
uint64_t config_hash(const nlohmann::json& config);
std::string config_hash_hex(const nlohmann::json& config);

}  // namespace robin
