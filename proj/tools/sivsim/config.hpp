#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace sivsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// flat key/value document; every read is recorded into the resolved config
class Config {
 public:
  // json object with scalar values only
  void merge_json(const nlohmann::json& doc, const std::string& origin);
  void load_file(const std::string& path);
  // --key value / --key=value pairs
  void merge_args(const std::vector<std::string>& args);
  void set(const std::string& key, const std::string& value) { raw_[key] = value; }

  bool has(const std::string& key) const { return raw_.count(key) != 0; }

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  long integer(const std::string& key);
  long integer(const std::string& key, long fallback);
  bool boolean(const std::string& key, bool fallback);
  std::string text(const std::string& key);
  std::string text(const std::string& key, const std::string& fallback);
  std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& options);
  std::vector<double> number_list(const std::string& key, const std::vector<double>& fallback);
  std::uint64_t seed(std::uint64_t fallback);

  // sweep from <prefix>_start/_stop/_points/_scale
  std::vector<double> sweep(const std::string& prefix, double start, double stop, long points,
                            const std::string& scale = "linear");

  // throws ConfigError naming the first key that was never read
  void check_unused() const;

  const nlohmann::json& resolved() const { return resolved_; }

 private:
  const std::string* lookup(const std::string& key);
  void record(const std::string& key, double v);
  
  std::map<std::string, std::string> raw_;
  std::set<std::string> used_;
  nlohmann::json resolved_ = nlohmann::json::object();
};

}  // namespace sivsim
