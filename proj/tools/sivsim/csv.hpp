#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include <siv/sweep.hpp>

namespace sivsim {

// header comment block plus rows; numbers printed with 17 significant digits
class CsvWriter {
 public:
  CsvWriter(std::string command, const nlohmann::json& config);

  void note(const std::string& key, const std::string& value);
  void note(const std::string& key, double value);
  void columns(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& cells);
  void sweep(const siv::SweepResult& s);

  // same rows under a new command name and config
  CsvWriter& rebind(std::string command, const nlohmann::json& config);

  std::string str() const;

 private:
  std::string command_;
  nlohmann::json config_;
  std::vector<std::string> notes_;
  std::vector<std::string> lines_;
};

std::string format_number(double v);

}  // namespace sivsim
