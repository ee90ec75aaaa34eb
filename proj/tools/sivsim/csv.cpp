#include "csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace sivsim {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::string command, const nlohmann::json& config)
    : command_(std::move(command)), config_(config) {}

CsvWriter& CsvWriter::rebind(std::string command, const nlohmann::json& config) {
  command_ = std::move(command);
  config_ = config;
  return *this;
}

void CsvWriter::note(const std::string& key, const std::string& value) { notes_.push_back(key + ": " + value); }
void CsvWriter::note(const std::string& key, double value) { note(key, format_number(value)); }

void CsvWriter::columns(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) line += (i ? "," : "") + cells[i];
  lines_.push_back(line);
}

void CsvWriter::row(const std::vector<double>& cells) {
  std::vector<std::string> s;
  for (double v : cells) s.push_back(format_number(v));
  row(s);
}

void CsvWriter::sweep(const siv::SweepResult& s) {
  std::vector<std::string> names{s.axis_label, s.signal_label};
  for (const auto& [name, values] : s.aux) names.push_back(name);
  columns(names);
  for (std::size_t i = 0; i < s.axis.size(); ++i) {
    std::vector<double> r{s.axis[i], s.signal[i]};
    for (const auto& [name, values] : s.aux) r.push_back(values[i]);
    row(r);
  }
}

std::string CsvWriter::str() const {
  std::ostringstream out;
  out << "# sivsim " << SIVSIM_VERSION << "\n";
  out << "# command: " << command_ << "\n";
  out << "# units: frequencies in Hz (cycles/s, 2pi applied internally), times in s, fields in T, angles in degrees "
         "unless a column name says otherwise\n";
  if (config_.contains("seed")) out << "# seed: " << config_["seed"].get<std::string>() << "\n";
  out << "# config: " << config_.dump() << "\n";
  for (const std::string& n : notes_) out << "# " << n << "\n";
  for (const std::string& l : lines_) out << l << "\n";
  return out.str();
}

}  // namespace sivsim
