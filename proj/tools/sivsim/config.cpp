#include "config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <siv/sweep.hpp>

namespace sivsim {

namespace {

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

}  // namespace

void Config::record(const std::string& key, double v) {
  // json has no infinity; keep it as text so the config re-parses
  if (std::isfinite(v)) {
    resolved_[key] = v;
  } else {
    resolved_[key] = std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  }
}

void Config::merge_json(const nlohmann::json& doc, const std::string& origin) {
  if (!doc.is_object()) throw ConfigError(origin + ": config must be a flat object");
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object() || value.is_array() || value.is_null()) {
      throw ConfigError(origin + ": key '" + key + "' must be a string, number or boolean");
    }
    raw_[key] = scalar_text(value);
  }
}

void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  // a previous CSV output carries its resolved config in a "# config: " line
  const std::string marker = "# config: ";
  const std::size_t pos = text.find(marker);
  std::string body = text;
  if (pos != std::string::npos && (pos == 0 || text[pos - 1] == '\n')) {
    const std::size_t end = text.find('\n', pos);
    body = text.substr(pos + marker.size(), end == std::string::npos ? std::string::npos : end - pos - marker.size());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  merge_json(doc, path);
}

void Config::merge_args(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) throw ConfigError("unexpected argument '" + a + "'");
    const std::string body = a.substr(2);
    const std::size_t eq = body.find('=');
    if (eq != std::string::npos) {
      raw_[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    if (i + 1 >= args.size()) throw ConfigError("missing value for key '" + body + "'");
    raw_[body] = args[++i];
  }
}

const std::string* Config::lookup(const std::string& key) {
  used_.insert(key);
  const auto it = raw_.find(key);
  return it == raw_.end() ? nullptr : &it->second;
}

double Config::number(const std::string& key) {
  const std::string* v = lookup(key);
  if (v == nullptr) throw ConfigError("missing required key '" + key + "'");
  double out = 0.0;
  if (!parse_double(*v, out)) throw ConfigError("key '" + key + "' is not a number: '" + *v + "'");
  record(key, out);
  return out;
}

double Config::number(const std::string& key, double fallback) {
  if (!has(key)) {
    used_.insert(key);
    record(key, fallback);
    return fallback;
  }
  return number(key);
}

long Config::integer(const std::string& key) {
  const double v = number(key);
  if (v != static_cast<double>(static_cast<long>(v))) throw ConfigError("key '" + key + "' must be an integer");
  resolved_[key] = static_cast<long>(v);
  return static_cast<long>(v);
}

long Config::integer(const std::string& key, long fallback) {
  if (!has(key)) {
    used_.insert(key);
    resolved_[key] = fallback;
    return fallback;
  }
  return integer(key);
}

bool Config::boolean(const std::string& key, bool fallback) {
  const std::string* v = lookup(key);
  bool out = fallback;
  if (v != nullptr) {
    if (*v == "true" || *v == "1") {
      out = true;
    } else if (*v == "false" || *v == "0") {
      out = false;
    } else {
      throw ConfigError("key '" + key + "' must be true or false");
    }
  }
  resolved_[key] = out;
  return out;
}

std::string Config::text(const std::string& key) {
  const std::string* v = lookup(key);
  if (v == nullptr) throw ConfigError("missing required key '" + key + "'");
  resolved_[key] = *v;
  return *v;
}

std::string Config::text(const std::string& key, const std::string& fallback) {
  if (!has(key)) {
    used_.insert(key);
    resolved_[key] = fallback;
    return fallback;
  }
  return text(key);
}

std::string Config::choice(const std::string& key, const std::string& fallback,
                           const std::vector<std::string>& options) {
  const std::string v = text(key, fallback);
  for (const std::string& o : options) {
    if (o == v) return v;
  }
  std::string list;
  for (const std::string& o : options) list += (list.empty() ? "" : "|") + o;
  throw ConfigError("key '" + key + "' must be one of " + list);
}

std::vector<double> Config::number_list(const std::string& key, const std::vector<double>& fallback) {
  std::vector<double> out = fallback;
  if (const std::string* v = lookup(key)) {
    out.clear();
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double d = 0.0;
      if (!parse_double(item, d)) throw ConfigError("key '" + key + "' must be a comma-separated number list");
      out.push_back(d);
    }
    if (out.empty()) throw ConfigError("key '" + key + "' is empty");
  }
  std::string joined;
  for (double d : out) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    joined += (joined.empty() ? "" : ",") + std::string(buf);
  }
  resolved_[key] = joined;
  return out;
}

std::uint64_t Config::seed(std::uint64_t fallback) {
  std::uint64_t out = fallback;
  if (const std::string* v = lookup("seed")) {
    errno = 0;
    char* end = nullptr;
    out = std::strtoull(v->c_str(), &end, 10);
    if (errno != 0 || v->empty() || end != v->c_str() + v->size()) {
      throw ConfigError("key 'seed' must be an unsigned 64-bit integer");
    }
  }
  resolved_["seed"] = std::to_string(out);
  return out;
}

std::vector<double> Config::sweep(const std::string& prefix, double start, double stop, long points,
                                  const std::string& scale) {
  const double a = number(prefix + "_start", start);
  const double b = number(prefix + "_stop", stop);
  const long n = integer(prefix + "_points", points);
  if (n < 2) throw ConfigError("key '" + prefix + "_points' must be at least 2");
  const std::string s = choice(prefix + "_scale", scale, {"linear", "log"});
  if (s == "log") {
    if (!(a > 0.0 && b > 0.0)) throw ConfigError("key '" + prefix + "_start' must be positive for a log sweep");
    return siv::logspace(a, b, static_cast<std::size_t>(n));
  }
  return siv::linspace(a, b, static_cast<std::size_t>(n));
}

void Config::check_unused() const {
  for (const auto& [key, value] : raw_) {
    if (used_.count(key) == 0) throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace sivsim
