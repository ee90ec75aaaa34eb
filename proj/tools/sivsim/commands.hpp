#pragma once

#include <string>

#include "config.hpp"

namespace sivsim {

// each returns the finished CSV text; ConfigError for bad keys, siv::Error from the models
std::string cmd_structure(Config& cfg);
std::string cmd_estimate(Config& cfg);
std::string cmd_run(const std::string& experiment, Config& cfg);
std::string cmd_ssr(Config& cfg);
std::string cmd_optical(Config& cfg);
std::string cmd_fit(Config& cfg);

}  // namespace sivsim
