#include "saw/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <memory>
#include <string>

namespace saw::log {
namespace {

std::shared_ptr<spdlog::logger> logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto lg = spdlog::stderr_color_mt("saw");
    lg->set_pattern("[saw] [%l] %v");
    lg->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("SAW_LOG")) {
      lg->set_level(spdlog::level::from_str(env));
    }
    return lg;
  }();
  return instance;
}

}  // namespace

void debug(std::string_view msg) { logger()->debug(msg); }
void info(std::string_view msg) { logger()->info(msg); }
void warn(std::string_view msg) { logger()->warn(msg); }

}  // namespace saw::log
