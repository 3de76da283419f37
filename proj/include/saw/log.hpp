#pragma once

#include <string_view>

namespace saw::log {

// Verbosity comes from the SAW_LOG environment variable
// (trace|debug|info|warn|error|off, default warn). Messages go to stderr.
void debug(std::string_view msg);
void info(std::string_view msg);
void warn(std::string_view msg);

}  // namespace saw::log
