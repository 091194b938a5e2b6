#pragma once

#include <charconv>
#include <string>

namespace matsf {

/// Shortest text that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace matsf
