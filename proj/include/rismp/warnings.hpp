#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <utility>

namespace rismp {

using WarningHandler = std::function<void(const std::string&)>;

namespace detail {
inline WarningHandler& warning_handler_slot() {
  static WarningHandler handler = [](const std::string& message) {
    std::cerr << "[rismp] warning: " << message << '\n';
  };
  return handler;
}
}  // namespace detail

/// Replaces the process-wide warning sink. Pass an empty function to silence
/// warnings. Returns the previous handler so callers can restore it.
inline WarningHandler set_warning_handler(WarningHandler handler) {
  auto& slot = detail::warning_handler_slot();
  WarningHandler previous = std::move(slot);
  slot = std::move(handler);
  return previous;
}

inline void emit_warning(const std::string& message) {
  const auto& handler = detail::warning_handler_slot();
  if (handler) handler(message);
}

}  // namespace rismp
