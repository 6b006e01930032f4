#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace obmc {

// Raised when a check exceeds its time or node budget. Callers surface it as
// the KO verdict rather than an error.
struct ResourceExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Budget {
  std::chrono::milliseconds timeout{600'000};
  std::size_t max_nodes = 50'000'000;
  std::size_t enumeration_cap_bits = 24;

  std::optional<std::chrono::steady_clock::time_point> deadline() const {
    if (timeout.count() <= 0) return std::nullopt;
    return std::chrono::steady_clock::now() + timeout;
  }
};

inline void check_deadline(const std::optional<std::chrono::steady_clock::time_point>& deadline,
                           const char* what) {
  if (deadline && std::chrono::steady_clock::now() > *deadline)
    throw ResourceExhausted(std::string(what) + ": time budget exceeded");
}

}  // namespace obmc
