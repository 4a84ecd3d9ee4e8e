#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riseer {

enum class Errc {
  invalid_argument,
  degenerate_dataset,
  unstable,
  unsplittable,
  not_found,
  insufficient_history,
  mape_undefined,
  undefined_cv,
  empty_cluster,
  io_error,
  parse_error,
  schema_violation,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-readable error code. The service maps the
/// code onto the `{code, message}` error payload.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace riseer
