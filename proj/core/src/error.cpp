#include "riseer/error.hpp"

namespace riseer {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::degenerate_dataset: return "degenerate_dataset";
    case Errc::unstable: return "unstable";
    case Errc::unsplittable: return "unsplittable";
    case Errc::not_found: return "not_found";
    case Errc::insufficient_history: return "insufficient_history";
    case Errc::mape_undefined: return "mape_undefined";
    case Errc::undefined_cv: return "undefined_cv";
    case Errc::empty_cluster: return "empty_cluster";
    case Errc::io_error: return "io_error";
    case Errc::parse_error: return "parse_error";
    case Errc::schema_violation: return "schema_violation";
  }
  return "unknown";
}

}  // namespace riseer
