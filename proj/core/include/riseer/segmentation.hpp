#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riseer/calendar.hpp"
#include "riseer/ingest.hpp"

namespace riseer {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double x) const { return slope * x + intercept; }
};

struct SegmentError {
  LineFit fit;
  double max_residual = 0.0;
};

/// Inclusive index range with its least-squares line (in absolute indices).
struct Segment {
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  LineFit fit;
  double max_residual = 0.0;

  std::size_t length() const { return end_idx - start_idx + 1; }
};

/// Least-squares line over series[lo..hi] and its maximum absolute residual.
SegmentError segment_error(std::span<const double> series, std::size_t lo, std::size_t hi);

/// Best split of series[lo..hi] into [lo, s-1] and [s, hi] with s in (lo, hi),
/// minimising the larger of the two maximum residuals; smallest s wins ties.
/// Throws Error{unsplittable} when hi - lo < 2.
std::size_t best_split(std::span<const double> series, std::size_t lo, std::size_t hi);

/// Top-down recursive segmentation. Every returned segment of length >= 3
/// has max_residual <= max_error; shorter segments are terminal.
/// Throws Error{invalid_argument} for an empty series or max_error <= 0.
std::vector<Segment> topdown_segment(std::span<const double> series, double max_error);

/// Sum of the per-segment maxima.
double total_error(std::span<const Segment> segments);

/// Segmentation threshold: a fraction of the series range, or an absolute
/// value. Parsed from "0.05" or "abs:120".
struct Threshold {
  enum class Kind { Fraction, Absolute };
  Kind kind = Kind::Fraction;
  double value = 0.05;

  static Threshold parse(std::string_view text);
  double resolve(std::span<const double> series) const;
  std::string to_string() const;
};

/// Which aggregate is segmented: total active count or a single tier.
struct SeriesSelector {
  std::optional<Tier> tier;  // nullopt: total

  static SeriesSelector parse(std::string_view text);  // "total" | "tier:<name>"
  std::vector<double> extract(std::span<const MonthlySnapshot> snapshots) const;
  std::string to_string() const;
};

/// Evolution period used for clustering: a contiguous run of snapshots.
struct Period {
  std::size_t index = 0;
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;
  MonthRange months;
};

/// Turns segments into display periods: segments shorter than min_months are
/// merged into a neighbour, then the shortest period is merged into its
/// shorter neighbour until at most max_periods remain. Periods tile the series.
std::vector<Period> derive_periods(std::span<const Segment> segments, Month first_month,
                                   std::size_t max_periods = 5,
                                   std::size_t min_months = 6);

}  // namespace riseer
