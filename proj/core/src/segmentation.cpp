#include "riseer/segmentation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "riseer/error.hpp"

namespace riseer {

SegmentError segment_error(std::span<const double> series, std::size_t lo, std::size_t hi) {
  if (lo > hi || hi >= series.size()) {
    throw Error(Errc::invalid_argument, "segment_error: bad range");
  }
  const std::size_t n = hi - lo + 1;
  if (n == 1) return {{0.0, series[lo]}, 0.0};

  // Fit on x = i - lo for conditioning, then shift the intercept.
  const double nd = static_cast<double>(n);
  const double x_mean = (nd - 1.0) / 2.0;
  double y_mean = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) y_mean += series[i];
  y_mean /= nd;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    double dx = static_cast<double>(i - lo) - x_mean;
    sxy += dx * (series[i] - y_mean);
    sxx += dx * dx;
  }
  const double slope = sxy / sxx;
  const double local_intercept = y_mean - slope * x_mean;
  double max_residual = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    double fitted = slope * static_cast<double>(i - lo) + local_intercept;
    max_residual = std::max(max_residual, std::abs(series[i] - fitted));
  }
  return {{slope, local_intercept - slope * static_cast<double>(lo)}, max_residual};
}

std::size_t best_split(std::span<const double> series, std::size_t lo, std::size_t hi) {
  if (hi < lo + 2 || hi >= series.size()) {
    throw Error(Errc::unsplittable, "segment too short to split");
  }
  double scale = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) scale = std::max(scale, std::abs(series[i]));
  // Costs within rounding noise of each other count as ties.
  const double tie = 1e-9 * std::max(scale, 1.0);
  std::size_t best = lo + 1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t s = lo + 1; s < hi; ++s) {
    double cost = std::max(segment_error(series, lo, s - 1).max_residual,
                           segment_error(series, s, hi).max_residual);
    if (cost < best_cost - tie) {
      best_cost = cost;
      best = s;
    }
  }
  return best;
}

std::vector<Segment> topdown_segment(std::span<const double> series, double max_error) {
  if (series.empty()) throw Error(Errc::invalid_argument, "empty series");
  if (!(max_error > 0.0) || !std::isfinite(max_error)) {
    throw Error(Errc::invalid_argument, "segmentation threshold must be positive");
  }
  std::vector<Segment> out;
  // Depth-first, left child first, so segments come out in order.
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, series.size() - 1}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    SegmentError err = segment_error(series, lo, hi);
    if (err.max_residual <= max_error || hi - lo < 2) {
      out.push_back({lo, hi, err.fit, err.max_residual});
      continue;
    }
    std::size_t s = best_split(series, lo, hi);
    stack.emplace_back(s, hi);
    stack.emplace_back(lo, s - 1);
  }
  return out;
}

double total_error(std::span<const Segment> segments) {
  return std::accumulate(segments.begin(), segments.end(), 0.0,
                         [](double acc, const Segment& s) { return acc + s.max_residual; });
}

Threshold Threshold::parse(std::string_view text) {
  Threshold t;
  if (text.starts_with("abs:")) {
    t.kind = Kind::Absolute;
    text.remove_prefix(4);
  }
  try {
    std::size_t used = 0;
    t.value = std::stod(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(Errc::invalid_argument, "bad threshold '" + std::string(text) + "'");
  }
  if (!(t.value > 0.0)) throw Error(Errc::invalid_argument, "threshold must be positive");
  return t;
}

double Threshold::resolve(std::span<const double> series) const {
  if (kind == Kind::Absolute) return value;
  if (series.empty()) return value;
  auto [mn, mx] = std::minmax_element(series.begin(), series.end());
  double range = *mx - *mn;
  // A flat series is one exact segment at any positive threshold.
  return range > 0.0 ? value * range : value;
}

std::string Threshold::to_string() const {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return (kind == Kind::Absolute ? "abs:" : "") + std::string(buf, end);
}

SeriesSelector SeriesSelector::parse(std::string_view text) {
  if (text == "total") return {};
  if (text.starts_with("tier:")) {
    if (auto tier = parse_tier(text.substr(5))) return {*tier};
  }
  throw Error(Errc::invalid_argument, "bad series selector '" + std::string(text) + "'");
}

std::vector<double> SeriesSelector::extract(std::span<const MonthlySnapshot> snapshots) const {
  std::vector<double> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots) {
    out.push_back(static_cast<double>(tier ? s.count(*tier) : s.total()));
  }
  return out;
}

std::string SeriesSelector::to_string() const {
  return tier ? "tier:" + std::string(tier_name(*tier)) : "total";
}

std::vector<Period> derive_periods(std::span<const Segment> segments, Month first_month,
                                   std::size_t max_periods, std::size_t min_months) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (const auto& s : segments) runs.emplace_back(s.start_idx, s.end_idx);
  auto len = [&](std::size_t i) { return runs[i].second - runs[i].first + 1; };
  // Merge run i into its shorter neighbour (ties go left).
  auto merge = [&](std::size_t i) {
    bool has_left = i > 0, has_right = i + 1 < runs.size();
    bool left = has_left && (!has_right || len(i - 1) <= len(i + 1));
    if (left) {
      runs[i - 1].second = runs[i].second;
    } else {
      runs[i + 1].first = runs[i].first;
    }
    runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(i));
  };

  for (std::size_t i = 0; runs.size() > 1 && i < runs.size();) {
    if (len(i) < min_months) {
      merge(i);
      i = 0;
    } else {
      ++i;
    }
  }
  max_periods = std::max<std::size_t>(max_periods, 1);
  while (runs.size() > max_periods) {
    std::size_t shortest = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
      if (len(i) < len(shortest)) shortest = i;
    }
    merge(shortest);
  }

  std::vector<Period> periods;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    auto [a, b] = runs[i];
    periods.push_back({i, a, b,
                       {first_month + static_cast<int>(a), first_month + static_cast<int>(b)}});
  }
  return periods;
}

}  // namespace riseer
