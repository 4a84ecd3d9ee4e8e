#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "riseer/calendar.hpp"

namespace riseer {

enum class Tier : std::uint8_t { Primary = 0, Secondary = 1, Tertiary = 2 };
inline constexpr std::size_t kTierCount = 3;
inline constexpr std::array<Tier, kTierCount> kTiers{Tier::Primary, Tier::Secondary,
                                                     Tier::Tertiary};

std::string_view tier_name(Tier tier) noexcept;
/// Accepts "Primary"/"Secondary"/"Tertiary" (case-insensitive) or "1"/"2"/"3".
std::optional<Tier> parse_tier(std::string_view text);

struct EnterpriseRecord {
  std::string id;
  std::optional<std::string> name;
  double lon = 0.0;
  double lat = 0.0;
  Date start_date;
  std::optional<Date> end_date;  // absent: still operating
  Tier tier = Tier::Tertiary;
  std::string classification_code;
  double registered_capital = 0.0;
  std::string credit_rating;
  std::string property;
  std::string state;

  Month start_month() const { return Month::of(start_date); }
  std::optional<Month> end_month() const {
    if (!end_date) return std::nullopt;
    return Month::of(*end_date);
  }
  /// Active in m iff start <= last-day(m) and (no end or end >= first-day(m)).
  bool active_in(Month m) const {
    if (start_month() > m) return false;
    return !end_date || Month::of(*end_date) >= m;
  }
  /// Active at any month of the range.
  bool active_during(const MonthRange& range) const {
    if (start_month() > range.last) return false;
    return !end_date || Month::of(*end_date) >= range.first;
  }
};

struct Rejection {
  std::size_t row = 0;  // 1-based data row (header excluded)
  std::string reason;
};

struct ParseResult {
  std::vector<EnterpriseRecord> records;
  std::vector<Rejection> rejections;
};

inline constexpr std::string_view kCsvHeader =
    "id,name,lon,lat,start_date,end_date,tier,classification_code,"
    "registered_capital,credit_rating,property,state";

ParseResult parse_csv(std::istream& in);
ParseResult parse_jsonl(std::istream& in);
/// Dispatches on extension (.jsonl / .ndjson -> JSONL, anything else CSV).
/// Throws Error{io_error} if the file cannot be opened.
ParseResult parse_records_file(const std::filesystem::path& path);

void write_csv(std::ostream& out, std::span<const EnterpriseRecord> records);
void write_rejections_jsonl(std::ostream& out, std::span<const Rejection> rejections);

/// Dataset-level dictionary of a categorical field. Values are kept sorted so
/// the encoding does not depend on row order. Slot size() is reserved for
/// values outside the vocabulary.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> values);

  std::size_t size() const { return values_.size(); }
  std::size_t encoded_size() const { return values_.size() + 1; }
  std::size_t other_slot() const { return values_.size(); }
  const std::vector<std::string>& values() const { return values_; }

  /// Slot of value, or other_slot() when unknown.
  std::size_t slot(std::string_view value) const;
  std::vector<double> one_hot(std::string_view value) const;

 private:
  std::vector<std::string> values_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

struct Vocabularies {
  Vocabulary classification;
  Vocabulary credit_rating;
  Vocabulary property;
  Vocabulary state;

  static Vocabularies build(std::span<const EnterpriseRecord> records);
};

struct CategoricalEncoding {
  std::vector<double> classification;
  std::vector<double> credit_rating;
  std::vector<double> property;
  std::vector<double> state;
};

CategoricalEncoding encode_categorical(const EnterpriseRecord& record,
                                       const Vocabularies& vocab);

/// Ordinal scale for credit ratings; code of the i-th entry is i + 1.
class CreditScale {
 public:
  CreditScale();  // A, B, C, D, M
  explicit CreditScale(std::vector<std::string> ordered);

  std::optional<double> code(std::string_view rating) const;
  const std::vector<std::string>& ordered() const { return ordered_; }

 private:
  std::vector<std::string> ordered_;
};

/// Smallest span covering every record; live records extend to the latest
/// month seen anywhere in the data. nullopt for an empty dataset.
std::optional<MonthRange> data_span(std::span<const EnterpriseRecord> records);

/// Month-keyed index of active record positions.
class MonthIndex {
 public:
  MonthIndex() = default;
  MonthIndex(MonthRange span, std::vector<std::vector<std::uint32_t>> active)
      : span_(span), active_(std::move(active)) {}

  const MonthRange& span() const { return span_; }
  bool empty() const { return active_.empty(); }
  std::size_t months() const { return active_.size(); }
  /// Record positions active in m, ascending. Empty when m is out of span.
  std::span<const std::uint32_t> active(Month m) const;

  bool operator==(const MonthIndex&) const = default;

 private:
  MonthRange span_{};
  std::vector<std::vector<std::uint32_t>> active_;
};

/// Reindexes over the data span (empty input -> empty index).
MonthIndex reindex_by_month(std::span<const EnterpriseRecord> records);
MonthIndex reindex_by_month(std::span<const EnterpriseRecord> records, MonthRange span);

inline constexpr std::size_t kFeatureDims = 7;
using FeatureVector = std::array<double, kFeatureDims>;
inline constexpr std::array<std::string_view, kFeatureDims> kFeatureNames{
    "year", "month", "classification_code", "registered_capital",
    "credit_rating", "property", "state"};

struct MonthlySnapshot {
  Month month;
  std::array<std::int64_t, kTierCount> active_counts{};
  FeatureVector model_features{};
  std::vector<double> projection_features;

  std::int64_t total() const {
    return active_counts[0] + active_counts[1] + active_counts[2];
  }
  std::int64_t count(Tier t) const { return active_counts[static_cast<std::size_t>(t)]; }
};

struct SeriesResult {
  std::vector<MonthlySnapshot> snapshots;
  std::vector<std::string> warnings;
};

/// One snapshot per month of index.span(). Categorical dims hold the share of
/// the most frequent category among the month's actives; capital holds
/// log10(1 + mean capital); credit holds the mean ordinal code.
SeriesResult build_monthly_series(const MonthIndex& index,
                                  std::span<const EnterpriseRecord> records,
                                  const CreditScale& scale = CreditScale{});

}  // namespace riseer
