#include "riseer/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "riseer/error.hpp"

namespace riseer {
namespace {

constexpr std::array<std::string_view, 12> kColumns{
    "id",        "name",     "lon",   "lat",
    "start_date", "end_date", "tier", "classification_code",
    "registered_capital", "credit_rating", "property", "state"};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

// Reads one RFC-4180 record; quoted fields may span lines. Returns false at EOF.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      break;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

struct RawRow {
  std::array<std::string, kColumns.size()> values;
  std::array<bool, kColumns.size()> present{};
};

// Validates one row. Returns the rejection reason on failure.
std::optional<std::string> validate(const RawRow& row, EnterpriseRecord& out) {
  auto get = [&](std::size_t i) -> std::string_view { return trim(row.values[i]); };
  if (get(0).empty()) return "missing id";
  out.id = std::string(get(0));
  if (!get(1).empty()) out.name = std::string(get(1));

  auto lon = parse_double(get(2));
  auto lat = parse_double(get(3));
  if (!lon) return "bad lon";
  if (!lat) return "bad lat";
  if (*lon < -180.0 || *lon > 180.0) return "lon out of range";
  if (*lat < -90.0 || *lat > 90.0) return "lat out of range";
  out.lon = *lon;
  out.lat = *lat;

  auto start = parse_date(get(4));
  if (!start) return "bad start_date";
  out.start_date = *start;
  if (!get(5).empty()) {
    auto end = parse_date(get(5));
    if (!end) return "bad end_date";
    if (*end < *start) return "lifespan inverted";
    out.end_date = *end;
  }

  auto tier = parse_tier(get(6));
  if (!tier) return "bad tier";
  out.tier = *tier;

  out.classification_code = std::string(get(7));
  auto capital = parse_double(get(8));
  if (!capital) return "bad registered_capital";
  if (*capital < 0.0) return "negative capital";
  out.registered_capital = *capital;
  out.credit_rating = std::string(get(9));
  out.property = std::string(get(10));
  out.state = std::string(get(11));
  return std::nullopt;
}

void accept(ParseResult& result, std::unordered_set<std::string>& seen,
            std::size_t row_number, const RawRow& row) {
  EnterpriseRecord record;
  if (auto reason = validate(row, record)) {
    result.rejections.push_back({row_number, std::move(*reason)});
    return;
  }
  if (!seen.insert(record.id).second) {
    result.rejections.push_back({row_number, "duplicate id"});
    return;
  }
  result.records.push_back(std::move(record));
}

std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view tier_name(Tier tier) noexcept {
  switch (tier) {
    case Tier::Primary: return "Primary";
    case Tier::Secondary: return "Secondary";
    case Tier::Tertiary: return "Tertiary";
  }
  return "Tertiary";
}

std::optional<Tier> parse_tier(std::string_view text) {
  text = trim(text);
  if (iequals(text, "primary") || text == "1") return Tier::Primary;
  if (iequals(text, "secondary") || text == "2") return Tier::Secondary;
  if (iequals(text, "tertiary") || text == "3") return Tier::Tertiary;
  return std::nullopt;
}

ParseResult parse_csv(std::istream& in) {
  ParseResult result;
  std::vector<std::string> fields;
  if (!read_csv_record(in, fields)) return result;

  std::array<std::optional<std::size_t>, kColumns.size()> position;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto name = trim(fields[i]);
    if (i == 0 && name.starts_with("\xEF\xBB\xBF")) name.remove_prefix(3);
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      if (name == kColumns[c]) position[c] = i;
    }
  }
  for (std::size_t c = 0; c < kColumns.size(); ++c) {
    if (!position[c] && kColumns[c] != "name" && kColumns[c] != "end_date") {
      throw Error(Errc::parse_error,
                  "CSV header is missing column '" + std::string(kColumns[c]) + "'");
    }
  }

  std::unordered_set<std::string> seen;
  std::size_t row_number = 0;
  while (read_csv_record(in, fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
    ++row_number;
    RawRow row;
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      if (position[c] && *position[c] < fields.size()) {
        row.values[c] = fields[*position[c]];
        row.present[c] = true;
      }
    }
    accept(result, seen, row_number, row);
  }
  return result;
}

ParseResult parse_jsonl(std::istream& in) {
  ParseResult result;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_number;
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      result.rejections.push_back({row_number, "malformed JSON"});
      continue;
    }
    RawRow row;
    for (std::size_t c = 0; c < kColumns.size(); ++c) {
      auto it = obj.find(std::string(kColumns[c]));
      if (it == obj.end() || it->is_null()) continue;
      row.present[c] = true;
      if (it->is_string()) {
        row.values[c] = it->get<std::string>();
      } else if (it->is_number()) {
        row.values[c] = it->is_number_integer() ? std::to_string(it->get<long long>())
                                                : format_number(it->get<double>());
      } else {
        row.values[c] = it->dump();
      }
    }
    accept(result, seen, row_number, row);
  }
  return result;
}

ParseResult parse_records_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open dataset " + path.string());
  auto ext = path.extension().string();
  if (ext == ".jsonl" || ext == ".ndjson") return parse_jsonl(in);
  return parse_csv(in);
}

void write_csv(std::ostream& out, std::span<const EnterpriseRecord> records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << csv_escape(r.id) << ',' << csv_escape(r.name.value_or("")) << ','
        << format_number(r.lon) << ',' << format_number(r.lat) << ','
        << format_date(r.start_date) << ',' << (r.end_date ? format_date(*r.end_date) : "")
        << ',' << tier_name(r.tier) << ',' << csv_escape(r.classification_code) << ','
        << format_number(r.registered_capital) << ',' << csv_escape(r.credit_rating) << ','
        << csv_escape(r.property) << ',' << csv_escape(r.state) << '\n';
  }
}

void write_rejections_jsonl(std::ostream& out, std::span<const Rejection> rejections) {
  for (const auto& r : rejections) {
    out << nlohmann::json{{"row", r.row}, {"reason", r.reason}}.dump() << '\n';
  }
}

Vocabulary::Vocabulary(std::vector<std::string> values) : values_(std::move(values)) {
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  for (std::size_t i = 0; i < values_.size(); ++i) lookup_.emplace(values_[i], i);
}

std::size_t Vocabulary::slot(std::string_view value) const {
  auto it = lookup_.find(std::string(value));
  return it == lookup_.end() ? other_slot() : it->second;
}

std::vector<double> Vocabulary::one_hot(std::string_view value) const {
  std::vector<double> v(encoded_size(), 0.0);
  v[slot(value)] = 1.0;
  return v;
}

Vocabularies Vocabularies::build(std::span<const EnterpriseRecord> records) {
  std::vector<std::string> cls, credit, prop, state;
  for (const auto& r : records) {
    cls.push_back(r.classification_code);
    credit.push_back(r.credit_rating);
    prop.push_back(r.property);
    state.push_back(r.state);
  }
  return {Vocabulary(std::move(cls)), Vocabulary(std::move(credit)),
          Vocabulary(std::move(prop)), Vocabulary(std::move(state))};
}

CategoricalEncoding encode_categorical(const EnterpriseRecord& record,
                                       const Vocabularies& vocab) {
  return {vocab.classification.one_hot(record.classification_code),
          vocab.credit_rating.one_hot(record.credit_rating),
          vocab.property.one_hot(record.property), vocab.state.one_hot(record.state)};
}

CreditScale::CreditScale() : CreditScale({"A", "B", "C", "D", "M"}) {}

CreditScale::CreditScale(std::vector<std::string> ordered) : ordered_(std::move(ordered)) {}

std::optional<double> CreditScale::code(std::string_view rating) const {
  auto it = std::find(ordered_.begin(), ordered_.end(), rating);
  if (it == ordered_.end()) return std::nullopt;
  return static_cast<double>(it - ordered_.begin() + 1);
}

std::optional<MonthRange> data_span(std::span<const EnterpriseRecord> records) {
  if (records.empty()) return std::nullopt;
  Month first = records.front().start_month();
  Month last = first;
  for (const auto& r : records) {
    first = std::min(first, r.start_month());
    last = std::max(last, r.start_month());
    if (auto end = r.end_month()) last = std::max(last, *end);
  }
  return MonthRange{first, last};
}

std::span<const std::uint32_t> MonthIndex::active(Month m) const {
  if (active_.empty() || !span_.contains(m)) return {};
  return active_[static_cast<std::size_t>(m - span_.first)];
}

MonthIndex reindex_by_month(std::span<const EnterpriseRecord> records) {
  auto span = data_span(records);
  if (!span) return {};
  return reindex_by_month(records, *span);
}

MonthIndex reindex_by_month(std::span<const EnterpriseRecord> records, MonthRange span) {
  std::vector<std::vector<std::uint32_t>> active(static_cast<std::size_t>(span.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    Month lo = std::max(r.start_month(), span.first);
    Month hi = span.last;
    if (auto end = r.end_month()) hi = std::min(hi, *end);
    for (Month m = lo; m <= hi; ++m) {
      active[static_cast<std::size_t>(m - span.first)].push_back(
          static_cast<std::uint32_t>(i));
    }
  }
  return MonthIndex(span, std::move(active));
}

SeriesResult build_monthly_series(const MonthIndex& index,
                                  std::span<const EnterpriseRecord> records,
                                  const CreditScale& scale) {
  SeriesResult result;
  if (index.empty()) return result;

  if (auto data = data_span(records)) {
    if (index.span().first < data->first || index.span().last > data->last) {
      result.warnings.push_back("configured span " + index.span().first.to_string() + ".." +
                                index.span().last.to_string() + " extends outside data span " +
                                data->first.to_string() + ".." + data->last.to_string());
    }
  } else {
    result.warnings.push_back("no records: all snapshots are zero");
  }

  // Categorical slots per record, resolved once.
  Vocabularies vocab = Vocabularies::build(records);
  struct Coded {
    std::uint32_t cls, prop, state;
    std::optional<double> credit;
  };
  std::vector<Coded> coded;
  coded.reserve(records.size());
  for (const auto& r : records) {
    coded.push_back({static_cast<std::uint32_t>(vocab.classification.slot(r.classification_code)),
                     static_cast<std::uint32_t>(vocab.property.slot(r.property)),
                     static_cast<std::uint32_t>(vocab.state.slot(r.state)),
                     scale.code(r.credit_rating)});
  }

  std::vector<std::size_t> cls_hist(vocab.classification.encoded_size());
  std::vector<std::size_t> prop_hist(vocab.property.encoded_size());
  std::vector<std::size_t> state_hist(vocab.state.encoded_size());
  auto modal_share = [](const std::vector<std::size_t>& hist, std::size_t n) {
    if (n == 0) return 0.0;
    return static_cast<double>(*std::max_element(hist.begin(), hist.end())) /
           static_cast<double>(n);
  };

  for (Month m = index.span().first; m <= index.span().last; ++m) {
    MonthlySnapshot snap;
    snap.month = m;
    auto active = index.active(m);
    std::fill(cls_hist.begin(), cls_hist.end(), 0);
    std::fill(prop_hist.begin(), prop_hist.end(), 0);
    std::fill(state_hist.begin(), state_hist.end(), 0);
    double capital = 0.0, credit = 0.0;
    std::size_t credit_n = 0;
    for (auto i : active) {
      const auto& r = records[i];
      ++snap.active_counts[static_cast<std::size_t>(r.tier)];
      ++cls_hist[coded[i].cls];
      ++prop_hist[coded[i].prop];
      ++state_hist[coded[i].state];
      capital += r.registered_capital;
      if (coded[i].credit) {
        credit += *coded[i].credit;
        ++credit_n;
      }
    }
    const std::size_t n = active.size();
    snap.model_features = {static_cast<double>(m.year()),
                           static_cast<double>(m.month()),
                           modal_share(cls_hist, n),
                           n ? std::log10(1.0 + capital / static_cast<double>(n)) : 0.0,
                           credit_n ? credit / static_cast<double>(credit_n) : 0.0,
                           modal_share(prop_hist, n),
                           modal_share(state_hist, n)};
    result.snapshots.push_back(std::move(snap));
  }
  return result;
}

}  // namespace riseer
