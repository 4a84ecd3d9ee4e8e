#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riseer/calendar.hpp"
#include "riseer/ingest.hpp"

namespace fixture {

inline riseer::Date date(const char* text) { return *riseer::parse_date(text); }

inline riseer::EnterpriseRecord record(std::string id, double lon, double lat,
                                       const char* start, std::optional<const char*> end = {},
                                       riseer::Tier tier = riseer::Tier::Tertiary,
                                       double capital = 100.0,
                                       std::string state = "surviving") {
  riseer::EnterpriseRecord r;
  r.id = std::move(id);
  r.lon = lon;
  r.lat = lat;
  r.start_date = date(start);
  if (end) r.end_date = date(*end);
  r.tier = tier;
  r.classification_code = "F51";
  r.registered_capital = capital;
  r.credit_rating = "A";
  r.property = "private";
  r.state = std::move(state);
  return r;
}

}  // namespace fixture
