#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace emars {

/// Seconds since 1970-01-01T00:00:00Z on the proleptic Gregorian timeline.
using Seconds = std::int64_t;

struct CivilTime {
  std::int64_t year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;
  int second = 0;
};

Seconds to_seconds(const CivilTime& t);
CivilTime to_civil(Seconds s);

std::int64_t days_from_civil(std::int64_t year, int month, int day);
int days_in_month(std::int64_t year, int month);

/// Formats as "+YYYY-MM-DDTHH:MM:SSZ" (at least four year digits, explicit sign).
std::string format_timestamp(Seconds s);

/// Parses the Wikibase timestamp shape "+YYYY-MM-DDTHH:MM:SSZ". Month and day
/// 00 (used by Wikibase for coarse precisions) read as 01. Throws DatatypeError.
CivilTime parse_civil(std::string_view text);
Seconds parse_timestamp(std::string_view text);

/// Timezone offset in minutes printed as "+HH:MM".
std::string format_tz(int minutes);
int parse_tz(std::string_view text);

}  // namespace emars
