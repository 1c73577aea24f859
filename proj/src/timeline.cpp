#include "emars/timeline.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

#include "emars/error.hpp"

namespace emars {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

// Hinnant's days_from_civil, widened to 64-bit years.
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
  y -= m <= 2 ? 1 : 0;
  const std::int64_t era = floor_div(y, 400);
  const std::int64_t yoe = y - era * 400;
  const std::int64_t mp = m > 2 ? m - 3 : m + 9;
  const std::int64_t doy = (153 * mp + 2) / 5 + d - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

int days_in_month(std::int64_t year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return kDays[month - 1];
}

Seconds to_seconds(const CivilTime& t) {
  return days_from_civil(t.year, t.month, t.day) * kSecondsPerDay + t.hour * 3600 + t.minute * 60 + t.second;
}

CivilTime to_civil(Seconds s) {
  std::int64_t z = floor_div(s, kSecondsPerDay);
  std::int64_t rem = s - z * kSecondsPerDay;
  z += 719468;
  const std::int64_t era = floor_div(z, 146097);
  const std::int64_t doe = z - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  CivilTime t;
  t.day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  t.month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
  t.year = yoe + era * 400 + (t.month <= 2 ? 1 : 0);
  t.hour = static_cast<int>(rem / 3600);
  t.minute = static_cast<int>((rem % 3600) / 60);
  t.second = static_cast<int>(rem % 60);
  return t;
}

std::string format_timestamp(Seconds s) {
  const CivilTime t = to_civil(s);
  char buf[64];
  const long long year = t.year < 0 ? -t.year : t.year;
  std::snprintf(buf, sizeof buf, "%c%04lld-%02d-%02dT%02d:%02d:%02dZ", t.year < 0 ? '-' : '+', year, t.month, t.day,
                t.hour, t.minute, t.second);
  return buf;
}

CivilTime parse_civil(std::string_view text) {
  auto fail = [&] { throw DatatypeError("invalid timestamp '" + std::string(text) + "'"); };
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  auto read_number = [&](std::size_t max_digits) -> std::int64_t {
    std::size_t start = i;
    std::int64_t v = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])) && i - start < max_digits) {
      v = v * 10 + (text[i] - '0');
      ++i;
    }
    if (i == start) fail();
    return v;
  };
  auto expect = [&](char c) {
    if (i >= text.size() || text[i] != c) fail();
    ++i;
  };
  CivilTime t;
  t.year = read_number(16);
  if (negative) t.year = -t.year;
  expect('-');
  t.month = static_cast<int>(read_number(2));
  expect('-');
  t.day = static_cast<int>(read_number(2));
  if (i < text.size() && text[i] == 'T') {
    ++i;
    t.hour = static_cast<int>(read_number(2));
    expect(':');
    t.minute = static_cast<int>(read_number(2));
    expect(':');
    t.second = static_cast<int>(read_number(2));
  }
  if (i < text.size() && text[i] == 'Z') ++i;
  if (i != text.size()) fail();
  if (t.month == 0) t.month = 1;
  if (t.day == 0) t.day = 1;
  if (t.month > 12 || t.hour > 23 || t.minute > 59 || t.second > 60) fail();
  if (t.day > days_in_month(t.year, t.month)) fail();
  return t;
}

Seconds parse_timestamp(std::string_view text) { return to_seconds(parse_civil(text)); }

std::string format_tz(int minutes) {
  char buf[16];
  const int m = minutes < 0 ? -minutes : minutes;
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", minutes < 0 ? '-' : '+', m / 60, m % 60);
  return buf;
}

int parse_tz(std::string_view text) {
  auto fail = [&] { throw DatatypeError("invalid timezone offset '" + std::string(text) + "'"); };
  if (text.size() != 6 || (text[0] != '+' && text[0] != '-') || text[3] != ':') fail();
  for (std::size_t i : {1u, 2u, 4u, 5u}) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) fail();
  }
  const int h = (text[1] - '0') * 10 + (text[2] - '0');
  const int m = (text[4] - '0') * 10 + (text[5] - '0');
  const int total = h * 60 + m;
  return text[0] == '-' ? -total : total;
}

}  // namespace emars
