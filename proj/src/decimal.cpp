#include "emars/decimal.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "emars/error.hpp"

namespace emars {

namespace {

// Compares magnitudes of two canonical digit strings with exponents.
std::strong_ordering compare_magnitude(const std::string& da, std::int64_t ea, const std::string& db,
                                       std::int64_t eb) {
  const std::int64_t lead_a = static_cast<std::int64_t>(da.size()) + ea;
  const std::int64_t lead_b = static_cast<std::int64_t>(db.size()) + eb;
  if (lead_a != lead_b) return lead_a <=> lead_b;
  const std::size_t n = std::max(da.size(), db.size());
  for (std::size_t i = 0; i < n; ++i) {
    const char ca = i < da.size() ? da[i] : '0';
    const char cb = i < db.size() ? db[i] : '0';
    if (ca != cb) return ca <=> cb;
  }
  return std::strong_ordering::equal;
}

}  // namespace

Decimal::Decimal(std::int64_t value) {
  negative_ = value < 0;
  // Avoid overflow on INT64_MIN by working on the unsigned magnitude.
  std::uint64_t magnitude = negative_ ? 0 - static_cast<std::uint64_t>(value) : static_cast<std::uint64_t>(value);
  digits_ = std::to_string(magnitude);
  exponent_ = 0;
  canonicalize();
}

Decimal Decimal::parse(std::string_view text) {
  auto fail = [&] { throw DatatypeError("invalid decimal literal '" + std::string(text) + "'"); };
  std::size_t i = 0;
  Decimal d;
  d.negative_ = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    d.negative_ = text[i] == '-';
    ++i;
  }
  std::string digits;
  std::int64_t exponent = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) fail();
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') fail();
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    if (i >= text.size()) fail();
    std::int64_t e = 0;
    for (; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) fail();
      e = e * 10 + (text[i] - '0');
      if (e > 1'000'000'000) fail();
    }
    exponent += exp_negative ? -e : e;
  }
  d.digits_ = std::move(digits);
  d.exponent_ = exponent;
  d.canonicalize();
  return d;
}

void Decimal::canonicalize() {
  const auto first = digits_.find_first_not_of('0');
  if (first == std::string::npos) {
    digits_ = "0";
    exponent_ = 0;
    negative_ = false;
    return;
  }
  digits_.erase(0, first);
  const auto last = digits_.find_last_not_of('0');
  exponent_ += static_cast<std::int64_t>(digits_.size() - 1 - last);
  digits_.erase(last + 1);
}

std::string Decimal::to_string() const {
  std::string out;
  if (negative_) out.push_back('-');
  if (exponent_ >= 0) {
    out += digits_;
    if (!is_zero()) out.append(static_cast<std::size_t>(exponent_), '0');
    return out;
  }
  const std::int64_t int_len = static_cast<std::int64_t>(digits_.size()) + exponent_;
  if (int_len > 0) {
    out += digits_.substr(0, static_cast<std::size_t>(int_len));
    out.push_back('.');
    out += digits_.substr(static_cast<std::size_t>(int_len));
  } else {
    out += "0.";
    out.append(static_cast<std::size_t>(-int_len), '0');
    out += digits_;
  }
  return out;
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  if (a.negative_ != b.negative_) return a.negative_ ? std::strong_ordering::less : std::strong_ordering::greater;
  if (a.is_zero() || b.is_zero()) {
    if (a.is_zero() && b.is_zero()) return std::strong_ordering::equal;
    if (a.is_zero()) return b.negative_ ? std::strong_ordering::greater : std::strong_ordering::less;
    return a.negative_ ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  const auto mag = compare_magnitude(a.digits_, a.exponent_, b.digits_, b.exponent_);
  if (a.negative_) return 0 <=> mag;
  return mag;
}

std::size_t Decimal::hash() const {
  std::size_t h = std::hash<std::string>{}(digits_);
  h ^= std::hash<std::int64_t>{}(exponent_) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return negative_ ? ~h : h;
}

}  // namespace emars
