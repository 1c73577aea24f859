#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace emars {

/// Arbitrary-precision decimal number used for quantity amounts and bounds.
///
/// Stored as sign, significant digits and a base-10 exponent. The
/// representation is canonical (no leading or trailing zeros in the digit
/// string, zero is always non-negative), so structural equality is numeric
/// equality. Only construction, comparison and printing are provided.
class Decimal {
 public:
  Decimal() = default;
  explicit Decimal(std::int64_t value);

  /// Accepts optional sign, digits with an optional fraction and an optional
  /// exponent, e.g. "+1.50", "-0.5", "12e-3". Throws DatatypeError otherwise.
  static Decimal parse(std::string_view text);

  /// Plain positional notation without a leading '+', e.g. "1.5", "-120".
  std::string to_string() const;

  bool is_zero() const { return digits_ == "0"; }
  bool is_negative() const { return negative_; }

  friend bool operator==(const Decimal&, const Decimal&) = default;
  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);

  std::size_t hash() const;

 private:
  void canonicalize();

  bool negative_ = false;
  std::string digits_ = "0";
  std::int64_t exponent_ = 0;
};

}  // namespace emars
