#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "emars/datavalue.hpp"

// Canonical textual forms of data values, shared by rule files, the query
// syntax and human-readable reports:
//
//   time(main=+2005-01-01T00:00:00Z, earliest=..., latest=..., tz=+00:00, calendar=Q1985727)
//   qty(5, 4, 6, unit=Q11573)
//   geo(lat=52.5, lon=13.4, lat_min=..., lat_max=..., lon_min=..., lon_max=..., globe=Q2)
//   multi(en="cat", fr="chat")
//   "text"   "text"@fr   <http://example.org/iri>
//
// EMPTY sentinels print as time(empty), qty(empty, unit=U), geo(empty, globe=G).
namespace emars {

std::string format_value(const DataValue& v);

/// Parses exactly one literal spanning the whole of `text`. Throws
/// DatatypeError on malformed input.
DataValue parse_value(std::string_view text);

/// Length of the literal starting at text[pos], or 0 when no literal starts
/// there. Does not validate the contents.
std::size_t scan_value(std::string_view text, std::size_t pos);

std::string quote_string(std::string_view s);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double d);

}  // namespace emars
