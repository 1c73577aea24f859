#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "emars/store.hpp"

// JSON-lines encodings of facts and store snapshots.
//
// Fact record: {"p": "P26", "args": ["Q1", "Q2"], "attrs": {"P580": [<value>]}}
// Entities are plain strings ("Q1", "P26", "_:sk0", "#rank"); data values are
// objects tagged with "type" (see value_to_json).
//
// Snapshot: a header record {"format": "emars-snapshot", "version": 1, ...},
// the facts in canonical order, then provenance records referring to facts by
// their position in that order. Equal stores give byte-identical snapshots.
namespace emars {

inline constexpr const char* kSnapshotFormat = "emars-snapshot";
inline constexpr int kSnapshotVersion = 1;

nlohmann::json value_to_json(const DataValue& v);
DataValue value_from_json(const nlohmann::json& j);

nlohmann::json term_to_json(const Term& t);
Term term_from_json(const nlohmann::json& j);

nlohmann::json fact_to_json(const Fact& f);
/// Throws FormatError on malformed records.
Fact fact_from_json(const nlohmann::json& j);

/// Reads a fact file (one record per line, blank lines and lines starting
/// with '#' skipped) into the store as base facts. Returns the number of
/// records read.
std::size_t read_facts(std::istream& in, Store& store);
void write_facts(std::ostream& out, const std::vector<Fact>& facts);

void write_snapshot(const Store& store, std::ostream& out);
/// Throws FormatError on a missing or mismatched header.
Store read_snapshot(std::istream& in);

void save_snapshot(const Store& store, const std::string& path);
Store load_snapshot(const std::string& path);

}  // namespace emars
