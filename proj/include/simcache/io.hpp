#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "simcache/catalog.hpp"

namespace simcache {

/// Shortest decimal text that round-trips the double exactly (17 significant
/// digits).
std::string format_double(double value);

/// Strict double parse; rejects trailing garbage.
double parse_double(const std::string& text);

/// Catalog CSV: header `item_id,dim_0,...,dim_{D-1},weight`, ids must be a
/// permutation of 0..N-1. Weights are normalized when the catalog is built.
Catalog load_catalog(const std::filesystem::path& path);
void save_catalog(const std::filesystem::path& path, const Catalog& catalog);

/// Trace-count CSV: `item_id,count`.
std::vector<std::pair<ItemId, std::int64_t>> load_trace_counts(
    const std::filesystem::path& path);

/// Replay file: one item_id per line.
std::vector<ItemId> load_replay(const std::filesystem::path& path);

}  // namespace simcache
