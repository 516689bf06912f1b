#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qjumps/app/config.hpp"

namespace qjumps::app {

// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& data);
// Hex digest of the canonical configuration text, output location excluded.
std::string config_hash(const RunConfig& c);

// Scientific notation with ten significant digits; "nan"/"inf" spelled out.
std::string format_value(double v);

// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::string& path, const std::string& content);

// Header row, then a "# config_hash=<hash>" comment, then the rows.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::string& hash);

}  // namespace qjumps::app
