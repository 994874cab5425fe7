#pragma once

#include "nlcp/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nlcp {

// CSV layout: header `id,y_hat,u_hat,label_clean,label_noisy`, one record per
// line, an empty cell for an absent label. Numbers use the shortest
// representation that round-trips.
inline constexpr const char* kCsvHeader = "id,y_hat,u_hat,label_clean,label_noisy";

void write_csv(std::ostream& out, const std::vector<PredictionRecord>& records);
void write_csv(const std::filesystem::path& path, const std::vector<PredictionRecord>& records);

/// Parses and validates every record. Throws InvalidArgument on malformed
/// content (with the line number), InvalidRecord on rejected records, Io when
/// the file cannot be opened.
std::vector<PredictionRecord> read_csv(std::istream& in);
std::vector<PredictionRecord> read_csv(const std::filesystem::path& path);

/// Shortest round-trip text for a double.
std::string format_double(double value);

} // namespace nlcp
