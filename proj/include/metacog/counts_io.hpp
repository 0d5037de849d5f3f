#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "metacog/sdt.hpp"

namespace metacog {

/// Contents of a counts CSV (`stimulus,response,confidence,count`).
/// Rows with an empty confidence column make a type-1-only file.
struct CountsTable {
    Type1Counts type1;
    std::optional<RatingCounts> ratings;  ///< present when confidence is given
};

CountsTable read_counts_csv(std::istream& in, const std::string& source = "<stream>");
CountsTable read_counts_csv(const std::filesystem::path& path);

void write_counts_csv(std::ostream& out, const RatingCounts& counts);
void write_counts_csv(std::ostream& out, const Type1Counts& counts);
void write_counts_csv(const std::filesystem::path& path, const RatingCounts& counts);

/// Shortest round-tripping text for a count (integers without a fraction).
std::string format_count(double v);

}  // namespace metacog
