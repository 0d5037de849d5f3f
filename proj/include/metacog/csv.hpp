#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace metacog {

/// Reads one record into `fields`. With ',' as delimiter, RFC 4180 quoting is
/// honoured (quoted fields may span lines); '\t' splits without quoting.
/// Returns false at end of input; throws ParseError on an unterminated quote.
bool read_csv_record(std::istream& in, char delim, std::vector<std::string>& fields, std::size_t& lineno,
                     const std::string& source);

/// Quotes a field for comma-separated output when needed.
std::string csv_field(std::string_view value);

}  // namespace metacog
