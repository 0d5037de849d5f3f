#include "metacog/csv.hpp"

#include "metacog/error.hpp"

namespace metacog {

// Splits one record; quoted fields may contain delimiters, doubled quotes and
// newlines, so more physical lines are pulled from `in` as needed.
bool read_csv_record(std::istream& in, char delim, std::vector<std::string>& fields, std::size_t& lineno,
                     const std::string& source) {
    fields.clear();
    std::string line;
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (delim == '\t') {
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find('\t', start);
            fields.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        return true;
    }
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i == line.size()) {
            if (quoted) {
                std::string next;
                if (!std::getline(in, next)) throw ParseError(source, lineno, "unterminated quoted field");
                ++lineno;
                if (!next.empty() && next.back() == '\r') next.pop_back();
                field += '\n';
                line = std::move(next);
                i = 0;
                continue;
            }
            fields.push_back(std::move(field));
            return true;
        }
        const char ch = line[i++];
        if (quoted) {
            if (ch == '"') {
                if (i < line.size() && line[i] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && field.empty()) {
            quoted = true;
        } else if (ch == delim) {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += ch;
        }
    }
}

std::string csv_field(std::string_view value) {
    if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
    std::string out = "\"";
    for (const char ch : value) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

}  // namespace metacog
