#include "metacog/counts_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <vector>

#include "metacog/error.hpp"

namespace metacog {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

std::string format_count(double v) {
    if (v == std::floor(v) && std::fabs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

CountsTable read_counts_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    // (stimulus, response, confidence or 0) -> count
    std::map<std::tuple<int, int, int>, double> cells;
    std::optional<bool> with_confidence;
    int h = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        if (!header_seen) {
            if (fields != std::vector<std::string>{"stimulus", "response", "confidence", "count"}) {
                throw ParseError(source, lineno, "expected header 'stimulus,response,confidence,count'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != 4) throw ParseError(source, lineno, "expected 4 fields");
        const auto stim = parse_stimulus(fields[0]);
        const auto resp = parse_stimulus(fields[1]);
        if (!stim) throw ParseError(source, lineno, "unknown stimulus '" + fields[0] + "'");
        if (!resp) throw ParseError(source, lineno, "unknown response '" + fields[1] + "'");

        int conf = 0;
        const bool has_conf = !fields[2].empty();
        if (with_confidence && *with_confidence != has_conf) {
            throw ParseError(source, lineno, "confidence column must be filled on every row or none");
        }
        with_confidence = has_conf;
        if (has_conf) {
            const auto& f = fields[2];
            const auto r = std::from_chars(f.data(), f.data() + f.size(), conf);
            if (r.ec != std::errc{} || r.ptr != f.data() + f.size() || conf < 1) {
                throw ParseError(source, lineno, "confidence must be an integer >= 1");
            }
            h = std::max(h, conf);
        }

        double count = 0.0;
        const auto& f = fields[3];
        const auto r = std::from_chars(f.data(), f.data() + f.size(), count);
        if (r.ec != std::errc{} || r.ptr != f.data() + f.size() || !std::isfinite(count) || count < 0.0) {
            throw ParseError(source, lineno, "count must be a non-negative number");
        }
        const auto key = std::make_tuple(static_cast<int>(*stim), static_cast<int>(*resp), conf);
        if (!cells.emplace(key, count).second) throw ParseError(source, lineno, "duplicate cell");
    }
    if (!header_seen) throw ParseError(source, 0, "empty counts file");
    if (cells.empty()) throw ParseError(source, 0, "no count rows");

    CountsTable table;
    if (*with_confidence) {
        if (h < 2) throw ParseError(source, 0, "confidence scale must have at least 2 levels");
        RatingCounts rc(h);
        for (const auto& [key, v] : cells) {
            const auto [s, rsp, c] = key;
            rc.at(static_cast<Stimulus>(s), static_cast<Response>(rsp), c) = v;
        }
        table.type1 = rc.type1();
        table.ratings = std::move(rc);
    } else {
        for (const auto& [key, v] : cells) {
            table.type1.at(static_cast<Stimulus>(std::get<0>(key)), static_cast<Response>(std::get<1>(key))) = v;
        }
    }
    if (table.type1.n_s1() <= 0.0 || table.type1.n_s2() <= 0.0) {
        throw ParseError(source, 0, "each stimulus class needs at least one trial");
    }
    return table;
}

CountsTable read_counts_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open counts file " + path.string());
    return read_counts_csv(in, path.string());
}

void write_counts_csv(std::ostream& out, const RatingCounts& counts) {
    out << "stimulus,response,confidence,count\n";
    for (auto stim : {Stimulus::S1, Stimulus::S2}) {
        for (auto resp : {Stimulus::S1, Stimulus::S2}) {
            for (int k = 1; k <= counts.h(); ++k) {
                out << to_string(stim) << ',' << to_string(resp) << ',' << k << ','
                    << format_count(counts.at(stim, resp, k)) << '\n';
            }
        }
    }
}

void write_counts_csv(std::ostream& out, const Type1Counts& counts) {
    out << "stimulus,response,confidence,count\n";
    for (auto stim : {Stimulus::S1, Stimulus::S2}) {
        for (auto resp : {Stimulus::S1, Stimulus::S2}) {
            out << to_string(stim) << ',' << to_string(resp) << ",," << format_count(counts.at(stim, resp))
                << '\n';
        }
    }
}

void write_counts_csv(const std::filesystem::path& path, const RatingCounts& counts) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write counts file " + path.string());
    write_counts_csv(out, counts);
}

}  // namespace metacog
