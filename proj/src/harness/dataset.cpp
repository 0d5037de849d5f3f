#include "metacog/harness/dataset.hpp"

#include <algorithm>
#include <fstream>

#include "metacog/csv.hpp"
#include "metacog/error.hpp"

namespace metacog::harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

}  // namespace

std::vector<DatasetItem> load_dataset(std::istream& in, char delimiter, const std::string& text_field,
                                      const std::string& label_field, const std::string& source) {
    std::vector<std::string> fields;
    std::size_t lineno = 0;
    if (!read_csv_record(in, delimiter, fields, lineno, source)) throw ParseError(source, 0, "empty dataset");
    for (auto& f : fields) f = trim(f);

    auto find_column = [&](const std::string& name) -> std::ptrdiff_t {
        const auto it = std::find(fields.begin(), fields.end(), name);
        return it == fields.end() ? -1 : std::distance(fields.begin(), it);
    };
    std::ptrdiff_t text_col = -1;
    if (!text_field.empty()) {
        text_col = find_column(text_field);
    } else {
        for (const char* name : {"sentence", "text"}) {
            if ((text_col = find_column(name)) >= 0) break;
        }
    }
    if (text_col < 0) throw ParseError(source, 1, "no text column ('" + (text_field.empty() ? std::string("sentence") : text_field) + "')");
    const auto label_col = find_column(label_field);
    if (label_col < 0) throw ParseError(source, 1, "no label column '" + label_field + "'");
    const auto needed = static_cast<std::size_t>(std::max(text_col, label_col)) + 1;

    std::vector<DatasetItem> items;
    while (true) {
        const std::size_t start_line = lineno + 1;
        if (!read_csv_record(in, delimiter, fields, lineno, source)) break;
        if (fields.size() == 1 && trim(fields[0]).empty()) continue;
        if (fields.size() < needed) throw ParseError(source, start_line, "too few fields");
        const std::string label = trim(fields[static_cast<std::size_t>(label_col)]);
        DatasetItem item;
        if (label == "0") {
            item.label = Stimulus::S1;
        } else if (label == "1") {
            item.label = Stimulus::S2;
        } else {
            throw ParseError(source, start_line, "unknown label '" + label + "' (expected 0 or 1)");
        }
        item.text = fields[static_cast<std::size_t>(text_col)];
        items.push_back(std::move(item));
    }
    return items;
}

std::vector<DatasetItem> load_dataset(const TaskSpec& spec) {
    std::ifstream in(spec.dataset_path);
    if (!in) throw metacog::IoError("cannot open dataset " + spec.dataset_path.string());
    const char delim = spec.dataset_path.extension() == ".tsv" ? '\t' : ',';
    return load_dataset(in, delim, spec.text_field, spec.label_field, spec.dataset_path.string());
}

}  // namespace metacog::harness
