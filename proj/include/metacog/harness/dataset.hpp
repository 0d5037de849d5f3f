#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "metacog/harness/task.hpp"

namespace metacog::harness {

struct DatasetItem {
    std::string text;
    Stimulus label = Stimulus::S1;
};

/// Reads a delimited file with a header row: tab-separated for `.tsv`,
/// RFC 4180 comma-separated otherwise. Labels must be 0 or 1.
/// Throws metacog::ParseError naming the offending line.
std::vector<DatasetItem> load_dataset(const TaskSpec& spec);

std::vector<DatasetItem> load_dataset(std::istream& in, char delimiter, const std::string& text_field,
                                      const std::string& label_field, const std::string& source);

}  // namespace metacog::harness
