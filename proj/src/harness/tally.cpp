#include "metacog/harness/tally.hpp"

#include <stdexcept>

namespace metacog::harness {

namespace {

void check_uniform(const std::vector<TrialRecord>& records) {
    if (records.empty()) return;
    const auto& first = records.front();
    for (const auto& r : records) {
        if (r.task != first.task || r.risk != first.risk || r.mode != first.mode) {
            throw std::invalid_argument("tally: records mix run metadata (task, risk, mode)");
        }
    }
}

}  // namespace

RatingCounts tally(const std::vector<TrialRecord>& records, int h) {
    check_uniform(records);
    RatingCounts counts(h);
    std::size_t used = 0;
    for (const auto& r : records) {
        if (!r.valid()) continue;
        if (!r.confidence) throw std::invalid_argument("tally: valid record without confidence (type1_only run?)");
        counts.at(r.true_label, *r.decision, *r.confidence) += 1.0;
        ++used;
    }
    if (used == 0) throw std::invalid_argument("empty tally");
    return counts;
}

Type1Counts tally_type1(const std::vector<TrialRecord>& records) {
    check_uniform(records);
    Type1Counts counts;
    std::size_t used = 0;
    for (const auto& r : records) {
        if (!r.valid()) continue;
        counts.at(r.true_label, *r.decision) += 1.0;
        ++used;
    }
    if (used == 0) throw std::invalid_argument("empty tally");
    return counts;
}

}  // namespace metacog::harness
