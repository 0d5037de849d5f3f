#pragma once

#include <vector>

#include "metacog/harness/trial_log.hpp"
#include "metacog/sdt.hpp"

namespace metacog::harness {

/// RatingCounts over valid records (true label -> stimulus, decision ->
/// response). Throws std::invalid_argument on mixed (task, risk, mode) or
/// when no record is valid ("empty tally").
RatingCounts tally(const std::vector<TrialRecord>& records, int h = 5);

/// Type 1 tallies; usable for either prompt mode.
Type1Counts tally_type1(const std::vector<TrialRecord>& records);

}  // namespace metacog::harness
