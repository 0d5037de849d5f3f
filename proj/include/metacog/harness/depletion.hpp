#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metacog::harness {

struct DepletionItem {
    std::string original_text;
    std::string presented_text;
    bool deleted = false;
    std::optional<std::size_t> deleted_position;  ///< whitespace-token index of the removed word
    std::uint64_t rng_seed = 0;                    ///< per-item seed the draws came from
    std::size_t source_index = 0;                  ///< position in the input sequence
};

/// Byte offsets of standalone, case-insensitive occurrences of `word`
/// (neighbours must not be ASCII letters, digits or apostrophes).
std::vector<std::size_t> find_word_occurrences(std::string_view text, std::string_view word);

/// Removes occurrence `occurrence` of `word` together with one adjacent
/// space. Returns the new text and the token index of the removed word.
std::pair<std::string, std::size_t> delete_occurrence(std::string_view text, std::string_view word,
                                                      std::size_t occurrence);

/// Keeps sentences containing `target_word`; each is independently depleted
/// with probability p_delete, choosing one occurrence uniformly.
/// Throws std::invalid_argument if no sentence qualifies or p is outside [0, 1].
std::vector<DepletionItem> make_depletion_corpus(const std::vector<std::string>& sentences,
                                                 std::string_view target_word, double p_delete,
                                                 std::uint64_t seed);

}  // namespace metacog::harness
