#include "metacog/harness/depletion.hpp"

#include <cctype>
#include <random>
#include <stdexcept>

#include "metacog/rng.hpp"

namespace metacog::harness {

namespace {

bool is_word_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '\'';
}

bool matches_at(std::string_view text, std::size_t pos, std::string_view word) {
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[pos + i])) != std::tolower(static_cast<unsigned char>(word[i]))) {
            return false;
        }
    }
    return true;
}

std::size_t token_index_at(std::string_view text, std::size_t pos) {
    std::size_t tokens = 0;
    bool in_token = false;
    for (std::size_t i = 0; i < pos; ++i) {
        const bool space = std::isspace(static_cast<unsigned char>(text[i])) != 0;
        if (!space && !in_token) ++tokens;
        in_token = !space;
    }
    // pos starts a token unless it continues one (e.g. "(the").
    return in_token ? tokens - 1 : tokens;
}

}  // namespace

std::vector<std::size_t> find_word_occurrences(std::string_view text, std::string_view word) {
    std::vector<std::size_t> out;
    if (word.empty() || word.size() > text.size()) return out;
    for (std::size_t pos = 0; pos + word.size() <= text.size(); ++pos) {
        if (!matches_at(text, pos, word)) continue;
        const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
        const std::size_t end = pos + word.size();
        const bool right_ok = end == text.size() || !is_word_char(text[end]);
        if (left_ok && right_ok) out.push_back(pos);
    }
    return out;
}

std::pair<std::string, std::size_t> delete_occurrence(std::string_view text, std::string_view word,
                                                      std::size_t occurrence) {
    const auto hits = find_word_occurrences(text, word);
    if (occurrence >= hits.size()) throw std::out_of_range("delete_occurrence: no such occurrence");
    const std::size_t pos = hits[occurrence];
    std::size_t begin = pos;
    std::size_t end = pos + word.size();
    if (end < text.size() && text[end] == ' ') {
        ++end;
    } else if (begin > 0 && text[begin - 1] == ' ') {
        --begin;
    }
    std::string out(text.substr(0, begin));
    out.append(text.substr(end));
    return {out, token_index_at(text, pos)};
}

std::vector<DepletionItem> make_depletion_corpus(const std::vector<std::string>& sentences,
                                                 std::string_view target_word, double p_delete,
                                                 std::uint64_t seed) {
    if (!(p_delete >= 0.0 && p_delete <= 1.0)) throw std::invalid_argument("p_delete must lie in [0, 1]");
    if (sentences.empty()) throw std::invalid_argument("depletion corpus: no input sentences");
    std::vector<DepletionItem> out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto& s = sentences[i];
        const auto hits = find_word_occurrences(s, target_word);
        if (hits.empty()) continue;
        DepletionItem item;
        item.original_text = s;
        item.presented_text = s;
        item.source_index = i;
        item.rng_seed = derive_seed(seed, i);
        Rng rng(item.rng_seed);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        if (unif(rng) < p_delete) {
            std::uniform_int_distribution<std::size_t> pick(0, hits.size() - 1);
            auto [text, token] = delete_occurrence(s, target_word, pick(rng));
            item.presented_text = std::move(text);
            item.deleted = true;
            item.deleted_position = token;
        }
        out.push_back(std::move(item));
    }
    if (out.empty()) {
        throw std::invalid_argument("depletion corpus: no sentence contains '" + std::string(target_word) + "'");
    }
    return out;
}

}  // namespace metacog::harness
