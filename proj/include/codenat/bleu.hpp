#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace codenat {

namespace detail {

inline std::vector<std::string> whitespace_split(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

inline std::map<std::vector<std::string>, int> ngram_counts(
    const std::vector<std::string>& words, std::size_t n) {
    std::map<std::vector<std::string>, int> counts;
    if (words.size() < n) return counts;
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
        counts[std::vector<std::string>(words.begin() + static_cast<long>(i),
                                        words.begin() + static_cast<long>(i + n))]++;
    }
    return counts;
}

}  // namespace detail

// BLEU with uniform weights over 1..4-grams, brevity penalty, whitespace
// tokenization and no smoothing. The order adapts down to
// min(4, |candidate|, |reference|) so identical short strings score 1.0;
// any zero modified precision zeroes the whole score.
inline double bleu4(const std::string& candidate, const std::string& reference) {
    auto cand = detail::whitespace_split(candidate);
    auto ref = detail::whitespace_split(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    std::size_t max_n = std::min<std::size_t>(4, std::min(cand.size(), ref.size()));
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= max_n; ++n) {
        auto cc = detail::ngram_counts(cand, n);
        auto rc = detail::ngram_counts(ref, n);
        long clipped = 0, total = 0;
        for (const auto& [gram, count] : cc) {
            total += count;
            auto it = rc.find(gram);
            if (it != rc.end()) clipped += std::min(count, it->second);
        }
        if (total == 0 || clipped == 0) return 0.0;
        log_sum += std::log(static_cast<double>(clipped) / static_cast<double>(total));
    }
    double precision = std::exp(log_sum / static_cast<double>(max_n));

    double bp = 1.0;
    if (cand.size() < ref.size()) {
        bp = std::exp(1.0 - static_cast<double>(ref.size()) /
                                static_cast<double>(cand.size()));
    }
    return bp * precision;
}

}  // namespace codenat
