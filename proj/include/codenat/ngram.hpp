#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "codenat/errors.hpp"
#include "codenat/snippet.hpp"
#include "codenat/subtoken.hpp"

namespace codenat {

namespace detail {

// Subtoken stream of a snippet: identifiers split into lowercased subtokens,
// every other non-comment token contributes its own text.
inline std::vector<std::string> subtoken_stream(const CodeSnippet& s) {
    std::vector<std::string> out;
    for (const auto& t : s.tokens()) {
        if (t.kind == TokenKind::Comment) continue;
        if (t.kind == TokenKind::Identifier) {
            for (auto& sub : split_subtokens(t.text)) out.push_back(std::move(sub));
        } else {
            out.push_back(t.text);
        }
    }
    return out;
}

}  // namespace detail

// Add-one smoothed n-gram model over code subtoken streams. Out-of-vocabulary
// symbols map onto the reserved "<unk>" entry, so conditional probabilities
// stay a proper distribution over the vocabulary for every context.
class NgramModel {
public:
    static constexpr const char* kUnknown = "<unk>";
    static constexpr const char* kStart = "<s>";

    NgramModel() = default;

    int order() const { return order_; }
    std::size_t vocabulary_size() const { return vocab_.size(); }
    double smoothing() const { return smoothing_; }

    // Uniform model: no counts, just a vocabulary. Perplexity of any stream
    // equals the vocabulary size exactly.
    static NgramModel uniform(const std::set<std::string>& vocabulary, int order = 3) {
        NgramModel m;
        m.order_ = order;
        m.vocab_ = vocabulary;
        m.vocab_.insert(kUnknown);
        return m;
    }

    static NgramModel train_streams(const std::vector<std::vector<std::string>>& streams,
                                    int order = 3, double smoothing = 1.0) {
        if (order < 1) throw ConfigError("n-gram order must be >= 1");
        NgramModel m;
        m.order_ = order;
        m.smoothing_ = smoothing;
        m.vocab_.insert(kUnknown);
        for (const auto& stream : streams) {
            for (const auto& w : stream) m.vocab_.insert(w);
            std::vector<std::string> padded(static_cast<std::size_t>(order - 1), kStart);
            padded.insert(padded.end(), stream.begin(), stream.end());
            for (std::size_t i = static_cast<std::size_t>(order - 1); i < padded.size();
                 ++i) {
                std::string ctx = m.context_key(padded, i);
                m.counts_[ctx][padded[i]]++;
                m.totals_[ctx]++;
            }
        }
        return m;
    }

    static NgramModel train(const std::vector<CodeSnippet>& corpus, int order = 3,
                            double smoothing = 1.0) {
        std::vector<std::vector<std::string>> streams;
        streams.reserve(corpus.size());
        for (const auto& snip : corpus) streams.push_back(detail::subtoken_stream(snip));
        return train_streams(streams, order, smoothing);
    }

    // p(word | context), add-one smoothed over the vocabulary
    double probability(const std::string& ctx, const std::string& word) const {
        const std::string w = vocab_.count(word) ? word : kUnknown;
        double v = static_cast<double>(vocab_.size());
        double num = smoothing_, den = smoothing_ * v;
        auto it = counts_.find(ctx);
        if (it != counts_.end()) {
            auto wt = it->second.find(w);
            if (wt != it->second.end()) num += static_cast<double>(wt->second);
            den += static_cast<double>(totals_.at(ctx));
        }
        return num / den;
    }

    double perplexity(const CodeSnippet& snippet) const {
        auto stream = detail::subtoken_stream(snippet);
        return perplexity(stream);
    }

    double perplexity(const std::vector<std::string>& stream) const {
        if (stream.empty()) throw EmptyStream("perplexity of an empty stream");
        std::vector<std::string> padded(static_cast<std::size_t>(order_ - 1), kStart);
        for (const auto& w : stream)
            padded.push_back(vocab_.count(w) ? w : kUnknown);
        double log_sum = 0.0;
        std::size_t t = 0;
        for (std::size_t i = static_cast<std::size_t>(order_ - 1); i < padded.size();
             ++i, ++t) {
            log_sum += std::log(probability(context_key(padded, i), padded[i]));
        }
        return std::exp(-log_sum / static_cast<double>(t));
    }

private:
    std::string context_key(const std::vector<std::string>& padded,
                            std::size_t i) const {
        std::string ctx;
        for (std::size_t k = i - static_cast<std::size_t>(order_ - 1); k < i; ++k) {
            ctx += padded[k];
            ctx += '\x1f';
        }
        return ctx;
    }

    int order_ = 3;
    double smoothing_ = 1.0;
    std::set<std::string> vocab_;
    std::map<std::string, std::map<std::string, long>> counts_;
    std::map<std::string, long> totals_;
};

}  // namespace codenat
