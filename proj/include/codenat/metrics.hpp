#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "codenat/bleu.hpp"
#include "codenat/errors.hpp"
#include "codenat/rename.hpp"
#include "codenat/snippet.hpp"

namespace codenat {

// Identifier Change Rate: renamed distinct identifiers over distinct
// identifiers in the original.
inline double icr(const CodeSnippet& original, const SubstitutionMap& map) {
    if (original.identifiers().empty())
        throw NoIdentifiers("snippet declares no identifiers");
    std::size_t renamed = 0;
    for (const auto& [old_name, new_name] : map.pairs()) {
        const auto* entry = original.identifiers().find(old_name);
        if (!entry)
            throw UnknownIdentifier("map renames unknown identifier: " + old_name);
        if (!entry->occurrences.empty()) ++renamed;
    }
    return static_cast<double>(renamed) /
           static_cast<double>(original.identifiers().size());
}

// Token Change Rate: fraction of token positions whose text changed.
inline double tcr(const CodeSnippet& original, const CodeSnippet& adversarial) {
    const auto& a = original.tokens();
    const auto& b = adversarial.tokens();
    if (a.size() != b.size())
        throw LengthMismatch("token streams differ in length");
    if (a.empty()) return 0.0;
    std::size_t changed = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].text != b[i].text) ++changed;
    return static_cast<double>(changed) / static_cast<double>(a.size());
}

// Average Code Similarity: cosine similarity of bag-of-token frequency
// vectors over the union vocabulary.
inline double acs(const CodeSnippet& original, const CodeSnippet& adversarial) {
    if (original.tokens().empty() || adversarial.tokens().empty())
        throw EmptyInput("cosine over an empty token stream");
    std::map<std::string, std::pair<double, double>> bag;
    for (const auto& t : original.tokens()) bag[t.text].first += 1.0;
    for (const auto& t : adversarial.tokens()) bag[t.text].second += 1.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [text, counts] : bag) {
        dot += counts.first * counts.second;
        na += counts.first * counts.first;
        nb += counts.second * counts.second;
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

struct EditDistance {
    long raw = 0;
    double normalized = 0.0;
};

// Levenshtein over token texts; normalized by the longer stream.
inline EditDistance aed(const CodeSnippet& original, const CodeSnippet& adversarial) {
    std::vector<std::string> a, b;
    for (const auto& t : original.tokens()) a.push_back(t.text);
    for (const auto& t : adversarial.tokens()) b.push_back(t.text);
    const std::size_t n = a.size(), m = b.size();
    if (n == 0 && m == 0) return {0, 0.0};

    std::vector<long> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<long>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<long>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            long sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    long raw = prev[m];
    return {raw, static_cast<double>(raw) / static_cast<double>(std::max(n, m))};
}

namespace detail {

inline std::vector<std::string> code_token_texts(const CodeSnippet& s) {
    std::vector<std::string> out;
    for (const auto& t : s.tokens())
        if (t.kind != TokenKind::Comment) out.push_back(t.text);
    return out;
}

inline std::vector<bool> keyword_mask(const CodeSnippet& s) {
    std::vector<bool> out;
    for (const auto& t : s.tokens())
        if (t.kind != TokenKind::Comment) out.push_back(t.kind == TokenKind::Keyword);
    return out;
}

// BLEU over token streams where n-grams touching a keyword weigh `kw_weight`
inline double weighted_token_bleu(const std::vector<std::string>& cand,
                                  const std::vector<bool>& cand_kw,
                                  const std::vector<std::string>& ref,
                                  const std::vector<bool>& ref_kw,
                                  double kw_weight) {
    if (cand.empty() || ref.empty()) return 0.0;
    std::size_t max_n = std::min<std::size_t>(4, std::min(cand.size(), ref.size()));
    (void)ref_kw;  // gram texts determine the keyword pattern on both sides
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= max_n; ++n) {
        auto weigh = [&](const std::vector<bool>& kw, std::size_t i) {
            for (std::size_t k = 0; k < n; ++k)
                if (kw[i + k]) return kw_weight;
            return 1.0;
        };
        std::map<std::vector<std::string>, double> ref_counts;
        for (std::size_t i = 0; i + n <= ref.size(); ++i) {
            std::vector<std::string> g(ref.begin() + static_cast<long>(i),
                                       ref.begin() + static_cast<long>(i + n));
            ref_counts[g] += 1.0;
        }
        double num = 0.0, den = 0.0;
        std::map<std::vector<std::string>, double> cand_counts;
        std::map<std::vector<std::string>, double> cand_weight;
        for (std::size_t i = 0; i + n <= cand.size(); ++i) {
            std::vector<std::string> g(cand.begin() + static_cast<long>(i),
                                       cand.begin() + static_cast<long>(i + n));
            cand_counts[g] += 1.0;
            cand_weight[g] = weigh(cand_kw, i);
        }
        for (const auto& [g, count] : cand_counts) {
            double w = cand_weight[g];
            den += w * count;
            auto it = ref_counts.find(g);
            if (it != ref_counts.end()) num += w * std::min(count, it->second);
        }
        if (den == 0.0 || num == 0.0) return 0.0;
        log_sum += std::log(num / den);
    }
    double precision = std::exp(log_sum / static_cast<double>(max_n));
    double bp = 1.0;
    if (cand.size() < ref.size())
        bp = std::exp(1.0 - static_cast<double>(ref.size()) /
                                static_cast<double>(cand.size()));
    return bp * precision;
}

// Serializes the subtree rooted at `node` down to `depth` levels. Identifier
// token texts are replaced by a kind tag so shapes are rename-invariant.
inline void subtree_shape(const SyntaxTree& tree, const std::vector<Token>& toks,
                          std::int32_t node, int depth, std::string& out) {
    const Node& n = tree.at(node);
    out += '(';
    out += std::to_string(static_cast<int>(n.kind));
    if (n.op_token >= 0) {
        const Token& t = toks[static_cast<std::size_t>(n.op_token)];
        out += ':';
        out += t.kind == TokenKind::Identifier ? "<id>" : t.text;
    }
    if (n.kids.empty()) {
        for (std::int32_t i = n.tok_begin; i < n.tok_end && i >= 0; ++i) {
            const Token& t = toks[static_cast<std::size_t>(i)];
            if (t.kind == TokenKind::Comment) continue;
            out += '|';
            out += t.kind == TokenKind::Identifier ? "<id>" : t.text;
        }
    } else if (depth > 1) {
        for (std::int32_t kid : n.kids) subtree_shape(tree, toks, kid, depth - 1, out);
    } else {
        out += "#";  // truncated
    }
    out += ')';
}

inline std::map<std::string, long> shape_counts(const CodeSnippet& s, int depth) {
    std::map<std::string, long> counts;
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(s.tree().nodes.size()); ++i) {
        std::string shape;
        subtree_shape(s.tree(), s.tokens(), i, depth, shape);
        counts[shape]++;
    }
    return counts;
}

}  // namespace detail

// Simplified CodeBLEU: plain token BLEU, keyword-weighted token BLEU and a
// depth-3 subtree match ratio, each worth a third. The dataflow component is
// omitted and its weight redistributed across the other three.
inline double codebleu_simplified(const CodeSnippet& original,
                                  const CodeSnippet& adversarial,
                                  double keyword_weight = 5.0) {
    auto ref = detail::code_token_texts(original);
    auto cand = detail::code_token_texts(adversarial);
    if (ref.empty() || cand.empty()) throw EmptyInput("codebleu over empty stream");

    std::string cand_text, ref_text;
    for (const auto& w : cand) cand_text += w + ' ';
    for (const auto& w : ref) ref_text += w + ' ';
    double plain = bleu4(cand_text, ref_text);

    double weighted = detail::weighted_token_bleu(
        cand, detail::keyword_mask(adversarial), ref, detail::keyword_mask(original),
        keyword_weight);

    auto shapes_o = detail::shape_counts(original, 3);
    auto shapes_a = detail::shape_counts(adversarial, 3);
    long matched = 0, total = 0;
    for (const auto& [shape, count] : shapes_o) {
        total += count;
        auto it = shapes_a.find(shape);
        if (it != shapes_a.end()) matched += std::min(count, it->second);
    }
    double ast = total == 0 ? 0.0
                            : static_cast<double>(matched) / static_cast<double>(total);

    return (plain + weighted + ast) / 3.0;
}

struct MetricsReport {
    double icr = 0.0;
    double tcr = 0.0;
    double acs = 0.0;
    long aed_raw = 0;
    double aed_normalized = 0.0;
    double ppl = 0.0;       // filled in by callers that trained an n-gram model
    double codebleu = 0.0;
};

// All per-pair metrics except perplexity, which needs a trained model.
inline MetricsReport pair_metrics(const CodeSnippet& original,
                                  const CodeSnippet& adversarial,
                                  const SubstitutionMap& map) {
    MetricsReport r;
    r.icr = icr(original, map);
    r.tcr = tcr(original, adversarial);
    r.acs = acs(original, adversarial);
    auto ed = aed(original, adversarial);
    r.aed_raw = ed.raw;
    r.aed_normalized = ed.normalized;
    r.codebleu = codebleu_simplified(original, adversarial);
    return r;
}

}  // namespace codenat
