#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "codenat/lang.hpp"
#include "codenat/snippet.hpp"
#include "codenat/subtoken.hpp"

namespace codenat {

// Generates replacement names for one identifier. Implementations must only
// emit names that satisfy the identifier rule, are no keyword in `lang`, and
// differ from the original; candidate lists are sorted and duplicate-free so
// every consumer sees a deterministic order.
class CandidateProvider {
public:
    virtual ~CandidateProvider() = default;
    virtual std::vector<std::string> candidates(const std::string& name,
                                                IdentKind kind, Lang lang) const = 0;

protected:
    static std::vector<std::string> finalize(std::set<std::string> pool,
                                             const std::string& original, Lang lang) {
        std::vector<std::string> out;
        for (const auto& c : pool) {
            if (c == original) continue;
            if (!is_valid_identifier(c)) continue;
            if (is_keyword(c, lang)) continue;
            out.push_back(c);
        }
        return out;  // std::set iteration is already sorted
    }
};

namespace detail {

// compact dictionary of frequent code subtokens, sorted
inline const std::vector<std::string>& subtoken_dictionary() {
    static const std::vector<std::string> words = {
        "acc",    "arg",    "base",  "buf",    "cache",  "chunk", "col",
        "count",  "cur",    "data",  "dest",   "elem",   "end",   "entry",
        "field",  "file",   "flag",  "head",   "idx",    "info",  "item",
        "iter",   "key",    "label", "left",   "len",    "line",  "list",
        "map",    "mark",   "max",   "min",    "node",   "num",   "obj",
        "out",    "pos",    "prev",  "ptr",    "queue",  "rec",   "res",
        "right",  "row",    "set",   "size",   "src",    "stack", "state",
        "step",   "sum",    "tail",  "target", "temp",   "text",  "tmp",
        "top",    "total",  "val",   "vec",    "word",
    };
    return words;
}

inline std::string join_style(const std::vector<std::string>& parts, bool snake) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i == 0) {
            out = parts[0];
        } else if (snake) {
            out += "_" + parts[i];
        } else {
            out += static_cast<char>(
                std::toupper(static_cast<unsigned char>(parts[i][0])));
            out += parts[i].substr(1);
        }
    }
    return out;
}

}  // namespace detail

// Swaps one subtoken of the name for an alphabetic neighbor from the
// dictionary, preserving the original's camelCase/snake_case convention.
class SubwordMutationProvider : public CandidateProvider {
public:
    explicit SubwordMutationProvider(int neighbors_per_slot = 6)
        : neighbors_(neighbors_per_slot) {}

    std::vector<std::string> candidates(const std::string& name, IdentKind,
                                        Lang lang) const override {
        auto parts = split_subtokens(name);
        if (parts.empty()) return {};
        bool snake = name.find('_') != std::string::npos;
        const auto& dict = detail::subtoken_dictionary();
        std::set<std::string> pool;
        for (std::size_t slot = 0; slot < parts.size(); ++slot) {
            if (std::isdigit(static_cast<unsigned char>(parts[slot][0]))) continue;
            auto at = std::lower_bound(dict.begin(), dict.end(), parts[slot]);
            long center = at - dict.begin();
            for (long d = -neighbors_ / 2; d <= neighbors_ / 2 + 1; ++d) {
                long i = center + d;
                if (i < 0 || i >= static_cast<long>(dict.size())) continue;
                if (dict[static_cast<std::size_t>(i)] == parts[slot]) continue;
                auto mutated = parts;
                mutated[slot] = dict[static_cast<std::size_t>(i)];
                pool.insert(detail::join_style(mutated, snake));
            }
        }
        return finalize(std::move(pool), name, lang);
    }

private:
    int neighbors_;
};

// Offers names of the same declaration kind harvested from a reference
// corpus, the way attackers recycle plausible names from real code.
class CorpusHarvestProvider : public CandidateProvider {
public:
    explicit CorpusHarvestProvider(const std::vector<CodeSnippet>& corpus) {
        for (const auto& snip : corpus) {
            for (const auto& entry : snip.identifiers().entries()) {
                by_kind_[entry.kind].insert(entry.name);
            }
        }
    }

    std::vector<std::string> candidates(const std::string& name, IdentKind kind,
                                        Lang lang) const override {
        auto it = by_kind_.find(kind);
        if (it == by_kind_.end()) return {};
        return finalize(std::set<std::string>(it->second), name, lang);
    }

private:
    std::map<IdentKind, std::set<std::string>> by_kind_;
};

// Small embedded synonym table.
class SynonymTableProvider : public CandidateProvider {
public:
    std::vector<std::string> candidates(const std::string& name, IdentKind,
                                        Lang lang) const override {
        static const std::map<std::string, std::vector<std::string>> table = {
            {"get", {"fetch", "read", "load"}},
            {"set", {"put", "assign", "store"}},
            {"count", {"total", "num", "tally"}},
            {"size", {"length", "extent", "span"}},
            {"copy", {"clone", "duplicate", "mirror"}},
            {"find", {"locate", "search", "seek"}},
            {"make", {"build", "create", "construct"}},
            {"start", {"begin", "init", "open"}},
            {"end", {"finish", "stop", "close"}},
            {"value", {"val", "datum", "amount"}},
            {"temp", {"tmp", "scratch", "aux"}},
            {"index", {"idx", "cursor", "position"}},
        };
        auto parts = split_subtokens(name);
        bool snake = name.find('_') != std::string::npos;
        std::set<std::string> pool;
        for (std::size_t slot = 0; slot < parts.size(); ++slot) {
            auto it = table.find(parts[slot]);
            if (it == table.end()) continue;
            for (const auto& alt : it->second) {
                auto mutated = parts;
                mutated[slot] = alt;
                pool.insert(detail::join_style(mutated, snake));
            }
        }
        return finalize(std::move(pool), name, lang);
    }
};

// Union of several strategies; still sorted and duplicate-free.
class CompositeProvider : public CandidateProvider {
public:
    void add(std::shared_ptr<CandidateProvider> provider) {
        providers_.push_back(std::move(provider));
    }

    std::vector<std::string> candidates(const std::string& name, IdentKind kind,
                                        Lang lang) const override {
        std::set<std::string> pool;
        for (const auto& p : providers_) {
            for (auto& c : p->candidates(name, kind, lang)) pool.insert(std::move(c));
        }
        return {pool.begin(), pool.end()};
    }

private:
    std::vector<std::shared_ptr<CandidateProvider>> providers_;
};

// Fixed lists, mainly for tests and offline fixtures: the same pool for
// every identifier, or per-name overrides.
class FixedProvider : public CandidateProvider {
public:
    explicit FixedProvider(std::vector<std::string> shared) {
        std::sort(shared.begin(), shared.end());
        shared_ = std::move(shared);
    }

    void set_for(const std::string& name, std::vector<std::string> list) {
        std::sort(list.begin(), list.end());
        per_name_[name] = std::move(list);
    }

    std::vector<std::string> candidates(const std::string& name, IdentKind,
                                        Lang lang) const override {
        auto it = per_name_.find(name);
        const auto& src = it != per_name_.end() ? it->second : shared_;
        std::set<std::string> pool(src.begin(), src.end());
        return finalize(std::move(pool), name, lang);
    }

private:
    std::vector<std::string> shared_;
    std::map<std::string, std::vector<std::string>> per_name_;
};

// The default stack: subword mutation plus corpus harvesting (when a corpus
// is supplied) plus the synonym table.
inline std::shared_ptr<CandidateProvider> default_provider(
    const std::vector<CodeSnippet>& harvest_corpus = {}) {
    auto composite = std::make_shared<CompositeProvider>();
    composite->add(std::make_shared<SubwordMutationProvider>());
    composite->add(std::make_shared<SynonymTableProvider>());
    if (!harvest_corpus.empty())
        composite->add(std::make_shared<CorpusHarvestProvider>(harvest_corpus));
    return composite;
}

}  // namespace codenat
