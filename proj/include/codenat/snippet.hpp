#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "codenat/errors.hpp"
#include "codenat/syntax.hpp"
#include "codenat/token.hpp"

namespace codenat {

// One renameable name with every token position where it occurs. Shadowed
// bindings that share a spelling are folded into one rename group, matching
// how the attack baselines operate (by name, not by binding).
struct IdentifierEntry {
    std::string name;
    IdentKind kind;                     // from the first declaration in token order
    std::vector<std::int32_t> occurrences;  // token indices, ascending
    int binding_id = 0;
};

class IdentifierTable {
public:
    IdentifierTable() = default;
    explicit IdentifierTable(std::vector<IdentifierEntry> entries)
        : entries_(std::move(entries)) {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            index_[entries_[i].name] = i;
        }
    }

    const std::vector<IdentifierEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const IdentifierEntry* find(std::string_view name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : &entries_[it->second];
    }

    bool contains(std::string_view name) const { return index_.count(name) > 0; }

private:
    std::vector<IdentifierEntry> entries_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

// Injective old-name -> new-name mapping; the delta applied by an attack or
// recovered by purification. Validity against a concrete snippet (capture
// freedom, keyword collisions) is checked at application time.
class SubstitutionMap {
public:
    SubstitutionMap() = default;

    static SubstitutionMap from_pairs(
        std::initializer_list<std::pair<std::string, std::string>> pairs) {
        SubstitutionMap m;
        for (const auto& [a, b] : pairs) m.add(a, b);
        return m;
    }

    void add(const std::string& old_name, const std::string& new_name) {
        pairs_[old_name] = new_name;
    }

    bool empty() const { return pairs_.empty(); }
    std::size_t size() const { return pairs_.size(); }

    const std::string* lookup(std::string_view old_name) const {
        auto it = pairs_.find(old_name);
        return it == pairs_.end() ? nullptr : &it->second;
    }

    bool maps_to(std::string_view new_name) const {
        for (const auto& [k, v] : pairs_)
            if (v == new_name) return true;
        return false;
    }

    bool injective() const {
        std::set<std::string_view> seen;
        for (const auto& [k, v] : pairs_)
            if (!seen.insert(v).second) return false;
        return true;
    }

    SubstitutionMap inverse() const {
        SubstitutionMap inv;
        for (const auto& [k, v] : pairs_) inv.add(v, k);
        return inv;
    }

    // ordered, so iteration is deterministic everywhere
    const std::map<std::string, std::string, std::less<>>& pairs() const { return pairs_; }

    bool operator==(const SubstitutionMap& other) const { return pairs_ == other.pairs_; }

private:
    std::map<std::string, std::string, std::less<>> pairs_;
};

// A parsed code snippet. Immutable after construction and cheap to copy;
// attack workers share parsed originals freely.
class CodeSnippet {
public:
    CodeSnippet() = default;

    Lang lang() const { return lang_; }
    const std::string& source() const { return *source_; }
    const std::vector<Token>& tokens() const { return *tokens_; }
    const SyntaxTree& tree() const { return *tree_; }
    const IdentifierTable& identifiers() const { return *identifiers_; }

    // every identifier token spelling, renameable or not; capture checks
    // consult this so fresh names cannot collide with anything in scope
    const std::set<std::string>& all_identifier_texts() const { return *all_names_; }

    static CodeSnippet parse(std::string source, Lang lang);
    static CodeSnippet parse(const std::string& source, std::string_view lang_tag) {
        return parse(source, lang_from_tag(lang_tag));
    }

private:
    Lang lang_ = Lang::Java;
    std::shared_ptr<const std::string> source_;
    std::shared_ptr<const std::vector<Token>> tokens_;
    std::shared_ptr<const SyntaxTree> tree_;
    std::shared_ptr<const IdentifierTable> identifiers_;
    std::shared_ptr<const std::set<std::string>> all_names_;
};

inline CodeSnippet CodeSnippet::parse(std::string source, Lang lang) {
    CodeSnippet snip;
    snip.lang_ = lang;
    snip.source_ = std::make_shared<const std::string>(std::move(source));

    auto tokens = tokenize(*snip.source_, lang);
    ParseResult parsed = parse_tokens(tokens, lang, *snip.source_);

    auto names = std::make_shared<std::set<std::string>>();
    for (const Token& t : tokens) {
        if (t.kind == TokenKind::Identifier) names->insert(t.text);
    }

    // group occurrences by name; a name becomes renameable when it has at
    // least one Decl occurrence in this snippet
    std::map<std::string, IdentifierEntry> groups;
    std::map<std::string, std::int32_t> first_decl_tok;
    for (const Occurrence& occ : parsed.occurrences) {
        const std::string& name = tokens[static_cast<std::size_t>(occ.token)].text;
        if (occ.role == OccRole::Excluded) continue;
        auto& entry = groups[name];
        entry.name = name;
        entry.occurrences.push_back(occ.token);
        if (occ.role == OccRole::Decl) {
            auto it = first_decl_tok.find(name);
            if (it == first_decl_tok.end() || occ.token < it->second) {
                first_decl_tok[name] = occ.token;
                entry.kind = occ.kind;
            }
        }
    }

    std::vector<IdentifierEntry> entries;
    for (auto& [name, entry] : groups) {
        if (!first_decl_tok.count(name)) continue;  // used but never declared here
        std::sort(entry.occurrences.begin(), entry.occurrences.end());
        entry.occurrences.erase(
            std::unique(entry.occurrences.begin(), entry.occurrences.end()),
            entry.occurrences.end());
        entries.push_back(std::move(entry));
    }
    // order entries by first occurrence so binding ids follow source order
    std::sort(entries.begin(), entries.end(),
              [](const IdentifierEntry& a, const IdentifierEntry& b) {
                  return a.occurrences.front() < b.occurrences.front();
              });
    for (std::size_t i = 0; i < entries.size(); ++i)
        entries[i].binding_id = static_cast<int>(i);

    snip.tokens_ = std::make_shared<const std::vector<Token>>(std::move(tokens));
    snip.tree_ = std::make_shared<const SyntaxTree>(std::move(parsed.tree));
    snip.identifiers_ = std::make_shared<const IdentifierTable>(std::move(entries));
    snip.all_names_ = std::move(names);
    return snip;
}

}  // namespace codenat
