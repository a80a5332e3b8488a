#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "codenat/errors.hpp"
#include "codenat/snippet.hpp"

namespace codenat {

// Rebuilds source text with the given name replacements, preserving every
// byte of inter-token whitespace. No validity checks; this is the low-level
// primitive behind apply_substitution and the importance-ranking mask.
inline std::string render_with_names(const CodeSnippet& snippet,
                                     const std::map<std::string, std::string>& names) {
    const std::string& src = snippet.source();
    const auto& tokens = snippet.tokens();

    // token index -> replacement, driven by the identifier table so excluded
    // occurrences (members after a receiver, import paths) stay untouched
    std::map<std::int32_t, const std::string*> replace_at;
    for (const auto& [old_name, new_name] : names) {
        const IdentifierEntry* entry = snippet.identifiers().find(old_name);
        if (!entry) continue;
        for (std::int32_t occ : entry->occurrences) replace_at[occ] = &new_name;
    }

    std::string out;
    out.reserve(src.size() + 16 * names.size());
    std::size_t cursor = 0;
    for (std::int32_t i = 0; i < static_cast<std::int32_t>(tokens.size()); ++i) {
        const Token& t = tokens[static_cast<std::size_t>(i)];
        out.append(src, cursor, t.begin - cursor);
        auto it = replace_at.find(i);
        if (it != replace_at.end()) out.append(*it->second);
        else out.append(t.text);
        cursor = t.end;
    }
    out.append(src, cursor, src.size() - cursor);
    return out;
}

// Applies an identifier substitution and re-parses the result.
//
// Rejects maps that rename unknown identifiers, collide with keywords,
// break the identifier lexical rule, are non-injective, or capture an
// existing name that is not itself being renamed away.
inline CodeSnippet apply_substitution(const CodeSnippet& snippet,
                                      const SubstitutionMap& map) {
    if (!map.injective())
        throw CaptureViolation("substitution map is not injective");

    for (const auto& [old_name, new_name] : map.pairs()) {
        if (!snippet.identifiers().contains(old_name))
            throw UnknownIdentifier("unknown identifier: " + old_name);
        if (is_keyword(new_name, snippet.lang()))
            throw KeywordCollision("new name is a keyword: " + new_name);
        if (!is_valid_identifier(new_name))
            throw CaptureViolation("invalid identifier name: " + new_name);
        if (new_name == old_name)
            throw CaptureViolation("identity rename of: " + old_name);
        // capture freedom: the new name must not equal any name present in
        // the original unless that name is itself renamed away by this map
        if (snippet.all_identifier_texts().count(new_name) && !map.lookup(new_name))
            throw CaptureViolation("rename " + old_name + " -> " + new_name +
                                   " captures an existing name");
    }

    std::map<std::string, std::string> names(map.pairs().begin(), map.pairs().end());
    std::string rendered = render_with_names(snippet, names);
    return CodeSnippet::parse(std::move(rendered), snippet.lang());
}

// Location of the first structural difference found by alpha_equivalent.
struct NotEquivalent {
    std::int32_t token_index = -1;  // index into a's (or b's) token stream, -1 for length
    std::size_t byte_offset = 0;
    std::string reason;
};

using AlphaResult = std::variant<SubstitutionMap, NotEquivalent>;

inline bool is_equivalent(const AlphaResult& r) {
    return std::holds_alternative<SubstitutionMap>(r);
}

namespace detail {

// Per-token classes: -1 non-identifier, -2 identifier outside any rename
// group (member access, import path, free name), >= 0 the binding id of the
// rename group owning the occurrence.
inline std::vector<int> occurrence_classes(const CodeSnippet& s) {
    std::vector<int> cls(s.tokens().size(), -1);
    for (std::size_t i = 0; i < s.tokens().size(); ++i) {
        if (s.tokens()[i].kind == TokenKind::Identifier) cls[i] = -2;
    }
    for (const IdentifierEntry& e : s.identifiers().entries()) {
        for (std::int32_t occ : e.occurrences)
            cls[static_cast<std::size_t>(occ)] = e.binding_id;
    }
    return cls;
}

}  // namespace detail

// Checks whether two parsed snippets are identical up to a consistent
// per-binding renaming of identifiers, and recovers that renaming.
//
// Identifiers outside every rename group (members reached through a
// receiver, import paths, names never declared in the snippet) are external
// references and must match byte for byte. Comment tokens are ignored here;
// byte-level comment equality is enforced separately where a contract needs
// it (purification validation).
inline AlphaResult alpha_equivalent(const CodeSnippet& a, const CodeSnippet& b) {
    std::vector<std::int32_t> ia, ib;
    for (std::size_t i = 0; i < a.tokens().size(); ++i)
        if (a.tokens()[i].kind != TokenKind::Comment)
            ia.push_back(static_cast<std::int32_t>(i));
    for (std::size_t i = 0; i < b.tokens().size(); ++i)
        if (b.tokens()[i].kind != TokenKind::Comment)
            ib.push_back(static_cast<std::int32_t>(i));

    if (ia.size() != ib.size()) {
        std::size_t at = std::min(ia.size(), ib.size());
        std::size_t off = at < ia.size()
                              ? a.tokens()[static_cast<std::size_t>(ia[at])].begin
                              : (a.tokens().empty() ? 0 : a.tokens().back().end);
        return NotEquivalent{-1, off, "token counts differ"};
    }

    std::vector<int> ca = detail::occurrence_classes(a);
    std::vector<int> cb = detail::occurrence_classes(b);

    // group id -> counterpart text, in both directions
    std::map<int, std::string> fwd, rev;
    for (std::size_t i = 0; i < ia.size(); ++i) {
        const Token& x = a.tokens()[static_cast<std::size_t>(ia[i])];
        const Token& y = b.tokens()[static_cast<std::size_t>(ib[i])];
        auto here = [&](std::string reason) {
            return NotEquivalent{static_cast<std::int32_t>(i), x.begin, std::move(reason)};
        };
        if (x.kind != y.kind) return here("token kinds differ");
        if (x.kind != TokenKind::Identifier) {
            if (x.text != y.text) return here("non-identifier token differs");
            continue;
        }
        int ga = ca[static_cast<std::size_t>(ia[i])];
        int gb = cb[static_cast<std::size_t>(ib[i])];
        if ((ga < 0) != (gb < 0)) return here("binding structure differs at " + x.text);
        if (ga < 0) {
            if (x.text != y.text)
                return here("external reference renamed: " + x.text + " -> " + y.text);
            continue;
        }
        auto f = fwd.find(ga);
        if (f == fwd.end()) fwd[ga] = y.text;
        else if (f->second != y.text)
            return here("inconsistent renaming of " + x.text);
        auto r = rev.find(gb);
        if (r == rev.end()) rev[gb] = x.text;
        else if (r->second != x.text)
            return here("two names merged into " + y.text);
    }

    SubstitutionMap map;
    for (const auto& [group, new_name] : fwd) {
        const std::string& old_name = a.identifiers().entries()[static_cast<std::size_t>(group)].name;
        if (old_name != new_name) map.add(old_name, new_name);
    }
    return map;
}

}  // namespace codenat
