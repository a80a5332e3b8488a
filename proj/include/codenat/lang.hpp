#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>

#include "codenat/errors.hpp"

namespace codenat {

enum class Lang { Java, C };

inline std::string to_string(Lang lang) {
    return lang == Lang::Java ? "java" : "c";
}

inline Lang lang_from_tag(std::string_view tag) {
    if (tag == "java") return Lang::Java;
    if (tag == "c") return Lang::C;
    throw UnsupportedLanguage("unsupported language tag: " + std::string(tag));
}

namespace detail {

// Keyword tables. Sorted so membership checks can binary-search.
// Java contextual keywords that commonly appear as identifiers in real
// corpora (record, yield, sealed, permits, module) are deliberately left out.
inline constexpr std::array<std::string_view, 53> kJavaKeywords = {
    "abstract",   "assert",     "boolean",  "break",      "byte",
    "case",       "catch",      "char",     "class",      "const",
    "continue",   "default",    "do",       "double",     "else",
    "enum",       "extends",    "false",    "final",      "finally",
    "float",      "for",        "goto",     "if",         "implements",
    "import",     "instanceof", "int",      "interface",  "long",
    "native",     "new",        "null",     "package",    "private",
    "protected",  "public",     "return",   "short",      "static",
    "strictfp",   "super",      "switch",   "synchronized", "this",
    "throw",      "throws",     "transient", "try",       "var",
    "void",       "volatile",   "while",
};

inline constexpr std::array<std::string_view, 40> kCKeywords = {
    "_Bool",    "_Complex", "_Imaginary", "auto",     "bool",
    "break",    "case",     "char",       "const",    "continue",
    "default",  "do",       "double",     "else",     "enum",
    "extern",   "false",    "float",      "for",      "goto",
    "if",       "inline",   "int",        "long",     "register",
    "restrict", "return",   "short",      "signed",   "sizeof",
    "static",   "struct",   "switch",     "true",     "typedef",
    "union",    "unsigned", "void",       "volatile", "while",
};

}  // namespace detail

inline bool is_keyword(std::string_view word, Lang lang) {
    if (lang == Lang::Java) {
        return std::binary_search(detail::kJavaKeywords.begin(),
                                  detail::kJavaKeywords.end(), word);
    }
    return std::binary_search(detail::kCKeywords.begin(),
                              detail::kCKeywords.end(), word);
}

// Identifier lexical rule shared by both languages: [A-Za-z_][A-Za-z0-9_]*
inline bool is_valid_identifier(std::string_view name) {
    if (name.empty()) return false;
    auto head = static_cast<unsigned char>(name[0]);
    if (!std::isalpha(head) && name[0] != '_') return false;
    for (char c : name.substr(1)) {
        auto u = static_cast<unsigned char>(c);
        if (!std::isalnum(u) && c != '_') return false;
    }
    return true;
}

}  // namespace codenat
