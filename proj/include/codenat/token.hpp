#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "codenat/errors.hpp"
#include "codenat/lang.hpp"

namespace codenat {

enum class TokenKind { Keyword, Identifier, Literal, Operator, Punct, Comment };

inline const char* to_string(TokenKind k) {
    switch (k) {
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Literal: return "literal";
        case TokenKind::Operator: return "operator";
        case TokenKind::Punct: return "punctuation";
        case TokenKind::Comment: return "comment";
    }
    return "?";
}

struct Token {
    TokenKind kind;
    std::string text;
    std::size_t begin = 0;  // byte offsets into the source
    std::size_t end = 0;

    bool is(TokenKind k) const { return kind == k; }
    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
};

namespace detail {

// Multi-character operators, longest first so greedy matching works.
inline constexpr std::array<std::string_view, 27> kMultiOps = {
    ">>>=", "...", "<<=", ">>=", ">>>", "->", "++", "--", "<<", ">>",
    "<=",   ">=",  "==",  "!=",  "&&",  "||", "+=", "-=", "*=", "/=",
    "%=",   "&=",  "|=",  "^=",  "::",  "?",  ":",
};

inline bool is_single_op(char c) {
    switch (c) {
        case '+': case '-': case '*': case '/': case '%':
        case '<': case '>': case '=': case '!': case '&':
        case '|': case '^': case '~':
            return true;
        default:
            return false;
    }
}

inline bool is_punct_char(char c) {
    switch (c) {
        case '(': case ')': case '{': case '}': case '[': case ']':
        case ';': case ',': case '.': case '@': case '#':
            return true;
        default:
            return false;
    }
}

}  // namespace detail

// Lexes source into a token stream. Whitespace is skipped but recoverable
// through token spans: source == ws + tok0.text + ws + tok1.text + ... + ws.
// Lexing is total over printable input; malformed literals like "0x" still
// come out as Literal tokens and are left for the parser to reject.
inline std::vector<Token> tokenize(const std::string& source, Lang lang) {
    std::vector<Token> out;
    const std::size_t n = source.size();
    std::size_t i = 0;

    auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
        out.push_back(Token{kind, source.substr(begin, end - begin), begin, end});
    };

    while (i < n) {
        unsigned char c = static_cast<unsigned char>(source[i]);
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            ++i;
            continue;
        }

        // comments
        if (c == '/' && i + 1 < n && source[i + 1] == '/') {
            std::size_t start = i;
            while (i < n && source[i] != '\n') ++i;
            push(TokenKind::Comment, start, i);
            continue;
        }
        if (c == '/' && i + 1 < n && source[i + 1] == '*') {
            std::size_t start = i;
            i += 2;
            while (i + 1 < n && !(source[i] == '*' && source[i + 1] == '/')) ++i;
            if (i + 1 >= n) throw UnlexableInput("unterminated block comment", start);
            i += 2;
            push(TokenKind::Comment, start, i);
            continue;
        }

        // string and character literals
        if (c == '"' || c == '\'') {
            char quote = static_cast<char>(c);
            std::size_t start = i++;
            while (i < n && source[i] != quote) {
                if (source[i] == '\\' && i + 1 < n) i += 2;
                else if (source[i] == '\n') break;
                else ++i;
            }
            if (i >= n || source[i] != quote)
                throw UnlexableInput("unterminated literal", start);
            ++i;
            push(TokenKind::Literal, start, i);
            continue;
        }

        // numbers (pp-number style: greedy, validity checked by the parser)
        if (std::isdigit(c) || (c == '.' && i + 1 < n &&
                                std::isdigit(static_cast<unsigned char>(source[i + 1])))) {
            std::size_t start = i;
            while (i < n) {
                char d = source[i];
                if (std::isalnum(static_cast<unsigned char>(d)) || d == '.' || d == '_') {
                    ++i;
                } else if ((d == '+' || d == '-') && i > start) {
                    char prev = static_cast<char>(std::tolower(source[i - 1]));
                    if (prev == 'e' || prev == 'p') ++i;
                    else break;
                } else {
                    break;
                }
            }
            push(TokenKind::Literal, start, i);
            continue;
        }

        // identifiers and keywords
        if (std::isalpha(c) || c == '_') {
            std::size_t start = i;
            while (i < n) {
                unsigned char d = static_cast<unsigned char>(source[i]);
                if (std::isalnum(d) || d == '_') ++i;
                else break;
            }
            std::string_view word(source.data() + start, i - start);
            push(is_keyword(word, lang) ? TokenKind::Keyword : TokenKind::Identifier,
                 start, i);
            continue;
        }

        // multi-char operators
        bool matched = false;
        for (std::string_view op : detail::kMultiOps) {
            if (source.compare(i, op.size(), op) == 0) {
                push(TokenKind::Operator, i, i + op.size());
                i += op.size();
                matched = true;
                break;
            }
        }
        if (matched) continue;

        if (detail::is_single_op(static_cast<char>(c))) {
            push(TokenKind::Operator, i, i + 1);
            ++i;
            continue;
        }
        if (detail::is_punct_char(static_cast<char>(c))) {
            push(TokenKind::Punct, i, i + 1);
            ++i;
            continue;
        }
        if (c == '$' || c == '\\') {  // tolerated strays; parser rejects misuse
            push(TokenKind::Operator, i, i + 1);
            ++i;
            continue;
        }
        throw UnlexableInput("unlexable byte 0x" + std::to_string(c), i);
    }
    return out;
}

inline std::vector<Token> tokenize(const std::string& source, std::string_view lang_tag) {
    return tokenize(source, lang_from_tag(lang_tag));
}

}  // namespace codenat
