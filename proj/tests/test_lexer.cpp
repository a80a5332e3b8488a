#include <catch2/catch_amalgamated.hpp>

#include "codenat/token.hpp"

using namespace codenat;

TEST_CASE("lexing a simple C declaration") {
    auto toks = tokenize("int a = 0;", Lang::C);
    REQUIRE(toks.size() == 5);
    CHECK(toks[0].is(TokenKind::Keyword, "int"));
    CHECK(toks[1].is(TokenKind::Identifier, "a"));
    CHECK(toks[2].is(TokenKind::Operator, "="));
    CHECK(toks[3].is(TokenKind::Literal, "0"));
    CHECK(toks[4].is(TokenKind::Punct, ";"));
}

TEST_CASE("empty input lexes to an empty stream") {
    CHECK(tokenize("", Lang::C).empty());
    CHECK(tokenize("", Lang::Java).empty());
}

TEST_CASE("lexing is total even for junk that cannot parse") {
    auto toks = tokenize("int 0x = ;", Lang::C);
    REQUIRE(toks.size() == 4);
    CHECK(toks[0].is(TokenKind::Keyword, "int"));
    CHECK(toks[1].is(TokenKind::Literal, "0x"));
    CHECK(toks[2].is(TokenKind::Operator, "="));
    CHECK(toks[3].is(TokenKind::Punct, ";"));
}

TEST_CASE("token spans reproduce the source with original whitespace") {
    std::string src = "int  foo(char c) {\n  return c + 1; /* tail */\n}\n";
    auto toks = tokenize(src, Lang::C);
    std::string rebuilt;
    std::size_t cursor = 0;
    for (const auto& t : toks) {
        REQUIRE(t.begin >= cursor);  // ordered, non-overlapping
        rebuilt.append(src, cursor, t.begin - cursor);
        rebuilt.append(t.text);
        REQUIRE(src.substr(t.begin, t.end - t.begin) == t.text);
        cursor = t.end;
    }
    rebuilt.append(src, cursor, src.size() - cursor);
    CHECK(rebuilt == src);
}

TEST_CASE("comments and literals are preserved as single tokens") {
    auto toks = tokenize("x = \"a b\"; // done", Lang::Java);
    REQUIRE(toks.size() == 5);
    CHECK(toks[2].is(TokenKind::Literal, "\"a b\""));
    CHECK(toks[4].kind == TokenKind::Comment);
}

TEST_CASE("keywords differ per language") {
    auto java = tokenize("boolean struct", Lang::Java);
    CHECK(java[0].kind == TokenKind::Keyword);
    CHECK(java[1].kind == TokenKind::Identifier);  // struct is not a Java keyword
    auto c = tokenize("boolean struct", Lang::C);
    CHECK(c[0].kind == TokenKind::Identifier);
    CHECK(c[1].kind == TokenKind::Keyword);
}

TEST_CASE("multi-character operators lex greedily") {
    auto toks = tokenize("a >>>= b >>> c >> d -> e", Lang::Java);
    CHECK(toks[1].is(TokenKind::Operator, ">>>="));
    CHECK(toks[3].is(TokenKind::Operator, ">>>"));
    CHECK(toks[5].is(TokenKind::Operator, ">>"));
    CHECK(toks[7].is(TokenKind::Operator, "->"));
}

TEST_CASE("unterminated literal reports its offset") {
    try {
        tokenize("x = \"oops", Lang::C);
        FAIL("expected UnlexableInput");
    } catch (const UnlexableInput& e) {
        CHECK(e.offset == 4);
    }
}

TEST_CASE("unlexable control byte reports its offset") {
    std::string src = "int a;\x01";
    try {
        tokenize(src, Lang::C);
        FAIL("expected UnlexableInput");
    } catch (const UnlexableInput& e) {
        CHECK(e.offset == 6);
    }
}
