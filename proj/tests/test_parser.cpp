#include <catch2/catch_amalgamated.hpp>

#include "codenat/snippet.hpp"
#include "support/fixtures.hpp"

using namespace codenat;

TEST_CASE("parsing the motivating Java method") {
    auto snip = CodeSnippet::parse(fixtures::fig1_original(), Lang::Java);
    const auto* entry = snip.identifiers().find("swapBlank");
    REQUIRE(entry != nullptr);
    CHECK(entry->kind == IdentKind::Function);
    const auto* copy = snip.identifiers().find("copy");
    REQUIRE(copy != nullptr);
    CHECK(copy->kind == IdentKind::Variable);
    CHECK(copy->occurrences.size() == 5);
    // `Arrays` is referenced but never declared here: not renameable
    CHECK(snip.identifiers().find("Arrays") == nullptr);
    CHECK(snip.all_identifier_texts().count("Arrays") == 1);
    // `copyOf` and `length` are members behind a receiver: not renameable
    CHECK(snip.identifiers().find("copyOf") == nullptr);
    CHECK(snip.identifiers().find("length") == nullptr);
}

TEST_CASE("a lone C function declares one function binding") {
    auto snip = CodeSnippet::parse("int f(){return 1;}", Lang::C);
    REQUIRE(snip.identifiers().size() == 1);
    CHECK(snip.identifiers().entries()[0].name == "f");
    CHECK(snip.identifiers().entries()[0].kind == IdentKind::Function);
}

TEST_CASE("malformed input raises SyntaxError") {
    CHECK_THROWS_AS(CodeSnippet::parse("int f({", Lang::C), SyntaxError);
    CHECK_THROWS_AS(CodeSnippet::parse("int 0x = ;", Lang::C), SyntaxError);
    CHECK_THROWS_AS(CodeSnippet::parse("class {", Lang::Java), SyntaxError);
}

TEST_CASE("unsupported language tag") {
    CHECK_THROWS_AS(CodeSnippet::parse("int x;", "rust"), UnsupportedLanguage);
}

TEST_CASE("parameters and locals are scope-resolved by kind") {
    auto snip = CodeSnippet::parse(
        "int scale(int factor) { int acc = factor * 2; return acc; }", Lang::C);
    REQUIRE(snip.identifiers().size() == 3);
    CHECK(snip.identifiers().find("scale")->kind == IdentKind::Function);
    CHECK(snip.identifiers().find("factor")->kind == IdentKind::Parameter);
    CHECK(snip.identifiers().find("acc")->kind == IdentKind::Variable);
    CHECK(snip.identifiers().find("factor")->occurrences.size() == 2);
}

TEST_CASE("typedef and struct tags become type bindings") {
    auto snip = CodeSnippet::parse(
        "typedef struct Pair { int a; int b; } PairT;\n"
        "int sum(PairT p) { return p.a + p.b; }\n",
        Lang::C);
    CHECK(snip.identifiers().find("Pair")->kind == IdentKind::Type);
    CHECK(snip.identifiers().find("PairT")->kind == IdentKind::Type);
    // struct fields are reached through receivers; they stay out of the table
    CHECK(snip.identifiers().find("a") == nullptr);
    CHECK(snip.identifiers().find("b") == nullptr);
}

TEST_CASE("java class fields are excluded but methods are renameable") {
    auto snip = CodeSnippet::parse(
        "class Counter {\n"
        "    int hits;\n"
        "    int bump(int by) { hits += by; return hits; }\n"
        "}\n",
        Lang::Java);
    CHECK(snip.identifiers().find("Counter")->kind == IdentKind::Type);
    CHECK(snip.identifiers().find("bump")->kind == IdentKind::Function);
    CHECK(snip.identifiers().find("hits") == nullptr);
}

TEST_CASE("member accesses through a receiver are not occurrences") {
    auto snip = CodeSnippet::parse(
        "public static int probe(java.util.List<String> items, int cursor) {\n"
        "    return items.size() + cursor;\n"
        "}\n",
        Lang::Java);
    const auto* items = snip.identifiers().find("items");
    REQUIRE(items != nullptr);
    CHECK(items->occurrences.size() == 2);
    CHECK(snip.identifiers().find("size") == nullptr);
    CHECK(snip.identifiers().find("util") == nullptr);
}

TEST_CASE("c pointer declaration needs typedef knowledge") {
    // `known * p;` declares p only because `known` is typedef'd first
    auto snip = CodeSnippet::parse(
        "typedef int known;\n"
        "void work(known value) { known * p; p = &value; }\n",
        Lang::C);
    REQUIRE(snip.identifiers().find("p") != nullptr);
    CHECK(snip.identifiers().find("p")->kind == IdentKind::Variable);
}

TEST_CASE("shadowed names collapse into one rename group") {
    auto snip = CodeSnippet::parse(
        "int pick(int v) {\n"
        "    if (v > 0) { int n = v; return n; }\n"
        "    int n = -v;\n"
        "    return n;\n"
        "}\n",
        Lang::C);
    const auto* n = snip.identifiers().find("n");
    REQUIRE(n != nullptr);
    CHECK(n->occurrences.size() == 4);
}

TEST_CASE("preprocessor lines and imports stay out of the table") {
    auto c = CodeSnippet::parse(
        "#include <stdio.h>\n"
        "int run(void) { return 0; }\n",
        Lang::C);
    CHECK(c.identifiers().find("stdio") == nullptr);
    CHECK(c.identifiers().find("run") != nullptr);

    auto j = CodeSnippet::parse(
        "import java.util.List;\n"
        "class Box { List keep(List w) { return w; } }\n",
        Lang::Java);
    CHECK(j.identifiers().find("util") == nullptr);
    CHECK(j.identifiers().find("keep") != nullptr);
}

TEST_CASE("generated fixtures parse for both languages") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto js = fixtures::java_snippet(seed);
        auto cs = fixtures::c_snippet(seed);
        INFO("java fixture seed " << seed << ":\n" << js);
        CHECK_NOTHROW(CodeSnippet::parse(js, Lang::Java));
        INFO("c fixture seed " << seed << ":\n" << cs);
        CHECK_NOTHROW(CodeSnippet::parse(cs, Lang::C));
    }
}

TEST_CASE("identifier table only indexes identifier tokens") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto snip = CodeSnippet::parse(fixtures::java_snippet(seed), Lang::Java);
        for (const auto& entry : snip.identifiers().entries()) {
            for (auto occ : entry.occurrences) {
                const auto& tok = snip.tokens()[static_cast<std::size_t>(occ)];
                CHECK(tok.kind == TokenKind::Identifier);
                CHECK(tok.text == entry.name);
            }
        }
    }
}
