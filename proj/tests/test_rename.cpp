#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "codenat/rename.hpp"
#include "support/fixtures.hpp"

using namespace codenat;

TEST_CASE("renaming the motivating pair") {
    auto original = CodeSnippet::parse(fixtures::fig1_original(), Lang::Java);
    auto map = SubstitutionMap::from_pairs({{"swapBlank", "swapBlace"},
                                            {"copy", "create"}});
    auto adv = apply_substitution(original, map);
    CHECK(adv.source() == fixtures::fig1_adversarial());
}

TEST_CASE("empty map is the identity") {
    auto snip = CodeSnippet::parse(fixtures::fig1_original(), Lang::Java);
    auto out = apply_substitution(snip, SubstitutionMap{});
    CHECK(out.source() == snip.source());
}

TEST_CASE("rename onto an existing sibling name is capture") {
    auto snip = CodeSnippet::parse("int f(int a, int b) { return a + b; }", Lang::C);
    auto map = SubstitutionMap::from_pairs({{"a", "b"}});
    CHECK_THROWS_AS(apply_substitution(snip, map), CaptureViolation);
}

TEST_CASE("swapping two names simultaneously is allowed") {
    auto snip = CodeSnippet::parse("int f(int a, int b) { return a - b; }", Lang::C);
    auto map = SubstitutionMap::from_pairs({{"a", "b"}, {"b", "a"}});
    auto out = apply_substitution(snip, map);
    CHECK(out.source() == "int f(int b, int a) { return b - a; }");
}

TEST_CASE("substitution error modes") {
    auto snip = CodeSnippet::parse("int f(int a) { return a; }", Lang::C);
    CHECK_THROWS_AS(apply_substitution(snip, SubstitutionMap::from_pairs({{"zz", "b"}})),
                    UnknownIdentifier);
    CHECK_THROWS_AS(apply_substitution(snip, SubstitutionMap::from_pairs({{"a", "while"}})),
                    KeywordCollision);
    CHECK_THROWS_AS(apply_substitution(snip, SubstitutionMap::from_pairs({{"a", "9lives"}})),
                    CaptureViolation);
    auto noninjective = SubstitutionMap::from_pairs({{"a", "x"}, {"f", "x"}});
    CHECK_THROWS_AS(apply_substitution(snip, noninjective), CaptureViolation);
}

TEST_CASE("alpha equivalence is reflexive with an empty map") {
    auto snip = CodeSnippet::parse(fixtures::fig1_original(), Lang::Java);
    auto res = alpha_equivalent(snip, snip);
    REQUIRE(is_equivalent(res));
    CHECK(std::get<SubstitutionMap>(res).empty());
}

TEST_CASE("alpha equivalence recovers the motivating map") {
    auto a = CodeSnippet::parse(fixtures::fig1_original(), Lang::Java);
    auto b = CodeSnippet::parse(fixtures::fig1_adversarial(), Lang::Java);
    auto res = alpha_equivalent(a, b);
    REQUIRE(is_equivalent(res));
    auto expected = SubstitutionMap::from_pairs({{"swapBlank", "swapBlace"},
                                                 {"copy", "create"}});
    CHECK(std::get<SubstitutionMap>(res) == expected);
}

TEST_CASE("a literal change is not alpha equivalence") {
    auto a = CodeSnippet::parse("int f(){int a=0;return a;}", Lang::C);
    auto b = CodeSnippet::parse("int f(){int a=1;return a;}", Lang::C);
    auto res = alpha_equivalent(a, b);
    REQUIRE(!is_equivalent(res));
    const auto& ne = std::get<NotEquivalent>(res);
    CHECK(ne.byte_offset == 14);  // offset of the literal `0`
}

TEST_CASE("free names must match byte for byte") {
    auto a = CodeSnippet::parse("int f(){return helper(1);}", Lang::C);
    auto b = CodeSnippet::parse("int f(){return assist(1);}", Lang::C);
    CHECK(!is_equivalent(alpha_equivalent(a, b)));
}

TEST_CASE("renaming a group never touches excluded twins") {
    // a local `length` coexists with the receiver member `.length`
    auto a = CodeSnippet::parse(
        "public static int last(int[] data) {\n"
        "    int length = data.length;\n"
        "    return data[length - 1];\n"
        "}\n",
        Lang::Java);
    auto out = apply_substitution(a, SubstitutionMap::from_pairs({{"length", "len"}}));
    CHECK(out.source().find("data.length") != std::string::npos);
    CHECK(out.source().find("int len = data.length;") != std::string::npos);
    auto res = alpha_equivalent(a, out);
    REQUIRE(is_equivalent(res));
    CHECK(std::get<SubstitutionMap>(res) ==
          SubstitutionMap::from_pairs({{"length", "len"}}));
}

TEST_CASE("properties over random snippets and maps") {
    std::mt19937_64 rng(20240817);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Lang lang = seed % 2 == 0 ? Lang::Java : Lang::C;
        auto src = fixtures::snippet_source(lang, seed);
        auto snip = CodeSnippet::parse(src, lang);
        auto map = fixtures::random_map(snip, rng);
        INFO("seed " << seed << "\n" << src);

        auto adv = apply_substitution(snip, map);

        // token count preserved, non-identifier tokens byte-identical
        REQUIRE(adv.tokens().size() == snip.tokens().size());
        for (std::size_t i = 0; i < adv.tokens().size(); ++i) {
            if (snip.tokens()[i].kind != TokenKind::Identifier)
                CHECK(snip.tokens()[i].text == adv.tokens()[i].text);
        }

        // output is alpha-equivalent with exactly the applied map
        auto res = alpha_equivalent(snip, adv);
        REQUIRE(is_equivalent(res));
        CHECK(std::get<SubstitutionMap>(res) == map);

        // tree shapes agree node for node
        REQUIRE(adv.tree().nodes.size() == snip.tree().nodes.size());
        for (std::size_t i = 0; i < adv.tree().nodes.size(); ++i) {
            CHECK(adv.tree().nodes[i].kind == snip.tree().nodes[i].kind);
            CHECK(adv.tree().nodes[i].kids == snip.tree().nodes[i].kids);
        }

        // inverse map round-trips byte-identically
        auto back = apply_substitution(adv, map.inverse());
        CHECK(back.source() == snip.source());

        // symmetry: the reverse comparison recovers the inverse map
        auto rev = alpha_equivalent(adv, snip);
        REQUIRE(is_equivalent(rev));
        CHECK(std::get<SubstitutionMap>(rev) == map.inverse());
    }
}
