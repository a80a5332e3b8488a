#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "codenat/bleu.hpp"

using namespace codenat;

namespace {

// Independent brute-force BLEU: joins n-grams into string keys and walks
// them positionally. Kept deliberately separate from the implementation.
double oracle_bleu(const std::string& cand_text, const std::string& ref_text) {
    auto words = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream in(s);
        for (std::string w; in >> w;) out.push_back(w);
        return out;
    };
    auto cand = words(cand_text);
    auto ref = words(ref_text);
    if (cand.empty() || ref.empty()) return 0.0;
    std::size_t max_n = std::min<std::size_t>(4, std::min(cand.size(), ref.size()));

    double logp = 0.0;
    for (std::size_t n = 1; n <= max_n; ++n) {
        std::unordered_map<std::string, int> ref_counts;
        for (std::size_t i = 0; i + n <= ref.size(); ++i) {
            std::string key;
            for (std::size_t k = 0; k < n; ++k) key += ref[i + k] + "\x1f";
            ref_counts[key]++;
        }
        std::unordered_map<std::string, int> cand_counts;
        for (std::size_t i = 0; i + n <= cand.size(); ++i) {
            std::string key;
            for (std::size_t k = 0; k < n; ++k) key += cand[i + k] + "\x1f";
            cand_counts[key]++;
        }
        int num = 0, den = 0;
        for (auto& [key, c] : cand_counts) {
            den += c;
            auto it = ref_counts.find(key);
            if (it != ref_counts.end()) num += std::min(c, it->second);
        }
        if (num == 0) return 0.0;
        logp += std::log(double(num) / double(den));
    }
    double bp = cand.size() < ref.size()
                    ? std::exp(1.0 - double(ref.size()) / double(cand.size()))
                    : 1.0;
    return bp * std::exp(logp / double(max_n));
}

}  // namespace

TEST_CASE("identical non-empty strings score 1") {
    CHECK(bleu4("a b", "a b") == Catch::Approx(1.0));
    CHECK(bleu4("return x ;", "return x ;") == Catch::Approx(1.0));
}

TEST_CASE("empty candidate scores 0") {
    CHECK(bleu4("", "a b c") == 0.0);
    CHECK(bleu4("   ", "a b c") == 0.0);
}

TEST_CASE("no shared 4-gram means 0 without smoothing") {
    CHECK(bleu4("a b c d x", "p q r s t") == 0.0);
    CHECK(bleu4("a b c d e", "e d c b a x y z") == 0.0);  // unigrams hit, 2-grams miss
}

TEST_CASE("single differing token against the hand computation") {
    double got = bleu4("a b c d e", "a b c d f");
    // p1..p4 = 4/5, 3/4, 2/3, 1/2 with BP = 1 -> 0.2^(1/4)
    CHECK(got == Catch::Approx(0.6687403049764221).margin(1e-12));
    CHECK(got == Catch::Approx(oracle_bleu("a b c d e", "a b c d f")).margin(1e-12));
}

TEST_CASE("brevity penalty applies to short candidates") {
    double got = bleu4("a b c d", "a b c d e f g h");
    double expect = std::exp(1.0 - 8.0 / 4.0);  // precisions are all 1
    CHECK(got == Catch::Approx(expect).margin(1e-12));
}

TEST_CASE("bleu matches the oracle across assorted pairs") {
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"the cat sat on the mat", "the cat is on the mat"},
        {"a a a a a", "a a b a a"},
        {"x", "x"},
        {"x y", "y x"},
        {"one two three four five six", "one two three four"},
        {"parse the input and return tokens", "parse input and return the tokens"},
    };
    for (const auto& [cand, ref] : cases) {
        INFO(cand << " || " << ref);
        CHECK(bleu4(cand, ref) == Catch::Approx(oracle_bleu(cand, ref)).margin(1e-12));
    }
}
