#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "codenat/rename.hpp"
#include "codenat/victim.hpp"
#include "support/fixtures.hpp"

using namespace codenat;

namespace {

// label 1 snippets contain the marker subtoken in an identifier
std::vector<ToyTrainRecord> marker_corpus(const std::string& marker, int count) {
    std::vector<ToyTrainRecord> out;
    for (int i = 0; i < count; ++i) {
        std::string pos =
            "int " + marker + "Items" + std::to_string(i) +
            "(int[] data) {\n"
            "    int acc" + std::to_string(i) + " = " + std::to_string(i) + ";\n"
            "    return acc" + std::to_string(i) + " + data.length;\n"
            "}\n";
        std::string neg =
            "int mergeValues" + std::to_string(i) +
            "(int[] data) {\n"
            "    int total" + std::to_string(i) + " = " + std::to_string(i) + ";\n"
            "    return total" + std::to_string(i) + " - data.length;\n"
            "}\n";
        out.push_back({CodeSnippet::parse(pos, Lang::Java), std::nullopt, 1});
        out.push_back({CodeSnippet::parse(neg, Lang::Java), std::nullopt, 0});
    }
    return out;
}

}  // namespace

TEST_CASE("truth score reads the truth label probability") {
    VictimOutput out;
    out.kind = TaskKind::Classification;
    out.probs = {0.1, 0.9};
    out.label = 1;
    CHECK(truth_score(out, Truth{1}).value == Catch::Approx(0.9));
    CHECK(truth_score(out, Truth{0}).value == Catch::Approx(0.1));
    CHECK_THROWS_AS(truth_score(out, Truth{std::string("ref")}), KindMismatch);
    CHECK_THROWS_AS(truth_score(out, Truth{7}), KindMismatch);
}

TEST_CASE("truth score for generation is BLEU against the reference") {
    VictimOutput out;
    out.kind = TaskKind::Generation;
    out.text = "convert four bytes to float";
    CHECK(truth_score(out, Truth{std::string("convert four bytes to float")}).value ==
          Catch::Approx(1.0));
    out.text = "p q r s t";
    CHECK(truth_score(out, Truth{std::string("a b c d e")}).value == 0.0);
}

TEST_CASE("classification correctness is argmax equality") {
    VictimOutput out;
    out.kind = TaskKind::Classification;
    out.probs = {0.6, 0.4};
    VictimTask task{TaskKind::Classification, 0.5};
    CHECK(is_correct(out, Truth{0}, task));
    CHECK(!is_correct(out, Truth{1}, task));
}

TEST_CASE("generation correctness needs a baseline and the restore ratio") {
    VictimTask task{TaskKind::Generation, 0.5};
    VictimOutput out;
    out.kind = TaskKind::Generation;
    out.text = "x";
    CHECK_THROWS_AS(is_correct(out, Truth{std::string("x")}, task), MissingBaseline);

    // scores stubbed through single-token outputs: bleu is 1 or 0 here, so
    // exercise the ratio directly with crafted baselines
    struct Case { double score, baseline; bool expect; };
    // 0.10 < 0.5 * 0.25 -> wrong; 0.2716 >= 0.5 * 0.2528 -> correct
    for (auto [score, baseline, expect] :
         {Case{0.10, 0.25, false}, Case{0.2716, 0.2528, true}}) {
        bool got = score >= task.theta_gen * baseline;
        CHECK(got == expect);
    }
}

TEST_CASE("argmax is invariant under rescaling and renormalization") {
    VictimOutput out;
    out.kind = TaskKind::Classification;
    out.probs = {0.2, 0.5, 0.3};
    VictimTask task{TaskKind::Classification, 0.5};
    bool base = is_correct(out, Truth{1}, task);
    VictimOutput scaled = out;
    double total = 0.0;
    for (double& p : scaled.probs) {
        p *= 3.7;
        total += p;
    }
    for (double& p : scaled.probs) p /= total;
    CHECK(is_correct(scaled, Truth{1}, task) == base);
}

TEST_CASE("toy victim separates the marker corpus and is deterministic") {
    auto corpus = marker_corpus("sort", 12);
    std::vector<ToyTrainRecord> train(corpus.begin(), corpus.begin() + 16);
    std::vector<ToyTrainRecord> held(corpus.begin() + 16, corpus.end());

    auto victim = train_toy_victim(train, 7);
    int hits = 0;
    for (const auto& r : held) {
        auto out = victim->query(r.code);
        hits += out.label == r.label ? 1 : 0;
    }
    CHECK(static_cast<double>(hits) / static_cast<double>(held.size()) >= 0.9);

    auto again = train_toy_victim(train, 7);
    CHECK(victim->weights() == again->weights());

    // probability vector matches an independent softmax over the weights
    auto x = victim->features(held[0].code, nullptr);
    const auto& w = victim->weights();
    std::vector<double> logits(w.size(), 0.0);
    for (std::size_t c = 0; c < w.size(); ++c)
        for (std::size_t j = 0; j < x.size(); ++j) logits[c] += w[c][j] * x[j];
    double m = *std::max_element(logits.begin(), logits.end());
    double denom = 0.0;
    for (double& l : logits) denom += std::exp(l - m);
    auto out = victim->query(held[0].code);
    for (std::size_t c = 0; c < w.size(); ++c)
        CHECK(out.probs[c] == Catch::Approx(std::exp(logits[c] - m) / denom).margin(1e-12));
    double sum = 0.0;
    for (double p : out.probs) sum += p;
    CHECK(sum == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("single-class corpus is degenerate") {
    auto corpus = marker_corpus("sort", 3);
    corpus.erase(std::remove_if(corpus.begin(), corpus.end(),
                                [](const ToyTrainRecord& r) { return r.label == 0; }),
                 corpus.end());
    CHECK_THROWS_AS(train_toy_victim(corpus, 1), DegenerateCorpus);
    CHECK_THROWS_AS(train_toy_victim({}, 1), DegenerateCorpus);
}

TEST_CASE("query counter counts invocations") {
    auto corpus = marker_corpus("sort", 4);
    auto victim = train_toy_victim(corpus, 3);
    CHECK(victim->query_count() == 0);
    victim->query(corpus[0].code);
    victim->query(corpus[1].code);
    CHECK(victim->query_count() == 2);
}

TEST_CASE("budget wrapper enforces the hard cap") {
    auto corpus = marker_corpus("sort", 4);
    auto victim = train_toy_victim(corpus, 3);
    BudgetedVictim budgeted(*victim, 2);
    budgeted.query(corpus[0].code);
    budgeted.query(corpus[1].code);
    CHECK(budgeted.used() == 2);
    CHECK_THROWS_AS(budgeted.query(corpus[2].code), BudgetExhausted);
    CHECK(budgeted.used() == 2);  // the rejected call is not spent
}

TEST_CASE("toy summarizer output tracks identifier names") {
    auto code = CodeSnippet::parse(
        "int sumValues(int[] data, int limit) { int acc = 0; return acc; }",
        Lang::Java);
    ToySummarizer summarizer;
    auto out = summarizer.query(code);
    CHECK(out.text == "sum values data limit acc");

    auto renamed = apply_substitution(
        code, SubstitutionMap::from_pairs({{"sumValues", "q9z"}}));
    auto out2 = summarizer.query(renamed);
    CHECK(out2.text != out.text);
    double base = truth_score(out, Truth{out.text}).value;
    double after = truth_score(out2, Truth{out.text}).value;
    CHECK(base == Catch::Approx(1.0));
    CHECK(after < base);
}

TEST_CASE("pair classification victims consume both snippets") {
    std::vector<ToyTrainRecord> corpus;
    for (int i = 0; i < 8; ++i) {
        auto a = CodeSnippet::parse(fixtures::java_snippet(static_cast<std::uint64_t>(i)),
                                    Lang::Java);
        // clones: identical snippet paired with itself, label 1; shifted pair label 0
        auto b = CodeSnippet::parse(
            fixtures::java_snippet(static_cast<std::uint64_t>(i + 100)), Lang::Java);
        corpus.push_back({a, a, 1});
        corpus.push_back({a, b, 0});
    }
    VictimTask task{TaskKind::PairClassification, 0.5};
    auto victim = train_toy_victim(corpus, 5, task);
    auto out = victim->query(corpus[0].code, *corpus[0].code2);
    CHECK(out.probs.size() == 2);
    CHECK_THROWS_AS(victim->query(corpus[0].code), KindMismatch);
}
