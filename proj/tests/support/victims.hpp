#pragma once

// Hand-crafted victims with exactly known behavior, for attack-logic tests.

#include <functional>
#include <set>
#include <string>

#include "codenat/subtoken.hpp"
#include "codenat/victim.hpp"

namespace fixtures {

inline bool has_subtoken(const codenat::CodeSnippet& code, const std::string& word) {
    for (const auto& t : code.tokens()) {
        if (t.kind != codenat::TokenKind::Identifier) continue;
        for (const auto& sub : codenat::split_subtokens(t.text))
            if (sub == word) return true;
    }
    return false;
}

inline bool has_identifier(const codenat::CodeSnippet& code, const std::string& name) {
    return code.all_identifier_texts().count(name) > 0;
}

inline bool has_literal(const codenat::CodeSnippet& code, const std::string& text) {
    for (const auto& t : code.tokens())
        if (t.kind == codenat::TokenKind::Literal && t.text == text) return true;
    return false;
}

// Binary classifier whose P(label=1) is an arbitrary function of the
// snippet. Ground truth in these tests is label 1, so the attack goal is
// pushing the function below 0.5.
class FunctionVictim : public codenat::Victim {
public:
    explicit FunctionVictim(std::function<double(const codenat::CodeSnippet&)> p_one)
        : p_one_(std::move(p_one)) {}

    codenat::VictimTask task() const override {
        return codenat::VictimTask{codenat::TaskKind::Classification, 0.5};
    }

protected:
    codenat::VictimOutput do_query(const codenat::CodeSnippet& code) override {
        double p = p_one_(code);
        codenat::VictimOutput out;
        out.kind = codenat::TaskKind::Classification;
        out.probs = {1.0 - p, p};
        out.label = p >= 0.5 ? 1 : 0;
        return out;
    }

private:
    std::function<double(const codenat::CodeSnippet&)> p_one_;
};

// P(1) high while the marker subtoken survives anywhere in an identifier.
inline FunctionVictim marker_victim(std::string marker, double hit = 0.9,
                                    double miss = 0.1) {
    return FunctionVictim([marker = std::move(marker), hit, miss](
                              const codenat::CodeSnippet& code) {
        return has_subtoken(code, marker) ? hit : miss;
    });
}

// Identifier-blind victim: the label hangs off a literal, so renames never
// move the score.
inline FunctionVictim literal_victim(std::string literal, double hit = 0.9,
                                     double miss = 0.1) {
    return FunctionVictim([literal = std::move(literal), hit, miss](
                              const codenat::CodeSnippet& code) {
        return has_literal(code, literal) ? hit : miss;
    });
}

// Correct while either marker survives; only the joint rename flips it.
inline FunctionVictim xor_victim(std::string a, std::string b) {
    return FunctionVictim(
        [a = std::move(a), b = std::move(b)](const codenat::CodeSnippet& code) {
            return has_subtoken(code, a) || has_subtoken(code, b) ? 0.9 : 0.2;
        });
}

}  // namespace fixtures
