#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "codenat/errors.hpp"
#include "codenat/hash.hpp"
#include "codenat/prompts.hpp"
#include "codenat/rename.hpp"
#include "codenat/snippet.hpp"
#include "codenat/subtoken.hpp"

namespace codenat {

struct NaturalnessVerdict {
    std::string analysis;
    int score = 0;  // in 1..5
};

struct JudgeConfig {
    std::string endpoint;                // empty selects no transport (mock-only)
    std::string model = "gpt-4-1106-preview";
    double temperature = 0.0;
    double top_p = 0.9;
    int max_input_tokens = 4096;
    int max_retries = 2;
    int max_concurrency = 4;
    int purify_attempts = 3;
    int timeout_ms = 30000;

    void validate() const {
        if (temperature < 0.0) throw ConfigError("temperature must be >= 0");
        if (top_p <= 0.0 || top_p > 1.0) throw ConfigError("top_p must be in (0,1]");
        if (max_input_tokens <= 0) throw ConfigError("max input tokens must be > 0");
        if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
        if (purify_attempts < 1) throw ConfigError("purify_attempts must be >= 1");
    }
};

// Chat transport: one system+user exchange, returns the assistant text.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::string& system_prompt,
                                 const std::string& user_content) = 0;
};

// --- prompt construction ---------------------------------------------------

enum class PromptMode { Pair, Single };

namespace detail {

// Word-plus-punctuation count scaled by 1.3 approximates LLM tokenizer
// counts well enough for the input-length guard.
inline int estimate_tokens(const std::string& text) {
    long units = 0;
    bool in_word = false;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '_') {
            if (!in_word) ++units;
            in_word = true;
        } else {
            in_word = false;
            if (!std::isspace(c)) ++units;
        }
    }
    return static_cast<int>(std::lround(static_cast<double>(units) * 1.3));
}

}  // namespace detail

inline std::pair<std::string, std::string> build_eval_prompt(
    PromptMode mode, const CodeSnippet* original, const CodeSnippet& code,
    const JudgeConfig& config) {
    if (mode == PromptMode::Pair && original == nullptr)
        throw ConfigError("pair mode requires the original snippet");

    std::string system_prompt;
    nlohmann::ordered_json payload;
    if (mode == PromptMode::Pair) {
        system_prompt = prompts::kEvalPairSystem;
        payload["Original code"] = original->source();
        payload["Adversarial code"] = code.source();
    } else {
        system_prompt = prompts::kEvalSingleSystem;
        payload["Code"] = code.source();
    }
    std::string user_content = payload.dump();

    int estimate = detail::estimate_tokens(system_prompt) +
                   detail::estimate_tokens(user_content);
    if (estimate > config.max_input_tokens)
        throw OverLengthInput("prompt estimate " + std::to_string(estimate) +
                              " exceeds limit " +
                              std::to_string(config.max_input_tokens));
    return {std::move(system_prompt), std::move(user_content)};
}

// Purify user content mirrors the template: the code set inside braces.
inline std::pair<std::string, std::string> build_purify_prompt(
    const CodeSnippet& adversarial) {
    return {prompts::kPurifySystem, "{ " + adversarial.source() + " }"};
}

// --- verdict parsing ---------------------------------------------------------

namespace detail {

inline std::string strip_code_fences(const std::string& raw) {
    std::string text = raw;
    auto trim = [](std::string& s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.erase(s.begin());
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.pop_back();
    };
    trim(text);
    if (text.rfind("```", 0) == 0) {
        std::size_t first_newline = text.find('\n');
        std::size_t closing = text.rfind("```");
        if (first_newline != std::string::npos && closing > first_newline) {
            text = text.substr(first_newline + 1, closing - first_newline - 1);
            trim(text);
        }
    }
    return text;
}

inline bool ci_match(const std::string& text, std::size_t at, const char* word) {
    for (std::size_t i = 0; word[i]; ++i) {
        if (at + i >= text.size()) return false;
        if (std::tolower(static_cast<unsigned char>(text[at + i])) !=
            std::tolower(static_cast<unsigned char>(word[i])))
            return false;
    }
    return true;
}

}  // namespace detail

// Strict JSON {"Analysis","Score"} first; on failure, the last "Score" token
// followed by an integer. Out-of-range scores are rejected, never clamped.
inline NaturalnessVerdict parse_verdict(const std::string& raw) {
    std::string text = detail::strip_code_fences(raw);

    auto check_range = [](long score) {
        if (score < 1 || score > 5)
            throw ScoreOutOfRange("score " + std::to_string(score) +
                                  " outside 1..5");
        return static_cast<int>(score);
    };

    try {
        auto parsed = nlohmann::json::parse(text);
        if (parsed.is_object() && parsed.contains("Score")) {
            NaturalnessVerdict v;
            const auto& score = parsed["Score"];
            if (score.is_number_integer()) {
                v.score = check_range(score.get<long>());
            } else if (score.is_string()) {
                try {
                    v.score = check_range(std::stol(score.get<std::string>()));
                } catch (const std::invalid_argument&) {
                    throw Unparseable("non-numeric Score field");
                }
            } else if (score.is_number_float()) {
                double d = score.get<double>();
                if (d != std::floor(d)) throw Unparseable("fractional Score field");
                v.score = check_range(static_cast<long>(d));
            } else {
                throw Unparseable("unusable Score field type");
            }
            if (parsed.contains("Analysis")) {
                const auto& a = parsed["Analysis"];
                v.analysis = a.is_string() ? a.get<std::string>() : a.dump();
            }
            return v;
        }
    } catch (const nlohmann::json::exception&) {
        // fall through to the text scan
    }

    // fallback: last integer 1..5 that follows a "Score" token
    std::optional<long> last_in_range;
    bool any_pair = false;
    for (std::size_t i = 0; i + 5 <= text.size(); ++i) {
        if (!detail::ci_match(text, i, "score")) continue;
        std::size_t j = i + 5;
        while (j < text.size() &&
               !std::isdigit(static_cast<unsigned char>(text[j])) && text[j] != '\n')
            ++j;
        if (j >= text.size() || !std::isdigit(static_cast<unsigned char>(text[j])))
            continue;
        std::size_t end = j;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end])))
            ++end;
        long value = std::stol(text.substr(j, end - j));
        any_pair = true;
        if (value >= 1 && value <= 5) last_in_range = value;
    }
    if (last_in_range) {
        NaturalnessVerdict v;
        v.score = static_cast<int>(*last_in_range);
        // best-effort analysis extraction
        for (std::size_t i = 0; i + 8 <= text.size(); ++i) {
            if (!detail::ci_match(text, i, "analysis")) continue;
            std::size_t j = i + 8;
            while (j < text.size() && (text[j] == ':' || text[j] == ' ')) ++j;
            std::size_t end = text.find('\n', j);
            v.analysis = text.substr(j, end == std::string::npos ? end : end - j);
        }
        return v;
    }
    if (any_pair) throw ScoreOutOfRange("no Score value inside 1..5");
    throw Unparseable("no verdict found in response");
}

// --- audit trail ----------------------------------------------------------------

// Single-writer JSONL audit sink for raw judge traffic.
class AuditLog {
public:
    explicit AuditLog(const std::string& path) : out_(path, std::ios::app) {
        if (!out_) throw ConfigError("cannot open audit log: " + path);
    }

    void record(const std::string& id, const std::string& system_prompt,
                const std::string& user_content, const std::string& raw_response,
                const nlohmann::json& parsed) {
        nlohmann::ordered_json line;
        line["id"] = id;
        line["prompt_hash"] = fnv1a_hex(system_prompt + "\x1f" + user_content);
        line["raw_response"] = raw_response;
        line["parsed"] = parsed;
        std::lock_guard<std::mutex> lock(mu_);
        out_ << line.dump() << "\n";
        out_.flush();
    }

private:
    std::mutex mu_;
    std::ofstream out_;
};

// --- judge / detect / purify -----------------------------------------------------

struct JudgeOutcome {
    NaturalnessVerdict verdict;
    std::string raw_response;
};

// One verdict per call; transport failures and unparseable responses retry
// up to config.max_retries before the error escapes.
inline JudgeOutcome judge_code(const CodeSnippet& code, const CodeSnippet* original,
                               ChatClient& client, const JudgeConfig& config,
                               AuditLog* audit = nullptr,
                               const std::string& audit_id = "") {
    config.validate();
    auto [system_prompt, user_content] = build_eval_prompt(
        original ? PromptMode::Pair : PromptMode::Single, original, code, config);

    std::string last_error;
    bool last_was_parse_failure = false;
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        std::string raw;
        try {
            raw = client.complete(system_prompt, user_content);
        } catch (const TransportError& e) {
            last_error = e.what();
            last_was_parse_failure = false;
            continue;
        }
        try {
            NaturalnessVerdict verdict = parse_verdict(raw);
            if (audit) {
                nlohmann::json parsed;
                parsed["Analysis"] = verdict.analysis;
                parsed["Score"] = verdict.score;
                audit->record(audit_id, system_prompt, user_content, raw, parsed);
            }
            return JudgeOutcome{std::move(verdict), std::move(raw)};
        } catch (const ScoreOutOfRange&) {
            throw;  // a verdict arrived but is invalid; retrying cannot fix it
        } catch (const Unparseable& e) {
            last_error = e.what();
            last_was_parse_failure = true;
            if (audit)
                audit->record(audit_id, system_prompt, user_content, raw,
                              nlohmann::json(nullptr));
        }
    }
    if (last_was_parse_failure)
        throw Unparseable("judge failed after retries: " + last_error);
    throw TransportError("judge failed after retries: " + last_error);
}

struct DetectOutcome {
    bool flagged = false;
    NaturalnessVerdict verdict;
};

// Flags code as adversarial when its NES is at or below the threshold.
inline DetectOutcome detect(const CodeSnippet& code, ChatClient& client,
                            const JudgeConfig& config, int delta) {
    if (delta < 1 || delta > 4) throw ConfigError("detection threshold must be 1..4");
    auto outcome = judge_code(code, nullptr, client, config);
    return DetectOutcome{outcome.verdict.score <= delta, outcome.verdict};
}

struct PurificationResult {
    CodeSnippet purified;
    SubstitutionMap recovered_map;  // adversarial name -> purified name
    bool validated = false;
    int attempts = 0;
    std::string last_response;
};

namespace detail {

// purifier responses may arrive fenced or wrapped in the template braces
inline std::string extract_code_response(const std::string& raw) {
    std::string text = strip_code_fences(raw);
    if (text.size() > 4 && text.rfind("{ ", 0) == 0 &&
        text.compare(text.size() - 2, 2, " }") == 0) {
        return text.substr(2, text.size() - 4);
    }
    return text;
}

inline bool comments_identical(const CodeSnippet& a, const CodeSnippet& b) {
    std::vector<const Token*> ca, cb;
    for (const auto& t : a.tokens())
        if (t.kind == TokenKind::Comment) ca.push_back(&t);
    for (const auto& t : b.tokens())
        if (t.kind == TokenKind::Comment) cb.push_back(&t);
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (ca[i]->text != cb[i]->text) return false;
    return true;
}

}  // namespace detail

// Asks the client to rewrite the adversarial snippet and validates the
// answer: it must parse, be alpha-equivalent to the input, and leave every
// non-identifier token (comments included) untouched. Failed attempts retry
// up to the configured limit; the result then carries validated=false.
inline PurificationResult purify(const CodeSnippet& adversarial, ChatClient& client,
                                 const JudgeConfig& config) {
    config.validate();
    auto [system_prompt, user_content] = build_purify_prompt(adversarial);

    PurificationResult result;
    result.purified = adversarial;  // fallback when nothing validates

    for (int attempt = 0; attempt < config.purify_attempts; ++attempt) {
        ++result.attempts;
        std::string raw;
        try {
            raw = client.complete(system_prompt, user_content);
        } catch (const TransportError&) {
            continue;
        }
        result.last_response = raw;
        std::string code_text = detail::extract_code_response(raw);
        CodeSnippet candidate;
        try {
            candidate = CodeSnippet::parse(code_text, adversarial.lang());
        } catch (const Error&) {
            continue;  // rule 2 violated: not compilable
        }
        auto equivalence = alpha_equivalent(adversarial, candidate);
        if (!is_equivalent(equivalence)) continue;  // rule 1 violated
        if (!detail::comments_identical(adversarial, candidate)) continue;
        result.purified = std::move(candidate);
        result.recovered_map = std::get<SubstitutionMap>(equivalence);
        result.validated = true;
        return result;
    }
    return result;
}

// --- offline mock clients ----------------------------------------------------------

namespace detail {

inline std::string extract_judged_code(const std::string& user_content) {
    try {
        auto parsed = nlohmann::json::parse(user_content);
        if (parsed.contains("Adversarial code"))
            return parsed["Adversarial code"].get<std::string>();
        if (parsed.contains("Code")) return parsed["Code"].get<std::string>();
    } catch (const nlohmann::json::exception&) {
    }
    return extract_code_response(user_content);
}

inline bool any_identifier_with_digit_subtoken(const std::string& code_text) {
    for (Lang lang : {Lang::Java, Lang::C}) {
        try {
            auto tokens = tokenize(code_text, lang);
            for (const auto& t : tokens) {
                if (t.kind != TokenKind::Identifier) continue;
                for (const auto& sub : split_subtokens(t.text)) {
                    if (std::isdigit(static_cast<unsigned char>(sub[0]))) return true;
                }
            }
            return false;
        } catch (const UnlexableInput&) {
            continue;
        }
    }
    return false;
}

}  // namespace detail

// Deterministic judge for offline runs and tests. Rules:
//   constant     — always the configured verdict
//   marker       — score 1 when the judged code contains the marker substring
//   digit-suffix — score 1 when any identifier carries a numeric subtoken
class MockJudgeClient : public ChatClient {
public:
    enum class Rule { Constant, Marker, DigitSuffix };

    static MockJudgeClient constant(int score, std::string analysis = "fixed verdict") {
        return MockJudgeClient(Rule::Constant, score, "", std::move(analysis));
    }

    static MockJudgeClient marker(std::string marker_text, int hit_score = 1,
                                  int miss_score = 5) {
        MockJudgeClient c(Rule::Marker, hit_score, std::move(marker_text),
                          "marker rule");
        c.miss_score_ = miss_score;
        return c;
    }

    static MockJudgeClient digit_suffix() {
        return MockJudgeClient(Rule::DigitSuffix, 1, "", "digit-suffix rule");
    }

    std::string complete(const std::string&, const std::string& user_content) override {
        int score = miss_score_;
        std::string code = detail::extract_judged_code(user_content);
        switch (rule_) {
            case Rule::Constant:
                score = score_;
                break;
            case Rule::Marker:
                score = code.find(marker_) != std::string::npos ? score_ : miss_score_;
                break;
            case Rule::DigitSuffix:
                score = detail::any_identifier_with_digit_subtoken(code) ? 1 : 5;
                break;
        }
        nlohmann::ordered_json out;
        out["Analysis"] = analysis_;
        out["Score"] = score;
        return out.dump();
    }

private:
    MockJudgeClient(Rule rule, int score, std::string marker, std::string analysis)
        : rule_(rule), score_(score), marker_(std::move(marker)),
          analysis_(std::move(analysis)) {}

    Rule rule_;
    int score_;
    int miss_score_ = 5;
    std::string marker_;
    std::string analysis_;
};

// Purifier mocks: a lookup oracle (exact inverse of a known attack), the
// identity echo, and a vandal that edits a literal (never validates).
class OraclePurifyClient : public ChatClient {
public:
    void learn(const std::string& adversarial_source, const std::string& purified) {
        lookup_[adversarial_source] = purified;
    }

    std::string complete(const std::string&, const std::string& user_content) override {
        std::string code = detail::extract_code_response(user_content);
        auto it = lookup_.find(code);
        if (it != lookup_.end()) return it->second;
        return code;  // unknown input: behave like the identity
    }

private:
    std::map<std::string, std::string> lookup_;
};

class IdentityPurifyClient : public ChatClient {
public:
    std::string complete(const std::string&, const std::string& user_content) override {
        return detail::extract_code_response(user_content);
    }
};

class LiteralVandalClient : public ChatClient {
public:
    std::string complete(const std::string&, const std::string& user_content) override {
        std::string code = detail::extract_code_response(user_content);
        // flip a digit inside the first numeric literal; never validates
        try {
            for (const Token& t : tokenize(code, Lang::C)) {
                if (t.kind != TokenKind::Literal) continue;
                char c = code[t.begin];
                if (!std::isdigit(static_cast<unsigned char>(c))) continue;
                code[t.begin] = c == '9' ? '8' : static_cast<char>(c + 1);
                return code;
            }
        } catch (const UnlexableInput&) {
        }
        return code + "\nint stray_injected_statement;";
    }
};

// Always fails with a transport error; for retry-path tests.
class FailingChatClient : public ChatClient {
public:
    std::string complete(const std::string&, const std::string&) override {
        ++calls_;
        throw TransportError("simulated endpoint failure");
    }
    int calls() const { return calls_; }

private:
    int calls_ = 0;
};

}  // namespace codenat
