#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "codenat/attacks.hpp"
#include "codenat/corpus.hpp"
#include "codenat/errors.hpp"
#include "codenat/http.hpp"
#include "codenat/judge.hpp"
#include "codenat/pipeline.hpp"
#include "codenat/victim.hpp"

namespace codenat {

// Victim construction recipe. `kind` selects the backend:
//   toy            logistic bag-of-identifier-subtokens classifier
//   toy-literal    same machinery over literal tokens (identifier-blind)
//   toy-summarizer deterministic generation victim
//   http           remote adapter speaking the JSON wire format
struct VictimSpec {
    std::string kind = "toy";
    std::string task = "classification";
    double theta_gen = 0.5;
    std::string train;  // training corpus path (toy kinds)
    std::uint64_t seed = 0;
    std::string url;  // http kind
    int timeout_ms = 15000;
    int max_retries = 2;
    int max_concurrency = 4;
    std::string token_env = "CODENAT_VICTIM_TOKEN";

    static VictimSpec from_json(const nlohmann::json& j) {
        VictimSpec s;
        s.kind = j.value("kind", s.kind);
        s.task = j.value("task", s.task);
        s.theta_gen = j.value("theta_gen", s.theta_gen);
        s.train = j.value("train", s.train);
        s.seed = j.value("seed", s.seed);
        s.url = j.value("url", s.url);
        s.timeout_ms = j.value("timeout_ms", s.timeout_ms);
        s.max_retries = j.value("max_retries", s.max_retries);
        s.max_concurrency = j.value("max_concurrency", s.max_concurrency);
        s.token_env = j.value("token_env", s.token_env);
        return s;
    }
};

// Judge/purifier transport recipe. `mode` selects the backend:
//   http               chat endpoint from `endpoint`
//   mock-constant      fixed verdict (constant_score)
//   mock-marker        score 1 when the judged code contains `marker`
//   mock-digit-suffix  score 1 when any identifier has a numeric subtoken
//   identity           purifier that echoes its input
//   oracle             purifier that restores the stored original code
struct JudgeSpec {
    std::string mode = "http";
    int constant_score = 5;
    std::string marker;
    std::string token_env = "CODENAT_JUDGE_TOKEN";
    JudgeConfig config;

    static JudgeSpec from_json(const nlohmann::json& j) {
        JudgeSpec s;
        s.mode = j.value("mode", s.mode);
        s.constant_score = j.value("constant_score", s.constant_score);
        s.marker = j.value("marker", s.marker);
        s.token_env = j.value("token_env", s.token_env);
        s.config.endpoint = j.value("endpoint", s.config.endpoint);
        s.config.model = j.value("model", s.config.model);
        s.config.temperature = j.value("temperature", s.config.temperature);
        s.config.top_p = j.value("top_p", s.config.top_p);
        s.config.max_input_tokens = j.value("max_input_tokens", s.config.max_input_tokens);
        s.config.max_retries = j.value("max_retries", s.config.max_retries);
        s.config.max_concurrency = j.value("max_concurrency", s.config.max_concurrency);
        s.config.purify_attempts = j.value("purify_attempts", s.config.purify_attempts);
        s.config.timeout_ms = j.value("timeout_ms", s.config.timeout_ms);
        return s;
    }
};

struct RunConfig {
    std::map<std::string, VictimSpec> victims;
    JudgeSpec judge;
    JudgeSpec purifier;  // defaults to judge when absent
    AttackConfig attack;
    std::string dataset;
    std::string out_dir = "runs/default";
    std::uint64_t seed = 0;
    int delta = 2;
    double theta_gen = 0.5;
    int jobs = 1;
    bool provider_harvest = true;
    nlohmann::ordered_json raw;  // config echo for report.json

    static RunConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config: " + path);
        nlohmann::ordered_json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config parse failure: " + std::string(e.what()));
        }
        return from_json(doc);
    }

    static RunConfig from_json(const nlohmann::ordered_json& doc) {
        RunConfig c;
        c.raw = doc;
        c.seed = doc.value("seed", c.seed);
        c.delta = doc.value("delta", c.delta);
        c.theta_gen = doc.value("theta_gen", c.theta_gen);
        c.jobs = doc.value("jobs", c.jobs);
        c.dataset = doc.value("dataset", c.dataset);
        c.out_dir = doc.value("out_dir", c.out_dir);
        c.provider_harvest = doc.value("provider_harvest", c.provider_harvest);
        if (doc.contains("victims")) {
            for (const auto& [key, spec] : doc["victims"].items())
                c.victims[key] = VictimSpec::from_json(spec);
        }
        if (doc.contains("judge")) c.judge = JudgeSpec::from_json(doc["judge"]);
        c.purifier = doc.contains("purifier") ? JudgeSpec::from_json(doc["purifier"])
                                              : c.judge;
        if (doc.contains("attack")) {
            const auto& a = doc["attack"];
            c.attack.budget = a.value("budget", c.attack.budget);
            c.attack.candidates_per_identifier =
                a.value("candidates_per_identifier", c.attack.candidates_per_identifier);
            if (a.contains("mhm")) {
                c.attack.mhm.proposals_per_iteration = a["mhm"].value(
                    "proposals_per_iteration", c.attack.mhm.proposals_per_iteration);
                c.attack.mhm.epsilon = a["mhm"].value("epsilon", c.attack.mhm.epsilon);
            }
            if (a.contains("genetic")) {
                c.attack.genetic.population =
                    a["genetic"].value("population", c.attack.genetic.population);
                c.attack.genetic.generations =
                    a["genetic"].value("generations", c.attack.genetic.generations);
                c.attack.genetic.mutation_rate =
                    a["genetic"].value("mutation_rate", c.attack.genetic.mutation_rate);
            }
            if (a.contains("beam"))
                c.attack.beam.width = a["beam"].value("width", c.attack.beam.width);
        }
        c.attack.seed = c.seed;
        if (c.delta < 1 || c.delta > 4) throw ConfigError("delta must be in 1..4");
        if (c.theta_gen <= 0 || c.theta_gen > 1)
            throw ConfigError("theta_gen must be in (0,1]");
        return c;
    }
};

// Builds the victim behind a config key. Toy victims train eagerly from
// their corpus; construction fails fast on missing paths and bad specs.
inline std::shared_ptr<Victim> build_victim(const VictimSpec& spec) {
    VictimTask task{task_from_tag(spec.task), spec.theta_gen};
    task.validate();
    if (spec.kind == "http") {
        RemoteVictimConfig config;
        config.url = spec.url;
        config.task = task;
        config.timeout_ms = spec.timeout_ms;
        config.max_retries = spec.max_retries;
        config.max_concurrency = spec.max_concurrency;
        config.token_env = spec.token_env;
        return std::make_shared<RemoteVictim>(config);
    }
    if (spec.kind == "toy-summarizer") {
        return std::make_shared<ToySummarizer>(spec.theta_gen);
    }
    if (spec.kind == "toy" || spec.kind == "toy-literal") {
        if (spec.train.empty())
            throw ConfigError("toy victim needs a `train` corpus path");
        if (!std::filesystem::exists(spec.train))
            throw ConfigError("training corpus missing: " + spec.train);
        auto load = load_corpus(spec.train);
        std::vector<ToyTrainRecord> train;
        for (const auto& rec : load.records) {
            if (!rec.label) continue;
            try {
                ToyTrainRecord t;
                t.code = CodeSnippet::parse(rec.code, rec.lang);
                if (rec.is_pair())
                    t.code2 = CodeSnippet::parse(rec.code2, rec.lang);
                t.label = *rec.label;
                train.push_back(std::move(t));
            } catch (const Error&) {
                // unparseable training rows are dropped
            }
        }
        FeatureSource source = spec.kind == "toy-literal"
                                   ? FeatureSource::Literals
                                   : FeatureSource::IdentifierSubtokens;
        return train_toy_victim(train, spec.seed, task, source);
    }
    throw ConfigError("unknown victim kind: " + spec.kind);
}

inline std::map<std::string, std::shared_ptr<Victim>> build_victims(
    const RunConfig& config, const std::vector<std::string>& keys) {
    std::map<std::string, std::shared_ptr<Victim>> out;
    for (const auto& key : keys) {
        auto it = config.victims.find(key);
        if (it == config.victims.end())
            throw ConfigError("victim key not in config: " + key);
        out[key] = build_victim(it->second);
    }
    return out;
}

// Builds the judge-side chat client. The oracle purifier learns the stored
// originals of the records it will purify.
inline std::unique_ptr<ChatClient> build_chat_client(
    const JudgeSpec& spec,
    const std::vector<AdversarialRecord>* records_for_oracle = nullptr) {
    if (spec.mode == "http")
        return std::make_unique<HttpChatClient>(spec.config, spec.token_env);
    if (spec.mode == "mock-constant")
        return std::make_unique<MockJudgeClient>(
            MockJudgeClient::constant(spec.constant_score));
    if (spec.mode == "mock-marker") {
        if (spec.marker.empty()) throw ConfigError("mock-marker needs `marker`");
        return std::make_unique<MockJudgeClient>(MockJudgeClient::marker(spec.marker));
    }
    if (spec.mode == "mock-digit-suffix")
        return std::make_unique<MockJudgeClient>(MockJudgeClient::digit_suffix());
    if (spec.mode == "identity") return std::make_unique<IdentityPurifyClient>();
    if (spec.mode == "oracle") {
        auto oracle = std::make_unique<OraclePurifyClient>();
        if (records_for_oracle) {
            for (const auto& rec : *records_for_oracle)
                oracle->learn(rec.adversarial, rec.original);
        }
        return oracle;
    }
    throw ConfigError("unknown judge/purifier mode: " + spec.mode);
}

}  // namespace codenat
