#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "codenat/attacks.hpp"
#include "codenat/corpus.hpp"
#include "codenat/hash.hpp"
#include "codenat/judge.hpp"
#include "codenat/victim.hpp"

namespace codenat {

namespace detail {

// bounded worker pool over [0, n); results land wherever fn writes them
inline void parallel_for(std::size_t n, int jobs,
                         const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    int count = std::min<int>(jobs, static_cast<int>(n));
    workers.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) {
        workers.emplace_back([&] {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& t : workers) t.join();
}

}  // namespace detail

// One attacked example flowing through the judge/purify/export stages.
struct AdversarialRecord {
    std::string id;         // content hash of (original code, method, victim, seed)
    std::string corpus_id;  // id of the source corpus record
    std::string lang;
    std::string original;     // c_o
    std::string adversarial;  // c_a
    std::string code2;        // untouched pair partner, when the task is a pair
    SubstitutionMap map;
    std::string method;
    std::string victim_key;
    std::uint64_t queries = 0;
    std::uint64_t seed = 0;
    bool success = false;
    std::optional<int> label;
    std::optional<std::string> reference;
    double score_before = 0.0;
    double score_after = 0.0;

    std::optional<NaturalnessVerdict> verdict;
    bool annotation_failed = false;

    std::optional<std::string> purified;  // c_p, only when validated
    bool purify_validated = false;
    std::optional<bool> purified_correct;  // victim verdict on c_p

    Truth truth() const {
        if (label) return Truth{*label};
        return Truth{reference.value_or("")};
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["id"] = id;
        j["corpus_id"] = corpus_id;
        j["lang"] = lang;
        j["success"] = success;
        j["map"] = nlohmann::ordered_json::object();
        for (const auto& [from, to] : map.pairs()) j["map"][from] = to;
        j["queries"] = queries;
        j["score_before"] = score_before;
        j["score_after"] = score_after;
        j["adv_code"] = adversarial;
        j["code"] = original;
        if (!code2.empty()) j["code2"] = code2;
        j["method"] = method;
        j["victim"] = victim_key;
        j["seed"] = seed;
        j["label"] = label ? nlohmann::json(*label) : nlohmann::json(nullptr);
        j["reference"] =
            reference ? nlohmann::json(*reference) : nlohmann::json(nullptr);
        if (verdict) {
            j["verdict"] = {{"Analysis", verdict->analysis}, {"Score", verdict->score}};
        } else {
            j["verdict"] = nullptr;
        }
        j["annotation_failed"] = annotation_failed;
        j["purified"] = purified ? nlohmann::json(*purified) : nlohmann::json(nullptr);
        j["purify_validated"] = purify_validated;
        j["purified_correct"] = purified_correct ? nlohmann::json(*purified_correct)
                                                 : nlohmann::json(nullptr);
        return j;
    }

    static AdversarialRecord from_json(const nlohmann::json& j) {
        AdversarialRecord r;
        r.id = j.at("id").get<std::string>();
        r.corpus_id = j.value("corpus_id", "");
        r.lang = j.at("lang").get<std::string>();
        r.success = j.value("success", true);
        if (j.contains("map")) {
            for (const auto& [from, to] : j["map"].items())
                r.map.add(from, to.get<std::string>());
        }
        r.queries = j.value("queries", 0ULL);
        r.score_before = j.value("score_before", 0.0);
        r.score_after = j.value("score_after", 0.0);
        r.adversarial = j.at("adv_code").get<std::string>();
        r.original = j.at("code").get<std::string>();
        r.code2 = j.value("code2", "");
        r.method = j.value("method", "");
        r.victim_key = j.value("victim", "");
        r.seed = j.value("seed", 0ULL);
        if (j.contains("label") && !j["label"].is_null())
            r.label = j["label"].get<int>();
        if (j.contains("reference") && !j["reference"].is_null())
            r.reference = j["reference"].get<std::string>();
        if (j.contains("verdict") && !j["verdict"].is_null()) {
            NaturalnessVerdict v;
            v.analysis = j["verdict"].value("Analysis", "");
            v.score = j["verdict"].at("Score").get<int>();
            r.verdict = v;
        }
        r.annotation_failed = j.value("annotation_failed", false);
        if (j.contains("purified") && !j["purified"].is_null())
            r.purified = j["purified"].get<std::string>();
        r.purify_validated = j.value("purify_validated", false);
        if (j.contains("purified_correct") && !j["purified_correct"].is_null())
            r.purified_correct = j["purified_correct"].get<bool>();
        return r;
    }
};

inline std::vector<AdversarialRecord> load_adversarial_records(
    const std::string& path) {
    std::vector<AdversarialRecord> out;
    for_each_jsonl(path, [&](const nlohmann::json& j) {
        out.push_back(AdversarialRecord::from_json(j));
    });
    return out;
}

inline void write_adversarial_records(const std::string& path,
                                      const std::vector<AdversarialRecord>& records) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write records: " + path);
    for (const auto& r : records) out << r.to_json().dump() << "\n";
}

// --- corpus generation --------------------------------------------------------

struct GenerateOptions {
    std::vector<std::string> methods{"wir"};
    std::vector<std::string> victim_keys;
    AttackConfig base_config;
    int jobs = 1;
    std::set<std::string> skip_ids;  // resumability: already-completed record ids
};

struct GenerateReport {
    std::size_t attempted = 0;
    std::size_t emitted = 0;
    std::size_t attack_failed = 0;
    std::size_t skipped_parse = 0;
    std::size_t skipped_victim_wrong = 0;
    std::size_t skipped_existing = 0;
    std::map<std::string, std::size_t> emitted_by_method;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["attempted"] = attempted;
        j["emitted"] = emitted;
        j["attack_failed"] = attack_failed;
        j["skipped_parse"] = skipped_parse;
        j["skipped_victim_wrong"] = skipped_victim_wrong;
        j["skipped_existing"] = skipped_existing;
        j["emitted_by_method"] = emitted_by_method;
        return j;
    }
};

inline std::string adversarial_record_id(const std::string& original_code,
                                         const std::string& method,
                                         const std::string& victim_key,
                                         std::uint64_t seed) {
    return fnv1a_hex(original_code + "\x1f" + method + "\x1f" + victim_key + "\x1f" +
                     std::to_string(seed));
}

// Runs every (record x victim x method) cell, keeping only successful
// adversarial examples. Per-record failures are counted and skipped; they
// never abort the stream. `sink_all` (optional) also sees failed attacks,
// which the attack CLI logs with success=false.
inline GenerateReport generate_corpus(
    const std::vector<CorpusRecord>& corpus,
    const std::map<std::string, std::shared_ptr<Victim>>& victims,
    const CandidateProvider& provider, const GenerateOptions& options,
    const std::function<void(const AdversarialRecord&)>& sink_success,
    const std::function<void(const AdversarialRecord&)>& sink_all = nullptr) {
    GenerateReport report;
    std::mutex mu;

    struct Cell {
        const CorpusRecord* record;
        std::string method;
        std::string victim_key;
    };
    std::vector<Cell> cells;
    for (const auto& record : corpus)
        for (const auto& vk : options.victim_keys)
            for (const auto& method : options.methods)
                cells.push_back({&record, method, vk});

    detail::parallel_for(cells.size(), options.jobs, [&](std::size_t i) {
        const Cell& cell = cells[i];
        const CorpusRecord& rec = *cell.record;
        auto victim_it = victims.find(cell.victim_key);
        if (victim_it == victims.end()) {
            std::lock_guard<std::mutex> lock(mu);
            ++report.skipped_parse;
            return;
        }
        Victim& victim = *victim_it->second;

        std::string rid = adversarial_record_id(rec.code, cell.method, cell.victim_key,
                                                options.base_config.seed);
        {
            std::lock_guard<std::mutex> lock(mu);
            if (options.skip_ids.count(rid)) {
                ++report.skipped_existing;
                return;
            }
            ++report.attempted;
        }

        CodeSnippet original, partner;
        bool pair = rec.is_pair();
        try {
            original = CodeSnippet::parse(rec.code, rec.lang);
            if (pair) partner = CodeSnippet::parse(rec.code2, rec.lang);
        } catch (const Error&) {
            std::lock_guard<std::mutex> lock(mu);
            ++report.skipped_parse;
            return;
        }

        Truth truth = rec.label ? Truth{*rec.label}
                                : Truth{rec.reference.value_or("")};
        VictimTask task = victim.task();
        double baseline = 0.0;
        try {
            VictimOutput out = pair ? victim.query(original, partner)
                                    : victim.query(original);
            baseline = truth_score(out, truth).value;
            bool ok = task.kind == TaskKind::Generation
                          ? is_correct(out, truth, task, TruthScore{baseline})
                          : is_correct(out, truth, task);
            if (!ok) {
                std::lock_guard<std::mutex> lock(mu);
                ++report.skipped_victim_wrong;
                return;
            }
        } catch (const Error&) {
            std::lock_guard<std::mutex> lock(mu);
            ++report.skipped_parse;
            return;
        }

        AttackConfig cfg = options.base_config;
        cfg.method = attack_method_from_tag(cell.method);
        cfg.seed = fnv1a(rid);  // stable per cell, independent of scheduling

        AttackResult result;
        try {
            result = run_attack(original, victim, truth, baseline, provider, cfg,
                                pair ? &partner : nullptr);
        } catch (const Error&) {
            std::lock_guard<std::mutex> lock(mu);
            ++report.attack_failed;
            return;
        }

        AdversarialRecord out;
        out.id = rid;
        out.corpus_id = rec.id;
        out.lang = rec.lang;
        out.original = rec.code;
        out.adversarial = result.adversarial.source();
        out.code2 = rec.code2;
        out.map = result.map;
        out.method = cell.method;
        out.victim_key = cell.victim_key;
        out.queries = result.queries_used;
        out.seed = options.base_config.seed;
        out.success = result.success;
        out.label = rec.label;
        out.reference = rec.reference;
        out.score_before = result.score_before;
        out.score_after = result.score_after;

        std::lock_guard<std::mutex> lock(mu);
        if (sink_all) sink_all(out);
        if (result.success) {
            ++report.emitted;
            ++report.emitted_by_method[cell.method];
            sink_success(out);
        } else {
            ++report.attack_failed;
        }
    });
    return report;
}

// --- NES annotation ---------------------------------------------------------------

struct AnnotateReport {
    std::size_t annotated = 0;
    std::size_t dropped_over_length = 0;
    std::size_t failed = 0;
    std::size_t skipped_existing = 0;

    nlohmann::ordered_json to_json() const {
        return {{"annotated", annotated},
                {"dropped_over_length", dropped_over_length},
                {"failed", failed},
                {"skipped_existing", skipped_existing}};
    }
};

// Adds a pair-mode verdict to every record that lacks one. Over-length
// records are dropped from the output set; judge failures mark the record
// annotation-failed so exports can exclude it.
inline AnnotateReport annotate_corpus(std::vector<AdversarialRecord>& records,
                                      ChatClient& client, const JudgeConfig& config,
                                      int jobs = 1, AuditLog* audit = nullptr) {
    AnnotateReport report;
    std::mutex mu;
    std::vector<bool> drop(records.size(), false);

    detail::parallel_for(records.size(), jobs, [&](std::size_t i) {
        AdversarialRecord& rec = records[i];
        if (rec.verdict) {
            std::lock_guard<std::mutex> lock(mu);
            ++report.skipped_existing;
            return;
        }
        try {
            auto original = CodeSnippet::parse(rec.original, rec.lang);
            auto adversarial = CodeSnippet::parse(rec.adversarial, rec.lang);
            // length guard happens inside prompt construction
            auto outcome =
                judge_code(adversarial, &original, client, config, audit, rec.id);
            std::lock_guard<std::mutex> lock(mu);
            rec.verdict = outcome.verdict;
            rec.annotation_failed = false;
            ++report.annotated;
        } catch (const OverLengthInput&) {
            std::lock_guard<std::mutex> lock(mu);
            drop[i] = true;
            ++report.dropped_over_length;
        } catch (const Error&) {
            std::lock_guard<std::mutex> lock(mu);
            rec.annotation_failed = true;
            ++report.failed;
        }
    });

    std::vector<AdversarialRecord> kept;
    kept.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!drop[i]) kept.push_back(std::move(records[i]));
    records = std::move(kept);
    return report;
}

// --- purification over records ------------------------------------------------------

struct PurifyReport {
    std::size_t validated = 0;
    std::size_t unvalidated = 0;
    std::size_t skipped_existing = 0;

    nlohmann::ordered_json to_json() const {
        return {{"validated", validated},
                {"unvalidated", unvalidated},
                {"skipped_existing", skipped_existing}};
    }
};

// Runs the purifier over each record and re-queries the originating victim
// on the purified code, recording whether the victim is correct again.
inline PurifyReport purify_corpus(
    std::vector<AdversarialRecord>& records, ChatClient& purifier,
    const JudgeConfig& config,
    const std::map<std::string, std::shared_ptr<Victim>>& victims, int jobs = 1) {
    PurifyReport report;
    std::mutex mu;

    detail::parallel_for(records.size(), jobs, [&](std::size_t i) {
        AdversarialRecord& rec = records[i];
        if (rec.purified || rec.purify_validated) {
            std::lock_guard<std::mutex> lock(mu);
            ++report.skipped_existing;
            return;
        }
        bool validated = false;
        std::optional<std::string> purified_source;
        std::optional<bool> correct;
        try {
            auto adversarial = CodeSnippet::parse(rec.adversarial, rec.lang);
            auto result = purify(adversarial, purifier, config);
            validated = result.validated;
            if (result.validated) {
                purified_source = result.purified.source();
                auto victim_it = victims.find(rec.victim_key);
                if (victim_it != victims.end()) {
                    Victim& victim = *victim_it->second;
                    VictimTask task = victim.task();
                    VictimOutput out;
                    if (!rec.code2.empty()) {
                        auto partner = CodeSnippet::parse(rec.code2, rec.lang);
                        out = victim.query(result.purified, partner);
                    } else {
                        out = victim.query(result.purified);
                    }
                    if (task.kind == TaskKind::Generation) {
                        correct = is_correct(out, rec.truth(), task,
                                             TruthScore{rec.score_before});
                    } else {
                        correct = is_correct(out, rec.truth(), task);
                    }
                }
            }
        } catch (const Error&) {
            validated = false;
        }
        std::lock_guard<std::mutex> lock(mu);
        rec.purify_validated = validated;
        rec.purified = purified_source;
        rec.purified_correct = correct;
        report.validated += validated ? 1 : 0;
        report.unvalidated += validated ? 0 : 1;
    });
    return report;
}

// --- instruction export ----------------------------------------------------------------

enum class InstructionTask { Eval, Purify };

struct InstructionRecord {
    std::string instruction;
    std::string input;
    std::string output;

    nlohmann::ordered_json to_json() const {
        return {{"instruction", instruction}, {"input", input}, {"output", output}};
    }
};

struct ExportReport {
    std::size_t written = 0;
    std::size_t excluded_no_verdict = 0;
    std::size_t excluded_annotation_failed = 0;
    std::size_t excluded_unvalidated = 0;
    std::size_t excluded_victim_wrong = 0;

    nlohmann::ordered_json to_json() const {
        return {{"written", written},
                {"excluded_no_verdict", excluded_no_verdict},
                {"excluded_annotation_failed", excluded_annotation_failed},
                {"excluded_unvalidated", excluded_unvalidated},
                {"excluded_victim_wrong", excluded_victim_wrong}};
    }
};

// Builds the fine-tuning records. Eval rows pair the golden evaluation
// instruction with the judged verdict; purify rows pair the golden purifier
// instruction with the purified code, and only ship purifications the victim
// handles correctly again.
inline ExportReport export_instructions(const std::vector<AdversarialRecord>& records,
                                        InstructionTask task, std::ostream& out) {
    ExportReport report;
    for (const auto& rec : records) {
        if (task == InstructionTask::Eval) {
            if (rec.annotation_failed) {
                ++report.excluded_annotation_failed;
                continue;
            }
            if (!rec.verdict) {
                ++report.excluded_no_verdict;
                continue;
            }
            nlohmann::ordered_json payload;
            payload["Original code"] = rec.original;
            payload["Adversarial code"] = rec.adversarial;
            nlohmann::ordered_json output;
            output["Analysis"] = rec.verdict->analysis;
            output["Score"] = rec.verdict->score;
            InstructionRecord row{prompts::kEvalPairSystem, payload.dump(),
                                  output.dump()};
            out << row.to_json().dump() << "\n";
            ++report.written;
        } else {
            if (!rec.purify_validated || !rec.purified) {
                ++report.excluded_unvalidated;
                continue;
            }
            if (!rec.purified_correct.value_or(false)) {
                ++report.excluded_victim_wrong;
                continue;
            }
            InstructionRecord row{prompts::kPurifySystem,
                                  "{ " + rec.adversarial + " }", *rec.purified};
            out << row.to_json().dump() << "\n";
            ++report.written;
        }
    }
    return report;
}

// --- defense harness ----------------------------------------------------------------------

struct DefenseCell {
    std::size_t total = 0;
    std::size_t defended = 0;

    double rate() const {
        return total == 0 ? 0.0
                          : static_cast<double>(defended) / static_cast<double>(total);
    }
};

struct DefenseReport {
    DefenseCell overall;
    std::map<std::string, DefenseCell> by_victim_method;  // "victim/method"

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["overall"] = {{"total", overall.total},
                        {"defended", overall.defended},
                        {"rate", overall.rate()}};
        j["cells"] = nlohmann::ordered_json::object();
        for (const auto& [key, cell] : by_victim_method)
            j["cells"][key] = {{"total", cell.total},
                               {"defended", cell.defended},
                               {"rate", cell.rate()}};
        return j;
    }
};

// Purifies each successful adversarial record and asks the originating
// victim again. Unvalidated purifications count as failed defenses; the
// denominator is always the full record count.
inline DefenseReport defense_harness(
    std::vector<AdversarialRecord>& records, ChatClient& purifier,
    const JudgeConfig& config,
    const std::map<std::string, std::shared_ptr<Victim>>& victims, int jobs = 1) {
    purify_corpus(records, purifier, config, victims, jobs);
    DefenseReport report;
    for (const auto& rec : records) {
        bool defended = rec.purify_validated && rec.purified_correct.value_or(false);
        std::string key = rec.victim_key + "/" + rec.method;
        report.overall.total++;
        report.by_victim_method[key].total++;
        if (defended) {
            report.overall.defended++;
            report.by_victim_method[key].defended++;
        }
    }
    return report;
}

// --- misclassification harness ------------------------------------------------------------

struct MisclassificationReport {
    std::map<int, double> rate_by_delta;  // delta in {1,2,3,4}
    std::size_t judged = 0;
    std::size_t failed = 0;  // excluded from the denominator

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["judged"] = judged;
        j["failed"] = failed;
        j["rates"] = nlohmann::ordered_json::object();
        for (const auto& [delta, rate] : rate_by_delta)
            j["rates"][std::to_string(delta)] = rate;
        return j;
    }
};

// Judges clean samples in single-code mode and reports, per threshold, the
// share that would be flagged as adversarial.
inline MisclassificationReport misclassification_harness(
    const std::vector<CorpusRecord>& clean, ChatClient& client,
    const JudgeConfig& config, const std::vector<int>& deltas = {1, 2, 3, 4},
    int jobs = 1) {
    std::mutex mu;
    std::vector<std::optional<int>> scores(clean.size());
    MisclassificationReport report;

    detail::parallel_for(clean.size(), jobs, [&](std::size_t i) {
        try {
            auto code = CodeSnippet::parse(clean[i].code, clean[i].lang);
            auto outcome = judge_code(code, nullptr, client, config);
            std::lock_guard<std::mutex> lock(mu);
            scores[i] = outcome.verdict.score;
            ++report.judged;
        } catch (const Error&) {
            std::lock_guard<std::mutex> lock(mu);
            ++report.failed;
        }
    });

    for (int delta : deltas) {
        if (delta < 1 || delta > 4) throw ConfigError("delta must be in 1..4");
        std::size_t flagged = 0;
        for (const auto& s : scores)
            if (s && *s <= delta) ++flagged;
        report.rate_by_delta[delta] =
            report.judged == 0
                ? 0.0
                : static_cast<double>(flagged) / static_cast<double>(report.judged);
    }
    return report;
}

// --- run directory ---------------------------------------------------------------------------

// Canonical layout: runs/<run-id>/{adv.jsonl, verdicts.jsonl, purified.jsonl,
// instructions_eval.jsonl, instructions_purify.jsonl, report.json}
struct RunDir {
    std::filesystem::path root;

    explicit RunDir(std::filesystem::path p) : root(std::move(p)) {
        std::filesystem::create_directories(root);
    }

    std::string adv() const { return (root / "adv.jsonl").string(); }
    std::string verdicts() const { return (root / "verdicts.jsonl").string(); }
    std::string purified() const { return (root / "purified.jsonl").string(); }
    std::string instructions(InstructionTask task) const {
        return (root / (task == InstructionTask::Eval ? "instructions_eval.jsonl"
                                                      : "instructions_purify.jsonl"))
            .string();
    }
    std::string report() const { return (root / "report.json").string(); }
    std::string audit() const { return (root / "audit.jsonl").string(); }

    // ids already present in a records file, for resumable runs
    std::set<std::string> existing_ids(const std::string& path) const {
        std::set<std::string> ids;
        if (!std::filesystem::exists(path)) return ids;
        for_each_jsonl(path, [&](const nlohmann::json& j) {
            if (j.contains("id")) ids.insert(j["id"].get<std::string>());
        });
        return ids;
    }

    // merge a section into report.json, preserving other sections
    void merge_report(const std::string& section, const nlohmann::json& value) const {
        nlohmann::ordered_json doc;
        if (std::filesystem::exists(report())) {
            std::ifstream in(report());
            try {
                in >> doc;
            } catch (const nlohmann::json::exception&) {
                doc = nlohmann::ordered_json::object();
            }
        }
        doc[section] = value;
        std::ofstream out(report());
        out << doc.dump(2) << "\n";
    }
};

// NES histogram over annotated records: proportions of scores 1..5, the
// density data behind the distribution plots.
inline std::array<double, 5> nes_histogram(const std::vector<AdversarialRecord>& records) {
    std::array<double, 5> hist{};
    std::size_t n = 0;
    for (const auto& rec : records) {
        if (!rec.verdict) continue;
        hist[static_cast<std::size_t>(rec.verdict->score - 1)] += 1.0;
        ++n;
    }
    if (n > 0)
        for (double& v : hist) v /= static_cast<double>(n);
    return hist;
}

}  // namespace codenat
