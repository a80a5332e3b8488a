// codenat — identifier-substitution adversarial toolkit for code models.
//
// Subcommands: attack, judge, purify, detect, defend, misclassify, metrics,
// stats, export-instructions. Every run writes report.json into the run
// directory with a config echo, the seed, versions and timing.
// Exit codes: 0 ok, 1 runtime failure, 2 config failure, 3 partial
// (some records failed and were skipped).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "codenat/codenat.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

struct Shared {
    std::string config_path;
    std::string run_dir;
    int jobs = 0;  // 0: take the config value
};

codenat::RunConfig load_config(const Shared& shared) {
    codenat::RunConfig config;
    if (!shared.config_path.empty())
        config = codenat::RunConfig::load(shared.config_path);
    if (!shared.run_dir.empty()) config.out_dir = shared.run_dir;
    if (shared.jobs > 0) config.jobs = shared.jobs;
    return config;
}

void finish_report(codenat::RunDir& run, const std::string& command,
                   const codenat::RunConfig& config, ordered_json section,
                   const Timer& timer) {
    section["seed"] = config.seed;
    section["version"] = codenat::kVersion;
    section["timing_ms"] = timer.ms();
    run.merge_report(command, section);
    run.merge_report("config", config.raw.is_null() ? ordered_json::object()
                                                    : config.raw);
}

codenat::Lang lang_from_path(const std::string& path, const std::string& override_tag) {
    if (!override_tag.empty()) return codenat::lang_from_tag(override_tag);
    auto ext = fs::path(path).extension().string();
    if (ext == ".java") return codenat::Lang::Java;
    if (ext == ".c" || ext == ".h") return codenat::Lang::C;
    throw codenat::ConfigError("cannot infer language from extension: " + path);
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw codenat::ConfigError("cannot read file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// downstream stages consume successful adversarial examples only; the
// attack log keeps failures (success=false) for accounting
std::vector<codenat::AdversarialRecord> load_successful(const std::string& path) {
    auto records = codenat::load_adversarial_records(path);
    std::erase_if(records,
                  [](const codenat::AdversarialRecord& r) { return !r.success; });
    return records;
}

// victims referenced by a record set, restricted to configured keys
std::map<std::string, std::shared_ptr<codenat::Victim>> victims_for_records(
    const codenat::RunConfig& config,
    const std::vector<codenat::AdversarialRecord>& records) {
    std::set<std::string> keys;
    for (const auto& rec : records) keys.insert(rec.victim_key);
    std::vector<std::string> present;
    for (const auto& key : keys)
        if (config.victims.count(key)) present.push_back(key);
    return codenat::build_victims(config, present);
}

// ---------------------------------------------------------------- attack ----

int cmd_attack(const Shared& shared, const std::string& input,
               const std::string& out_override, const std::string& victims_csv,
               const std::string& methods_csv, std::uint64_t budget,
               std::uint64_t seed, bool have_seed, int k) {
    Timer timer;
    auto config = load_config(shared);
    if (budget > 0) config.attack.budget = budget;
    if (have_seed) {
        config.seed = seed;
        config.attack.seed = seed;
    }
    if (k > 0) config.attack.candidates_per_identifier = k;
    config.attack.validate();

    std::string dataset = input.empty() ? config.dataset : input;
    if (dataset.empty()) throw codenat::ConfigError("no input corpus given");
    auto corpus = codenat::load_corpus(dataset);

    codenat::GenerateOptions options;
    options.methods = split_csv(methods_csv);
    options.victim_keys = split_csv(victims_csv);
    if (options.methods.empty() || options.victim_keys.empty())
        throw codenat::ConfigError("attack needs --method and --victim");
    for (const auto& m : options.methods) codenat::attack_method_from_tag(m);
    options.base_config = config.attack;
    options.jobs = config.jobs;

    auto victims = codenat::build_victims(config, options.victim_keys);

    // candidate stack: subword mutation + synonyms + names harvested from
    // the input corpus itself
    std::vector<codenat::CodeSnippet> harvest;
    if (config.provider_harvest) {
        for (const auto& rec : corpus.records) {
            try {
                harvest.push_back(codenat::CodeSnippet::parse(rec.code, rec.lang));
            } catch (const codenat::Error&) {
            }
        }
    }
    auto provider = codenat::default_provider(harvest);

    codenat::RunDir run(fs::path(config.out_dir));
    std::string out_path = out_override.empty() ? run.adv() : out_override;
    options.skip_ids = run.existing_ids(out_path);

    std::vector<codenat::AdversarialRecord> fresh;
    auto report = codenat::generate_corpus(
        corpus.records, victims, *provider, options,
        [&](const codenat::AdversarialRecord&) {},
        [&](const codenat::AdversarialRecord& rec) { fresh.push_back(rec); });

    std::sort(fresh.begin(), fresh.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    std::ofstream out(out_path, std::ios::app);
    if (!out) throw codenat::ConfigError("cannot write: " + out_path);
    for (const auto& rec : fresh) out << rec.to_json().dump() << "\n";

    ordered_json section = report.to_json();
    section["input"] = dataset;
    section["output"] = out_path;
    section["corrupt_lines"] = corpus.skipped_lines.size();
    finish_report(run, "attack", config, section, timer);

    std::cout << "attacked " << report.attempted << " cells, " << report.emitted
              << " adversarial examples -> " << out_path << "\n";
    bool partial = !corpus.skipped_lines.empty() || report.skipped_parse > 0;
    return partial ? kExitPartial : kExitOk;
}

// ----------------------------------------------------------------- judge ----

int cmd_judge(const Shared& shared, const std::string& input,
              const std::string& out_override, bool audit_enabled) {
    Timer timer;
    auto config = load_config(shared);
    codenat::RunDir run(fs::path(config.out_dir));
    std::string in_path = input.empty() ? run.adv() : input;
    std::string out_path = out_override.empty() ? run.verdicts() : out_override;

    auto records = load_successful(in_path);
    auto client = codenat::build_chat_client(config.judge);
    std::unique_ptr<codenat::AuditLog> audit;
    if (audit_enabled) audit = std::make_unique<codenat::AuditLog>(run.audit());

    auto report = codenat::annotate_corpus(records, *client, config.judge.config,
                                           config.jobs, audit.get());
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    codenat::write_adversarial_records(out_path, records);

    ordered_json section = report.to_json();
    section["input"] = in_path;
    section["output"] = out_path;
    auto hist = codenat::nes_histogram(records);
    section["nes_histogram"] = hist;
    finish_report(run, "judge", config, section, timer);

    std::cout << "annotated " << report.annotated << " records ("
              << report.dropped_over_length << " over-length dropped, "
              << report.failed << " failed) -> " << out_path << "\n";
    return report.failed > 0 ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------- purify ----

int cmd_purify(const Shared& shared, const std::string& input,
               const std::string& out_override, const std::string& purifier_mode) {
    Timer timer;
    auto config = load_config(shared);
    codenat::RunDir run(fs::path(config.out_dir));
    std::string in_path = input.empty() ? run.verdicts() : input;
    std::string out_path = out_override.empty() ? run.purified() : out_override;

    auto records = load_successful(in_path);
    auto spec = config.purifier;
    if (!purifier_mode.empty()) spec.mode = purifier_mode;
    auto purifier = codenat::build_chat_client(spec, &records);
    auto victims = victims_for_records(config, records);

    auto report = codenat::purify_corpus(records, *purifier, spec.config, victims,
                                         config.jobs);
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    codenat::write_adversarial_records(out_path, records);

    ordered_json section = report.to_json();
    section["input"] = in_path;
    section["output"] = out_path;
    finish_report(run, "purify", config, section, timer);

    std::cout << "purified " << records.size() << " records (" << report.validated
              << " validated) -> " << out_path << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- detect ----

int cmd_detect(const Shared& shared, const std::string& input,
               const std::string& lang_tag, int delta_flag) {
    Timer timer;
    auto config = load_config(shared);
    int delta = delta_flag > 0 ? delta_flag : config.delta;

    auto lang = lang_from_path(input, lang_tag);
    auto code = codenat::CodeSnippet::parse(read_file(input), lang);
    auto client = codenat::build_chat_client(config.judge);
    auto outcome = codenat::detect(code, *client, config.judge.config, delta);

    ordered_json result;
    result["flagged"] = outcome.flagged;
    result["score"] = outcome.verdict.score;
    std::cout << result.dump() << "\n";

    codenat::RunDir run(fs::path(config.out_dir));
    ordered_json section;
    section["input"] = input;
    section["delta"] = delta;
    section["flagged"] = outcome.flagged;
    section["score"] = outcome.verdict.score;
    finish_report(run, "detect", config, section, timer);
    return kExitOk;
}

// ---------------------------------------------------------------- defend ----

int cmd_defend(const Shared& shared, const std::string& input,
               const std::string& out_override, const std::string& purifier_mode) {
    Timer timer;
    auto config = load_config(shared);
    codenat::RunDir run(fs::path(config.out_dir));
    std::string in_path = input.empty() ? run.adv() : input;

    auto records = load_successful(in_path);
    auto spec = config.purifier;
    if (!purifier_mode.empty()) spec.mode = purifier_mode;
    auto purifier = codenat::build_chat_client(spec, &records);
    auto victims = victims_for_records(config, records);

    auto report = codenat::defense_harness(records, *purifier, spec.config, victims,
                                           config.jobs);
    std::string out_path = out_override.empty() ? run.purified() : out_override;
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    codenat::write_adversarial_records(out_path, records);

    ordered_json section = report.to_json();
    section["input"] = in_path;
    section["output"] = out_path;
    finish_report(run, "defend", config, section, timer);

    std::cout << "defense success rate " << report.overall.rate() << " over "
              << report.overall.total << " records\n";
    for (const auto& [key, cell] : report.by_victim_method)
        std::cout << "  " << key << ": " << cell.rate() << " (" << cell.defended
                  << "/" << cell.total << ")\n";
    return kExitOk;
}

// ----------------------------------------------------------- misclassify ----

int cmd_misclassify(const Shared& shared, const std::string& input) {
    Timer timer;
    auto config = load_config(shared);
    std::string dataset = input.empty() ? config.dataset : input;
    if (dataset.empty()) throw codenat::ConfigError("no clean corpus given");
    auto corpus = codenat::load_corpus(dataset);

    auto client = codenat::build_chat_client(config.judge);
    auto report = codenat::misclassification_harness(
        corpus.records, *client, config.judge.config, {1, 2, 3, 4}, config.jobs);

    codenat::RunDir run(fs::path(config.out_dir));
    ordered_json section = report.to_json();
    section["input"] = dataset;
    finish_report(run, "misclassify", config, section, timer);

    std::cout << "judged " << report.judged << " clean samples (" << report.failed
              << " failed)\n";
    for (const auto& [delta, rate] : report.rate_by_delta)
        std::cout << "  delta=" << delta << ": " << rate * 100.0 << "%\n";
    return report.failed > 0 ? kExitPartial : kExitOk;
}

// ---------------------------------------------------------------- metrics ----

int cmd_metrics(const Shared& shared, const std::string& pairs,
                const std::string& corpus_path, const std::string& out_path,
                int ngram_order) {
    Timer timer;
    auto config = load_config(shared);
    auto records = load_successful(pairs);

    std::vector<codenat::CodeSnippet> reference;
    if (!corpus_path.empty()) {
        auto corpus = codenat::load_corpus(corpus_path);
        for (const auto& rec : corpus.records) {
            try {
                reference.push_back(codenat::CodeSnippet::parse(rec.code, rec.lang));
            } catch (const codenat::Error&) {
            }
        }
    }
    auto model = codenat::NgramModel::train(reference, ngram_order);

    std::ofstream out(out_path);
    if (!out) throw codenat::ConfigError("cannot write: " + out_path);
    out << "id,icr,tcr,acs,aed_raw,aed_normalized,ppl,codebleu\n";
    codenat::MetricsReport mean;
    std::size_t counted = 0, failures = 0;
    for (const auto& rec : records) {
        try {
            auto original = codenat::CodeSnippet::parse(rec.original, rec.lang);
            auto adversarial = codenat::CodeSnippet::parse(rec.adversarial, rec.lang);
            auto m = codenat::pair_metrics(original, adversarial, rec.map);
            m.ppl = model.perplexity(adversarial);
            out << rec.id << ',' << m.icr << ',' << m.tcr << ',' << m.acs << ','
                << m.aed_raw << ',' << m.aed_normalized << ',' << m.ppl << ','
                << m.codebleu << "\n";
            mean.icr += m.icr;
            mean.tcr += m.tcr;
            mean.acs += m.acs;
            mean.aed_raw += m.aed_raw;
            mean.aed_normalized += m.aed_normalized;
            mean.ppl += m.ppl;
            mean.codebleu += m.codebleu;
            ++counted;
        } catch (const codenat::Error&) {
            ++failures;
        }
    }
    if (counted > 0) {
        double n = static_cast<double>(counted);
        out << "mean," << mean.icr / n << ',' << mean.tcr / n << ',' << mean.acs / n
            << ',' << static_cast<double>(mean.aed_raw) / n << ','
            << mean.aed_normalized / n << ',' << mean.ppl / n << ','
            << mean.codebleu / n << "\n";
    }

    codenat::RunDir run(fs::path(config.out_dir));
    ordered_json section;
    section["pairs"] = pairs;
    section["rows"] = counted;
    section["failures"] = failures;
    section["output"] = out_path;
    finish_report(run, "metrics", config, section, timer);

    std::cout << "metrics over " << counted << " pairs -> " << out_path << "\n";
    return failures > 0 ? kExitPartial : kExitOk;
}

// ------------------------------------------------------------------ stats ----

int cmd_stats(const Shared& shared, const std::string& verdicts,
              const std::string& group_by_csv, const std::string& out_path,
              const std::string& metrics_csv, const std::string& proportions_csv) {
    Timer timer;
    auto config = load_config(shared);
    std::ofstream out(out_path);
    if (!out) throw codenat::ConfigError("cannot write: " + out_path);

    // direct proportions mode: rows of label,p1..p5 (percent) -> Avg column
    if (!proportions_csv.empty()) {
        std::ifstream in(proportions_csv);
        if (!in) throw codenat::ConfigError("cannot open: " + proportions_csv);
        out << "label,p1,p2,p3,p4,p5,avg\n";
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("label,", 0) == 0)
                continue;
            auto cells = split_csv(line);
            if (cells.size() != 6) continue;
            std::array<double, 5> p{};
            for (std::size_t i = 0; i < 5; ++i) p[i] = std::stod(cells[i + 1]);
            auto dist = codenat::ScoreDistribution::from_percentages(p);
            char buffer[32];
            std::snprintf(buffer, sizeof buffer, "%.2f", codenat::weighted_nes(dist));
            out << cells[0];
            for (double v : p) out << ',' << v;
            out << ',' << buffer << "\n";
        }
        std::cout << "proportion table -> " << out_path << "\n";
        codenat::RunDir run(fs::path(config.out_dir));
        ordered_json section;
        section["proportions"] = proportions_csv;
        section["output"] = out_path;
        finish_report(run, "stats", config, section, timer);
        return kExitOk;
    }

    if (verdicts.empty()) throw codenat::ConfigError("stats needs --verdicts");
    auto group_keys = split_csv(group_by_csv.empty() ? "victim,method" : group_by_csv);

    struct Row {
        std::string id;
        std::string group;
        int score = 0;
        std::optional<int> human;
        std::map<std::string, double> metrics;
    };
    std::vector<Row> rows;
    std::map<std::string, std::size_t> row_of_id;
    codenat::for_each_jsonl(verdicts, [&](const json& j) {
        if (!j.contains("verdict") || j["verdict"].is_null()) return;
        Row row;
        row.id = j.value("id", "");
        std::vector<std::string> parts;
        for (const auto& key : group_keys) {
            if (key == "task") {
                std::string victim = j.value("victim", "");
                auto it = config.victims.find(victim);
                parts.push_back(it != config.victims.end() ? it->second.task
                                                           : "unknown");
            } else {
                parts.push_back(j.value(key, "unknown"));
            }
        }
        for (std::size_t i = 0; i < parts.size(); ++i)
            row.group += (i ? "/" : "") + parts[i];
        row.score = j["verdict"].at("Score").get<int>();
        if (j.contains("human_score") && !j["human_score"].is_null())
            row.human = j["human_score"].get<int>();
        row_of_id[row.id] = rows.size();
        rows.push_back(std::move(row));
    });

    // optional per-record metric columns joined by id
    if (!metrics_csv.empty()) {
        std::ifstream in(metrics_csv);
        if (!in) throw codenat::ConfigError("cannot open: " + metrics_csv);
        std::string line;
        std::vector<std::string> header;
        while (std::getline(in, line)) {
            auto cells = split_csv(line);
            if (header.empty()) {
                header = cells;
                continue;
            }
            if (cells.size() != header.size() || cells[0] == "mean") continue;
            auto it = row_of_id.find(cells[0]);
            if (it == row_of_id.end()) continue;
            for (std::size_t c = 1; c < cells.size(); ++c)
                rows[it->second].metrics[header[c]] = std::stod(cells[c]);
        }
    }

    // distribution table (Table-2 shape)
    std::map<std::string, std::vector<int>> by_group;
    for (const auto& row : rows) by_group[row.group].push_back(row.score);
    out << "# nes distribution\n";
    out << "group,p1,p2,p3,p4,p5,avg\n";
    for (const auto& [group, scores] : by_group) {
        auto dist = codenat::ScoreDistribution::from_scores(scores);
        out << group;
        for (double p : dist.p) out << ',' << p * 100.0;
        char buffer[32];
        std::snprintf(buffer, sizeof buffer, "%.2f", codenat::weighted_nes(dist));
        out << ',' << buffer << "\n";
    }

    // consistency and correlation tables when a human column exists
    std::vector<double> nes_col, human_col;
    std::vector<int> nes_int, human_int;
    for (const auto& row : rows) {
        if (!row.human) continue;
        nes_col.push_back(row.score);
        human_col.push_back(*row.human);
        nes_int.push_back(row.score);
        human_int.push_back(*row.human);
    }
    if (!nes_col.empty()) {
        out << "# consistency vs human\n";
        out << "group,exact,within1,mad\n";
        std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> pairs;
        for (const auto& row : rows) {
            if (!row.human) continue;
            pairs[row.group].first.push_back(row.score);
            pairs[row.group].second.push_back(*row.human);
        }
        for (const auto& [group, cols] : pairs) {
            auto c = codenat::consistency(cols.first, cols.second);
            out << group << ',' << c.exact << ',' << c.within1 << ',' << c.mad << "\n";
        }
        auto overall = codenat::consistency(nes_int, human_int);
        out << "overall," << overall.exact << ',' << overall.within1 << ','
            << overall.mad << "\n";

        out << "# correlation vs human\n";
        out << "metric,spearman,pearson,kendall,mwu_p\n";
        auto correlation_row = [&](const std::string& name,
                                   const std::vector<double>& values,
                                   const std::vector<double>& humans) {
            try {
                auto mwu = codenat::mann_whitney_u(values, humans);
                out << name << ',' << codenat::spearman(values, humans) << ','
                    << codenat::pearson(values, humans) << ','
                    << codenat::kendall_tau(values, humans) << ',' << mwu.p << "\n";
            } catch (const codenat::Error&) {
                out << name << ",nan,nan,nan,nan\n";
            }
        };
        correlation_row("nes", nes_col, human_col);
        std::set<std::string> metric_names;
        for (const auto& row : rows)
            for (const auto& [name, value] : row.metrics) metric_names.insert(name);
        for (const auto& name : metric_names) {
            std::vector<double> values, humans;
            for (const auto& row : rows) {
                if (!row.human || !row.metrics.count(name)) continue;
                values.push_back(row.metrics.at(name));
                humans.push_back(*row.human);
            }
            if (values.size() >= 2) correlation_row(name, values, humans);
        }
    }

    codenat::RunDir run(fs::path(config.out_dir));
    ordered_json section;
    section["verdicts"] = verdicts;
    section["groups"] = by_group.size();
    section["output"] = out_path;
    finish_report(run, "stats", config, section, timer);

    std::cout << "stats over " << rows.size() << " verdicts, " << by_group.size()
              << " groups -> " << out_path << "\n";
    return kExitOk;
}

// ------------------------------------------------------ export-instructions ----

int cmd_export(const Shared& shared, const std::string& input,
               const std::string& task_tag, const std::string& out_override) {
    Timer timer;
    auto config = load_config(shared);
    codenat::RunDir run(fs::path(config.out_dir));

    codenat::InstructionTask task;
    if (task_tag == "eval") task = codenat::InstructionTask::Eval;
    else if (task_tag == "purify") task = codenat::InstructionTask::Purify;
    else throw codenat::ConfigError("task must be eval or purify");

    std::string in_path = input;
    if (in_path.empty())
        in_path = task == codenat::InstructionTask::Eval ? run.verdicts()
                                                         : run.purified();
    std::string out_path = out_override.empty() ? run.instructions(task) : out_override;

    auto records = load_successful(in_path);
    std::ofstream out(out_path);
    if (!out) throw codenat::ConfigError("cannot write: " + out_path);
    auto report = codenat::export_instructions(records, task, out);

    ordered_json section = report.to_json();
    section["input"] = in_path;
    section["output"] = out_path;
    section["task"] = task_tag;
    finish_report(run, std::string("export_") + task_tag, config, section, timer);

    std::cout << "exported " << report.written << " " << task_tag
              << " instruction records -> " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"identifier-substitution attacks, naturalness judging and "
                 "purification for code models"};
    app.require_subcommand(1);

    Shared shared;
    app.add_option("--config", shared.config_path, "JSON config file");
    app.add_option("--run-dir", shared.run_dir, "run directory for outputs");
    app.add_option("--jobs", shared.jobs, "worker threads");

    // attack
    auto* attack = app.add_subcommand("attack", "generate adversarial examples");
    std::string attack_in, attack_out, attack_victims, attack_methods = "wir";
    std::uint64_t attack_budget = 0, attack_seed = 0;
    int attack_k = 0;
    bool attack_have_seed = false;
    attack->add_option("--input", attack_in, "corpus JSONL");
    attack->add_option("--out", attack_out, "output records JSONL");
    attack->add_option("--victim", attack_victims, "victim config keys (csv)")
        ->required();
    attack->add_option("--method", attack_methods, "mhm|wir|greedy|beam (csv)");
    attack->add_option("--budget", attack_budget, "query budget per attack");
    attack->add_option("--seed", attack_seed, "run seed")
        ->each([&attack_have_seed](const std::string&) { attack_have_seed = true; });
    attack->add_option("--k", attack_k, "candidates per identifier");

    // judge
    auto* judge = app.add_subcommand("judge", "annotate records with NES verdicts");
    std::string judge_in, judge_out;
    bool judge_audit = false;
    judge->add_option("--in", judge_in, "adversarial records JSONL");
    judge->add_option("--out", judge_out, "annotated records JSONL");
    judge->add_flag("--audit", judge_audit, "append raw traffic to audit.jsonl");

    // purify
    auto* purify = app.add_subcommand("purify", "purify adversarial records");
    std::string purify_in, purify_out, purify_mode;
    purify->add_option("--in", purify_in, "records JSONL");
    purify->add_option("--out", purify_out, "purified records JSONL");
    purify->add_option("--purifier", purify_mode,
                       "http|identity|oracle (overrides config)");

    // detect
    auto* detect = app.add_subcommand("detect", "flag a single file by NES threshold");
    std::string detect_in, detect_lang;
    int detect_delta = 0;
    detect->add_option("--in", detect_in, "code file")->required();
    detect->add_option("--lang", detect_lang, "java|c (else inferred)");
    detect->add_option("--delta", detect_delta, "threshold in 1..4");

    // defend
    auto* defend = app.add_subcommand("defend", "purify-and-requery defense rates");
    std::string defend_in, defend_out, defend_mode;
    defend->add_option("--in", defend_in, "adversarial records JSONL");
    defend->add_option("--out", defend_out, "purified records JSONL");
    defend->add_option("--purifier", defend_mode, "http|identity|oracle");

    // misclassify
    auto* misclassify =
        app.add_subcommand("misclassify", "clean-sample flag rates per threshold");
    std::string mis_in;
    misclassify->add_option("--in", mis_in, "clean corpus JSONL");

    // metrics
    auto* metrics =
        app.add_subcommand("metrics", "baseline adversarial-quality metrics");
    std::string metrics_pairs, metrics_corpus, metrics_out = "metrics.csv";
    int metrics_order = 3;
    metrics->add_option("--pairs", metrics_pairs, "adversarial records JSONL")
        ->required();
    metrics->add_option("--corpus", metrics_corpus,
                        "reference corpus for the n-gram model");
    metrics->add_option("--out", metrics_out, "metrics CSV");
    metrics->add_option("--ngram-order", metrics_order, "n-gram order (default 3)");

    // stats
    auto* stats =
        app.add_subcommand("stats", "NES distributions, consistency, correlations");
    std::string stats_verdicts, stats_group = "victim,method", stats_out = "tables.csv";
    std::string stats_metrics, stats_proportions;
    stats->add_option("--verdicts", stats_verdicts, "annotated records JSONL");
    stats->add_option("--group-by", stats_group,
                      "grouping keys (csv; task,victim,method)");
    stats->add_option("--out", stats_out, "tables CSV");
    stats->add_option("--metrics", stats_metrics, "metrics CSV to correlate");
    stats->add_option("--proportions", stats_proportions,
                      "CSV of label,p1..p5 percentage rows");

    // export-instructions
    auto* exporter =
        app.add_subcommand("export-instructions", "emit fine-tuning instruction JSONL");
    std::string export_in, export_task, export_out;
    exporter->add_option("--in", export_in, "records JSONL");
    exporter->add_option("--task", export_task, "eval|purify")->required();
    exporter->add_option("--out", export_out, "instruction JSONL");

    try {
        app.parse(argc, argv);
        if (*attack)
            return cmd_attack(shared, attack_in, attack_out, attack_victims,
                              attack_methods, attack_budget, attack_seed,
                              attack_have_seed, attack_k);
        if (*judge) return cmd_judge(shared, judge_in, judge_out, judge_audit);
        if (*purify) return cmd_purify(shared, purify_in, purify_out, purify_mode);
        if (*detect) return cmd_detect(shared, detect_in, detect_lang, detect_delta);
        if (*defend) return cmd_defend(shared, defend_in, defend_out, defend_mode);
        if (*misclassify) return cmd_misclassify(shared, mis_in);
        if (*metrics)
            return cmd_metrics(shared, metrics_pairs, metrics_corpus, metrics_out,
                               metrics_order);
        if (*stats)
            return cmd_stats(shared, stats_verdicts, stats_group, stats_out,
                             stats_metrics, stats_proportions);
        if (*exporter) return cmd_export(shared, export_in, export_task, export_out);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const codenat::ConfigError& e) {
        json err = {{"error", {{"type", "ConfigError"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return kExitConfig;
    } catch (const codenat::Error& e) {
        json err = {{"error", {{"type", "Error"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        json err = {{"error", {{"type", "std::exception"}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return kExitRuntime;
    }
}
