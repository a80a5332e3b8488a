#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "codenat/candidates.hpp"
#include "codenat/errors.hpp"
#include "codenat/rename.hpp"
#include "codenat/victim.hpp"

namespace codenat {

enum class AttackMethod { Wir, Mhm, GreedyGenetic, Beam };

inline const char* to_string(AttackMethod m) {
    switch (m) {
        case AttackMethod::Wir: return "wir";
        case AttackMethod::Mhm: return "mhm";
        case AttackMethod::GreedyGenetic: return "greedy";
        case AttackMethod::Beam: return "beam";
    }
    return "?";
}

inline AttackMethod attack_method_from_tag(std::string_view tag) {
    if (tag == "wir") return AttackMethod::Wir;
    if (tag == "mhm") return AttackMethod::Mhm;
    if (tag == "greedy") return AttackMethod::GreedyGenetic;
    if (tag == "beam") return AttackMethod::Beam;
    throw ConfigError("unknown attack method: " + std::string(tag));
}

struct MhmParams {
    int proposals_per_iteration = 1;
    double epsilon = 1e-6;
};

struct GeneticParams {
    int population = 8;
    int generations = 40;
    double mutation_rate = 0.3;
};

struct BeamParams {
    int width = 4;
};

struct AttackConfig {
    AttackMethod method = AttackMethod::Wir;
    std::uint64_t budget = 2000;
    std::uint64_t seed = 0;
    int candidates_per_identifier = 8;  // k: pool size offered per identifier
    MhmParams mhm;
    GeneticParams genetic;
    BeamParams beam;

    void validate() const {
        if (budget == 0) throw ConfigError("attack budget must be positive");
        if (beam.width < 1) throw ConfigError("beam width must be >= 1");
        if (genetic.population < 2) throw ConfigError("population must be >= 2");
        if (candidates_per_identifier < 1)
            throw ConfigError("candidates_per_identifier must be >= 1");
        if (mhm.epsilon <= 0) throw ConfigError("mhm epsilon must be positive");
    }
};

struct AttackStep {
    std::string identifier;
    std::string new_name;
    double fitness = 0.0;        // 1 - truth score after the accepted step
    std::uint64_t queries_at = 0;
};

struct AttackResult {
    bool success = false;
    CodeSnippet adversarial;
    SubstitutionMap map;
    std::uint64_t queries_used = 0;
    double score_before = 0.0;
    double score_after = 0.0;
    std::vector<AttackStep> trajectory;
};

struct RankedIdentifier {
    std::string name;
    IdentKind kind = IdentKind::Variable;
    double importance = 0.0;
    std::int32_t first_occurrence = 0;
};

namespace detail {

// Shared machinery for the four attackers: budget enforcement, score
// memoization by rendered source, candidate pools, deterministic randomness.
class AttackEngine {
public:
    AttackEngine(const CodeSnippet& original, Victim& victim, const Truth& truth,
                 double baseline, const CandidateProvider& provider,
                 const AttackConfig& config, const CodeSnippet* partner)
        : original_(original), truth_(truth), baseline_(baseline),
          provider_(provider), config_(config), partner_(partner),
          budgeted_(victim, config.budget), rng_(config.seed),
          best_fitness_(1.0 - baseline) {
        // the empty map re-renders the original; its score is the baseline
        memo_[original_.source()] = Eval{baseline_, true};
    }

    struct Eval {
        double score = 0.0;
        bool correct = true;
    };

    using NameMap = std::map<std::string, std::string>;

    // `track` keeps the best-scoring attack map seen so far; ranking masks
    // pass false because the placeholder rename is not a legitimate result
    Eval eval(const NameMap& names, bool track = true) {
        std::string rendered = render_with_names(original_, names);
        Eval e;
        auto it = memo_.find(rendered);
        if (it != memo_.end()) {
            e = it->second;
        } else {
            CodeSnippet snip = CodeSnippet::parse(rendered, original_.lang());
            VictimOutput out =
                partner_ ? budgeted_.query(snip, *partner_) : budgeted_.query(snip);
            e.score = truth_score(out, truth_).value;
            VictimTask task = budgeted_.inner().task();
            e.correct = task.kind == TaskKind::Generation
                            ? is_correct(out, truth_, task, TruthScore{baseline_})
                            : is_correct(out, truth_, task);
            memo_[rendered] = e;
        }
        if (track && 1.0 - e.score > best_fitness_) {
            best_fitness_ = 1.0 - e.score;
            best_names_ = names;
        }
        return e;
    }

    double fitness(const NameMap& names) { return 1.0 - eval(names).score; }

    const NameMap& best_names() const { return best_names_; }

    std::uint64_t used() const { return budgeted_.used(); }
    std::uint64_t budget() const { return config_.budget; }
    double baseline() const { return baseline_; }
    const AttackConfig& config() const { return config_; }
    const CodeSnippet& original() const { return original_; }

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
    double real01() {
        return static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0);
    }

    // capture-free candidate pool, truncated to k, cached per name
    const std::vector<std::string>& pool(const IdentifierEntry& entry) {
        auto it = pools_.find(entry.name);
        if (it != pools_.end()) return it->second;
        std::vector<std::string> raw =
            provider_.candidates(entry.name, entry.kind, original_.lang());
        std::vector<std::string> filtered;
        for (auto& c : raw) {
            if (original_.all_identifier_texts().count(c)) continue;
            filtered.push_back(std::move(c));
            if (filtered.size() >=
                static_cast<std::size_t>(config_.candidates_per_identifier))
                break;
        }
        return pools_.emplace(entry.name, std::move(filtered)).first->second;
    }

    // identifiers ranked by score drop when masked with the placeholder name
    std::vector<RankedIdentifier> rank_identifiers() {
        std::vector<RankedIdentifier> ranked;
        for (const auto& entry : original_.identifiers().entries()) {
            NameMap mask{{entry.name, "unk"}};
            double importance = baseline_ - eval(mask, /*track=*/false).score;
            ranked.push_back(RankedIdentifier{entry.name, entry.kind, importance,
                                              entry.occurrences.front()});
        }
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const RankedIdentifier& a, const RankedIdentifier& b) {
                             if (a.importance != b.importance)
                                 return a.importance > b.importance;
                             return a.first_occurrence < b.first_occurrence;
                         });
        return ranked;
    }

    AttackResult finalize(bool success, const NameMap& names) {
        AttackResult result;
        result.success = success;
        result.queries_used = used();
        result.score_before = baseline_;
        SubstitutionMap map;
        for (const auto& [from, to] : names) map.add(from, to);
        result.map = map;
        std::string rendered = render_with_names(original_, names);
        result.adversarial = CodeSnippet::parse(std::move(rendered), original_.lang());
        auto it = memo_.find(result.adversarial.source());
        result.score_after = it != memo_.end() ? it->second.score : baseline_;
        result.trajectory = std::move(trajectory_);
        return result;
    }

    void log_step(const std::string& identifier, const std::string& new_name,
                  double fitness_now) {
        trajectory_.push_back(AttackStep{identifier, new_name, fitness_now, used()});
    }

    const std::vector<AttackStep>& trajectory() const { return trajectory_; }

private:
    const CodeSnippet& original_;
    Truth truth_;
    double baseline_;
    const CandidateProvider& provider_;
    AttackConfig config_;
    const CodeSnippet* partner_;
    BudgetedVictim budgeted_;
    std::mt19937_64 rng_;
    std::map<std::string, Eval> memo_;
    std::map<std::string, std::vector<std::string>> pools_;
    std::vector<AttackStep> trajectory_;
    NameMap best_names_;
    double best_fitness_;
};

inline bool target_taken(const AttackEngine::NameMap& names, const std::string& target,
                         const std::string& except_key = {}) {
    for (const auto& [k, v] : names) {
        if (k != except_key && v == target) return true;
    }
    return false;
}

}  // namespace detail

// Masks each identifier with the placeholder name and ranks by the score
// drop; larger drops mean the victim leans harder on that name. Consumes one
// victim query per identifier.
inline std::vector<RankedIdentifier> importance_rank(
    const CodeSnippet& snippet, Victim& victim, const Truth& truth, double baseline,
    const CodeSnippet* partner = nullptr) {
    FixedProvider no_candidates{{}};
    AttackConfig cfg;
    cfg.budget = snippet.identifiers().size() + 1;
    detail::AttackEngine engine(snippet, victim, truth, baseline, no_candidates, cfg,
                                partner);
    return engine.rank_identifiers();
}

// WIR: walk identifiers in importance order, try one random candidate each,
// keep renames that strictly lower the truth score.
inline AttackResult attack_wir(const CodeSnippet& original, Victim& victim,
                               const Truth& truth, double baseline,
                               const CandidateProvider& provider,
                               const AttackConfig& config,
                               const CodeSnippet* partner = nullptr) {
    config.validate();
    detail::AttackEngine engine(original, victim, truth, baseline, provider, config,
                                partner);
    detail::AttackEngine::NameMap names;
    double current = baseline;
    try {
        auto ranked = engine.rank_identifiers();
        for (const auto& id : ranked) {
            const auto* entry = original.identifiers().find(id.name);
            const auto& pool = engine.pool(*entry);
            if (pool.empty()) continue;
            std::size_t at = engine.below(pool.size());
            std::string candidate;
            for (std::size_t step = 0; step < pool.size(); ++step) {
                const std::string& c = pool[(at + step) % pool.size()];
                if (!detail::target_taken(names, c)) {
                    candidate = c;
                    break;
                }
            }
            if (candidate.empty()) continue;

            auto trial = names;
            trial[id.name] = candidate;
            auto ev = engine.eval(trial);
            if (!ev.correct) {
                engine.log_step(id.name, candidate, 1.0 - ev.score);
                return engine.finalize(true, trial);
            }
            if (ev.score < current) {
                names = std::move(trial);
                current = ev.score;
                engine.log_step(id.name, candidate, 1.0 - current);
            }
        }
    } catch (const BudgetExhausted&) {
        // fall through with the best evaluated map
    }
    return engine.finalize(false, engine.best_names());
}

// MHM: Metropolis-Hastings over maps. Each iteration proposes renaming one
// uniformly chosen identifier to uniformly chosen candidates and accepts
// with ratio min(1, (fitness' + eps) / (fitness + eps)).
inline AttackResult attack_mhm(const CodeSnippet& original, Victim& victim,
                               const Truth& truth, double baseline,
                               const CandidateProvider& provider,
                               const AttackConfig& config,
                               const CodeSnippet* partner = nullptr) {
    config.validate();
    detail::AttackEngine engine(original, victim, truth, baseline, provider, config,
                                partner);
    detail::AttackEngine::NameMap names;
    double phi = 1.0 - baseline;

    std::vector<const IdentifierEntry*> entries;
    for (const auto& entry : original.identifiers().entries()) {
        if (!engine.pool(entry).empty()) entries.push_back(&entry);
    }
    if (entries.empty()) return engine.finalize(false, names);

    const std::uint64_t max_iterations = config.budget * 4 + 64;
    try {
        for (std::uint64_t iter = 0; iter < max_iterations; ++iter) {
            const IdentifierEntry& entry = *entries[engine.below(entries.size())];
            const auto& pool = engine.pool(entry);

            double best_phi = -1.0;
            std::string best_candidate;
            detail::AttackEngine::NameMap best_trial;
            for (int p = 0; p < config.mhm.proposals_per_iteration; ++p) {
                const std::string& c = pool[engine.below(pool.size())];
                auto cur = names.find(entry.name);
                if (cur != names.end() && cur->second == c) continue;
                if (detail::target_taken(names, c, entry.name)) continue;
                auto trial = names;
                trial[entry.name] = c;
                auto ev = engine.eval(trial);
                if (!ev.correct) {
                    engine.log_step(entry.name, c, 1.0 - ev.score);
                    return engine.finalize(true, trial);
                }
                if (1.0 - ev.score > best_phi) {
                    best_phi = 1.0 - ev.score;
                    best_candidate = c;
                    best_trial = std::move(trial);
                }
            }
            if (best_candidate.empty()) continue;

            double alpha = std::min(
                1.0, (best_phi + config.mhm.epsilon) / (phi + config.mhm.epsilon));
            if (engine.real01() < alpha) {
                names = std::move(best_trial);
                phi = best_phi;
                engine.log_step(entry.name, best_candidate, phi);
            }
        }
    } catch (const BudgetExhausted&) {
    }
    return engine.finalize(false, engine.best_names());
}

namespace detail {

struct GreedyOutcome {
    AttackEngine::NameMap names;
    double score = 0.0;
    bool flipped = false;
};

// Greedy stage shared by ALERT-style and beam-width-1 comparisons: per
// identifier, evaluate the whole pool and commit the best strict drop.
inline GreedyOutcome greedy_stage(AttackEngine& engine, const CodeSnippet& original,
                                  const std::vector<RankedIdentifier>& order) {
    GreedyOutcome out;
    out.score = engine.baseline();
    for (const auto& id : order) {
        const auto* entry = original.identifiers().find(id.name);
        const auto& pool = engine.pool(*entry);
        double best_score = out.score;
        std::string best_candidate;
        for (const auto& c : pool) {
            if (target_taken(out.names, c)) continue;
            auto trial = out.names;
            trial[id.name] = c;
            auto ev = engine.eval(trial);
            if (!ev.correct) {
                engine.log_step(id.name, c, 1.0 - ev.score);
                out.names = std::move(trial);
                out.score = ev.score;
                out.flipped = true;
                return out;
            }
            if (ev.score < best_score) {
                best_score = ev.score;
                best_candidate = c;
            }
        }
        if (!best_candidate.empty()) {
            out.names[id.name] = best_candidate;
            out.score = best_score;
            engine.log_step(id.name, best_candidate, 1.0 - best_score);
        }
    }
    return out;
}

}  // namespace detail

// ALERT-style greedy search with a genetic fallback for joint renames the
// greedy pass cannot reach.
inline AttackResult attack_greedy_genetic(const CodeSnippet& original, Victim& victim,
                                          const Truth& truth, double baseline,
                                          const CandidateProvider& provider,
                                          const AttackConfig& config,
                                          const CodeSnippet* partner = nullptr) {
    config.validate();
    detail::AttackEngine engine(original, victim, truth, baseline, provider, config,
                                partner);
    using NameMap = detail::AttackEngine::NameMap;

    std::vector<const IdentifierEntry*> entries;
    for (const auto& entry : original.identifiers().entries()) {
        if (!engine.pool(entry).empty()) entries.push_back(&entry);
    }

    try {
        auto order = engine.rank_identifiers();
        auto greedy = detail::greedy_stage(engine, original, order);
        if (greedy.flipped) return engine.finalize(true, greedy.names);
        if (config.genetic.generations == 0 || entries.empty())
            return engine.finalize(false, greedy.names);

        // --- genetic stage -----------------------------------------------
        auto random_individual = [&]() {
            NameMap names;
            for (const auto* entry : entries) {
                if (engine.real01() >= 0.5) continue;
                const auto& pool = engine.pool(*entry);
                const std::string& c = pool[engine.below(pool.size())];
                if (detail::target_taken(names, c)) continue;
                names[entry->name] = c;
            }
            return names;
        };

        std::vector<NameMap> population;
        population.push_back(greedy.names);
        // partial greedy prefixes give the search its committed directions
        NameMap prefix;
        for (const auto& step : engine.trajectory()) {
            prefix[step.identifier] = step.new_name;
            if (population.size() + 1 <
                static_cast<std::size_t>(config.genetic.population))
                population.push_back(prefix);
        }
        while (population.size() < static_cast<std::size_t>(config.genetic.population))
            population.push_back(random_individual());

        std::vector<double> fitness(population.size(), 0.0);
        auto eval_population = [&]() -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < population.size(); ++i) {
                auto ev = engine.eval(population[i]);
                fitness[i] = 1.0 - ev.score;
                if (!ev.correct) return i;
            }
            return std::nullopt;
        };

        if (auto hit = eval_population()) return engine.finalize(true, population[*hit]);

        auto tournament = [&]() -> const NameMap& {
            std::size_t a = engine.below(population.size());
            std::size_t b = engine.below(population.size());
            return fitness[a] >= fitness[b] ? population[a] : population[b];
        };

        for (int gen = 0; gen < config.genetic.generations; ++gen) {
            // elitist selection: keep the two fittest
            std::vector<std::size_t> idx(population.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                return fitness[a] > fitness[b];
            });
            std::vector<NameMap> next;
            next.push_back(population[idx[0]]);
            if (idx.size() > 1) next.push_back(population[idx[1]]);

            while (next.size() < population.size()) {
                const NameMap& pa = tournament();
                const NameMap& pb = tournament();
                NameMap child;
                std::set<std::string> keys;
                for (const auto& [k, v] : pa) keys.insert(k);
                for (const auto& [k, v] : pb) keys.insert(k);
                for (const auto& k : keys) {
                    const NameMap& side = engine.real01() < 0.5 ? pa : pb;
                    auto it = side.find(k);
                    if (it == side.end()) continue;
                    if (detail::target_taken(child, it->second)) continue;
                    child[k] = it->second;
                }
                if (engine.real01() < config.genetic.mutation_rate && !entries.empty()) {
                    const auto* entry = entries[engine.below(entries.size())];
                    const auto& pool = engine.pool(*entry);
                    const std::string& c = pool[engine.below(pool.size())];
                    if (!detail::target_taken(child, c, entry->name))
                        child[entry->name] = c;
                }
                next.push_back(std::move(child));
            }
            population = std::move(next);
            if (auto hit = eval_population())
                return engine.finalize(true, population[*hit]);
        }

    } catch (const BudgetExhausted&) {
    }
    return engine.finalize(false, engine.best_names());
}

// Beam search over partial maps. Identifiers are grouped by declaration
// kind (the statement-type signal), groups ranked by their strongest
// member, and each step expands every beam entry with the pool candidates
// plus a no-rename option.
inline AttackResult attack_beam(const CodeSnippet& original, Victim& victim,
                                const Truth& truth, double baseline,
                                const CandidateProvider& provider,
                                const AttackConfig& config,
                                const CodeSnippet* partner = nullptr) {
    config.validate();
    detail::AttackEngine engine(original, victim, truth, baseline, provider, config,
                                partner);
    using NameMap = detail::AttackEngine::NameMap;

    struct State {
        NameMap names;
        double fitness = 0.0;
    };

    std::vector<State> beam{State{{}, 1.0 - baseline}};

    try {
        auto ranked = engine.rank_identifiers();
        // group by declaration kind; a group inherits its best member's pull
        std::map<IdentKind, std::vector<const RankedIdentifier*>> groups;
        for (const auto& id : ranked) groups[id.kind].push_back(&id);
        std::vector<std::pair<double, IdentKind>> group_rank;
        for (const auto& [kind, members] : groups) {
            double top = members.front()->importance;
            for (const auto* m : members) top = std::max(top, m->importance);
            group_rank.emplace_back(top, kind);
        }
        std::stable_sort(group_rank.begin(), group_rank.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        std::vector<const RankedIdentifier*> order;
        for (const auto& [top, kind] : group_rank)
            for (const auto* m : groups[kind]) order.push_back(m);

        for (const auto* id : order) {
            const auto* entry = original.identifiers().find(id->name);
            const auto& pool = engine.pool(*entry);
            std::vector<State> expanded;
            std::set<std::string> seen;  // dedup identical rendered maps
            auto push = [&](State s) {
                std::string key;
                for (const auto& [k, v] : s.names) key += k + "\x1f" + v + "\x1e";
                if (seen.insert(key).second) expanded.push_back(std::move(s));
            };
            for (const State& state : beam) {
                push(state);  // no-rename option, already scored
                for (const auto& c : pool) {
                    if (detail::target_taken(state.names, c)) continue;
                    auto trial = state.names;
                    trial[id->name] = c;
                    auto ev = engine.eval(trial);
                    if (!ev.correct) {
                        engine.log_step(id->name, c, 1.0 - ev.score);
                        return engine.finalize(true, trial);
                    }
                    push(State{std::move(trial), 1.0 - ev.score});
                }
            }
            std::stable_sort(expanded.begin(), expanded.end(),
                             [](const State& a, const State& b) {
                                 return a.fitness > b.fitness;
                             });
            if (expanded.size() > static_cast<std::size_t>(config.beam.width))
                expanded.resize(static_cast<std::size_t>(config.beam.width));
            beam = std::move(expanded);
        }
    } catch (const BudgetExhausted&) {
    }
    return engine.finalize(false, engine.best_names());
}

// Dispatch on the configured method.
inline AttackResult run_attack(const CodeSnippet& original, Victim& victim,
                               const Truth& truth, double baseline,
                               const CandidateProvider& provider,
                               const AttackConfig& config,
                               const CodeSnippet* partner = nullptr) {
    switch (config.method) {
        case AttackMethod::Wir:
            return attack_wir(original, victim, truth, baseline, provider, config, partner);
        case AttackMethod::Mhm:
            return attack_mhm(original, victim, truth, baseline, provider, config, partner);
        case AttackMethod::GreedyGenetic:
            return attack_greedy_genetic(original, victim, truth, baseline, provider,
                                         config, partner);
        case AttackMethod::Beam:
            return attack_beam(original, victim, truth, baseline, provider, config,
                               partner);
    }
    throw ConfigError("unreachable attack method");
}

}  // namespace codenat
