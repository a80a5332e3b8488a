#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "codenat/bleu.hpp"
#include "codenat/errors.hpp"
#include "codenat/snippet.hpp"
#include "codenat/subtoken.hpp"

namespace codenat {

enum class TaskKind { Classification, PairClassification, Generation };

inline const char* to_string(TaskKind k) {
    switch (k) {
        case TaskKind::Classification: return "classification";
        case TaskKind::PairClassification: return "pair-classification";
        case TaskKind::Generation: return "generation";
    }
    return "?";
}

inline TaskKind task_from_tag(std::string_view tag) {
    if (tag == "classification") return TaskKind::Classification;
    if (tag == "pair-classification") return TaskKind::PairClassification;
    if (tag == "generation") return TaskKind::Generation;
    throw ConfigError("unknown task kind: " + std::string(tag));
}

struct VictimTask {
    TaskKind kind = TaskKind::Classification;
    double theta_gen = 0.5;  // generation restore ratio, in (0,1]

    void validate() const {
        if (theta_gen <= 0.0 || theta_gen > 1.0)
            throw ConfigError("theta_gen must be in (0,1]");
    }
};

struct VictimOutput {
    TaskKind kind = TaskKind::Classification;
    int label = 0;
    std::vector<double> probs;  // classification/pair-classification
    std::string text;           // generation

    bool is_generation() const { return kind == TaskKind::Generation; }
};

struct TruthScore {
    double value = 0.0;  // in [0,1]
};

// the ground truth an attack tries to push the victim away from
using Truth = std::variant<int, std::string>;

// Probability assigned to the truth label, or BLEU-4 against the reference.
inline TruthScore truth_score(const VictimOutput& output, const Truth& truth) {
    if (output.is_generation()) {
        const auto* ref = std::get_if<std::string>(&truth);
        if (!ref) throw KindMismatch("generation output needs a reference truth");
        return TruthScore{bleu4(output.text, *ref)};
    }
    const auto* label = std::get_if<int>(&truth);
    if (!label) throw KindMismatch("classification output needs a label truth");
    if (*label < 0 || static_cast<std::size_t>(*label) >= output.probs.size())
        throw KindMismatch("truth label outside the probability vector");
    return TruthScore{output.probs[static_cast<std::size_t>(*label)]};
}

// Classification: argmax equals the truth label. Generation: restored BLEU
// stays above theta_gen times the unperturbed baseline, which must be given.
inline bool is_correct(const VictimOutput& output, const Truth& truth,
                       const VictimTask& task,
                       std::optional<TruthScore> baseline = std::nullopt) {
    if (task.kind == TaskKind::Generation || output.is_generation()) {
        if (!baseline) throw MissingBaseline("generation correctness needs a baseline");
        double score = truth_score(output, truth).value;
        return score >= task.theta_gen * baseline->value;
    }
    const auto* label = std::get_if<int>(&truth);
    if (!label) throw KindMismatch("classification truth must be a label");
    auto it = std::max_element(output.probs.begin(), output.probs.end());
    int argmax = static_cast<int>(it - output.probs.begin());
    return argmax == *label;
}

// Black-box victim interface. Query counting is atomic so clients can be
// shared across attack workers; one count per invocation regardless of
// internal retries.
class Victim {
public:
    virtual ~Victim() = default;
    virtual VictimTask task() const = 0;

    VictimOutput query(const CodeSnippet& code) {
        count_.fetch_add(1, std::memory_order_relaxed);
        return do_query(code);
    }

    VictimOutput query(const CodeSnippet& a, const CodeSnippet& b) {
        count_.fetch_add(1, std::memory_order_relaxed);
        return do_query_pair(a, b);
    }

    std::uint64_t query_count() const { return count_.load(std::memory_order_relaxed); }

protected:
    virtual VictimOutput do_query(const CodeSnippet& code) = 0;
    virtual VictimOutput do_query_pair(const CodeSnippet&, const CodeSnippet&) {
        throw KindMismatch("victim not configured for snippet pairs");
    }

private:
    std::atomic<std::uint64_t> count_{0};
};

// --- toy victims -------------------------------------------------------------

enum class FeatureSource { IdentifierSubtokens, Literals };

namespace detail {

inline void add_features(const CodeSnippet& code, FeatureSource source,
                         std::map<std::string, double>& bag) {
    for (const Token& t : code.tokens()) {
        if (source == FeatureSource::IdentifierSubtokens) {
            if (t.kind != TokenKind::Identifier) continue;
            for (const auto& sub : split_subtokens(t.text)) bag[sub] += 1.0;
        } else {
            if (t.kind != TokenKind::Literal) continue;
            bag[t.text] += 1.0;
        }
    }
}

}  // namespace detail

struct ToyTrainRecord {
    CodeSnippet code;
    std::optional<CodeSnippet> code2;  // pair-classification partner
    int label = 0;
};

// Multinomial logistic classifier over bag features. Deterministic: zero
// init, full-batch gradient descent, fixed iteration count.
class ToyVictim : public Victim {
public:
    ToyVictim(VictimTask task, FeatureSource source, std::vector<std::string> vocab,
              std::vector<int> classes, std::vector<std::vector<double>> weights)
        : task_(task), source_(source), vocab_(std::move(vocab)),
          classes_(std::move(classes)), weights_(std::move(weights)) {
        for (std::size_t i = 0; i < vocab_.size(); ++i) vocab_index_[vocab_[i]] = i;
    }

    VictimTask task() const override { return task_; }
    const std::vector<int>& classes() const { return classes_; }
    const std::vector<std::vector<double>>& weights() const { return weights_; }
    const std::vector<std::string>& vocabulary() const { return vocab_; }

    std::vector<double> features(const CodeSnippet& a, const CodeSnippet* b) const {
        std::map<std::string, double> bag;
        detail::add_features(a, source_, bag);
        if (b) detail::add_features(*b, source_, bag);
        std::vector<double> x(vocab_.size() + 1, 0.0);
        x[vocab_.size()] = 1.0;  // bias
        for (const auto& [word, count] : bag) {
            auto it = vocab_index_.find(word);
            if (it != vocab_index_.end()) x[it->second] = count;
        }
        return x;
    }

    std::vector<double> probabilities(const std::vector<double>& x) const {
        std::vector<double> logits(classes_.size(), 0.0);
        for (std::size_t c = 0; c < classes_.size(); ++c) {
            double sum = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) sum += weights_[c][j] * x[j];
            logits[c] = sum;
        }
        double max_logit = *std::max_element(logits.begin(), logits.end());
        double denom = 0.0;
        for (double& l : logits) {
            l = std::exp(l - max_logit);
            denom += l;
        }
        for (double& l : logits) l /= denom;
        return logits;
    }

protected:
    VictimOutput do_query(const CodeSnippet& code) override {
        if (task_.kind == TaskKind::PairClassification)
            throw KindMismatch("pair victim queried with a single snippet");
        return classify(features(code, nullptr));
    }

    VictimOutput do_query_pair(const CodeSnippet& a, const CodeSnippet& b) override {
        if (task_.kind != TaskKind::PairClassification)
            throw KindMismatch("single-input victim queried with a pair");
        return classify(features(a, &b));
    }

private:
    VictimOutput classify(const std::vector<double>& x) const {
        auto probs = probabilities(x);
        VictimOutput out;
        out.kind = task_.kind;
        out.probs = probs;
        auto it = std::max_element(probs.begin(), probs.end());
        out.label = classes_[static_cast<std::size_t>(it - probs.begin())];
        return out;
    }

    VictimTask task_;
    FeatureSource source_;
    std::vector<std::string> vocab_;
    std::vector<int> classes_;
    std::vector<std::vector<double>> weights_;  // classes x (vocab + bias)
    std::map<std::string, std::size_t> vocab_index_;
};

// Trains the toy logistic victim. Labels are remapped onto their sorted
// distinct values; at least two classes are required.
inline std::shared_ptr<ToyVictim> train_toy_victim(
    const std::vector<ToyTrainRecord>& corpus, std::uint64_t seed,
    VictimTask task = VictimTask{},
    FeatureSource source = FeatureSource::IdentifierSubtokens,
    int iterations = 300, double learning_rate = 0.5) {
    (void)seed;  // training is deterministic; the seed is part of the contract
    if (corpus.empty()) throw DegenerateCorpus("empty training corpus");

    std::set<int> label_set;
    for (const auto& r : corpus) label_set.insert(r.label);
    if (label_set.size() < 2)
        throw DegenerateCorpus("need at least two classes, got " +
                               std::to_string(label_set.size()));
    std::vector<int> classes(label_set.begin(), label_set.end());

    std::set<std::string> vocab_set;
    for (const auto& r : corpus) {
        std::map<std::string, double> bag;
        detail::add_features(r.code, source, bag);
        if (r.code2) detail::add_features(*r.code2, source, bag);
        for (const auto& [word, _] : bag) vocab_set.insert(word);
    }
    std::vector<std::string> vocab(vocab_set.begin(), vocab_set.end());

    const std::size_t dim = vocab.size() + 1;
    const std::size_t n_classes = classes.size();
    std::vector<std::vector<double>> weights(n_classes, std::vector<double>(dim, 0.0));

    ToyVictim probe(task, source, vocab, classes, weights);
    std::vector<std::vector<double>> xs;
    std::vector<std::size_t> ys;
    xs.reserve(corpus.size());
    for (const auto& r : corpus) {
        xs.push_back(probe.features(r.code, r.code2 ? &*r.code2 : nullptr));
        ys.push_back(static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), r.label) - classes.begin()));
    }

    auto softmax = [&](const std::vector<double>& x) {
        std::vector<double> p(n_classes, 0.0);
        for (std::size_t c = 0; c < n_classes; ++c)
            for (std::size_t j = 0; j < dim; ++j) p[c] += weights[c][j] * x[j];
        double m = *std::max_element(p.begin(), p.end());
        double denom = 0.0;
        for (double& v : p) {
            v = std::exp(v - m);
            denom += v;
        }
        for (double& v : p) v /= denom;
        return p;
    };

    const double l2 = 1e-4;
    for (int iter = 0; iter < iterations; ++iter) {
        std::vector<std::vector<double>> grad(n_classes, std::vector<double>(dim, 0.0));
        for (std::size_t i = 0; i < xs.size(); ++i) {
            auto p = softmax(xs[i]);
            for (std::size_t c = 0; c < n_classes; ++c) {
                double err = p[c] - (c == ys[i] ? 1.0 : 0.0);
                for (std::size_t j = 0; j < dim; ++j) grad[c][j] += err * xs[i][j];
            }
        }
        for (std::size_t c = 0; c < n_classes; ++c) {
            for (std::size_t j = 0; j < dim; ++j) {
                grad[c][j] = grad[c][j] / static_cast<double>(xs.size()) +
                             l2 * weights[c][j];
                weights[c][j] -= learning_rate * grad[c][j];
            }
        }
    }

    return std::make_shared<ToyVictim>(task, source, std::move(vocab),
                                       std::move(classes), std::move(weights));
}

// Deterministic toy summarizer: emits the subtokens of declared identifiers
// in binding order. Renaming identifiers changes the summary, which is what
// lets generation attacks work against it offline.
class ToySummarizer : public Victim {
public:
    explicit ToySummarizer(double theta_gen = 0.5) {
        task_.kind = TaskKind::Generation;
        task_.theta_gen = theta_gen;
    }

    VictimTask task() const override { return task_; }

    static std::string summarize(const CodeSnippet& code) {
        std::string out;
        for (const auto& entry : code.identifiers().entries()) {
            for (const auto& sub : split_subtokens(entry.name)) {
                if (!out.empty()) out += ' ';
                out += sub;
            }
        }
        return out;
    }

protected:
    VictimOutput do_query(const CodeSnippet& code) override {
        VictimOutput out;
        out.kind = TaskKind::Generation;
        out.text = summarize(code);
        return out;
    }

private:
    VictimTask task_;
};

// Enforces the hard query cap from an attack budget. Throws BudgetExhausted
// on the first query past the limit; the attack loops convert that into a
// best-so-far result.
class BudgetedVictim {
public:
    BudgetedVictim(Victim& inner, std::uint64_t budget)
        : inner_(inner), budget_(budget) {}

    VictimOutput query(const CodeSnippet& code) {
        take();
        return inner_.query(code);
    }

    VictimOutput query(const CodeSnippet& a, const CodeSnippet& b) {
        take();
        return inner_.query(a, b);
    }

    std::uint64_t used() const { return used_; }
    std::uint64_t budget() const { return budget_; }
    std::uint64_t remaining() const { return budget_ - used_; }
    Victim& inner() { return inner_; }

private:
    void take() {
        if (used_ >= budget_) throw BudgetExhausted("query budget exhausted");
        ++used_;
    }

    Victim& inner_;
    std::uint64_t budget_;
    std::uint64_t used_ = 0;
};

}  // namespace codenat
