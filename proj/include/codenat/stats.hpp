#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "codenat/errors.hpp"

namespace codenat {

// Proportions of NES buckets 1..5.
struct ScoreDistribution {
    std::array<double, 5> p{};

    static ScoreDistribution from_proportions(const std::array<double, 5>& props,
                                              double tolerance = 1e-9) {
        double sum = 0.0;
        for (double v : props) {
            if (v < 0.0) throw InvalidDistribution("negative proportion");
            sum += v;
        }
        if (std::abs(sum - 1.0) > tolerance)
            throw InvalidDistribution("proportions sum to " + std::to_string(sum));
        ScoreDistribution d;
        d.p = props;
        return d;
    }

    // Printed table rows carry rounding noise; accept a small slack and
    // renormalize so the invariant holds exactly.
    static ScoreDistribution from_percentages(const std::array<double, 5>& percents,
                                              double slack = 0.005) {
        double sum = 0.0;
        for (double v : percents) {
            if (v < 0.0) throw InvalidDistribution("negative percentage");
            sum += v / 100.0;
        }
        if (std::abs(sum - 1.0) > slack)
            throw InvalidDistribution("percentages sum to " + std::to_string(sum * 100));
        ScoreDistribution d;
        for (std::size_t i = 0; i < 5; ++i) d.p[i] = percents[i] / 100.0 / sum;
        return d;
    }

    static ScoreDistribution from_scores(const std::vector<int>& scores) {
        if (scores.empty()) throw EmptyInput("no scores");
        ScoreDistribution d;
        for (int s : scores) {
            if (s < 1 || s > 5) throw InvalidDistribution("score outside 1..5");
            d.p[static_cast<std::size_t>(s - 1)] += 1.0;
        }
        for (double& v : d.p) v /= static_cast<double>(scores.size());
        return d;
    }
};

// Weighted average NES: sum of scores times their proportions.
inline double weighted_nes(const ScoreDistribution& d) {
    double sum = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        if (d.p[i] < 0.0) throw InvalidDistribution("negative proportion");
        sum += static_cast<double>(i + 1) * d.p[i];
        mass += d.p[i];
    }
    if (std::abs(mass - 1.0) > 1e-9)
        throw InvalidDistribution("proportions sum to " + std::to_string(mass));
    return sum;
}

struct Consistency {
    double exact = 0.0;    // mean(a_i == b_i)
    double within1 = 0.0;  // mean(|a_i - b_i| <= 1)
    double mad = 0.0;      // mean(|a_i - b_i|)
};

inline Consistency consistency(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw LengthMismatch("score lists differ in length");
    if (a.empty()) throw EmptyInput("empty score lists");
    Consistency c;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int diff = std::abs(a[i] - b[i]);
        c.exact += diff == 0 ? 1.0 : 0.0;
        c.within1 += diff <= 1 ? 1.0 : 0.0;
        c.mad += static_cast<double>(diff);
    }
    double n = static_cast<double>(a.size());
    c.exact /= n;
    c.within1 /= n;
    c.mad /= n;
    return c;
}

namespace detail {

inline void require_paired(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw LengthMismatch("vectors differ in length");
    if (x.size() < 2) throw LengthMismatch("need at least two observations");
}

inline bool constant(const std::vector<double>& v) {
    for (double d : v)
        if (d != v.front()) return false;
    return true;
}

// average ranks, ties share the mean of their positions
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size(), 0.0);
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

}  // namespace detail

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_paired(x, y);
    if (detail::constant(x) || detail::constant(y))
        throw ConstantInput("pearson undefined for constant input");
    double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// Spearman: Pearson over average ranks.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_paired(x, y);
    if (detail::constant(x) || detail::constant(y))
        throw ConstantInput("spearman undefined for constant input");
    return pearson(detail::average_ranks(x), detail::average_ranks(y));
}

// Kendall tau-b with tie correction.
inline double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_paired(x, y);
    long concordant = 0, discordant = 0;
    std::map<double, long> ties_x, ties_y;
    for (double v : x) ties_x[v]++;
    for (double v : y) ties_y[v]++;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            double dx = x[i] - x[j];
            double dy = y[i] - y[j];
            double prod = dx * dy;
            if (prod > 0) ++concordant;
            else if (prod < 0) ++discordant;
        }
    }
    double n = static_cast<double>(x.size());
    double n0 = n * (n - 1.0) / 2.0;
    double n1 = 0.0, n2 = 0.0;
    for (const auto& [v, t] : ties_x) n1 += static_cast<double>(t) * (t - 1) / 2.0;
    for (const auto& [v, t] : ties_y) n2 += static_cast<double>(t) * (t - 1) / 2.0;
    double denom = std::sqrt((n0 - n1) * (n0 - n2));
    if (denom == 0.0) throw ConstantInput("kendall undefined for constant input");
    return (static_cast<double>(concordant) - static_cast<double>(discordant)) / denom;
}

struct MannWhitneyResult {
    double u = 0.0;  // min(U_a, U_b)
    double p = 0.0;  // two-sided
};

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// exact U distribution by enumerating rank subsets; valid without ties
inline double exact_mwu_p(std::size_t n1, std::size_t n2, double u_min) {
    std::size_t n = n1 + n2;
    long total = 0, at_or_below = 0;
    std::vector<std::size_t> pick(n1);
    // iterate all C(n, n1) combinations of rank positions for sample a
    std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t start,
                                                             std::size_t depth) {
        if (depth == n1) {
            double rank_sum = 0.0;
            for (std::size_t r : pick) rank_sum += static_cast<double>(r + 1);
            double u1 = rank_sum - static_cast<double>(n1 * (n1 + 1)) / 2.0;
            double u2 = static_cast<double>(n1 * n2) - u1;
            ++total;
            if (std::min(u1, u2) <= u_min + 1e-12) ++at_or_below;
            return;
        }
        for (std::size_t i = start; i <= n - (n1 - depth); ++i) {
            pick[depth] = i;
            walk(i + 1, depth + 1);
        }
    };
    walk(0, 0);
    // min(U1,U2) folds both tails together, so the count is already two-sided
    return std::min(1.0, static_cast<double>(at_or_below) / static_cast<double>(total));
}

}  // namespace detail

// Mann-Whitney U, two-sided. Exact enumeration for small untied samples,
// otherwise the normal approximation with tie-corrected variance and
// continuity correction.
inline MannWhitneyResult mann_whitney_u(const std::vector<double>& a,
                                        const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw EmptyInput("mann-whitney needs both samples");
    double u1 = 0.0;
    bool ties = false;
    for (double va : a) {
        for (double vb : b) {
            if (va > vb) u1 += 1.0;
            else if (va == vb) {
                u1 += 0.5;
                ties = true;
            }
        }
    }
    std::map<double, long> pooled;
    for (double v : a) pooled[v]++;
    for (double v : b) pooled[v]++;
    for (const auto& [v, t] : pooled)
        if (t > 1) ties = true;

    double n1 = static_cast<double>(a.size());
    double n2 = static_cast<double>(b.size());
    double u2 = n1 * n2 - u1;
    double u_min = std::min(u1, u2);

    MannWhitneyResult result;
    result.u = u_min;

    if (!ties && a.size() + b.size() <= 12) {
        result.p = detail::exact_mwu_p(a.size(), b.size(), u_min);
        return result;
    }

    double n = n1 + n2;
    double mean = n1 * n2 / 2.0;
    double tie_term = 0.0;
    for (const auto& [v, t] : pooled) {
        double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    double variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (variance <= 0.0) {
        result.p = 1.0;
        return result;
    }
    double z = (u_min - mean + 0.5) / std::sqrt(variance);  // continuity toward 0
    result.p = std::min(1.0, 2.0 * detail::normal_cdf(z));
    return result;
}

}  // namespace codenat
