#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <random>

#include "codenat/stats.hpp"

using namespace codenat;

namespace {

// --- independent oracles ------------------------------------------------

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    double n = double(x.size()), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    double num = n * sxy - sx * sy;
    double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
    return num / den;
}

std::vector<double> oracle_ranks(const std::vector<double>& v) {
    std::vector<double> r(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
        double below = 0, equal = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] < v[i]) below += 1;
            if (v[j] == v[i]) equal += 1;
        }
        r[i] = below + (equal + 1) / 2.0;  // average rank, 1-based
    }
    return r;
}

double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return oracle_pearson(oracle_ranks(x), oracle_ranks(y));
}

double oracle_kendall(const std::vector<double>& x, const std::vector<double>& y) {
    double c = 0, d = 0, tx = 0, ty = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            double a = x[i] - x[j], b = y[i] - y[j];
            if (a == 0 && b == 0) continue;
            if (a == 0) tx += 1;
            else if (b == 0) ty += 1;
            else if ((a > 0) == (b > 0)) c += 1;
            else d += 1;
        }
    }
    return (c - d) / std::sqrt((c + d + tx) * (c + d + ty));
}

// full enumeration of group assignments for the exact MWU p-value
double oracle_exact_mwu(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> pool(a.begin(), a.end());
    pool.insert(pool.end(), b.begin(), b.end());
    std::size_t n = pool.size(), n1 = a.size();
    auto u_min_of = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
        double u1 = 0;
        for (double va : xs)
            for (double vb : ys) u1 += va > vb ? 1.0 : (va == vb ? 0.5 : 0.0);
        return std::min(u1, double(xs.size() * ys.size()) - u1);
    };
    double observed = u_min_of(a, b);
    long total = 0, extreme = 0;
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(n1), true);
    std::sort(mask.begin(), mask.end());
    do {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < n; ++i) (mask[i] ? xs : ys).push_back(pool[i]);
        ++total;
        if (u_min_of(xs, ys) <= observed + 1e-12) ++extreme;
    } while (std::next_permutation(mask.begin(), mask.end()));
    return std::min(1.0, double(extreme) / double(total));
}

}  // namespace

TEST_CASE("weighted NES over a published proportion row") {
    auto d = ScoreDistribution::from_percentages({45.36, 46.68, 5.44, 2.25, 0.27});
    CHECK(weighted_nes(d) == Catch::Approx(1.65).margin(0.005));
}

TEST_CASE("weighted NES extremes") {
    ScoreDistribution top;
    top.p = {0, 0, 0, 0, 1.0};
    CHECK(weighted_nes(top) == Catch::Approx(5.0));
    ScoreDistribution uniform;
    uniform.p = {0.2, 0.2, 0.2, 0.2, 0.2};
    CHECK(weighted_nes(uniform) == Catch::Approx(3.0));
    ScoreDistribution bad;
    bad.p = {0.5, 0, 0, 0, 0};
    CHECK_THROWS_AS(weighted_nes(bad), InvalidDistribution);
    CHECK_THROWS_AS(ScoreDistribution::from_percentages({50, 10, 10, 10, 10}),
                    InvalidDistribution);
}

TEST_CASE("distribution from scores") {
    auto d = ScoreDistribution::from_scores({1, 1, 2, 5});
    CHECK(d.p[0] == Catch::Approx(0.5));
    CHECK(d.p[4] == Catch::Approx(0.25));
    CHECK_THROWS_AS(ScoreDistribution::from_scores({0}), InvalidDistribution);
    CHECK_THROWS_AS(ScoreDistribution::from_scores({}), EmptyInput);
}

TEST_CASE("consistency rates") {
    auto same = consistency({3, 4, 5}, {3, 4, 5});
    CHECK(same.exact == 1.0);
    CHECK(same.within1 == 1.0);
    CHECK(same.mad == 0.0);

    auto shifted = consistency({1, 2, 3}, {2, 3, 4});
    CHECK(shifted.exact == 0.0);
    CHECK(shifted.within1 == 1.0);
    CHECK(shifted.mad == Catch::Approx(1.0));

    auto flipped = consistency({1, 5}, {5, 1});
    CHECK(flipped.exact == 0.0);
    CHECK(flipped.within1 == 0.0);
    CHECK(flipped.mad == Catch::Approx(4.0));

    CHECK_THROWS_AS(consistency({1}, {1, 2}), LengthMismatch);
    CHECK_THROWS_AS(consistency({}, {}), EmptyInput);
}

TEST_CASE("within1 dominates exact and mad tracks exact") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 50; ++round) {
        std::size_t n = 1 + rng() % 8;
        std::vector<int> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = 1 + static_cast<int>(rng() % 5);
            b[i] = 1 + static_cast<int>(rng() % 5);
        }
        auto c = consistency(a, b);
        CHECK(c.within1 >= c.exact);
        CHECK((c.mad == 0.0) == (c.exact == 1.0));
    }
}

TEST_CASE("identity and reversal correlations") {
    std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(pearson(x, x) == Catch::Approx(1.0));
    CHECK(spearman(x, x) == Catch::Approx(1.0));
    CHECK(kendall_tau(x, x) == Catch::Approx(1.0));
    CHECK(pearson({1, 2, 3}, {3, 2, 1}) == Catch::Approx(-1.0));
    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), ConstantInput);
    CHECK_THROWS_AS(spearman({1, 1, 1}, {1, 2, 3}), ConstantInput);
    CHECK_THROWS_AS(kendall_tau({1, 1, 1}, {1, 2, 3}), ConstantInput);
    CHECK_THROWS_AS(pearson({1}, {1}), LengthMismatch);
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), LengthMismatch);
}

TEST_CASE("correlations match brute-force oracles on random vectors") {
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 60; ++round) {
        std::size_t n = 3 + rng() % 6;
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = static_cast<double>(rng() % 10);
            y[i] = static_cast<double>(rng() % 10);
        }
        bool cx = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
        bool cy = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
        if (cx || cy) continue;
        INFO("round " << round);
        CHECK(pearson(x, y) == Catch::Approx(oracle_pearson(x, y)).margin(1e-9));
        CHECK(spearman(x, y) == Catch::Approx(oracle_spearman(x, y)).margin(1e-9));
        CHECK(kendall_tau(x, y) == Catch::Approx(oracle_kendall(x, y)).margin(1e-9));
        CHECK(kendall_tau(x, y) >= -1.0);
        CHECK(kendall_tau(x, y) <= 1.0);
    }
}

TEST_CASE("spearman is invariant under strictly increasing transforms") {
    std::vector<double> x{3, 1, 4, 1.5, 5, 9, 2.6};
    std::vector<double> y{2, 7, 1, 8, 2.8, 1.8, 2.9};
    double base = spearman(x, y);
    std::vector<double> tx(x), ty(y);
    for (double& v : tx) v = std::exp(v / 2.0);
    for (double& v : ty) v = 5.0 * v + 11.0;
    CHECK(spearman(tx, ty) == Catch::Approx(base).margin(1e-12));
}

TEST_CASE("mann-whitney exact case from first principles") {
    auto r = mann_whitney_u({1, 2}, {3, 4});
    CHECK(r.u == 0.0);
    CHECK(r.p == Catch::Approx(2.0 / 6.0).margin(1e-12));
}

TEST_CASE("identical samples cannot reject") {
    auto r = mann_whitney_u({1, 2, 3}, {1, 2, 3});
    CHECK(r.p > 0.05);
}

TEST_CASE("exact p matches full enumeration for all small untied splits") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 25; ++round) {
        std::size_t n1 = 1 + rng() % 4, n2 = 1 + rng() % 4;
        std::set<int> values;
        while (values.size() < n1 + n2) values.insert(static_cast<int>(rng() % 100));
        std::vector<double> pool(values.begin(), values.end());
        // shuffle deterministically
        for (std::size_t i = pool.size(); i > 1; --i)
            std::swap(pool[i - 1], pool[rng() % i]);
        std::vector<double> a(pool.begin(), pool.begin() + static_cast<long>(n1));
        std::vector<double> b(pool.begin() + static_cast<long>(n1), pool.end());
        auto r = mann_whitney_u(a, b);
        INFO("n1=" << n1 << " n2=" << n2);
        CHECK(r.p == Catch::Approx(oracle_exact_mwu(a, b)).margin(1e-12));
    }
}

TEST_CASE("tied samples fall back to the corrected normal approximation") {
    std::mt19937_64 rng(4242);
    std::vector<double> a, b;
    for (int i = 0; i < 15; ++i) a.push_back(static_cast<double>(rng() % 4));
    for (int i = 0; i < 15; ++i) b.push_back(static_cast<double>(rng() % 4 + 1));
    auto r = mann_whitney_u(a, b);

    // permutation estimate, 10k resamples, fixed seed
    std::vector<double> pool(a.begin(), a.end());
    pool.insert(pool.end(), b.begin(), b.end());
    auto u_min_of = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
        double u1 = 0;
        for (double va : xs)
            for (double vb : ys) u1 += va > vb ? 1.0 : (va == vb ? 0.5 : 0.0);
        return std::min(u1, double(xs.size() * ys.size()) - u1);
    };
    double observed = u_min_of(a, b);
    std::mt19937_64 perm_rng(7);
    int extreme = 0;
    const int rounds = 10000;
    for (int round = 0; round < rounds; ++round) {
        auto shuffled = pool;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[perm_rng() % i]);
        std::vector<double> xs(shuffled.begin(), shuffled.begin() + 15);
        std::vector<double> ys(shuffled.begin() + 15, shuffled.end());
        if (u_min_of(xs, ys) <= observed + 1e-12) ++extreme;
    }
    double estimate = double(extreme) / double(rounds);
    CHECK(r.p == Catch::Approx(estimate).margin(0.01));
    CHECK_THROWS_AS(mann_whitney_u({}, {1.0}), EmptyInput);
}
