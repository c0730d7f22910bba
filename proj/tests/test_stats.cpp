#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cade/error.hpp"
#include "cade/rng.hpp"
#include "cade/stats.hpp"

using namespace cade;
using namespace cade::stats;

namespace {

// Full 2^n enumeration over signed midranks, independent of the DP path.
double exact_p_enumeration(const std::vector<double>& diffs) {
    std::vector<double> abs_d;
    for (double d : diffs)
        if (d != 0.0) abs_d.push_back(std::fabs(d));
    const std::size_t n = abs_d.size();

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && abs_d[order[j]] == abs_d[order[i]]) ++j;
        const double midrank = (i + 1 + j) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = midrank;
        i = j;
    }

    double w_plus = 0.0, w_minus = 0.0;
    std::size_t k = 0;
    for (double d : diffs) {
        if (d == 0.0) continue;
        (d > 0.0 ? w_plus : w_minus) += ranks[k];
        ++k;
    }
    const double w_obs = std::min(w_plus, w_minus);

    std::size_t below = 0;
    const std::size_t total = std::size_t{1} << n;
    for (std::size_t m = 0; m < total; ++m) {
        double w = 0.0;
        for (std::size_t b = 0; b < n; ++b)
            if (m & (std::size_t{1} << b)) w += ranks[b];
        if (w <= w_obs + 1e-12) ++below;
    }
    return std::min(1.0, 2.0 * static_cast<double>(below) / static_cast<double>(total));
}

}  // namespace

TEST_CASE("wilcoxon worked examples") {
    // all-positive differences 1..5
    const std::vector<double> a{2, 3, 4, 5, 6};
    const std::vector<double> b{1, 1, 1, 1, 1};
    const auto r = wilcoxon_signed_rank(a, b);
    CHECK(r.w_statistic == 0.0);
    CHECK(r.n_effective == 5);
    CHECK(r.method == TestResult::Method::Exact);
    CHECK(r.p_raw == doctest::Approx(0.0625).epsilon(1e-12));

    // zeros dropped: d = [0,0,1]
    const auto r2 = wilcoxon_signed_rank(std::vector<double>{1, 2, 4},
                                         std::vector<double>{1, 2, 3});
    CHECK(r2.n_effective == 1);
    CHECK(r2.w_statistic == 0.0);
    CHECK(r2.p_raw == doctest::Approx(1.0));

    // identical samples degenerate
    const auto r3 = wilcoxon_signed_rank(std::vector<double>{1, 2, 3},
                                         std::vector<double>{1, 2, 3});
    CHECK(r3.degenerate);
    CHECK(r3.p_raw == 1.0);
    CHECK(r3.n_effective == 0);

    CHECK_THROWS_AS(wilcoxon_signed_rank(std::vector<double>{1}, std::vector<double>{1, 2}),
                    ValidationError);
}

TEST_CASE("exact p equals full enumeration for n <= 12") {
    Rng rng(67);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(11);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.below(8) / 4.0;  // grid values force ties and zeros
            b[i] = rng.below(8) / 4.0;
        }
        std::vector<double> diffs(n);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            diffs[i] = a[i] - b[i];
            any = any || diffs[i] != 0.0;
        }
        if (!any) continue;
        const auto r = wilcoxon_signed_rank(a, b);
        CHECK(r.p_raw == doctest::Approx(exact_p_enumeration(diffs)).epsilon(1e-12));
    }
}

TEST_CASE("wilcoxon is symmetric in its arguments") {
    Rng rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng.below(20);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.uniform01();
            b[i] = rng.uniform01();
        }
        const auto ab = wilcoxon_signed_rank(a, b);
        const auto ba = wilcoxon_signed_rank(b, a);
        CHECK(ab.p_raw == doctest::Approx(ba.p_raw).epsilon(1e-12));
        CHECK(ab.w_statistic == ba.w_statistic);
    }
}

TEST_CASE("normal approximation tracks the exact p at n = 20") {
    Rng rng(73);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 20;
        std::vector<double> a(n), b(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) a[i] = rng.normal(0.15, 1.0);

        const auto exact = wilcoxon_signed_rank(a, b);
        REQUIRE(exact.method == TestResult::Method::Exact);

        const auto approx = wilcoxon_signed_rank(a, b, TestResult::Method::NormalApprox);
        CHECK(approx.method == TestResult::Method::NormalApprox);
        CHECK(std::fabs(approx.p_raw - exact.p_raw) < 0.01);
    }

    // the automatic crossover sits at n = 25
    std::vector<double> a26(26), b26(26, 0.0);
    Rng rng2(74);
    for (double& v : a26) v = rng2.normal(0.3, 1.0);
    CHECK(wilcoxon_signed_rank(a26, b26).method == TestResult::Method::NormalApprox);
    std::vector<double> a25(a26.begin(), a26.begin() + 25);
    std::vector<double> b25(25, 0.0);
    CHECK(wilcoxon_signed_rank(a25, b25).method == TestResult::Method::Exact);
}

TEST_CASE("bh adjustment on the worked example") {
    const std::vector<double> p{0.005, 0.011, 0.02, 0.04, 0.13};
    const auto q = bh_adjust(p);
    REQUIRE(q.size() == 5);
    CHECK(q[0] == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(q[1] == doctest::Approx(0.0275).epsilon(1e-12));
    CHECK(q[2] == doctest::Approx(0.02 * 5.0 / 3.0).epsilon(1e-12));
    CHECK(q[3] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(q[4] == doctest::Approx(0.13).epsilon(1e-12));
}

TEST_CASE("bh edge cases") {
    CHECK(bh_adjust({0.04}) == std::vector<double>{0.04});
    const auto equal = bh_adjust({0.03, 0.03, 0.03});
    for (double q : equal) CHECK(q == doctest::Approx(0.03));
    CHECK_THROWS_AS(bh_adjust({0.0}), ValidationError);
    CHECK_THROWS_AS(bh_adjust({1.2}), ValidationError);
}

TEST_CASE("bh never decreases a p-value and respects order statistics") {
    Rng rng(79);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng.below(12);
        std::vector<double> p(m);
        for (double& v : p) v = 0.001 + 0.999 * rng.uniform01();
        const auto q = bh_adjust(p);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(q[i] >= p[i] - 1e-15);
            CHECK(q[i] <= 1.0 + 1e-15);
        }
        // monotone in the order statistics
        std::vector<std::size_t> order(m);
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
        for (std::size_t i = 1; i < m; ++i) CHECK(q[order[i]] >= q[order[i - 1]] - 1e-15);
    }
}

TEST_CASE("duplicating the weakest test never lowers another adjusted p") {
    // Duplicating an arbitrary test CAN lower adjusted values under step-up
    // BH (ranks shift: bh([0.1, 0.5]) = [0.2, 0.5] but bh([0.1, 0.1, 0.5])
    // = [0.15, 0.15, 0.5]); the guarantee holds when the duplicate enters at
    // the top of the sorted order.
    const auto small_dup = bh_adjust({0.1, 0.1, 0.5});
    CHECK(small_dup[0] == doctest::Approx(0.15));

    Rng rng(83);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 2 + rng.below(8);
        std::vector<double> p(m);
        for (double& v : p) v = 0.001 + 0.999 * rng.uniform01();
        const auto q = bh_adjust(p);

        std::vector<double> p_dup = p;
        p_dup.push_back(*std::max_element(p.begin(), p.end()));
        const auto q_dup = bh_adjust(p_dup);
        for (std::size_t i = 0; i < m; ++i) CHECK(q_dup[i] >= q[i] - 1e-15);
    }
}

namespace {

ModelGrid grid_of(const std::string& name,
                  const std::vector<std::string>& test_sets,
                  const std::vector<std::string>& metrics,
                  const std::function<double(std::size_t, std::size_t)>& value) {
    ModelGrid g;
    g.model = name;
    for (std::size_t t = 0; t < test_sets.size(); ++t)
        for (std::size_t m = 0; m < metrics.size(); ++m)
            g.cells[test_sets[t]][metrics[m]] = value(t, m);
    return g;
}

}  // namespace

TEST_CASE("compare_models: identical comparator yields degenerate tests") {
    const std::vector<std::string> sets{"bm", "ac", "born"};
    const std::vector<std::string> metrics{"auroc_cls", "auprc_cls"};
    const auto ref = grid_of("ref", sets, metrics,
                             [](std::size_t t, std::size_t m) { return 0.9 - 0.01 * (t + m); });
    const std::vector<ModelGrid> comps{grid_of("same", sets, metrics, [](std::size_t t, std::size_t m) {
        return 0.9 - 0.01 * (t + m);
    })};
    const auto result = compare_models(ref, comps);
    for (const auto& c : result.by_metric) {
        CHECK(c.test.degenerate);
        CHECK_FALSE(c.significant);
    }
}

TEST_CASE("compare_models: dominance over 8 paired cells gives p = 2/256") {
    const std::vector<std::string> sets{"t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8"};
    const std::vector<std::string> metrics{"auroc_cls"};
    const auto ref = grid_of("ref", sets, metrics,
                             [](std::size_t t, std::size_t) { return 0.90 + 0.005 * t; });
    const std::vector<ModelGrid> comps{grid_of(
        "worse", sets, metrics,
        [](std::size_t t, std::size_t) { return 0.85 + 0.004 * t; })};
    const auto result = compare_models(ref, comps);
    REQUIRE(result.by_metric.size() == 1);
    CHECK(result.by_metric[0].test.n_effective == 8);
    CHECK(result.by_metric[0].test.p_raw == doctest::Approx(2.0 / 256.0).epsilon(1e-12));
}

TEST_CASE("compare_models: BH families span the comparators") {
    const std::vector<std::string> sets{"t1", "t2", "t3", "t4"};
    const std::vector<std::string> metrics{"m1", "m2", "m3"};
    const auto ref = grid_of("ref", sets, metrics,
                             [](std::size_t t, std::size_t m) { return 0.9 + 0.01 * t + 0.001 * m; });
    std::vector<ModelGrid> comps;
    for (int k = 0; k < 3; ++k)
        comps.push_back(grid_of("c" + std::to_string(k), sets, metrics,
                                [k](std::size_t t, std::size_t m) {
                                    return 0.8 + 0.01 * t + 0.002 * m + 0.001 * k;
                                }));
    const auto result = compare_models(ref, comps);
    // one cell per (metric, comparator) and per (test set, comparator)
    CHECK(result.by_metric.size() == metrics.size() * comps.size());
    CHECK(result.by_test_set.size() == sets.size() * comps.size());
    for (const auto& c : result.by_metric) {
        REQUIRE(c.test.p_adjusted.has_value());
        CHECK(*c.test.p_adjusted >= c.test.p_raw - 1e-15);
    }

    // grid mismatch is rejected
    auto bad = comps;
    bad[0].cells["t1"].erase("m1");
    CHECK_THROWS_AS(compare_models(ref, bad), ValidationError);
}
