#include "cade/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cade/error.hpp"

namespace cade::stats {

namespace {

// P(W+ <= w) by subset-sum counting over the doubled ranks (midranks scale
// to integers when doubled).
double exact_cdf_leq(const std::vector<double>& ranks, double w) {
    std::vector<long long> doubled(ranks.size());
    long long total = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        doubled[i] = llround(ranks[i] * 2.0);
        total += doubled[i];
    }
    // counts[s] = number of sign assignments with doubled W+ equal to s
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    for (long long r : doubled)
        for (long long s = total; s >= r; --s)
            counts[static_cast<std::size_t>(s)] += counts[static_cast<std::size_t>(s - r)];

    const long long w2 = llround(w * 2.0);
    double below = 0.0, all = 0.0;
    for (long long s = 0; s <= total; ++s) {
        all += counts[static_cast<std::size_t>(s)];
        if (s <= w2) below += counts[static_cast<std::size_t>(s)];
    }
    return below / all;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                std::optional<TestResult::Method> force_method) {
    if (a.size() != b.size()) throw ValidationError("wilcoxon: length mismatch");
    if (a.empty()) throw ValidationError("wilcoxon: empty input");

    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }

    TestResult result;
    result.n_effective = static_cast<int>(diffs.size());
    if (diffs.empty()) {
        result.degenerate = true;
        result.p_raw = 1.0;
        result.w_statistic = 0.0;
        return result;
    }

    // Midranks of |d|.
    const std::size_t n = diffs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return std::fabs(diffs[x]) < std::fabs(diffs[y]);
    });
    std::vector<double> ranks(n, 0.0);
    std::vector<std::size_t> tie_sizes;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && std::fabs(diffs[order[j]]) == std::fabs(diffs[order[i]])) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = midrank;
        tie_sizes.push_back(j - i);
        i = j;
    }

    double w_plus = 0.0, w_minus = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        (diffs[k] > 0.0 ? w_plus : w_minus) += ranks[k];
    result.w_statistic = std::min(w_plus, w_minus);

    const bool exact = force_method ? *force_method == TestResult::Method::Exact : n <= 25;
    if (exact) {
        result.method = TestResult::Method::Exact;
        result.p_raw = std::min(1.0, 2.0 * exact_cdf_leq(ranks, result.w_statistic));
    } else {
        result.method = TestResult::Method::NormalApprox;
        const double nn = static_cast<double>(n);
        const double mean = nn * (nn + 1.0) / 4.0;
        double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0;
        for (std::size_t t : tie_sizes) {
            const double td = static_cast<double>(t);
            var -= (td * td * td - td) / 48.0;
        }
        const double z = (result.w_statistic - mean + 0.5) / std::sqrt(var);
        result.p_raw = std::min(1.0, 2.0 * normal_cdf(z));
    }
    return result;
}

std::vector<double> bh_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    for (double p : p_values)
        if (!(p > 0.0 && p <= 1.0)) throw ValidationError("bh_adjust: p-values must be in (0,1]");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::vector<double> adjusted(m, 0.0);
    double running_min = 1.0;
    for (std::size_t k = m; k-- > 0;) {
        const double q = p_values[order[k]] * static_cast<double>(m) / static_cast<double>(k + 1);
        running_min = std::min(running_min, q);
        adjusted[order[k]] = running_min;
    }
    return adjusted;
}

ComparisonResult compare_models(const ModelGrid& reference,
                                std::span<const ModelGrid> comparators,
                                double alpha) {
    if (comparators.empty()) throw ValidationError("compare_models: no comparators");

    // Establish the shared grid from the reference.
    std::vector<std::string> test_sets;
    std::vector<std::string> metrics;
    for (const auto& [ts, cells] : reference.cells) {
        test_sets.push_back(ts);
        if (metrics.empty())
            for (const auto& [metric, _] : cells) metrics.push_back(metric);
    }
    auto check_grid = [&](const ModelGrid& g) {
        if (g.cells.size() != test_sets.size())
            throw ValidationError("compare_models: grid mismatch for model '" + g.model + "'");
        for (const auto& ts : test_sets) {
            auto it = g.cells.find(ts);
            if (it == g.cells.end() || it->second.size() != metrics.size())
                throw ValidationError("compare_models: grid mismatch for model '" + g.model + "'");
            for (const auto& metric : metrics)
                if (!it->second.count(metric))
                    throw ValidationError("compare_models: grid mismatch for model '" + g.model + "'");
        }
    };
    for (const auto& g : comparators) check_grid(g);

    ComparisonResult result;
    result.reference = reference.model;
    result.alpha = alpha;

    // One family per metric: the same metric cell across all comparators.
    for (const auto& metric : metrics) {
        std::vector<ComparisonCell> family;
        std::vector<double> ps;
        for (const auto& comp : comparators) {
            std::vector<double> ref_vals, comp_vals;
            for (const auto& ts : test_sets) {
                ref_vals.push_back(reference.cells.at(ts).at(metric));
                comp_vals.push_back(comp.cells.at(ts).at(metric));
            }
            ComparisonCell cell;
            cell.family = metric;
            cell.comparator = comp.model;
            cell.test = wilcoxon_signed_rank(ref_vals, comp_vals);
            ps.push_back(cell.test.p_raw);
            family.push_back(std::move(cell));
        }
        auto adj = bh_adjust(ps);
        for (std::size_t k = 0; k < family.size(); ++k) {
            family[k].test.p_adjusted = adj[k];
            family[k].significant = !family[k].test.degenerate && adj[k] < alpha;
            result.by_metric.push_back(std::move(family[k]));
        }
    }

    // One family per test set: the same test-set cell across all comparators.
    for (const auto& ts : test_sets) {
        std::vector<ComparisonCell> family;
        std::vector<double> ps;
        for (const auto& comp : comparators) {
            std::vector<double> ref_vals, comp_vals;
            for (const auto& metric : metrics) {
                ref_vals.push_back(reference.cells.at(ts).at(metric));
                comp_vals.push_back(comp.cells.at(ts).at(metric));
            }
            ComparisonCell cell;
            cell.family = ts;
            cell.comparator = comp.model;
            cell.test = wilcoxon_signed_rank(ref_vals, comp_vals);
            ps.push_back(cell.test.p_raw);
            family.push_back(std::move(cell));
        }
        auto adj = bh_adjust(ps);
        for (std::size_t k = 0; k < family.size(); ++k) {
            family[k].test.p_adjusted = adj[k];
            family[k].significant = !family[k].test.degenerate && adj[k] < alpha;
            result.by_test_set.push_back(std::move(family[k]));
        }
    }
    return result;
}

}  // namespace cade::stats
