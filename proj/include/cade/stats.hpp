#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cade::stats {

struct TestResult {
    double w_statistic = 0.0;            // min(W+, W-)
    int n_effective = 0;                 // after zero-difference removal
    double p_raw = 1.0;
    std::optional<double> p_adjusted;    // filled by BH
    enum class Method { Exact, NormalApprox } method = Method::Exact;
    bool degenerate = false;             // all differences zero
};

// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
// are dropped; |d| is ranked with midranks. Exact sign enumeration for
// n_effective <= 25, otherwise a normal approximation with continuity
// correction and tie-corrected variance. `force_method` overrides the
// crossover (used to validate the approximation against the exact path).
TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                std::optional<TestResult::Method> force_method = std::nullopt);

// Benjamini-Hochberg step-up adjustment; result is in input order.
std::vector<double> bh_adjust(const std::vector<double>& p_values);

// One model's metric values on every test set.
struct ModelGrid {
    std::string model;
    // test set -> metric -> value
    std::map<std::string, std::map<std::string, double>> cells;
};

struct ComparisonCell {
    std::string family;      // metric name or test-set name
    std::string comparator;
    TestResult test;
    bool significant = false;
};

struct ComparisonResult {
    std::string reference;
    double alpha = 0.05;
    std::vector<ComparisonCell> by_metric;    // one Wilcoxon per (metric, comparator)
    std::vector<ComparisonCell> by_test_set;  // one Wilcoxon per (test set, comparator)
};

// Reference vs each comparator, once per metric (pairing across test sets)
// and once per test set (pairing across metrics). BH is applied within each
// family, a family being the same cell across comparators.
ComparisonResult compare_models(const ModelGrid& reference,
                                std::span<const ModelGrid> comparators,
                                double alpha = 0.05);

}  // namespace cade::stats
