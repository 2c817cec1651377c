#include "fairsec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace fairsec {

MetricBundle compute_metrics(std::span<const double> satisfaction) {
    if (satisfaction.empty()) throw InvalidParameter("metrics need at least one voter");
    std::vector<double> s(satisfaction.begin(), satisfaction.end());
    std::sort(s.begin(), s.end());
    const auto n = static_cast<double>(s.size());

    MetricBundle b;
    const double total = std::accumulate(s.begin(), s.end(), 0.0);
    b.average_satisfaction = total / n;
    b.exclusion_ratio = static_cast<double>(std::count(s.begin(), s.end(), 0.0)) / n;

    const std::size_t quartile = (s.size() + 3) / 4;
    b.bottom_quartile_mean = std::accumulate(s.begin(), s.begin() + quartile, 0.0) / static_cast<double>(quartile);

    // Over sorted values, sum_{i,j} |s_i - s_j| = 2 sum_i (2i - n + 1) s_i.
    if (total > 0) {
        double weighted = 0;
        for (std::size_t i = 0; i < s.size(); ++i) weighted += (2.0 * static_cast<double>(i) - n + 1.0) * s[i];
        b.gini = std::clamp(2.0 * weighted / (2.0 * n * n * b.average_satisfaction), 0.0, 1.0);
    }

    for (double v : s) b.nash_welfare += std::log1p(v);
    return b;
}

MetricBundle compute_metrics(const SatisfactionVector& s) { return compute_metrics(std::span<const double>(s.values)); }

namespace {

double ratio(double value, double base) {
    if (base == 0) return value == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    return value / base;
}

}  // namespace

MetricBundle relative_to_baseline(const MetricBundle& rule, const MetricBundle& baseline) {
    MetricBundle r;
    r.average_satisfaction = ratio(rule.average_satisfaction, baseline.average_satisfaction);
    r.bottom_quartile_mean = ratio(rule.bottom_quartile_mean, baseline.bottom_quartile_mean);
    r.nash_welfare = ratio(rule.nash_welfare, baseline.nash_welfare);
    r.gini = rule.gini - baseline.gini;
    r.exclusion_ratio = rule.exclusion_ratio - baseline.exclusion_ratio;
    return r;
}

}  // namespace fairsec
