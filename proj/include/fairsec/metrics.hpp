#pragma once

// Welfare and fairness statistics of a satisfaction vector.

#include <span>

#include "fairsec/core.hpp"

namespace fairsec {

struct MetricBundle {
    double average_satisfaction = 0;
    double exclusion_ratio = 0;        // share of voters with satisfaction 0
    double bottom_quartile_mean = 0;   // mean of the ceil(n/4) smallest values
    double gini = 0;                   // sum |s_i - s_j| / (2 n^2 mean); 0 when the mean is 0
    double nash_welfare = 0;           // sum log(1 + s_i)

    bool operator==(const MetricBundle&) const = default;
};

/// Throws InvalidParameter on an empty vector.
MetricBundle compute_metrics(std::span<const double> satisfaction);
MetricBundle compute_metrics(const SatisfactionVector& s);

/// Rule over baseline: ratios for average satisfaction, bottom quartile and
/// Nash welfare (0/0 is 1, x/0 is +inf), differences for gini and exclusion.
MetricBundle relative_to_baseline(const MetricBundle& rule, const MetricBundle& baseline);

}  // namespace fairsec
