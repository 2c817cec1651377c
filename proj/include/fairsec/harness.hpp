#pragma once

// Experiment runner: evaluates every online rule (plus the offline MES
// baseline) on a set of instances over seeded arrival orders, writes one CSV
// row per evaluation, and summarizes the rows into aggregate tables. Also
// hosts the Monte Carlo checks of the two probabilistic guarantees.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairsec/core.hpp"
#include "fairsec/metrics.hpp"
#include "fairsec/samplers.hpp"

namespace fairsec {

enum class Experiment { Exp1, Exp2, Exp3, Exp4, ThmMes, ThmNash };

std::string_view to_string(Experiment x);
Experiment parse_experiment(std::string_view name);

/// hash(base, id, k, iteration) built from the SplitMix64 finalizer and FNV-1a.
std::uint64_t derive_seed(std::uint64_t base, std::string_view instance_id, int k, int iteration);

struct SourceSpec {
    std::string id;                    // instance id used in the output
    std::string path;                  // .pb or native file; empty for samples
    std::optional<SampleSpec> sample;  // set for `sample ...` sources
};

struct ExperimentConfig {
    Experiment experiment = Experiment::Exp1;
    std::vector<SourceSpec> sources;
    std::vector<double> divisors;       // k = max(2, floor(m / f)) per divisor
    std::vector<int> committee_sizes;   // explicit k values (used when no divisors)
    int iterations = 5;
    std::uint64_t base_seed = 1;
    std::string output;                 // CSV path; aggregates go to <output>.agg.csv
    int workers = 1;
    int polarized_instances = 300;      // exp4 corpus size
    // thm-mes / thm-nash
    int orders = 0;                     // 0 picks 5000 (thm-mes) or 500 (thm-nash)
    int instances = 1;
    int n = 12;
    int m = 40;
    int k = 3;
    double p = 0.5;                     // thm-nash IC approval probability
    int ejr_orders = 500;               // thm-mes: orders also checked with brute-force EJR-p
};

/// Flat key=value text; '#' starts a comment. Keys: experiment, source
/// (repeatable), divisors, committee_sizes, iterations, base_seed, output,
/// workers, polarized_instances, orders, instances, n, m, k, p, ejr_orders.
/// A source is a path (a directory stands for its *.pb files, sorted) or
/// `sample <culture> n=.. m=.. k=.. [p|phi|x|q|noise|seed|id=..]`.
/// Relative paths resolve against `base_dir`. Throws ParseError.
ExperimentConfig parse_config(std::string_view text, const std::string& base_dir = ".");

struct RunRecord {
    std::string instance_id;
    int k = 0;
    std::string rule;               // online rule name, or "mes" for the offline baseline
    int iteration = 0;              // 0 for the baseline
    std::uint64_t seed = 0;         // arrival-order seed; 0 for the baseline
    std::vector<CandidateId> committee;
    MetricBundle metrics;
    bool jr_satisfied = true;
    bool approval = false;
    double ejr_plus_share = 0;      // approval instances only
    double ejr_plus_shortfall = 0;
    int ejr_plus_witness_candidates = 0;
    int quota_deserved = -1;        // polarized instances only
    int quota_received = -1;
    double seconds = 0;             // wall clock; written to the timing sidecar only
};

struct AggregateRow {
    std::string section;     // means | ranking | relative | quota
    std::string group;       // k label, metric name, ...
    std::string rule;
    std::string statistic;
    double value = 0;
};

struct ExperimentResult {
    std::vector<RunRecord> records;          // canonical order: instance, k, rule, iteration
    std::vector<std::string> skipped;        // "<source>: <reason>"
    std::vector<AggregateRow> aggregates;
};

/// exp1..exp4 only. Every (instance, k, iteration) draws its order from
/// derive_seed; output does not depend on `workers`.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Canonical CSV of the records (no timing column).
std::string records_csv(const std::vector<RunRecord>& records);
std::string timing_csv(const std::vector<RunRecord>& records);
std::string aggregates_csv(const std::vector<AggregateRow>& rows);

/// Per-rule means of every metric and axiom summary, ranking frequencies
/// (ties shared), ratios to the MES baseline and quota statistics.
std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records);

/// The Exp-4 corpus: polarized specs with n in [10,100], m in [10,50],
/// k in [2, floor(m/2)], x in [0.1,0.9], q in [0.1,1], drawn from `seed`.
std::vector<SampleSpec> polarized_corpus(int count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Probabilistic guarantees

/// Every voter values exactly one candidate: voters are split round-robin
/// into k equal blocs, each bloc backs its own randomly placed candidate with
/// utilities drawn from 1..200, so offline MES elects exactly the k bloc
/// candidates. Throws InvalidParameter unless n is a positive multiple of k
/// (a smaller bloc could not afford its candidate).
Election single_approval_instance(int n, int m, int k, std::uint64_t seed);

struct ThmMesReport {
    int orders = 0;
    int exploration = 0;
    std::vector<CandidateId> mes_winners;
    std::vector<double> winner_frequency;   // per offline-MES winner
    double sigma = 0;                       // sqrt(q(1-q)/N) at q = 1/e
    double winner_threshold = 0;            // 1/e - 3 sigma
    /// joint_frequency[p]: share of orders hiring at least k - p offline winners.
    std::vector<double> joint_frequency;
    std::vector<double> joint_threshold;    // (1/e)^(k-p) - 3 sigma_p
    /// ejr_frequency[p]: share of the first ejr_orders orders satisfying EJR-p
    /// (brute force, gamma = p); p = k is vacuous and reported as 1.
    std::vector<double> ejr_frequency;
    int ejr_orders = 0;
    bool winners_pass = false;
    bool joint_pass = false;
    bool pass = false;
};

ThmMesReport verify_thm_mes(const ExperimentConfig& cfg);

struct ThmNashReport {
    int instances = 0;
    int orders = 0;
    double mean_ratio = 0;     // mean of exp(online welfare - optimum welfare)
    double min_ratio = 0;
    double threshold = 0;      // (1 - 1/e) / 7
    bool pass = false;
};

ThmNashReport verify_thm_nash(const ExperimentConfig& cfg);

std::string thm_mes_csv(const ThmMesReport& r);
std::string thm_nash_csv(const ThmNashReport& r);

/// Shortest round-trip decimal used by every CSV writer.
std::string format_number(double v);

}  // namespace fairsec
