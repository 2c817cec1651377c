#pragma once

// Offline committee rules: Method of Equal Shares (utilitarian completion),
// its bounded-overspending variant, utilitarian top-k, and Nash welfare.
//
// Budget convention for MES and BOS: every voter starts with k/n and each
// candidate costs 1.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fairsec/core.hpp"

namespace fairsec {

/// Slack allowed when testing whether supporters can cover a unit price.
inline constexpr double kPriceTolerance = 1e-9;
/// Relative gap under which two rho values (or welfare values) count as tied.
inline constexpr double kTieTolerance = 1e-12;

bool nearly_equal(double a, double b, double rel = kTieTolerance);

struct MesRound {
    CandidateId candidate = -1;
    double rho = 0;                 // payment per unit of utility
    std::vector<double> payments;   // per voter, sums to `funded`
    double funded = 1.0;            // share of the unit price paid by voters (< 1 only for BOS overspending)
};

struct MesTrace {
    std::vector<MesRound> rounds;
    std::vector<CandidateId> completion_added;

    /// Members elected by the equal-shares rounds, in election order.
    std::vector<CandidateId> core() const;
};

struct RuleOutcome {
    Committee committee;
    MesTrace trace;
};

/// Smallest rho with sum_i min(b_i, rho * u_i) >= price, solved piecewise in
/// closed form. Voters with zero utility or zero budget never pay.
/// Returns nullopt when the supporters' budgets cannot cover the price.
std::optional<double> equal_shares_rho(std::span<const double> budgets, std::span<const double> utilities,
                                       double price = 1.0);

/// MES with utilitarian completion; returns exactly k members.
RuleOutcome mes(const Election& e);

/// MES rounds while any candidate is affordable; afterwards candidates are
/// bought with bounded overspending (supporters pay everything they have, the
/// rest of the price is overspent) in order of rho divided by the funded share;
/// then utilitarian completion. Identical to mes() whenever MES never runs out
/// of affordable candidates before k are elected.
RuleOutcome bos(const Election& e);

/// Subroutine forms used by the online rules. `pool` lists the candidates
/// taking part; ids >= e.num_candidates() are zero-utility placeholders that
/// rank after every real candidate on ties. Ties between real candidates are
/// broken by the smaller id. The result holds min(k, |pool|) members, sorted.
RuleOutcome mes_on_pool(const Election& e, std::span<const CandidateId> pool, int k);
RuleOutcome bos_on_pool(const Election& e, std::span<const CandidateId> pool, int k);

/// The k candidates with the largest total utility, ties to the smaller id.
Committee utilitarian_topk(const Election& e);

/// sum_i log(1 + u_i(W)), natural log.
double nash_welfare(const Election& e, const Committee& w);
double nash_welfare(const Election& e, std::span<const CandidateId> members);
double nash_welfare(std::span<const double> satisfaction);

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Exhaustive maximum of nash_welfare over all k-subsets in lexicographic
/// order; ties keep the lexicographically smallest set. Throws
/// InstanceTooLarge when C(m, k) exceeds `cap`.
std::pair<Committee, double> nash_optimum_bruteforce(const Election& e,
                                                     std::uint64_t cap = kDefaultEnumerationCap);

/// C(m, k), saturating at UINT64_MAX.
std::uint64_t binomial_saturating(int m, int k);

}  // namespace fairsec
