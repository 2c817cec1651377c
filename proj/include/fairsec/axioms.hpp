#pragma once

// Proportionality checkers (JR, strong-JR, EJR+ for approval ballots, and a
// brute-force EJR with its beta / gamma / delta relaxations) and the
// impossibility instances used as regression fixtures.
//
// Cohesiveness: a group S may claim a set T when |S|/n >= |T|/k (times delta
// for the delta relaxation), and each c in T is valued at least alpha(c) by
// every member of S. The checkers take alpha(c) as the group minimum, which is
// the strongest claim S can make for a given T.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fairsec/core.hpp"

namespace fairsec {

struct Witness {
    std::vector<int> group;                // voters, ascending
    std::vector<CandidateId> candidates;   // the claimed set T
    std::vector<double> thresholds;        // alpha(c) per entry of `candidates`
    double required = 0;                   // what some member must reach
    double achieved = 0;                   // best value reached by a member
};

struct AxiomReport {
    std::string axiom;
    bool satisfied = true;
    std::vector<Witness> witnesses;
    double violating_voter_share = 0;  // |union of witness groups| / n
    /// Mean over violating voters of their largest gap (required - own value).
    /// JR has no magnitude and always reports 0.
    double shortfall = 0;
    /// Number of distinct candidates appearing in some witness.
    int witness_candidates = 0;
};

/// Violation iff some candidate c has at least n/k voters with u_i(c) > 0 and
/// u_i(W) = 0. One witness per such c, holding all of those voters.
AxiomReport check_jr(const Election& e, const Committee& w);

/// For each candidate c and each distinct positive value a in its column, the
/// voters with u_i(c) >= a and u_i(W) < a form a group; violation iff some such
/// group has at least n/k voters. Every cohesive group is a subset of one of
/// these, so the check is exact.
AxiomReport check_strong_jr(const Election& e, const Committee& w);

/// Approval ballots only (throws WrongBallotType otherwise). Violation iff a
/// non-winner c and some l in 1..k have at least l*n/k supporters of c that
/// each approve fewer than l winners. The shortfall of a violating voter i is
/// the largest min(l, |A_i|) - |A_i cap W| over the witnesses containing i.
AxiomReport check_ejr_plus_approval(const Election& e, const Committee& w);

struct EjrVariant {
    enum class Kind { Beta, Gamma, Delta };
    Kind kind = Kind::Beta;
    double value = 1.0;

    static EjrVariant exact() { return {}; }
    static EjrVariant beta(double b) { return {Kind::Beta, b}; }
    static EjrVariant gamma(int g) { return {Kind::Gamma, static_cast<double>(g)}; }
    static EjrVariant delta(double d) { return {Kind::Delta, d}; }

    std::string name() const;
};

inline constexpr int kDefaultBruteForceVoterCap = 15;

/// Enumerates all 2^n - 1 voter groups. For each group the claim T is the
/// L candidates with the largest positive group minimum (L = floor(|S| k / n),
/// or floor(|S| k / (delta n))). Violated when every member stays below
///   beta:  sum alpha(T) / beta, from u_i(W)
///   gamma: sum alpha(T), from u_i(W) plus i's gamma best non-winners
///   delta: sum alpha(T), from u_i(W).
/// beta = 1, gamma = 0 and delta = 1 are exact EJR. Witnesses are sorted by
/// group bitmask. Throws InstanceTooLarge when n exceeds `voter_cap`, and
/// InvalidParameter for beta < 1, gamma outside 0..k-1 or delta outside (0, k].
AxiomReport check_ejr_bruteforce(const Election& e, const Committee& w, EjrVariant variant = EjrVariant::exact(),
                                 int voter_cap = kDefaultBruteForceVoterCap);

// ---------------------------------------------------------------------------
// Impossibility instances

enum class Construction { BetaEjr, EjrGamma, DeltaEjr, StrongJr };

std::string_view to_string(Construction c);
/// "beta-ejr", "ejr-gamma", "delta-ejr", "strong-jr".
Construction parse_construction(std::string_view name);

struct CounterexampleSpec {
    Construction construction = Construction::BetaEjr;
    int k = 2;                // ignored by strong-jr, which always has k = 2
    double parameter = 1.0;   // beta, gamma or delta
    double epsilon = 0.1;
};

struct Counterexample {
    CounterexampleSpec spec;
    Election election;
    ArrivalOrder order;                  // candidates arrive in table order
    std::vector<std::string> labels;     // "a1", "a2^3", "b1", ...
    /// Candidates an online rule must hire to stay safe, with the voter who
    /// loses out if it does not. Listed in arrival order.
    std::vector<std::pair<CandidateId, int>> forcing;
    bool adapted = false;
};

/// Builds the instance from the matching impossibility argument:
///   beta-ejr:  k voters, a_j worth 1-eps to voter j, every b worth beta/k to all; cap beta
///   ejr-gamma: k voters, a_j^s worth 2^(s-1) eps to voter j, b worth 2^(k+1) eps; cap 2^(k+1) eps
///   delta-ejr: 1 voter, a_j worth 1+j eps, b worth 1+eps((k+1)/2+1/k); cap max(1+k eps, b)
///   strong-jr: ballots (1,0,0) and (0,1,2), k = 2.
/// Throws InvalidParameter for out-of-range parameters.
Counterexample make_counterexample(const CounterexampleSpec& spec);

/// The adversary's answer to an outcome on `cx`: at the first forcing
/// candidate that `outcome` left out, the voter it protects values nothing
/// that arrives afterwards. Decisions up to that point are unchanged for any
/// online rule, and that voter is left unrepresented. Returns `cx` unchanged
/// when every forcing candidate was hired. ejr-gamma lists no forcing
/// candidates: its single-candidate claims are always met once gamma >= 1.
Counterexample adapt_counterexample(const Counterexample& cx, const Committee& outcome);

/// Runs `rule` on the instance, lets the adversary answer, and runs it again.
/// The returned pair holds the final instance and the rule's committee on it.
std::pair<Counterexample, Committee> play_counterexample(
    const CounterexampleSpec& spec, const std::function<Committee(const Election&, const ArrivalOrder&)>& rule);

/// Checker matching the construction: beta / gamma / delta brute-force EJR
/// with the construction's parameter, or strong-JR.
AxiomReport check_counterexample(const Counterexample& cx, const Committee& w);

}  // namespace fairsec
