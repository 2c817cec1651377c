#include "fairsec/axioms.hpp"

#include <algorithm>
#include <functional>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "fairsec/rules_offline.hpp"

namespace fairsec {

namespace {

constexpr double kCompareTolerance = 1e-9;

bool below(double achieved, double required) {
    return achieved < required && !nearly_equal(achieved, required, kCompareTolerance);
}

// |S| * k >= n * |T| in integers.
bool large_enough(std::size_t group, int k, int n, int claimed) {
    return static_cast<long long>(group) * k >= static_cast<long long>(n) * claimed;
}

// Fills share, witness_candidates and the satisfied flag; `gap[i]` is the
// voter's largest deficit (negative when not violating).
void summarize(AxiomReport& r, int n, const std::vector<double>& gap, bool use_gap) {
    r.satisfied = r.witnesses.empty();
    std::vector<bool> hit(n, false);
    std::set<CandidateId> cands;
    for (const auto& wi : r.witnesses) {
        for (int i : wi.group) hit[i] = true;
        cands.insert(wi.candidates.begin(), wi.candidates.end());
    }
    const auto violating = std::count(hit.begin(), hit.end(), true);
    r.violating_voter_share = static_cast<double>(violating) / n;
    r.witness_candidates = static_cast<int>(cands.size());
    r.shortfall = 0;
    if (use_gap && violating > 0) {
        double total = 0;
        for (int i = 0; i < n; ++i)
            if (hit[i]) total += std::max(0.0, gap[i]);
        r.shortfall = total / static_cast<double>(violating);
    }
}

void note_gap(std::vector<double>& gap, const Witness& wi, const std::vector<double>& own) {
    for (int i : wi.group) gap[i] = std::max(gap[i], wi.required - own[i]);
}

}  // namespace

AxiomReport check_jr(const Election& e, const Committee& w) {
    const auto sat = satisfaction(e, w).values;
    const int n = e.num_voters();
    AxiomReport r;
    r.axiom = "jr";
    for (CandidateId c = 0; c < e.num_candidates(); ++c) {
        auto col = e.column(c);
        Witness wi;
        double alpha = 0;
        for (int i = 0; i < n; ++i) {
            if (col[i] > 0 && sat[i] == 0) {
                alpha = wi.group.empty() ? col[i] : std::min(alpha, col[i]);
                wi.group.push_back(i);
            }
        }
        if (!wi.group.empty() && large_enough(wi.group.size(), e.committee_size(), n, 1)) {
            wi.candidates = {c};
            wi.thresholds = {alpha};
            wi.required = alpha;
            wi.achieved = 0;
            r.witnesses.push_back(std::move(wi));
        }
    }
    summarize(r, n, {}, false);
    return r;
}

AxiomReport check_strong_jr(const Election& e, const Committee& w) {
    const auto sat = satisfaction(e, w).values;
    const int n = e.num_voters();
    const int k = e.committee_size();
    AxiomReport r;
    r.axiom = "strong-jr";
    std::vector<double> gap(n, -1.0);
    std::vector<double> thresholds;
    for (CandidateId c = 0; c < e.num_candidates(); ++c) {
        auto col = e.column(c);
        thresholds.assign(col.begin(), col.end());
        std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
        // A voter valuing c well but already well served can be left out of
        // the group, so the group for threshold a keeps only those below a.
        for (double alpha : thresholds) {
            if (alpha <= 0) break;
            Witness wi;
            double best = 0;
            for (int i = 0; i < n; ++i) {
                if (col[i] >= alpha && below(sat[i], alpha)) {
                    wi.group.push_back(i);
                    best = std::max(best, sat[i]);
                }
            }
            if (wi.group.empty() || !large_enough(wi.group.size(), k, n, 1)) continue;
            wi.candidates = {c};
            wi.thresholds = {alpha};
            wi.required = alpha;
            wi.achieved = best;
            note_gap(gap, wi, sat);
            r.witnesses.push_back(std::move(wi));
        }
    }
    summarize(r, n, gap, true);
    return r;
}

AxiomReport check_ejr_plus_approval(const Election& e, const Committee& w) {
    if (!e.is_approval()) throw WrongBallotType("EJR+ is only defined for approval (0/1) ballots");
    validate_committee(e, w);
    const int n = e.num_voters();
    const int k = e.committee_size();
    std::vector<int> approved(n, 0), approved_winners(n, 0);
    for (int i = 0; i < n; ++i)
        for (CandidateId c = 0; c < e.num_candidates(); ++c)
            if (e.utility(i, c) > 0) {
                ++approved[i];
                if (w.contains(c)) ++approved_winners[i];
            }

    AxiomReport r;
    r.axiom = "ejr-plus";
    std::vector<double> gap(n, -1.0);
    for (CandidateId c = 0; c < e.num_candidates(); ++c) {
        if (w.contains(c)) continue;
        auto col = e.column(c);
        for (int l = 1; l <= k; ++l) {
            Witness wi;
            int best = 0;
            for (int i = 0; i < n; ++i) {
                if (col[i] > 0 && approved_winners[i] < l) {
                    wi.group.push_back(i);
                    best = std::max(best, approved_winners[i]);
                }
            }
            if (wi.group.empty() || !large_enough(wi.group.size(), k, n, l)) continue;
            wi.candidates = {c};
            wi.thresholds = {1.0};
            wi.required = l;
            wi.achieved = best;
            for (int i : wi.group)
                gap[i] = std::max(gap[i], static_cast<double>(std::min(l, approved[i]) - approved_winners[i]));
            r.witnesses.push_back(std::move(wi));
        }
    }
    summarize(r, n, gap, true);
    return r;
}

std::string EjrVariant::name() const {
    switch (kind) {
        case Kind::Beta: return value == 1.0 ? "ejr" : "beta-ejr";
        case Kind::Gamma: return "ejr-gamma";
        case Kind::Delta: return "delta-ejr";
    }
    return "ejr";
}

AxiomReport check_ejr_bruteforce(const Election& e, const Committee& w, EjrVariant variant, int voter_cap) {
    const int n = e.num_voters();
    const int m = e.num_candidates();
    const int k = e.committee_size();
    if (n > voter_cap || n > 30)
        throw InstanceTooLarge("brute-force EJR enumerates 2^n groups; n = " + std::to_string(n) +
                               " exceeds the voter cap of " + std::to_string(std::min(voter_cap, 30)));
    int gamma = 0;
    switch (variant.kind) {
        case EjrVariant::Kind::Beta:
            if (!(variant.value >= 1.0) || !std::isfinite(variant.value))
                throw InvalidParameter("beta must be a finite value >= 1");
            break;
        case EjrVariant::Kind::Gamma:
            if (variant.value != std::floor(variant.value) || variant.value < 0 || variant.value > k - 1)
                throw InvalidParameter("gamma must be an integer in 0..k-1");
            gamma = static_cast<int>(variant.value);
            break;
        case EjrVariant::Kind::Delta:
            if (!(variant.value > 0) || variant.value > k) throw InvalidParameter("delta must lie in (0, k]");
            break;
    }

    const auto sat = satisfaction(e, w).values;
    // What each voter reaches: own satisfaction, plus the gamma best non-winners.
    std::vector<double> reach = sat;
    if (gamma > 0) {
        for (int i = 0; i < n; ++i) {
            std::vector<double> outside;
            for (CandidateId c = 0; c < m; ++c)
                if (!w.contains(c)) outside.push_back(e.utility(i, c));
            const auto take = std::min<std::size_t>(gamma, outside.size());
            std::partial_sort(outside.begin(), outside.begin() + take, outside.end(), std::greater<>());
            reach[i] += std::accumulate(outside.begin(), outside.begin() + take, 0.0);
        }
    }

    AxiomReport r;
    r.axiom = variant.name();
    std::vector<double> gap(n, -1.0);
    std::vector<double> alpha(m);
    std::vector<CandidateId> ranked(m);
    const std::uint64_t groups = std::uint64_t{1} << n;
    for (std::uint64_t mask = 1; mask < groups; ++mask) {
        const int size = std::popcount(mask);
        int claim;
        if (variant.kind == EjrVariant::Kind::Delta) {
            claim = static_cast<int>(std::floor(static_cast<double>(size) * k / (variant.value * n) + 1e-9));
        } else {
            claim = static_cast<int>(static_cast<long long>(size) * k / n);
        }
        claim = std::min(claim, m);
        if (claim < 1) continue;

        std::fill(alpha.begin(), alpha.end(), std::numeric_limits<double>::infinity());
        for (int i = 0; i < n; ++i) {
            if (!(mask >> i & 1)) continue;
            for (CandidateId c = 0; c < m; ++c) alpha[c] = std::min(alpha[c], e.utility(i, c));
        }
        std::iota(ranked.begin(), ranked.end(), 0);
        std::partial_sort(ranked.begin(), ranked.begin() + claim, ranked.end(), [&](CandidateId a, CandidateId b) {
            return alpha[a] != alpha[b] ? alpha[a] > alpha[b] : a < b;
        });
        Witness wi;
        double total = 0;
        for (int j = 0; j < claim; ++j) {
            if (alpha[ranked[j]] <= 0) break;
            wi.candidates.push_back(ranked[j]);
            wi.thresholds.push_back(alpha[ranked[j]]);
            total += alpha[ranked[j]];
        }
        if (wi.candidates.empty()) continue;
        const double required = variant.kind == EjrVariant::Kind::Beta ? total / variant.value : total;

        double best = 0;
        bool violated = true;
        for (int i = 0; i < n && violated; ++i) {
            if (!(mask >> i & 1)) continue;
            best = std::max(best, reach[i]);
            if (!below(reach[i], required)) violated = false;
        }
        if (!violated) continue;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) wi.group.push_back(i);
        wi.required = required;
        wi.achieved = best;
        note_gap(gap, wi, reach);
        r.witnesses.push_back(std::move(wi));
    }
    summarize(r, n, gap, true);
    return r;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Construction c) {
    switch (c) {
        case Construction::BetaEjr: return "beta-ejr";
        case Construction::EjrGamma: return "ejr-gamma";
        case Construction::DeltaEjr: return "delta-ejr";
        case Construction::StrongJr: return "strong-jr";
    }
    return "unknown";
}

Construction parse_construction(std::string_view name) {
    for (Construction c : {Construction::BetaEjr, Construction::EjrGamma, Construction::DeltaEjr,
                           Construction::StrongJr})
        if (to_string(c) == name) return c;
    throw InvalidParameter("unknown construction '" + std::string(name) +
                           "' (expected beta-ejr, ejr-gamma, delta-ejr or strong-jr)");
}

Counterexample make_counterexample(const CounterexampleSpec& spec) {
    const int k = spec.k;
    const double eps = spec.epsilon;
    const double p = spec.parameter;
    if (spec.construction != Construction::StrongJr && k < 2)
        throw InvalidParameter("construction needs k >= 2");
    if (!(eps > 0) || !std::isfinite(eps)) throw InvalidParameter("epsilon must be positive");

    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    std::vector<std::pair<CandidateId, int>> forcing;
    std::optional<double> cap;
    int size = k;

    switch (spec.construction) {
        case Construction::BetaEjr: {
            if (!(p >= 1) || !std::isfinite(p)) throw InvalidParameter("beta must be a finite value >= 1");
            if (!(eps < 1)) throw InvalidParameter("epsilon must be below 1");
            if (1 - eps > p) throw InvalidParameter("1 - epsilon exceeds the score cap beta");
            rows.assign(k, std::vector<double>(2 * k, 0.0));
            for (int j = 0; j < k; ++j) {
                rows[j][j] = 1 - eps;
                for (int b = 0; b < k; ++b) rows[j][k + b] = p / k;
                forcing.emplace_back(j, j);
            }
            for (int j = 0; j < k; ++j) labels.push_back("a" + std::to_string(j + 1));
            for (int j = 0; j < k; ++j) labels.push_back("b" + std::to_string(j + 1));
            cap = p;
            break;
        }
        case Construction::EjrGamma: {
            if (p != std::floor(p) || p < 0 || p > k - 1) throw InvalidParameter("gamma must be an integer in 0..k-1");
            if (k > 20) throw InvalidParameter("ejr-gamma construction supports k <= 20");
            const int m = k * k + k;
            rows.assign(k, std::vector<double>(m, 0.0));
            const double top = std::ldexp(eps, k + 1);
            for (int j = 0; j < k; ++j) {
                for (int s = 0; s < k; ++s) rows[j][j * k + s] = std::ldexp(eps, s);
                for (int b = 0; b < k; ++b) rows[j][k * k + b] = top;
            }
            for (int j = 0; j < k; ++j)
                for (int s = 0; s < k; ++s) labels.push_back("a" + std::to_string(j + 1) + "^" + std::to_string(s + 1));
            for (int j = 0; j < k; ++j) labels.push_back("b" + std::to_string(j + 1));
            cap = top;
            break;
        }
        case Construction::DeltaEjr: {
            if (!(p > 0) || p > k) throw InvalidParameter("delta must lie in (0, k]");
            rows.assign(1, std::vector<double>(2 * k, 0.0));
            const double b_value = 1 + eps * ((k + 1) / 2.0 + 1.0 / k);
            for (int j = 0; j < k; ++j) {
                rows[0][j] = 1 + (j + 1) * eps;
                rows[0][k + j] = b_value;
                forcing.emplace_back(j, 0);
            }
            for (int j = 0; j < k; ++j) labels.push_back("a" + std::to_string(j + 1));
            for (int j = 0; j < k; ++j) labels.push_back("b" + std::to_string(j + 1));
            cap = std::max(1 + k * eps, b_value);
            break;
        }
        case Construction::StrongJr: {
            rows = {{1, 0, 0}, {0, 1, 2}};
            labels = {"a", "b", "c"};
            forcing = {{0, 0}, {1, 1}};
            size = 2;
            break;
        }
    }
    CounterexampleSpec stored = spec;
    stored.k = size;
    Election e = Election::from_rows(rows, size, cap);
    ArrivalOrder o = ArrivalOrder::identity(e.num_candidates());
    return Counterexample{stored, std::move(e), std::move(o), std::move(labels), std::move(forcing), false};
}

Counterexample adapt_counterexample(const Counterexample& cx, const Committee& outcome) {
    const auto& perm = cx.order.permutation();
    for (const auto& [cand, voter] : cx.forcing) {
        if (outcome.contains(cand)) continue;
        const auto at = std::find(perm.begin(), perm.end(), cand) - perm.begin();
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < cx.election.num_voters(); ++i) rows.push_back(cx.election.voter_row(i));
        for (auto pos = at + 1; pos < static_cast<long>(perm.size()); ++pos) rows[voter][perm[pos]] = 0.0;
        Counterexample out = cx;
        out.election = Election::from_rows(rows, cx.election.committee_size(), cx.election.score_cap());
        out.adapted = true;
        return out;
    }
    return cx;
}

std::pair<Counterexample, Committee> play_counterexample(
    const CounterexampleSpec& spec, const std::function<Committee(const Election&, const ArrivalOrder&)>& rule) {
    Counterexample cx = make_counterexample(spec);
    Committee first = rule(cx.election, cx.order);
    Counterexample answer = adapt_counterexample(cx, first);
    if (!answer.adapted) return {std::move(cx), std::move(first)};
    Committee second = rule(answer.election, answer.order);
    return {std::move(answer), std::move(second)};
}

AxiomReport check_counterexample(const Counterexample& cx, const Committee& w) {
    switch (cx.spec.construction) {
        case Construction::BetaEjr: return check_ejr_bruteforce(cx.election, w, EjrVariant::beta(cx.spec.parameter));
        case Construction::EjrGamma:
            return check_ejr_bruteforce(cx.election, w, EjrVariant::gamma(static_cast<int>(cx.spec.parameter)));
        case Construction::DeltaEjr: return check_ejr_bruteforce(cx.election, w, EjrVariant::delta(cx.spec.parameter));
        case Construction::StrongJr: return check_strong_jr(cx.election, w);
    }
    throw InvalidParameter("unknown construction");
}

}  // namespace fairsec
