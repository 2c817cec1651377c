#include "fairsec/rules_offline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairsec/rng.hpp"

namespace fairsec {

bool nearly_equal(double a, double b, double rel) {
    if (a == b) return true;
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= rel * scale;
}

std::vector<CandidateId> MesTrace::core() const {
    std::vector<CandidateId> out;
    for (const auto& r : rounds)
        if (r.funded >= 1.0 - kPriceTolerance) out.push_back(r.candidate);
    return out;
}

std::optional<double> equal_shares_rho(std::span<const double> budgets, std::span<const double> utilities,
                                       double price) {
    struct Supporter {
        double budget;
        double utility;
        double ratio;
    };
    std::vector<Supporter> sup;
    double total_budget = 0;
    for (std::size_t i = 0; i < utilities.size(); ++i) {
        if (utilities[i] > 0 && budgets[i] > 0) {
            sup.push_back({budgets[i], utilities[i], budgets[i] / utilities[i]});
            total_budget += budgets[i];
        }
    }
    if (sup.empty() || total_budget < price - kPriceTolerance) return std::nullopt;
    std::stable_sort(sup.begin(), sup.end(), [](const Supporter& a, const Supporter& b) { return a.ratio < b.ratio; });

    // Supporters before position j pay their whole budget; the rest pay rho * u.
    std::vector<double> suffix_utility(sup.size() + 1, 0.0);
    for (std::size_t j = sup.size(); j-- > 0;) suffix_utility[j] = suffix_utility[j + 1] + sup[j].utility;
    double paid_in_full = 0;
    for (std::size_t j = 0; j < sup.size(); ++j) {
        const double rest = price - paid_in_full;
        if (rest <= 0) return sup[j > 0 ? j - 1 : 0].ratio;
        const double rho = rest / suffix_utility[j];
        if (rho <= sup[j].ratio) return rho;
        paid_in_full += sup[j].budget;
    }
    // Only reachable when the budgets cover the price up to the tolerance.
    return sup.back().ratio;
}

namespace {

bool better_rho(double rho, CandidateId id, double best_rho, CandidateId best_id) {
    if (best_id < 0) return true;
    if (nearly_equal(rho, best_rho)) return id < best_id;
    return rho < best_rho;
}

RuleOutcome equal_shares(const Election& e, std::span<const CandidateId> pool, int k, bool overspend) {
    const int n = e.num_voters();
    const int m = e.num_candidates();
    std::vector<double> budgets(n, static_cast<double>(k) / n);
    std::vector<bool> taken(pool.size(), false);
    std::vector<CandidateId> chosen;
    MesTrace trace;
    const int target = std::min<int>(k, static_cast<int>(pool.size()));

    auto charge = [&](CandidateId c, double rho, double funded, bool everything) {
        MesRound round{c, rho, std::vector<double>(n, 0.0), funded};
        auto col = e.column(c);
        for (int i = 0; i < n; ++i) {
            if (col[i] <= 0 || budgets[i] <= 0) continue;
            const double pay = everything ? budgets[i] : std::min(budgets[i], rho * col[i]);
            round.payments[i] = pay;
            budgets[i] = std::max(0.0, budgets[i] - pay);
        }
        trace.rounds.push_back(std::move(round));
        chosen.push_back(c);
    };

    // Equal-shares rounds.
    while (static_cast<int>(chosen.size()) < target) {
        int best = -1;
        double best_rho = 0;
        for (std::size_t j = 0; j < pool.size(); ++j) {
            if (taken[j] || pool[j] >= m) continue;
            auto rho = equal_shares_rho(budgets, e.column(pool[j]));
            if (rho && better_rho(*rho, pool[j], best_rho, best < 0 ? -1 : pool[best])) {
                best = static_cast<int>(j);
                best_rho = *rho;
            }
        }
        if (best < 0) break;
        taken[best] = true;
        charge(pool[best], best_rho, 1.0, false);
    }

    // Bounded overspending: nobody can afford a full price any more.
    if (overspend) {
        while (static_cast<int>(chosen.size()) < target) {
            int best = -1;
            double best_score = 0, best_rho = 0, best_funded = 0;
            for (std::size_t j = 0; j < pool.size(); ++j) {
                if (taken[j] || pool[j] >= m) continue;
                auto col = e.column(pool[j]);
                double funded = 0, rho = 0;
                for (int i = 0; i < n; ++i) {
                    if (col[i] > 0 && budgets[i] > 0) {
                        funded += budgets[i];
                        rho = std::max(rho, budgets[i] / col[i]);
                    }
                }
                if (funded <= 0) continue;
                funded = std::min(funded, 1.0);
                const double score = rho / funded;
                if (better_rho(score, pool[j], best_score, best < 0 ? -1 : pool[best])) {
                    best = static_cast<int>(j);
                    best_score = score;
                    best_rho = rho;
                    best_funded = funded;
                }
            }
            if (best < 0) break;
            taken[best] = true;
            charge(pool[best], best_rho, best_funded, true);
        }
    }

    // Utilitarian completion; placeholders have total utility 0 and the largest ids.
    while (static_cast<int>(chosen.size()) < target) {
        int best = -1;
        double best_sum = 0;
        for (std::size_t j = 0; j < pool.size(); ++j) {
            if (taken[j]) continue;
            const double sum = pool[j] < m ? e.column_sum(pool[j]) : 0.0;
            bool take = best < 0;
            if (!take) {
                if (nearly_equal(sum, best_sum))
                    take = pool[j] < pool[best];
                else
                    take = sum > best_sum;
            }
            if (take) {
                best = static_cast<int>(j);
                best_sum = sum;
            }
        }
        taken[best] = true;
        chosen.push_back(pool[best]);
        trace.completion_added.push_back(pool[best]);
    }

    std::sort(chosen.begin(), chosen.end());
    return RuleOutcome{Committee{std::move(chosen), {}}, std::move(trace)};
}

std::vector<CandidateId> all_candidates(const Election& e) {
    std::vector<CandidateId> ids(e.num_candidates());
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

}  // namespace

RuleOutcome mes(const Election& e) {
    const auto ids = all_candidates(e);
    return equal_shares(e, ids, e.committee_size(), false);
}

RuleOutcome bos(const Election& e) {
    const auto ids = all_candidates(e);
    return equal_shares(e, ids, e.committee_size(), true);
}

RuleOutcome mes_on_pool(const Election& e, std::span<const CandidateId> pool, int k) {
    return equal_shares(e, pool, k, false);
}

RuleOutcome bos_on_pool(const Election& e, std::span<const CandidateId> pool, int k) {
    return equal_shares(e, pool, k, true);
}

Committee utilitarian_topk(const Election& e) {
    std::vector<CandidateId> chosen;
    std::vector<bool> taken(e.num_candidates(), false);
    for (int round = 0; round < e.committee_size(); ++round) {
        CandidateId best = -1;
        for (CandidateId c = 0; c < e.num_candidates(); ++c) {
            if (taken[c]) continue;
            if (best < 0 || (!nearly_equal(e.column_sum(c), e.column_sum(best)) && e.column_sum(c) > e.column_sum(best)))
                best = c;
        }
        taken[best] = true;
        chosen.push_back(best);
    }
    std::sort(chosen.begin(), chosen.end());
    return Committee{std::move(chosen), {}};
}

double nash_welfare(std::span<const double> satisfaction) {
    double total = 0;
    for (double s : satisfaction) total += std::log1p(s);
    return total;
}

double nash_welfare(const Election& e, std::span<const CandidateId> members) {
    return nash_welfare(satisfaction(e, members).values);
}

double nash_welfare(const Election& e, const Committee& w) { return nash_welfare(satisfaction(e, w).values); }

std::uint64_t binomial_saturating(int m, int k) {
    if (k < 0 || k > m) return 0;
    k = std::min(k, m - k);
    uint128 acc = 1;
    for (int i = 1; i <= k; ++i) {
        acc = acc * static_cast<unsigned>(m - k + i) / static_cast<unsigned>(i);
        if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(acc);
}

std::pair<Committee, double> nash_optimum_bruteforce(const Election& e, std::uint64_t cap) {
    const int m = e.num_candidates();
    const int k = e.committee_size();
    const int n = e.num_voters();
    const std::uint64_t count = binomial_saturating(m, k);
    if (count > cap)
        throw InstanceTooLarge("C(" + std::to_string(m) + ", " + std::to_string(k) + ") = " + std::to_string(count) +
                               " combinations exceeds the enumeration cap of " + std::to_string(cap));

    std::vector<CandidateId> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<CandidateId> best_set;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> sat(n);
    while (true) {
        std::fill(sat.begin(), sat.end(), 0.0);
        for (CandidateId c : idx) {
            auto col = e.column(c);
            for (int i = 0; i < n; ++i) sat[i] += col[i];
        }
        const double value = nash_welfare(sat);
        if (best_set.empty() || (value > best && !nearly_equal(value, best))) {
            best = value;
            best_set = idx;
        }
        // Next combination in lexicographic order.
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == m - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return {Committee{best_set, {}}, best};
}

}  // namespace fairsec
