#include "fairsec/rules_online.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fairsec/rules_offline.hpp"

namespace fairsec {

std::string_view to_string(OnlineRule r) {
    switch (r) {
        case OnlineRule::Greedy: return "greedy";
        case OnlineRule::OnlineMes: return "online-mes";
        case OnlineRule::OnlineBos: return "online-bos";
        case OnlineRule::OnlineNash: return "online-nash";
    }
    return "unknown";
}

OnlineRule parse_online_rule(std::string_view name) {
    for (OnlineRule r : kAllOnlineRules)
        if (to_string(r) == name) return r;
    throw InvalidParameter("unknown rule '" + std::string(name) +
                           "' (expected greedy, online-mes, online-bos or online-nash)");
}

int default_exploration(int m) { return static_cast<int>(std::floor(m / std::numbers::e)); }

namespace {

void hire_rest(ArrivalStream& s, Committee& w) {
    while (auto a = s.next()) {
        w.members.push_back(a->candidate);
        w.audit.push_back({a->position, a->candidate, true, Reason::Safeguard, {}, -1, {}});
    }
}

void reject_rest(ArrivalStream& s, Committee& w, Reason why) {
    while (auto a = s.next()) w.audit.push_back({a->position, a->candidate, false, why, {}, -1, {}});
}

void finish(Committee& w) { std::sort(w.members.begin(), w.members.end()); }

}  // namespace

Committee greedy_budgeting(const Election& e, const ArrivalOrder& o) {
    const int n = e.num_voters();
    const int k = e.committee_size();
    std::vector<double> budget(n, static_cast<double>(k) / n);
    ArrivalStream s(e, o);
    Committee w;

    while (s.remaining() > 0) {
        if (k - w.size() == s.remaining()) {
            hire_rest(s, w);
            break;
        }
        const Arrival a = *s.next();
        if (w.size() == k) {
            w.audit.push_back({a.position, a.candidate, false, Reason::CommitteeFull, {}, -1, {}});
            continue;
        }
        std::vector<int> supporters;
        double pot = 0;
        for (int i = 0; i < n; ++i) {
            if (a.column[i] > 0) {
                supporters.push_back(i);
                pot += budget[i];
            }
        }
        if (supporters.empty() || pot < 1.0 - kPriceTolerance) {
            w.audit.push_back({a.position, a.candidate, false, Reason::Unaffordable, {}, -1, {}});
            continue;
        }
        // Equal split capped by budgets: find lambda with sum_i min(b_i, lambda) = 1.
        std::vector<int> by_budget = supporters;
        std::stable_sort(by_budget.begin(), by_budget.end(), [&](int x, int y) { return budget[x] < budget[y]; });
        double rest = 1.0;
        double lambda = budget[by_budget.back()];
        for (std::size_t j = 0; j < by_budget.size(); ++j) {
            const auto left = static_cast<double>(by_budget.size() - j);
            if (budget[by_budget[j]] * left >= rest) {
                lambda = rest / left;
                break;
            }
            rest -= budget[by_budget[j]];
        }
        std::vector<double> pay(n, 0.0);
        for (int i : supporters) {
            pay[i] = std::min(budget[i], lambda);
            budget[i] = std::max(0.0, budget[i] - pay[i]);
        }
        w.members.push_back(a.candidate);
        w.audit.push_back({a.position, a.candidate, true, Reason::Affordable, std::move(pay), -1, {}});
    }
    finish(w);
    return w;
}

namespace {

template <class Subroutine>
Committee equal_shares_online(const Election& e, const ArrivalOrder& o, const OnlineRuleConfig& cfg,
                              Subroutine&& subroutine) {
    const int m = e.num_candidates();
    const int k = e.committee_size();
    int t = cfg.exploration.value_or(default_exploration(m));
    if (t < 0 || t >= m)
        throw InvalidParameter("exploration length must be in [0, m), got " + std::to_string(t));
    t = std::min(t, m - k);

    ArrivalStream s(e, o);
    Committee w;

    std::vector<CandidateId> explored;
    for (int p = 0; p < t; ++p) {
        const Arrival a = *s.next();
        explored.push_back(a.candidate);
        w.audit.push_back({a.position, a.candidate, false, Reason::Observed, {}, -1, {}});
    }
    // Zero-utility placeholders (ids m, m+1, ...) when fewer than k were explored.
    for (CandidateId dummy = m; static_cast<int>(explored.size()) < k; ++dummy) explored.push_back(dummy);

    const std::vector<CandidateId> reference = subroutine(e, explored, k).committee.members;
    std::vector<CandidateId> running = reference;
    auto in_reference = [&](CandidateId c) { return std::binary_search(reference.begin(), reference.end(), c); };

    while (s.remaining() > 0) {
        if (w.size() == k) {
            reject_rest(s, w, Reason::CommitteeFull);
            break;
        }
        if (k - w.size() == s.remaining()) {
            hire_rest(s, w);
            break;
        }
        const Arrival a = *s.next();
        std::vector<CandidateId> pool = running;
        pool.push_back(a.candidate);
        const auto winners = subroutine(e, pool, k).committee.members;
        CandidateId excluded = -1;
        for (CandidateId c : pool)
            if (!std::binary_search(winners.begin(), winners.end(), c)) excluded = c;

        AuditEntry entry{a.position, a.candidate, false, Reason::ExcludedBySubroutine, {}, excluded, {}};
        if (excluded != a.candidate) {
            entry.hired = in_reference(excluded);
            entry.reason = entry.hired ? Reason::DisplacedReference : Reason::DisplacedNonReference;
            if (entry.hired) w.members.push_back(a.candidate);
            std::replace(running.begin(), running.end(), excluded, a.candidate);
        }
        entry.running_sample = running;
        w.audit.push_back(std::move(entry));
    }
    finish(w);
    return w;
}

}  // namespace

Committee online_mes(const Election& e, const ArrivalOrder& o, const OnlineRuleConfig& cfg) {
    return equal_shares_online(e, o, cfg, [](const Election& el, std::span<const CandidateId> pool, int k) {
        return mes_on_pool(el, pool, k);
    });
}

Committee online_bos(const Election& e, const ArrivalOrder& o, const OnlineRuleConfig& cfg) {
    return equal_shares_online(e, o, cfg, [](const Election& el, std::span<const CandidateId> pool, int k) {
        return bos_on_pool(el, pool, k);
    });
}

Committee online_nash(const Election& e, const ArrivalOrder& o) {
    const int m = e.num_candidates();
    const int k = e.committee_size();
    const int n = e.num_voters();
    if (m < k) throw InvalidElection("online Nash rule needs m >= k");

    ArrivalStream s(e, o);
    Committee w;
    std::vector<double> sat(n, 0.0);
    auto gain = [&](std::span<const double> col) {
        double total = 0;
        for (int i = 0; i < n; ++i) total += std::log1p(sat[i] + col[i]);
        return total;
    };

    const int base = m / k;
    const int longer = m % k;
    for (int seg = 0; seg < k; ++seg) {
        const int len = base + (seg < longer ? 1 : 0);
        const int observe = static_cast<int>(std::floor(len / std::numbers::e));
        double threshold = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < observe; ++j) {
            const Arrival a = *s.next();
            threshold = std::max(threshold, gain(a.column));
            w.audit.push_back({a.position, a.candidate, false, Reason::Observed, {}, -1, {}});
        }
        bool picked = false;
        for (int j = observe; j < len; ++j) {
            const Arrival a = *s.next();
            if (picked) {
                w.audit.push_back({a.position, a.candidate, false, Reason::SegmentClosed, {}, -1, {}});
                continue;
            }
            const double g = gain(a.column);
            const bool above = g >= threshold || nearly_equal(g, threshold);
            const bool last = j == len - 1;
            if (above || last) {
                picked = true;
                w.members.push_back(a.candidate);
                for (int i = 0; i < n; ++i) sat[i] += a.column[i];
                w.audit.push_back(
                    {a.position, a.candidate, true, above ? Reason::AboveThreshold : Reason::SegmentFallback, {}, -1, {}});
            } else {
                w.audit.push_back({a.position, a.candidate, false, Reason::BelowThreshold, {}, -1, {}});
            }
        }
    }
    finish(w);
    return w;
}

Committee run_online(OnlineRule rule, const Election& e, const ArrivalOrder& o, const OnlineRuleConfig& cfg) {
    switch (rule) {
        case OnlineRule::Greedy: return greedy_budgeting(e, o);
        case OnlineRule::OnlineMes: return online_mes(e, o, cfg);
        case OnlineRule::OnlineBos: return online_bos(e, o, cfg);
        case OnlineRule::OnlineNash: return online_nash(e, o);
    }
    throw InvalidParameter("unknown rule");
}

}  // namespace fairsec
