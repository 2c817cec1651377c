#pragma once

// Streaming committee rules. Each consumes an ArrivalStream, decides on every
// candidate at its arrival, and returns exactly k members with one audit entry
// per arrival position.

#include <optional>
#include <string>
#include <string_view>

#include "fairsec/core.hpp"

namespace fairsec {

enum class OnlineRule { Greedy, OnlineMes, OnlineBos, OnlineNash };

std::string_view to_string(OnlineRule r);
/// Accepts "greedy", "online-mes", "online-bos", "online-nash"; throws InvalidParameter otherwise.
OnlineRule parse_online_rule(std::string_view name);

inline constexpr OnlineRule kAllOnlineRules[] = {OnlineRule::Greedy, OnlineRule::OnlineMes, OnlineRule::OnlineBos,
                                                 OnlineRule::OnlineNash};

struct OnlineRuleConfig {
    /// Exploration length for online MES/BOS; floor(m/e) when unset. Values
    /// above m - k are lowered to m - k so the selection phase can still fill
    /// the committee. Must be below m.
    std::optional<int> exploration;
};

/// floor(m / e).
int default_exploration(int m);

/// Budgets k/n; a candidate is hired when the voters with positive utility for
/// it hold at least 1 in total, and they pay 1 split equally, capped by their
/// remaining budgets. Once the number of candidates still to come equals the
/// number of open seats, all of them are hired.
Committee greedy_budgeting(const Election& e, const ArrivalOrder& o);

/// Reference committee from MES on the exploration prefix, then each newcomer
/// c runs MES on the running sample plus c. If the excluded member was in the
/// reference committee, c is hired. The running sample swaps in c whenever c
/// survives the subroutine, hired or not (the hire-branch-only placement of
/// that update in some pseudocode renderings is not followed).
Committee online_mes(const Election& e, const ArrivalOrder& o, const OnlineRuleConfig& cfg = {});

/// online_mes with the bounded-overspending subroutine.
Committee online_bos(const Election& e, const ArrivalOrder& o, const OnlineRuleConfig& cfg = {});

/// One hire per contiguous segment (sizes differ by at most one, longer
/// segments first). Within a segment the first floor(|S|/e) arrivals set a
/// Nash-welfare threshold; the first later arrival reaching it is hired, else
/// the segment's last candidate.
Committee online_nash(const Election& e, const ArrivalOrder& o);

Committee run_online(OnlineRule rule, const Election& e, const ArrivalOrder& o, const OnlineRuleConfig& cfg = {});

}  // namespace fairsec
