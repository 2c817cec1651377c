#pragma once

// Slow reference computations for the tests. Nothing here calls into the
// library code paths being checked; inputs are plain tables.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "fairsec/core.hpp"
#include "fairsec/rng.hpp"

namespace oracle {

using Table = std::vector<std::vector<double>>;  // [voter][candidate]

inline Table table_of(const fairsec::Election& e) {
    Table t(e.num_voters(), std::vector<double>(e.num_candidates()));
    for (int i = 0; i < e.num_voters(); ++i)
        for (int c = 0; c < e.num_candidates(); ++c) t[i][c] = e.utility(i, c);
    return t;
}

inline double sum_over(const std::vector<double>& row, const std::vector<int>& members) {
    double s = 0;
    for (int c : members) s += row[c];
    return s;
}

inline std::vector<int> bits(std::uint64_t mask) {
    std::vector<int> out;
    for (int b = 0; mask >> b; ++b)
        if ((mask >> b) & 1U) out.push_back(b);
    return out;
}

inline bool below(double achieved, double required) {
    return achieved < required - 1e-9 * std::max(std::abs(achieved), std::abs(required));
}

// ---------------------------------------------------------------------------
// Equal shares

inline double paid(const std::vector<double>& b, const std::vector<double>& u, double rho) {
    double s = 0;
    for (std::size_t i = 0; i < b.size(); ++i) s += std::min(b[i], rho * u[i]);
    return s;
}

/// Smallest rho with sum_i min(b_i, rho u_i) >= price, by bisection.
inline std::optional<double> rho_bisection(const std::vector<double>& b, const std::vector<double>& u,
                                           double price = 1.0) {
    double cover = 0;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (u[i] > 0) cover += b[i];
    if (cover < price - 1e-9) return std::nullopt;
    double lo = 0, hi = 1;
    while (paid(b, u, hi) < price - 1e-12 && hi < 1e300) hi *= 2;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        (paid(b, u, mid) >= price - 1e-12 ? hi : lo) = mid;
    }
    return hi;
}

/// Equal-shares rounds only (no completion): budgets k/n, price 1, smallest
/// rho first, ties to the smaller index.
inline std::vector<int> mes_rounds(const Table& t, int k) {
    const int n = static_cast<int>(t.size());
    const int m = static_cast<int>(t[0].size());
    std::vector<double> budget(n, static_cast<double>(k) / n);
    std::vector<bool> taken(m, false);
    std::vector<int> out;
    while (static_cast<int>(out.size()) < k) {
        int best = -1;
        double best_rho = std::numeric_limits<double>::infinity();
        for (int c = 0; c < m; ++c) {
            if (taken[c]) continue;
            std::vector<double> u(n);
            bool any = false;
            for (int i = 0; i < n; ++i) {
                u[i] = t[i][c];
                any = any || (u[i] > 0 && budget[i] > 0);
            }
            if (!any) continue;
            const auto rho = rho_bisection(budget, u);
            if (!rho) continue;
            if (*rho < best_rho * (1 - 1e-9)) {
                best = c;
                best_rho = *rho;
            }
        }
        if (best < 0) break;
        taken[best] = true;
        out.push_back(best);
        for (int i = 0; i < n; ++i) budget[i] -= std::min(budget[i], best_rho * t[i][best]);
    }
    return out;
}

/// Unit price split as sum_i min(b_i, lambda) = 1 among `payers`, by bisection.
inline double split_level(const std::vector<double>& b, const std::vector<int>& payers) {
    double lo = 0, hi = 0;
    for (int i : payers) hi = std::max(hi, b[i]);
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        double s = 0;
        for (int i : payers) s += std::min(b[i], mid);
        (s >= 1.0 ? hi : lo) = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Axioms by enumeration

/// Some group of at least n/k voters all valuing one candidate positively while
/// getting nothing from the committee.
inline bool jr_violated(const Table& t, int k, const std::vector<int>& w) {
    const int n = static_cast<int>(t.size());
    const int m = static_cast<int>(t[0].size());
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
        const auto group = bits(s);
        if (static_cast<int>(group.size()) * k < n) continue;
        for (int c = 0; c < m; ++c) {
            bool ok = true;
            for (int i : group) ok = ok && t[i][c] > 0 && sum_over(t[i], w) == 0;
            if (ok) return true;
        }
    }
    return false;
}

inline bool strong_jr_violated(const Table& t, int k, const std::vector<int>& w) {
    const int n = static_cast<int>(t.size());
    const int m = static_cast<int>(t[0].size());
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
        const auto group = bits(s);
        if (static_cast<int>(group.size()) * k < n) continue;
        for (int c = 0; c < m; ++c) {
            double alpha = std::numeric_limits<double>::infinity();
            for (int i : group) alpha = std::min(alpha, t[i][c]);
            if (alpha <= 0) continue;
            bool all_below = true;
            for (int i : group) all_below = all_below && below(sum_over(t[i], w), alpha);
            if (all_below) return true;
        }
    }
    return false;
}

enum class Relax { Beta, Gamma, Delta };

/// EJR and its relaxations by enumerating every voter group S, every claimed
/// set T, and (for gamma) every extra set X of at most gamma candidates.
inline bool ejr_violated(const Table& t, int k, const std::vector<int>& w, Relax relax = Relax::Beta,
                         double param = 1.0) {
    const int n = static_cast<int>(t.size());
    const int m = static_cast<int>(t[0].size());
    const int gamma = relax == Relax::Gamma ? static_cast<int>(param) : 0;
    std::vector<double> reach(n);
    for (int i = 0; i < n; ++i) {
        double best = 0;
        for (std::uint64_t x = 0; x < (std::uint64_t{1} << m); ++x) {
            if (std::popcount(x) > gamma) continue;
            auto members = w;
            for (int c : bits(x))
                if (std::find(w.begin(), w.end(), c) == w.end()) members.push_back(c);
            best = std::max(best, sum_over(t[i], members));
        }
        reach[i] = best;
    }
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
        const auto group = bits(s);
        const double size = static_cast<double>(group.size());
        for (std::uint64_t tm = 1; tm < (std::uint64_t{1} << m); ++tm) {
            const double claim = std::popcount(tm);
            const double scale = relax == Relax::Delta ? param : 1.0;
            if (size * k < scale * claim * n * (1 - 1e-12)) continue;
            double total = 0;
            for (int c : bits(tm)) {
                double alpha = std::numeric_limits<double>::infinity();
                for (int i : group) alpha = std::min(alpha, t[i][c]);
                total += alpha;
            }
            const double required = relax == Relax::Beta ? total / param : total;
            bool all_below = true;
            for (int i : group) all_below = all_below && below(reach[i], required);
            if (all_below) return true;
        }
    }
    return false;
}

/// Approval EJR+ by enumerating voter groups: a group of at least l n / k
/// voters approving a non-winner c, each with fewer than l approved winners.
inline bool ejr_plus_violated(const Table& t, int k, const std::vector<int>& w) {
    const int n = static_cast<int>(t.size());
    const int m = static_cast<int>(t[0].size());
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << n); ++s) {
        const auto group = bits(s);
        for (int c = 0; c < m; ++c) {
            if (std::find(w.begin(), w.end(), c) != w.end()) continue;
            for (int l = 1; l <= k; ++l) {
                if (static_cast<double>(group.size()) * k < static_cast<double>(l) * n) continue;
                bool ok = true;
                for (int i : group) ok = ok && t[i][c] == 1 && sum_over(t[i], w) < l;
                if (ok) return true;
            }
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Welfare

inline double nash(const Table& t, const std::vector<int>& w) {
    double s = 0;
    for (const auto& row : t) s += std::log(1 + sum_over(row, w));
    return s;
}

/// Best k-subset by bitmask enumeration; returns the welfare only.
inline double nash_optimum(const Table& t, int k) {
    const int m = static_cast<int>(t[0].size());
    double best = -1;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << m); ++x)
        if (std::popcount(x) == k) best = std::max(best, nash(t, bits(x)));
    return best;
}

inline double gini_pairwise(const std::vector<double>& s) {
    const double n = static_cast<double>(s.size());
    double mean = 0;
    for (double v : s) mean += v;
    mean /= n;
    if (mean == 0) return 0;
    double diff = 0;
    for (double a : s)
        for (double b : s) diff += std::abs(a - b);
    return diff / (2 * n * n * mean);
}

// ---------------------------------------------------------------------------
// Rankings

inline int inversions(const std::vector<int>& ranking) {
    int inv = 0;
    for (std::size_t a = 0; a < ranking.size(); ++a)
        for (std::size_t b = a + 1; b < ranking.size(); ++b) inv += ranking[a] > ranking[b];
    return inv;
}

/// Mallows expected inversion count by summing over all m! rankings.
inline double mallows_swaps_enumerated(int m, double phi) {
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    double z = 0, acc = 0;
    do {
        const int inv = inversions(perm);
        const double weight = std::pow(phi, inv);
        z += weight;
        acc += weight * inv;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc / z;
}

// ---------------------------------------------------------------------------
// Statistics

/// Pearson statistic against a uniform expectation.
inline double chi_square_uniform(const std::vector<double>& counts) {
    double total = 0;
    for (double c : counts) total += c;
    const double expected = total / static_cast<double>(counts.size());
    double stat = 0;
    for (double c : counts) stat += (c - expected) * (c - expected) / expected;
    return stat;
}

/// Upper quantile of chi-square(df) at the standard normal quantile z
/// (Wilson-Hilferty).
inline double chi_square_quantile(double df, double z) {
    const double a = 2.0 / (9.0 * df);
    return df * std::pow(1 - a + z * std::sqrt(a), 3);
}

}  // namespace oracle
