#include "fairsec/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "fairsec/rng.hpp"

namespace fairsec {

std::string_view to_string(Culture c) {
    switch (c) {
        case Culture::Ic: return "ic";
        case Culture::Mallows: return "mallows";
        case Culture::NormalizedMallows: return "normalized-mallows";
        case Culture::Polarized: return "polarized";
    }
    return "unknown";
}

Culture parse_culture(std::string_view name) {
    for (Culture c : {Culture::Ic, Culture::Mallows, Culture::NormalizedMallows, Culture::Polarized})
        if (to_string(c) == name) return c;
    throw InvalidParameter("unknown culture '" + std::string(name) +
                           "' (expected ic, mallows, normalized-mallows or polarized)");
}

namespace {

void check_size(const SampleSpec& s) {
    if (s.n < 1 || s.m < 1) throw InvalidParameter("sampled elections need n >= 1 and m >= 1");
    if (static_cast<std::int64_t>(s.n) * s.m > kMaxSampleCells)
        throw InvalidParameter("n * m exceeds the sampling cap of " + std::to_string(kMaxSampleCells));
    if (s.k < 2 || s.k >= s.m)
        throw InvalidElection("committee size must satisfy 2 <= k < m (k=" + std::to_string(s.k) +
                              ", m=" + std::to_string(s.m) + ")");
}

Election mallows_with(const SampleSpec& spec, double phi) {
    check_size(spec);
    const int n = spec.n, m = spec.m;
    Rng rng(spec.seed);
    std::vector<double> table(static_cast<std::size_t>(n) * m);
    std::vector<CandidateId> ranking;
    std::vector<double> weight(m);
    for (int i = 0; i < n; ++i) {
        // Repeated insertion: item j goes to slot s in 0..j with weight phi^(j - s).
        ranking.clear();
        for (int j = 0; j < m; ++j) {
            double total = 0;
            for (int s = j; s >= 0; --s) {
                weight[s] = (s == j) ? 1.0 : weight[s + 1] * phi;
                total += weight[s];
            }
            double draw = rng.uniform() * total;
            int slot = j;
            for (int s = 0; s <= j; ++s) {
                if (draw < weight[s]) {
                    slot = s;
                    break;
                }
                draw -= weight[s];
            }
            ranking.insert(ranking.begin() + slot, j);
        }
        for (int r = 0; r < m; ++r) {
            double u = m > 1 ? 200.0 * (m - 1 - r) / (m - 1) : 200.0;
            if (spec.noise) u = std::clamp(u + rng.uniform(-10.0, 10.0), 0.0, 200.0);
            table[static_cast<std::size_t>(i) * m + ranking[r]] = u;
        }
    }
    return Election(n, m, spec.k, table);
}

}  // namespace

Election sample_ic(const SampleSpec& spec) {
    if (!(spec.p >= 0 && spec.p <= 1)) throw InvalidParameter("ic approval probability must lie in [0, 1]");
    check_size(spec);
    const int n = spec.n, m = spec.m;
    Rng rng(spec.seed);
    std::vector<double> table(static_cast<std::size_t>(n) * m, 0.0);
    std::vector<CandidateId> ids(m);
    for (int i = 0; i < n; ++i) {
        int count = 0;
        for (int j = 0; j < m; ++j) count += rng.bernoulli(spec.p) ? 1 : 0;
        std::iota(ids.begin(), ids.end(), 0);
        for (int j = 0; j < count; ++j) {
            const auto pick = j + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - j)));
            std::swap(ids[j], ids[pick]);
            const double u = std::clamp(std::round(rng.normal(150.0, 140.0)), 1.0, 200.0);
            table[static_cast<std::size_t>(i) * m + ids[j]] = u;
        }
    }
    return Election(n, m, spec.k, table);
}

Election sample_mallows(const SampleSpec& spec) {
    if (!(spec.phi > 0 && spec.phi <= 1)) throw InvalidParameter("mallows dispersion must lie in (0, 1]");
    return mallows_with(spec, spec.phi);
}

double mallows_expected_swaps(int m, double phi) {
    // Inserting item j adds d swaps with probability proportional to phi^d, d in 0..j.
    double total = 0;
    for (int j = 1; j < m; ++j) {
        double num = 0, den = 0, w = 1;
        for (int d = 0; d <= j; ++d) {
            num += d * w;
            den += w;
            w *= phi;
        }
        total += num / den;
    }
    return total;
}

double phi_from_normalized(int m, double normalized) {
    if (!(normalized > 0 && normalized <= 1)) throw InvalidParameter("normalized dispersion must lie in (0, 1]");
    if (m < 2 || normalized == 1) return 1.0;
    const double target = normalized * m * (m - 1) / 4.0;
    double lo = 0, hi = 1;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mallows_expected_swaps(m, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return std::max(0.5 * (lo + hi), std::numeric_limits<double>::min());
}

Election sample_normalized_mallows(const SampleSpec& spec) {
    return mallows_with(spec, phi_from_normalized(spec.m, spec.phi));
}

Election sample_polarized(const SampleSpec& spec) {
    if (!(spec.x > 0 && spec.x <= 1)) throw InvalidParameter("polarized bloc share x must lie in (0, 1]");
    if (!(spec.q > 0 && spec.q <= 1)) throw InvalidParameter("polarized approval rate q must lie in (0, 1]");
    check_size(spec);
    const int n = spec.n, m = spec.m;
    const int half = m / 2;
    const int bloc = std::min(n, static_cast<int>(std::ceil(spec.x * n - 1e-9)));
    Rng rng(spec.seed);
    std::vector<double> table(static_cast<std::size_t>(n) * m, 0.0);
    for (int i = 0; i < n; ++i) {
        double* row = table.data() + static_cast<std::size_t>(i) * m;
        if (i < bloc) {
            std::fill(row, row + half, 1.0);
        } else {
            for (int c = half; c < m; ++c) row[c] = rng.bernoulli(spec.q) ? 1.0 : 0.0;
        }
    }
    return Election(n, m, spec.k, table);
}

Election sample(const SampleSpec& spec) {
    switch (spec.culture) {
        case Culture::Ic: return sample_ic(spec);
        case Culture::Mallows: return sample_mallows(spec);
        case Culture::NormalizedMallows: return sample_normalized_mallows(spec);
        case Culture::Polarized: return sample_polarized(spec);
    }
    throw InvalidParameter("unknown culture");
}

QuotaOutcome proportional_quota(const SampleSpec& spec, const Committee& w) {
    if (spec.culture != Culture::Polarized) throw InvalidParameter("quota is only defined for polarized samples");
    QuotaOutcome q;
    q.deserved = static_cast<int>(std::floor(spec.x * spec.k + 1e-9));
    const int half = spec.m / 2;
    q.received = static_cast<int>(std::count_if(w.members.begin(), w.members.end(), [&](CandidateId c) { return c < half; }));
    return q;
}

}  // namespace fairsec
