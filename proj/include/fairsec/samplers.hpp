#pragma once

// Seeded synthetic elections: impartial culture with normal utilities,
// Mallows (classic and normalized dispersion) and a two-bloc polarized culture.
// Every draw comes from one Rng seeded with spec.seed, so a spec fully
// determines its election.

#include <cstdint>
#include <string_view>

#include "fairsec/core.hpp"

namespace fairsec {

enum class Culture { Ic, Mallows, NormalizedMallows, Polarized };

std::string_view to_string(Culture c);
/// "ic", "mallows", "normalized-mallows", "polarized".
Culture parse_culture(std::string_view name);

/// Upper bound on n * m for any sampled election.
inline constexpr std::int64_t kMaxSampleCells = 50'000'000;

struct SampleSpec {
    Culture culture = Culture::Ic;
    int n = 10;
    int m = 10;
    int k = 2;
    double p = 0.5;      // ic: approval probability, in [0, 1]
    double phi = 0.5;    // mallows: dispersion in (0, 1]; normalized-mallows: normalized value in (0, 1]
    bool noise = true;   // mallows: add Uniform(-10, 10) to each utility
    double x = 0.5;      // polarized: share of bloc A, in (0, 1]
    double q = 0.5;      // polarized: bloc B approval rate, in (0, 1]
    std::uint64_t seed = 0;
};

/// Each voter approves Binomial(m, p) candidates chosen uniformly; approved
/// candidates get clamp(round(Normal(150, 140)), 1, 200), the rest 0.
Election sample_ic(const SampleSpec& spec);

/// Rankings by repeated insertion around the identity order. The candidate at
/// rank r (1 = best) is worth 200 (m - r) / (m - 1), plus the optional noise,
/// clamped to [0, 200].
Election sample_mallows(const SampleSpec& spec);

/// sample_mallows after mapping spec.phi through phi_from_normalized.
Election sample_normalized_mallows(const SampleSpec& spec);

/// Expected number of swaps from the central order under Mallows(phi) on m items.
double mallows_expected_swaps(int m, double phi);

/// The dispersion whose expected swap count is `normalized` times m(m-1)/4,
/// i.e. `normalized` times the expectation under uniform rankings. Found by
/// bisection on (0, 1) to 1e-12; 1 maps to 1.
double phi_from_normalized(int m, double normalized);

/// The first ceil(x n) voters approve candidates 0 .. floor(m/2)-1; every
/// other voter approves each candidate of the second half with probability q.
Election sample_polarized(const SampleSpec& spec);

/// Dispatches on spec.culture. Throws InvalidParameter on out-of-range
/// parameters and InvalidElection when (n, m, k) is not a valid election.
Election sample(const SampleSpec& spec);

struct QuotaOutcome {
    int deserved = 0;  // floor(x k)
    int received = 0;  // members from the first half
    int deficit() const { return deserved > received ? deserved - received : 0; }
    bool underperforms() const { return received < deserved; }
};

/// Throws InvalidParameter unless spec.culture is polarized.
QuotaOutcome proportional_quota(const SampleSpec& spec, const Committee& w);

}  // namespace fairsec
