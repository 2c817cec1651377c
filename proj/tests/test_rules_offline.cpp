#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "fairsec/axioms.hpp"
#include "fairsec/rules_offline.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fairsec;

namespace {

std::vector<int> ids(const Committee& w) { return w.members; }

}  // namespace

TEST_CASE("rho in closed form agrees with bisection") {
    CHECK(*equal_shares_rho(std::vector<double>{0.5, 0.5}, std::vector<double>{1, 1}) == doctest::Approx(0.5));
    CHECK_FALSE(equal_shares_rho(std::vector<double>{0.3, 0.3}, std::vector<double>{1, 1}).has_value());
    CHECK_FALSE(equal_shares_rho(std::vector<double>{1, 1}, std::vector<double>{0, 0}).has_value());
    // One capped supporter: 0.1 paid in full, the other covers 0.9 at rho = 0.9 / 1.
    CHECK(*equal_shares_rho(std::vector<double>{0.1, 2}, std::vector<double>{1, 1}) == doctest::Approx(0.9));

    Rng rng(1);
    for (int trial = 0; trial < 3000; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(8));
        std::vector<double> b(n), u(n);
        for (int i = 0; i < n; ++i) {
            b[i] = rng.bernoulli(0.15) ? 0.0 : rng.uniform(0, 0.6);
            u[i] = rng.bernoulli(0.3) ? 0.0 : (rng.bernoulli(0.5) ? 1.0 : rng.uniform(0.01, 5));
        }
        const auto fast = equal_shares_rho(b, u);
        const auto slow = oracle::rho_bisection(b, u);
        REQUIRE(fast.has_value() == slow.has_value());
        if (fast) {
            CHECK(*fast == doctest::Approx(*slow).epsilon(1e-9));
            CHECK(oracle::paid(b, u, *fast) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("mes on the two affordable candidates of the running example") {
    const Election e = gen::example_one();
    const std::vector<CandidateId> pool{0, 1};
    const auto out = mes_on_pool(e, pool, 2);
    CHECK(ids(out.committee) == std::vector<int>{0, 1});
    REQUIRE(out.trace.rounds.size() == 2);
    CHECK(out.trace.rounds[0].candidate == 0);
    CHECK(out.trace.rounds[0].rho == doctest::Approx(0.5));
    CHECK(out.trace.rounds[0].payments == std::vector<double>{0, 1});
    CHECK(out.trace.rounds[1].candidate == 1);
    CHECK(out.trace.rounds[1].rho == doctest::Approx(1.0));
    CHECK(out.trace.rounds[1].payments == std::vector<double>{1, 0});
    CHECK(out.trace.completion_added.empty());

    const auto b = bos_on_pool(e, pool, 2);
    CHECK(ids(b.committee) == ids(out.committee));
    CHECK(b.trace.rounds.size() == 2);
}

TEST_CASE("mes breaks symmetric ties by index") {
    const Election e = Election::from_rows({{1, 1, 1, 1}}, 2);
    const auto out = mes(e);
    CHECK(ids(out.committee) == std::vector<int>{0, 1});
    CHECK(out.trace.core() == std::vector<int>{0, 1});
}

TEST_CASE("mes on the running example") {
    const Election e = gen::example_one();
    // Theory funds c3 at rho 1/2, Applied funds c4 or c6 at 1/3; c4 wins the tie.
    const auto out = mes(e);
    CHECK(ids(out.committee) == std::vector<int>{2, 3});
    CHECK(ids(bos(e).committee) == std::vector<int>{2, 3});
}

TEST_CASE("mes with completion fills the committee") {
    // Nobody can afford anything: budgets 2/3 each, every candidate has one supporter.
    const Election e = Election::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 3, 0}}, 2);
    const auto out = mes(e);
    CHECK(out.trace.rounds.empty());
    CHECK(out.trace.completion_added == std::vector<int>{2, 0});
    CHECK(ids(out.committee) == std::vector<int>{0, 2});
}

TEST_CASE("bos overspends when mes runs dry") {
    const Election e = Election::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 3, 0}}, 2);
    const auto out = bos(e);
    CHECK(out.committee.size() == 2);
    for (const auto& r : out.trace.rounds) CHECK(r.funded < 1.0);
    CHECK(out.trace.core().empty());
}

TEST_CASE("mes trace invariants") {
    Rng rng(2);
    for (int trial = 0; trial < 400; ++trial) {
        const Election e = gen::small_election(rng, 10, 10, 5, gen::any_ballots(rng));
        const auto out = mes(e);
        REQUIRE(out.committee.size() == e.committee_size());
        double spent = 0, last_rho = 0;
        std::vector<double> budget(e.num_voters(), static_cast<double>(e.committee_size()) / e.num_voters());
        for (const auto& r : out.trace.rounds) {
            double round_total = 0;
            for (int i = 0; i < e.num_voters(); ++i) {
                CHECK(r.payments[i] >= 0);
                CHECK(r.payments[i] <= budget[i] + 1e-12);
                budget[i] -= r.payments[i];
                round_total += r.payments[i];
            }
            CHECK(round_total == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(r.rho >= last_rho * (1 - 1e-12));
            last_rho = r.rho;
            spent += round_total;
        }
        CHECK(spent <= e.committee_size() + 1e-9);
    }
}

TEST_CASE("mes rounds agree with a bisection reference") {
    Rng rng(3);
    int compared = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto kind = rng.bernoulli(0.5) ? gen::Ballots::Reals : gen::Ballots::SmallIntegers;
        const Election e = gen::small_election(rng, 8, 9, 4, kind);
        const auto reference = oracle::mes_rounds(oracle::table_of(e), e.committee_size());
        CHECK(mes(e).trace.core() == reference);
        ++compared;
    }
    CHECK(compared == 400);
}

TEST_CASE("mes core satisfies EJR and EJR+ on approval ballots") {
    Rng rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        const Election e = gen::small_election(rng, 8, 8, 4, gen::Ballots::Approval);
        const auto core = mes(e).trace.core();
        const Committee w = make_committee(e, core);
        CHECK_FALSE(oracle::ejr_violated(oracle::table_of(e), e.committee_size(), core));
        CHECK(check_ejr_bruteforce(e, w).satisfied);
        CHECK(check_ejr_plus_approval(e, w).satisfied);
    }
}

TEST_CASE("mes core satisfies EJR up to one candidate on cardinal ballots") {
    Rng rng(40);
    for (int trial = 0; trial < 300; ++trial) {
        const auto kind = rng.bernoulli(0.5) ? gen::Ballots::Reals : gen::Ballots::SmallIntegers;
        const Election e = gen::small_election(rng, 8, 8, 4, kind);
        const auto core = mes(e).trace.core();
        CHECK_FALSE(oracle::ejr_violated(oracle::table_of(e), e.committee_size(), core, oracle::Relax::Gamma, 1));
        CHECK(check_ejr_bruteforce(e, make_committee(e, core), EjrVariant::gamma(1)).satisfied);
    }
}

TEST_CASE("mes core can miss exact EJR on cardinal ballots") {
    // Voters 2 and 3 form a cohesive pair for candidate 0 (alpha = 5.13109), but
    // candidate 2 is cheaper per unit of utility, and after paying for it the pair
    // holds 0.748 < 1.
    const Election e = Election::from_rows({{0, 9.93414, 4.58583, 0, 0, 0},
                                            {0, 0, 0, 3.85251, 0, 0},
                                            {5.13109, 0, 3.42307, 0, 0, 0},
                                            {7.6738, 3.21107, 3.24838, 0, 5.13485, 0},
                                            {0, 0, 3.47324, 3.44648, 0, 0}},
                                           3);
    const auto core = mes(e).trace.core();
    CHECK(core == std::vector<int>{2});
    CHECK(oracle::ejr_violated(oracle::table_of(e), 3, core));
    const auto report = check_ejr_bruteforce(e, make_committee(e, core));
    CHECK_FALSE(report.satisfied);
    bool pair_found = false;
    for (const auto& wi : report.witnesses)
        pair_found = pair_found || (wi.group == std::vector<int>{2, 3} && wi.candidates == std::vector<int>{0});
    CHECK(pair_found);
    CHECK(check_ejr_bruteforce(e, make_committee(e, core), EjrVariant::gamma(1)).satisfied);
}

TEST_CASE("bos equals mes whenever mes never runs dry") {
    Rng rng(5);
    int exact = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        const Election e = gen::small_election(rng, 8, 8, 4, gen::any_ballots(rng));
        const auto m = mes(e);
        if (static_cast<int>(m.trace.rounds.size()) != e.committee_size()) continue;
        ++exact;
        const auto b = bos(e);
        CHECK(ids(b.committee) == ids(m.committee));
        CHECK(b.trace.core() == m.trace.core());
    }
    CHECK(exact > 100);
}

TEST_CASE("placeholders in a pool rank last") {
    const Election e = Election::from_rows({{1, 0, 0}, {0, 1, 0}}, 2);
    const std::vector<CandidateId> pool{2, 3, 4};  // one real candidate with no support, two placeholders
    const auto out = mes_on_pool(e, pool, 2);
    CHECK(ids(out.committee) == std::vector<int>{2, 3});
}

TEST_CASE("utilitarian top-k") {
    CHECK(ids(utilitarian_topk(gen::example_one())) == std::vector<int>{3, 5});
    CHECK(ids(utilitarian_topk(Election::from_rows({{0, 0, 0, 0}, {0, 0, 0, 0}}, 3))) == std::vector<int>{0, 1, 2});
    CHECK(ids(utilitarian_topk(Election::from_rows({{5, 1, 9}}, 2))) == std::vector<int>{0, 2});
}

TEST_CASE("nash welfare values") {
    const Election e = gen::example_one();
    CHECK(nash_welfare(e, Committee{}) == 0);
    CHECK(nash_welfare(e, make_committee(e, {2, 5})) == doctest::Approx(std::log(3) + std::log(4)));
    CHECK(nash_welfare(e, make_committee(e, {3, 5})) == doctest::Approx(std::log(7)));
}

TEST_CASE("nash optimum on fixed instances") {
    const Election e = gen::example_one();
    // Enumerated: {c3,c4} and {c3,c6} both give satisfactions (2, 3); the smaller set comes first.
    const auto [w, value] = nash_optimum_bruteforce(e);
    CHECK(value == doctest::Approx(std::log(3) + std::log(4)));
    CHECK(value == doctest::Approx(oracle::nash_optimum(oracle::table_of(e), 2)));
    CHECK(ids(w) == std::vector<int>{2, 3});

    CHECK(ids(nash_optimum_bruteforce(Election::from_rows({{3, 2, 1}}, 2)).first) == std::vector<int>{0, 1});
    CHECK(nash_optimum_bruteforce(Election::from_rows({{0, 0, 0}, {0, 0, 0}}, 2)).second == 0);
    CHECK_THROWS_AS(nash_optimum_bruteforce(e, 10), InstanceTooLarge);
}

TEST_CASE("nash optimum agrees with bitmask enumeration") {
    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        const Election e = gen::small_election(rng, 6, 10, 4, gen::any_ballots(rng));
        const auto [w, value] = nash_optimum_bruteforce(e);
        CHECK(value == doctest::Approx(oracle::nash_optimum(oracle::table_of(e), e.committee_size())));
        CHECK(nash_welfare(e, w) == doctest::Approx(value));
        CHECK(w.size() == e.committee_size());
    }
}

TEST_CASE("nash welfare is monotone and submodular") {
    Rng rng(7);
    for (int trial = 0; trial < 10000; ++trial) {
        const Election e = gen::small_election(rng, 6, 10, 4, gen::any_ballots(rng));
        std::vector<CandidateId> larger, smaller, outside;
        for (CandidateId c = 0; c < e.num_candidates(); ++c) {
            if (rng.bernoulli(0.5)) {
                larger.push_back(c);
                if (rng.bernoulli(0.5)) smaller.push_back(c);
            } else {
                outside.push_back(c);
            }
        }
        if (outside.empty()) continue;
        const CandidateId c = outside[rng.below(outside.size())];
        auto value = [&](std::vector<CandidateId> set, bool add) {
            if (add) set.push_back(c);
            return nash_welfare(e, std::span<const CandidateId>(set));
        };
        const double gain_small = value(smaller, true) - value(smaller, false);
        const double gain_large = value(larger, true) - value(larger, false);
        CHECK(gain_small >= gain_large - 1e-9);
        CHECK(gain_large >= -1e-12);
        CHECK(value(larger, false) >= value(smaller, false) - 1e-12);
    }
}

TEST_CASE("binomial coefficients") {
    CHECK(binomial_saturating(6, 2) == 15);
    CHECK(binomial_saturating(40, 3) == 9880);
    CHECK(binomial_saturating(5, 6) == 0);
    CHECK(binomial_saturating(100, 50) == std::numeric_limits<std::uint64_t>::max());
    CHECK(binomial_saturating(60, 30) == 118264581564861424ULL);
}
