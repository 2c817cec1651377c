#include "fairsec/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairsec/rng.hpp"

namespace fairsec {

Election::Election(int num_voters, int num_candidates, int committee_size, std::span<const double> utilities,
                   std::optional<double> score_cap)
    : n_(num_voters), m_(num_candidates), k_(committee_size), cap_(score_cap) {
    if (n_ < 1) throw InvalidElection("election needs at least one voter");
    if (m_ < 1) throw InvalidElection("election needs at least one candidate");
    if (k_ < 2 || k_ >= m_)
        throw InvalidElection("committee size must satisfy 2 <= k < m (k=" + std::to_string(k_) +
                              ", m=" + std::to_string(m_) + ")");
    if (utilities.size() != static_cast<std::size_t>(n_) * m_)
        throw InvalidElection("utility table has " + std::to_string(utilities.size()) + " entries, expected " +
                              std::to_string(static_cast<std::size_t>(n_) * m_));
    if (cap_ && !(std::isfinite(*cap_) && *cap_ > 0)) throw InvalidElection("score cap must be positive and finite");

    data_.resize(utilities.size());
    column_sums_.assign(m_, 0.0);
    for (int i = 0; i < n_; ++i) {
        for (int c = 0; c < m_; ++c) {
            const double u = utilities[static_cast<std::size_t>(i) * m_ + c];
            if (!std::isfinite(u) || u < 0)
                throw InvalidElection("utility of voter " + std::to_string(i + 1) + " for candidate " +
                                      std::to_string(c + 1) + " must be finite and non-negative");
            if (cap_ && u > *cap_)
                throw InvalidElection("utility of voter " + std::to_string(i + 1) + " for candidate " +
                                      std::to_string(c + 1) + " exceeds the score cap");
            data_[static_cast<std::size_t>(c) * n_ + i] = u;
        }
    }
    for (int c = 0; c < m_; ++c) {
        auto col = column(c);
        column_sums_[c] = std::accumulate(col.begin(), col.end(), 0.0);
    }
}

Election Election::from_rows(const std::vector<std::vector<double>>& rows, int committee_size,
                             std::optional<double> score_cap) {
    if (rows.empty()) throw InvalidElection("election needs at least one voter");
    const std::size_t m = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * m);
    for (const auto& r : rows) {
        if (r.size() != m) throw InvalidElection("ragged utility rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return Election(static_cast<int>(rows.size()), static_cast<int>(m), committee_size, flat, score_cap);
}

std::vector<double> Election::voter_row(int voter) const {
    std::vector<double> row(m_);
    for (int c = 0; c < m_; ++c) row[c] = utility(voter, c);
    return row;
}

bool Election::is_approval() const {
    return std::all_of(data_.begin(), data_.end(), [](double u) { return u == 0.0 || u == 1.0; });
}

Election Election::with_committee_size(int k) const {
    Election copy = *this;
    if (k < 2 || k >= m_)
        throw InvalidElection("committee size must satisfy 2 <= k < m (k=" + std::to_string(k) +
                              ", m=" + std::to_string(m_) + ")");
    copy.k_ = k;
    return copy;
}

// ---------------------------------------------------------------------------

ArrivalOrder::ArrivalOrder(std::vector<CandidateId> permutation) : perm_(std::move(permutation)) {
    std::vector<bool> seen(perm_.size(), false);
    for (CandidateId c : perm_) {
        if (c < 0 || static_cast<std::size_t>(c) >= perm_.size() || seen[c])
            throw InvalidParameter("arrival order is not a permutation of the candidates");
        seen[c] = true;
    }
}

ArrivalOrder ArrivalOrder::identity(int m) {
    std::vector<CandidateId> p(m);
    std::iota(p.begin(), p.end(), 0);
    return ArrivalOrder(std::move(p));
}

ArrivalOrder random_order(int m, std::uint64_t seed) {
    if (m < 1) throw InvalidParameter("random order needs m >= 1");
    std::vector<CandidateId> p(m);
    std::iota(p.begin(), p.end(), 0);
    Rng rng(seed);
    for (int i = m - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(p[i], p[j]);
    }
    return ArrivalOrder(std::move(p));
}

// ---------------------------------------------------------------------------

std::string_view to_string(Reason r) {
    switch (r) {
        case Reason::Observed: return "observed";
        case Reason::Affordable: return "affordable";
        case Reason::Unaffordable: return "unaffordable";
        case Reason::DisplacedReference: return "displaced-reference";
        case Reason::DisplacedNonReference: return "displaced-non-reference";
        case Reason::ExcludedBySubroutine: return "excluded";
        case Reason::AboveThreshold: return "above-threshold";
        case Reason::BelowThreshold: return "below-threshold";
        case Reason::SegmentFallback: return "segment-fallback";
        case Reason::SegmentClosed: return "segment-closed";
        case Reason::Safeguard: return "safeguard";
        case Reason::CommitteeFull: return "committee-full";
    }
    return "unknown";
}

bool Committee::contains(CandidateId c) const { return std::binary_search(members.begin(), members.end(), c); }

Committee make_committee(const Election& e, std::vector<CandidateId> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    Committee w{std::move(members), {}};
    validate_committee(e, w);
    return w;
}

void validate_committee(const Election& e, const Committee& w) {
    if (w.size() > e.committee_size())
        throw InvalidCommittee("committee has " + std::to_string(w.size()) + " members, bound is " +
                               std::to_string(e.committee_size()));
    std::vector<bool> seen(e.num_candidates(), false);
    for (CandidateId c : w.members) {
        if (c < 0 || c >= e.num_candidates())
            throw InvalidCommittee("committee member " + std::to_string(c + 1) + " is not a candidate");
        if (seen[c]) throw InvalidCommittee("committee member " + std::to_string(c + 1) + " listed twice");
        seen[c] = true;
    }
    if (!std::is_sorted(w.members.begin(), w.members.end()))
        throw InvalidCommittee("committee members must be listed in ascending order");
}

SatisfactionVector satisfaction(const Election& e, std::span<const CandidateId> members) {
    SatisfactionVector s{std::vector<double>(e.num_voters(), 0.0)};
    for (CandidateId c : members) {
        if (c < 0 || c >= e.num_candidates())
            throw InvalidCommittee("committee member " + std::to_string(c + 1) + " is not a candidate");
        auto col = e.column(c);
        for (int i = 0; i < e.num_voters(); ++i) s.values[i] += col[i];
    }
    return s;
}

SatisfactionVector satisfaction(const Election& e, const Committee& w) {
    validate_committee(e, w);
    return satisfaction(e, std::span<const CandidateId>(w.members));
}

// ---------------------------------------------------------------------------

ArrivalStream::ArrivalStream(const Election& e, const ArrivalOrder& o)
    : e_(&e), o_(&o), revealed_(e.num_candidates(), false) {
    if (o.size() != e.num_candidates()) throw InvalidParameter("arrival order length does not match the election");
}

std::optional<Arrival> ArrivalStream::next() {
    if (pos_ >= e_->num_candidates()) return std::nullopt;
    const CandidateId c = o_->at(pos_);
    ++pos_;
    revealed_[c] = true;
    return Arrival{pos_, c, e_->column(c)};
}

std::span<const double> ArrivalStream::column(CandidateId c) const {
    if (c < 0 || c >= e_->num_candidates() || !revealed_[c])
        throw std::logic_error("candidate " + std::to_string(c + 1) + " has not arrived yet");
    return e_->column(c);
}

std::vector<Arrival> stream(const Election& e, const ArrivalOrder& o) {
    ArrivalStream s(e, o);
    std::vector<Arrival> out;
    out.reserve(e.num_candidates());
    while (auto a = s.next()) out.push_back(*a);
    return out;
}

}  // namespace fairsec
