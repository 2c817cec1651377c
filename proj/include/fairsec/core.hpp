#pragma once

// Election model shared by every rule: utility table, arrival orders, the
// committee/audit record, and the arrival stream online rules consume.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairsec {

using CandidateId = int;  // 0-based internally; printed 1-based

// ---------------------------------------------------------------------------
// Errors

class InvalidElection : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
class InvalidCommittee : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
class InvalidParameter : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
class WrongBallotType : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
class InstanceTooLarge : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// ---------------------------------------------------------------------------
// Election

/// Voters x candidates table of non-negative utilities with a committee bound.
/// Stored column-major: the column of a candidate is contiguous, which is how
/// every rule reads it.
class Election {
public:
    /// `utilities` is row-major (voter by voter), matching the file formats.
    /// Throws InvalidElection unless n, m >= 1, 2 <= k < m, every utility is
    /// finite and non-negative, and no utility exceeds the cap when one is given.
    Election(int num_voters, int num_candidates, int committee_size, std::span<const double> utilities,
             std::optional<double> score_cap = std::nullopt);

    static Election from_rows(const std::vector<std::vector<double>>& rows, int committee_size,
                              std::optional<double> score_cap = std::nullopt);

    int num_voters() const { return n_; }
    int num_candidates() const { return m_; }
    int committee_size() const { return k_; }
    std::optional<double> score_cap() const { return cap_; }

    double utility(int voter, CandidateId c) const { return data_[static_cast<std::size_t>(c) * n_ + voter]; }
    std::span<const double> column(CandidateId c) const {
        return {data_.data() + static_cast<std::size_t>(c) * n_, static_cast<std::size_t>(n_)};
    }
    std::vector<double> voter_row(int voter) const;
    double column_sum(CandidateId c) const { return column_sums_[c]; }

    /// True when every utility is 0 or 1.
    bool is_approval() const;

    /// Same table under a different committee bound (re-validated).
    Election with_committee_size(int k) const;

    bool operator==(const Election& other) const = default;

private:
    int n_ = 0;
    int m_ = 0;
    int k_ = 0;
    std::optional<double> cap_;
    std::vector<double> data_;
    std::vector<double> column_sums_;
};

// ---------------------------------------------------------------------------
// Arrival orders

class ArrivalOrder {
public:
    /// Throws InvalidParameter unless `permutation` is a permutation of 0..m-1.
    explicit ArrivalOrder(std::vector<CandidateId> permutation);

    static ArrivalOrder identity(int m);

    int size() const { return static_cast<int>(perm_.size()); }
    CandidateId at(int index) const { return perm_[index]; }  // 0-based index
    const std::vector<CandidateId>& permutation() const { return perm_; }

    bool operator==(const ArrivalOrder&) const = default;

private:
    std::vector<CandidateId> perm_;
};

/// Uniform random order by Fisher-Yates over the library Rng.
/// Throws InvalidParameter for m < 1.
ArrivalOrder random_order(int m, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Committees and audits

enum class Reason {
    Observed,          // exploration / observation phase, never hired
    Affordable,        // greedy: supporters could pay the unit price
    Unaffordable,      // greedy: they could not
    DisplacedReference,     // online MES/BOS: replaced a reference-committee member
    DisplacedNonReference,  // online MES/BOS: replaced a member that was not in the reference
    ExcludedBySubroutine,   // online MES/BOS: newcomer lost the subroutine vote
    AboveThreshold,    // online Nash: beat the observation-phase best
    BelowThreshold,    // online Nash: did not
    SegmentFallback,   // online Nash: last candidate of a segment with no pick
    SegmentClosed,     // online Nash: segment already has its pick
    Safeguard,         // hired so the committee reaches exactly k
    CommitteeFull,     // arrived after k hires
};

std::string_view to_string(Reason r);

struct AuditEntry {
    int position = 0;  // 1-based arrival position
    CandidateId candidate = -1;
    bool hired = false;
    Reason reason = Reason::Observed;
    std::vector<double> payments;            // per voter; greedy hires only
    CandidateId excluded = -1;               // online MES/BOS: candidate dropped by the subroutine
    std::vector<CandidateId> running_sample;  // online MES/BOS: sample after this step
};

struct Committee {
    std::vector<CandidateId> members;  // ascending
    std::vector<AuditEntry> audit;     // one entry per arrival position for online rules

    int size() const { return static_cast<int>(members.size()); }
    bool contains(CandidateId c) const;
};

/// Sorts and deduplicates; throws InvalidCommittee for out-of-range ids or
/// more than k members.
Committee make_committee(const Election& e, std::vector<CandidateId> members);

/// Throws InvalidCommittee unless every member is a valid, distinct candidate
/// of `e` and there are at most k of them.
void validate_committee(const Election& e, const Committee& w);

// ---------------------------------------------------------------------------
// Satisfaction

struct SatisfactionVector {
    std::vector<double> values;  // values[i] = u_i(W)
};

SatisfactionVector satisfaction(const Election& e, const Committee& w);
SatisfactionVector satisfaction(const Election& e, std::span<const CandidateId> members);

// ---------------------------------------------------------------------------
// Streaming

struct Arrival {
    int position = 0;  // 1-based
    CandidateId candidate = -1;
    std::span<const double> column;  // utilities of the arriving candidate
};

/// Presents candidates of `e` in the order `o`. Online rules read utilities
/// only through arrivals they have already been handed.
class ArrivalStream {
public:
    /// Throws InvalidParameter when the order does not cover e's candidates.
    ArrivalStream(const Election& e, const ArrivalOrder& o);

    std::optional<Arrival> next();
    int position() const { return pos_; }  // arrivals handed out so far
    int remaining() const { return e_->num_candidates() - pos_; }
    int size() const { return e_->num_candidates(); }
    bool revealed(CandidateId c) const { return revealed_[c]; }

    /// Column of an already revealed candidate; throws std::logic_error otherwise.
    std::span<const double> column(CandidateId c) const;

private:
    const Election* e_;
    const ArrivalOrder* o_;
    int pos_ = 0;
    std::vector<bool> revealed_;
};

/// Eager form of the stream, mainly for inspection and tests.
std::vector<Arrival> stream(const Election& e, const ArrivalOrder& o);

}  // namespace fairsec
