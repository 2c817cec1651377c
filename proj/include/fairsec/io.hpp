#pragma once

// Pabulib .pb files (approval ballots only) and the native text format for
// cardinal elections.
//
// Native format:
//   n m k [B]
//   order: i1 i2 ... im        (optional, 1-based candidate ids)
//   u_11;u_12;...;u_1m         (n rows)
// Values are written in shortest round-trip form, so reading back is exact.
// Blank lines and lines starting with '#' are ignored.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairsec/core.hpp"

namespace fairsec {

struct PabulibInstance {
    std::map<std::string, std::string> meta;
    std::vector<std::string> projects;                     // file order
    std::vector<std::string> voter_ids;                    // file order
    std::vector<std::vector<std::string>> votes;           // approved project ids per voter
};

/// Throws ParseError (with the 1-based line) on a missing section, a record
/// with the wrong field count, a duplicate project, a vote naming an unknown
/// project, a non-approval vote_type, or counts contradicting
/// num_projects / num_votes.
PabulibInstance parse_pabulib(std::string_view text);

/// Writes META, PROJECTS (id only) and VOTES (voter_id;vote) sections.
std::string write_pabulib(const PabulibInstance& p);

/// max(2, floor(m / divisor)), lowered to m - 1 when that is not below m.
/// Throws InvalidParameter for divisor < 1 or m < 3.
int k_from_divisor(int m, double divisor);

/// 0/1 utilities: voters in file order, candidates in PROJECTS order.
/// Throws InvalidElection unless 2 <= k < m.
Election to_election(const PabulibInstance& p, int k);

struct NativeInstance {
    Election election;
    std::optional<ArrivalOrder> order;
};

/// Throws ParseError with the offending line.
NativeInstance read_native(std::string_view text);
std::string write_native(const Election& e, const std::optional<ArrivalOrder>& order = std::nullopt);

/// Whole-file helpers; throw std::runtime_error when the file cannot be read or written.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace fairsec
