#include "fairsec/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fairsec {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    for (auto& l : lines)
        if (l.ends_with('\r')) l.remove_suffix(1);
    return lines;
}

// Semicolon-separated record; double quotes protect separators, "" is a literal quote.
std::vector<std::string> split_record(std::string_view line, int lineno) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    fields.back() += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ';') {
            fields.emplace_back();
        } else {
            fields.back() += ch;
        }
    }
    if (quoted) throw ParseError(lineno, "unterminated quoted field");
    for (auto& f : fields) f = std::string(trim(f));
    return fields;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (s.starts_with('+')) s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(";\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace

PabulibInstance parse_pabulib(std::string_view text) {
    enum class Section { None, Meta, Projects, Votes };
    PabulibInstance p;
    const auto lines = split_lines(text);
    Section section = Section::None;
    std::vector<std::string> header;
    int header_line = 0;
    bool seen_meta = false, seen_projects = false, seen_votes = false;
    int meta_projects_line = 0, meta_votes_line = 0, vote_type_line = 0;
    std::set<std::string> project_set, voter_set;
    std::size_t vote_column = 0, voter_column = 0;

    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        const int lineno = static_cast<int>(idx) + 1;
        const std::string_view line = trim(lines[idx]);
        if (line.empty()) continue;
        const std::string tag = lower(line);
        if (tag == "meta" || tag == "projects" || tag == "votes") {
            section = tag == "meta" ? Section::Meta : tag == "projects" ? Section::Projects : Section::Votes;
            bool& seen = tag == "meta" ? seen_meta : tag == "projects" ? seen_projects : seen_votes;
            if (seen) throw ParseError(lineno, "section " + std::string(line) + " appears twice");
            seen = true;
            header.clear();
            continue;
        }
        if (section == Section::None) throw ParseError(lineno, "content before the META section");
        auto fields = split_record(line, lineno);
        if (header.empty()) {
            header = fields;
            header_line = lineno;
            for (auto& h : header) h = lower(h);
            if (section == Section::Projects && header.front() != "project_id")
                throw ParseError(lineno, "PROJECTS header must start with project_id");
            if (section == Section::Votes) {
                const auto v = std::find(header.begin(), header.end(), "vote");
                const auto id = std::find(header.begin(), header.end(), "voter_id");
                if (v == header.end()) throw ParseError(lineno, "VOTES header has no vote column");
                vote_column = static_cast<std::size_t>(v - header.begin());
                voter_column = id == header.end() ? header.size() : static_cast<std::size_t>(id - header.begin());
            }
            continue;
        }
        if (fields.size() != header.size())
            throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields (header on line " +
                                         std::to_string(header_line) + "), found " + std::to_string(fields.size()));
        switch (section) {
            case Section::Meta: {
                const std::string key = lower(fields[0]);
                if (key == "num_projects") meta_projects_line = lineno;
                if (key == "num_votes") meta_votes_line = lineno;
                if (key == "vote_type") {
                    vote_type_line = lineno;
                    if (lower(fields[1]) != "approval")
                        throw ParseError(lineno, "vote_type '" + fields[1] + "' is not supported (approval only)");
                }
                p.meta[key] = fields.size() > 1 ? fields[1] : "";
                break;
            }
            case Section::Projects:
                if (!project_set.insert(fields[0]).second)
                    throw ParseError(lineno, "duplicate project id '" + fields[0] + "'");
                p.projects.push_back(fields[0]);
                break;
            case Section::Votes: {
                std::vector<std::string> approved;
                std::set<std::string> mine;
                std::string_view list = fields[vote_column];
                while (!list.empty()) {
                    const auto comma = list.find(',');
                    const std::string id(trim(list.substr(0, comma)));
                    list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
                    if (id.empty()) continue;
                    if (!project_set.contains(id))
                        throw ParseError(lineno, "vote references unknown project '" + id + "'");
                    if (mine.insert(id).second) approved.push_back(id);
                }
                std::string voter = voter_column < fields.size() ? fields[voter_column] : std::to_string(p.votes.size() + 1);
                if (!voter_set.insert(voter).second) throw ParseError(lineno, "duplicate voter id '" + voter + "'");
                p.voter_ids.push_back(std::move(voter));
                p.votes.push_back(std::move(approved));
                break;
            }
            case Section::None: break;
        }
    }
    const int last = static_cast<int>(lines.size());
    if (!seen_meta) throw ParseError(last, "missing META section");
    if (!seen_projects) throw ParseError(last, "missing PROJECTS section");
    if (!seen_votes) throw ParseError(last, "missing VOTES section");
    (void)vote_type_line;

    auto check_count = [&](const char* key, int line, std::size_t actual) {
        const auto it = p.meta.find(key);
        if (it == p.meta.end()) return;
        long long declared = 0;
        if (!parse_number(it->second, declared)) throw ParseError(line, std::string(key) + " is not an integer");
        if (declared != static_cast<long long>(actual))
            throw ParseError(line, std::string(key) + " says " + it->second + " but the file has " +
                                       std::to_string(actual));
    };
    check_count("num_projects", meta_projects_line, p.projects.size());
    check_count("num_votes", meta_votes_line, p.votes.size());
    return p;
}

std::string write_pabulib(const PabulibInstance& p) {
    std::ostringstream out;
    auto meta = p.meta;
    meta["num_projects"] = std::to_string(p.projects.size());
    meta["num_votes"] = std::to_string(p.votes.size());
    if (!meta.contains("vote_type")) meta["vote_type"] = "approval";
    out << "META\nkey;value\n";
    for (const auto& [key, value] : meta) out << quote_if_needed(key) << ';' << quote_if_needed(value) << '\n';
    out << "PROJECTS\nproject_id\n";
    for (const auto& id : p.projects) out << quote_if_needed(id) << '\n';
    out << "VOTES\nvoter_id;vote\n";
    for (std::size_t i = 0; i < p.votes.size(); ++i) {
        const std::string voter = i < p.voter_ids.size() ? p.voter_ids[i] : std::to_string(i + 1);
        std::string list;
        for (const auto& id : p.votes[i]) list += (list.empty() ? "" : ",") + id;
        out << quote_if_needed(voter) << ';' << quote_if_needed(list) << '\n';
    }
    return out.str();
}

int k_from_divisor(int m, double divisor) {
    if (!(divisor >= 1) || !std::isfinite(divisor)) throw InvalidParameter("committee-size divisor must be >= 1");
    if (m < 3) throw InvalidParameter("need at least 3 candidates to pick 2 <= k < m");
    int k = std::max(2, static_cast<int>(std::floor(m / divisor)));
    return std::min(k, m - 1);
}

Election to_election(const PabulibInstance& p, int k) {
    const int m = static_cast<int>(p.projects.size());
    const int n = static_cast<int>(p.votes.size());
    std::map<std::string, int> index;
    for (int c = 0; c < m; ++c) index[p.projects[c]] = c;
    std::vector<double> table(static_cast<std::size_t>(n) * m, 0.0);
    for (int i = 0; i < n; ++i)
        for (const auto& id : p.votes[i]) table[static_cast<std::size_t>(i) * m + index.at(id)] = 1.0;
    return Election(n, m, k, table);
}

NativeInstance read_native(std::string_view text) {
    const auto lines = split_lines(text);
    std::size_t idx = 0;
    auto next_line = [&](std::string_view& out) {
        while (idx < lines.size()) {
            const auto l = trim(lines[idx++]);
            if (l.empty() || l.starts_with('#')) continue;
            out = l;
            return true;
        }
        return false;
    };

    std::string_view line;
    if (!next_line(line)) throw ParseError(static_cast<int>(lines.size()), "empty instance: missing header 'n m k [B]'");
    int header_line = static_cast<int>(idx);
    std::istringstream hs{std::string(line)};
    std::vector<std::string> parts;
    for (std::string tok; hs >> tok;) parts.push_back(tok);
    int n = 0, m = 0, k = 0;
    if (parts.size() < 3 || parts.size() > 4 || !parse_number(parts[0], n) || !parse_number(parts[1], m) ||
        !parse_number(parts[2], k))
        throw ParseError(header_line, "header must be 'n m k [B]'");
    std::optional<double> cap;
    if (parts.size() == 4) {
        double b = 0;
        if (!parse_number(parts[3], b)) throw ParseError(header_line, "malformed score cap '" + parts[3] + "'");
        cap = b;
    }
    if (n < 1 || m < 1) throw ParseError(header_line, "n and m must be positive");
    if (static_cast<std::int64_t>(n) * m > 100'000'000) throw ParseError(header_line, "instance too large");

    std::optional<ArrivalOrder> order;
    std::vector<double> table;
    table.reserve(static_cast<std::size_t>(n) * m);
    int rows = 0;
    while (next_line(line)) {
        const int lineno = static_cast<int>(idx);
        if (line.starts_with("order:")) {
            if (order || rows > 0) throw ParseError(lineno, "order line must come right after the header");
            std::istringstream os{std::string(line.substr(6))};
            std::vector<CandidateId> perm;
            for (std::string tok; os >> tok;) {
                int id = 0;
                if (!parse_number(tok, id)) throw ParseError(lineno, "malformed candidate id '" + tok + "'");
                perm.push_back(id - 1);
            }
            if (static_cast<int>(perm.size()) != m)
                throw ParseError(lineno, "order lists " + std::to_string(perm.size()) + " candidates, expected " +
                                             std::to_string(m));
            try {
                order = ArrivalOrder(std::move(perm));
            } catch (const InvalidParameter& ex) {
                throw ParseError(lineno, ex.what());
            }
            continue;
        }
        if (rows == n) throw ParseError(lineno, "more than " + std::to_string(n) + " utility rows");
        std::size_t count = 0;
        std::string_view rest = line;
        while (true) {
            const auto semi = rest.find(';');
            const auto field = rest.substr(0, semi);
            double v = 0;
            if (!parse_number(field, v))
                throw ParseError(lineno, "malformed number '" + std::string(trim(field)) + "'");
            if (!std::isfinite(v) || v < 0) throw ParseError(lineno, "utilities must be finite and non-negative");
            if (cap && v > *cap) throw ParseError(lineno, "utility exceeds the score cap");
            if (++count > static_cast<std::size_t>(m)) break;
            table.push_back(v);
            if (semi == std::string_view::npos) break;
            rest = rest.substr(semi + 1);
        }
        if (count != static_cast<std::size_t>(m))
            throw ParseError(lineno, "row has " + std::string(count > static_cast<std::size_t>(m) ? "more than " : "") +
                                         std::to_string(count > static_cast<std::size_t>(m) ? m : count) +
                                         " values, expected " + std::to_string(m));
        ++rows;
    }
    if (rows < n)
        throw ParseError(static_cast<int>(lines.size()), "expected " + std::to_string(n) + " utility rows, found " +
                                                             std::to_string(rows));
    try {
        return NativeInstance{Election(n, m, k, table, cap), std::move(order)};
    } catch (const InvalidElection& ex) {
        throw ParseError(header_line, ex.what());
    }
}

std::string write_native(const Election& e, const std::optional<ArrivalOrder>& order) {
    std::string out = std::to_string(e.num_voters()) + ' ' + std::to_string(e.num_candidates()) + ' ' +
                      std::to_string(e.committee_size());
    if (e.score_cap()) out += ' ' + format_double(*e.score_cap());
    out += '\n';
    if (order) {
        out += "order:";
        for (CandidateId c : order->permutation()) out += ' ' + std::to_string(c + 1);
        out += '\n';
    }
    for (int i = 0; i < e.num_voters(); ++i) {
        for (CandidateId c = 0; c < e.num_candidates(); ++c) {
            if (c) out += ';';
            out += format_double(e.utility(i, c));
        }
        out += '\n';
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace fairsec
