#include "fairsec/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "fairsec/axioms.hpp"
#include "fairsec/io.hpp"
#include "fairsec/rng.hpp"
#include "fairsec/rules_offline.hpp"
#include "fairsec/rules_online.hpp"

namespace fairsec {

std::string_view to_string(Experiment x) {
    switch (x) {
        case Experiment::Exp1: return "exp1";
        case Experiment::Exp2: return "exp2";
        case Experiment::Exp3: return "exp3";
        case Experiment::Exp4: return "exp4";
        case Experiment::ThmMes: return "thm-mes";
        case Experiment::ThmNash: return "thm-nash";
    }
    return "unknown";
}

Experiment parse_experiment(std::string_view name) {
    for (Experiment x : {Experiment::Exp1, Experiment::Exp2, Experiment::Exp3, Experiment::Exp4, Experiment::ThmMes,
                         Experiment::ThmNash})
        if (to_string(x) == name) return x;
    throw InvalidParameter("unknown experiment '" + std::string(name) +
                           "' (expected exp1, exp2, exp3, exp4, thm-mes or thm-nash)");
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view instance_id, int k, int iteration) {
    std::uint64_t h = mix64(base);
    h = mix64(h ^ fnv1a64(instance_id));
    h = mix64(h ^ static_cast<std::uint64_t>(k));
    h = mix64(h ^ static_cast<std::uint64_t>(iteration));
    return h;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Config

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

template <class T>
T number(std::string_view s, int line, std::string_view key) {
    s = trim(s);
    T out{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ParseError(line, "malformed value '" + std::string(s) + "' for " + std::string(key));
    return out;
}

template <class T>
std::vector<T> number_list(std::string_view s, int line, std::string_view key) {
    std::vector<T> out;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const auto item = trim(s.substr(0, comma));
        if (!item.empty()) out.push_back(number<T>(item, line, key));
        s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
    }
    return out;
}

std::string sample_id(const SampleSpec& s) {
    std::string id = std::string(to_string(s.culture)) + "-n" + std::to_string(s.n) + "-m" + std::to_string(s.m) +
                     "-k" + std::to_string(s.k);
    switch (s.culture) {
        case Culture::Ic: id += "-p" + format_number(s.p); break;
        case Culture::Mallows:
        case Culture::NormalizedMallows: id += "-phi" + format_number(s.phi); break;
        case Culture::Polarized: id += "-x" + format_number(s.x) + "-q" + format_number(s.q); break;
    }
    return id + "-s" + std::to_string(s.seed);
}

SourceSpec parse_sample_source(std::string_view text, int line) {
    std::istringstream in{std::string(text)};
    std::string word, culture;
    in >> word >> culture;
    SampleSpec s;
    try {
        s.culture = parse_culture(culture);
    } catch (const InvalidParameter& ex) {
        throw ParseError(line, ex.what());
    }
    std::string id;
    for (std::string tok; in >> tok;) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ParseError(line, "sample option '" + tok + "' is not key=value");
        const std::string key = tok.substr(0, eq);
        const std::string_view val = std::string_view(tok).substr(eq + 1);
        if (key == "n") s.n = number<int>(val, line, key);
        else if (key == "m") s.m = number<int>(val, line, key);
        else if (key == "k") s.k = number<int>(val, line, key);
        else if (key == "p") s.p = number<double>(val, line, key);
        else if (key == "phi") s.phi = number<double>(val, line, key);
        else if (key == "x") s.x = number<double>(val, line, key);
        else if (key == "q") s.q = number<double>(val, line, key);
        else if (key == "seed") s.seed = number<std::uint64_t>(val, line, key);
        else if (key == "noise") s.noise = number<int>(val, line, key) != 0;
        else if (key == "id") id = std::string(val);
        else throw ParseError(line, "unknown sample option '" + key + "'");
    }
    return SourceSpec{id.empty() ? sample_id(s) : id, "", s};
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& base_dir) {
    namespace fs = std::filesystem;
    ExperimentConfig cfg;
    bool have_experiment = false;
    std::istringstream in{std::string(text)};
    int lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(lineno, "expected key=value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view val = trim(line.substr(eq + 1));
        if (key == "experiment") {
            try {
                cfg.experiment = parse_experiment(val);
            } catch (const InvalidParameter& ex) {
                throw ParseError(lineno, ex.what());
            }
            have_experiment = true;
        } else if (key == "source") {
            if (val.starts_with("sample ")) {
                cfg.sources.push_back(parse_sample_source(val, lineno));
                continue;
            }
            fs::path p{std::string(val)};
            if (p.is_relative()) p = fs::path(base_dir) / p;
            if (fs::is_directory(p)) {
                std::vector<fs::path> files;
                for (const auto& entry : fs::directory_iterator(p))
                    if (entry.is_regular_file() && entry.path().extension() == ".pb") files.push_back(entry.path());
                std::sort(files.begin(), files.end());
                for (const auto& f : files) cfg.sources.push_back({f.stem().string(), f.string(), std::nullopt});
            } else {
                cfg.sources.push_back({p.stem().string(), p.string(), std::nullopt});
            }
        } else if (key == "divisors") {
            cfg.divisors = number_list<double>(val, lineno, key);
        } else if (key == "committee_sizes") {
            cfg.committee_sizes = number_list<int>(val, lineno, key);
        } else if (key == "iterations") {
            cfg.iterations = number<int>(val, lineno, key);
            if (cfg.iterations < 1) throw ParseError(lineno, "iterations must be >= 1");
        } else if (key == "base_seed") {
            cfg.base_seed = number<std::uint64_t>(val, lineno, key);
        } else if (key == "output") {
            fs::path p{std::string(val)};
            if (p.is_relative()) p = fs::path(base_dir) / p;
            cfg.output = p.string();
        } else if (key == "workers") {
            cfg.workers = std::max(1, number<int>(val, lineno, key));
        } else if (key == "polarized_instances") {
            cfg.polarized_instances = number<int>(val, lineno, key);
        } else if (key == "orders") {
            cfg.orders = number<int>(val, lineno, key);
        } else if (key == "instances") {
            cfg.instances = number<int>(val, lineno, key);
        } else if (key == "n") {
            cfg.n = number<int>(val, lineno, key);
        } else if (key == "m") {
            cfg.m = number<int>(val, lineno, key);
        } else if (key == "k") {
            cfg.k = number<int>(val, lineno, key);
        } else if (key == "p") {
            cfg.p = number<double>(val, lineno, key);
        } else if (key == "ejr_orders") {
            cfg.ejr_orders = number<int>(val, lineno, key);
        } else {
            throw ParseError(lineno, "unknown key '" + key + "'");
        }
    }
    if (!have_experiment) throw ParseError(lineno, "missing experiment=");
    for (double f : cfg.divisors)
        if (!(f >= 1)) throw ParseError(lineno, "divisors must be >= 1");
    return cfg;
}

// ---------------------------------------------------------------------------
// Runner

namespace {

struct Instance {
    std::string id;
    std::string source;
    std::optional<PabulibInstance> pabulib;
    std::optional<Election> election;   // native files and samples
    std::optional<SampleSpec> sample;
    int num_candidates = 0;
};

struct Task {
    std::size_t instance;
    int k;
};

RunRecord evaluate(const Election& e, const Committee& w, const std::optional<SampleSpec>& spec) {
    RunRecord r;
    r.k = e.committee_size();
    r.committee = w.members;
    r.metrics = compute_metrics(satisfaction(e, w));
    r.jr_satisfied = check_jr(e, w).satisfied;
    r.approval = e.is_approval();
    if (r.approval) {
        const auto rep = check_ejr_plus_approval(e, w);
        r.ejr_plus_share = rep.violating_voter_share;
        r.ejr_plus_shortfall = rep.shortfall;
        r.ejr_plus_witness_candidates = rep.witness_candidates;
    }
    if (spec && spec->culture == Culture::Polarized) {
        SampleSpec s = *spec;
        s.k = e.committee_size();
        const auto q = proportional_quota(s, w);
        r.quota_deserved = q.deserved;
        r.quota_received = q.received;
    }
    return r;
}

std::vector<RunRecord> run_task(const Instance& inst, int k, const ExperimentConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const Election e = inst.pabulib ? to_election(*inst.pabulib, k) : inst.election->with_committee_size(k);
    std::vector<RunRecord> out;

    auto t0 = clock::now();
    auto base = mes(e).committee;
    RunRecord rec = evaluate(e, base, inst.sample);
    rec.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    rec.instance_id = inst.id;
    rec.rule = "mes";
    out.push_back(std::move(rec));

    for (int it = 1; it <= cfg.iterations; ++it) {
        const std::uint64_t seed = derive_seed(cfg.base_seed, inst.id, k, it);
        const ArrivalOrder order = random_order(e.num_candidates(), seed);
        for (OnlineRule rule : kAllOnlineRules) {
            t0 = clock::now();
            const Committee w = run_online(rule, e, order);
            RunRecord r = evaluate(e, w, inst.sample);
            r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
            r.instance_id = inst.id;
            r.rule = std::string(to_string(rule));
            r.iteration = it;
            r.seed = seed;
            out.push_back(std::move(r));
        }
    }
    return out;
}

template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
    };
    const int threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (threads == 1) {
        body();
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
}

}  // namespace

std::vector<SampleSpec> polarized_corpus(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<SampleSpec> specs;
    for (int i = 0; i < count; ++i) {
        SampleSpec s;
        s.culture = Culture::Polarized;
        s.n = 10 + static_cast<int>(rng.below(91));
        s.m = 10 + static_cast<int>(rng.below(41));
        s.k = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(s.m / 2 - 1)));
        s.x = rng.uniform(0.1, 0.9);
        s.q = rng.uniform(0.1, 1.0);
        s.seed = rng.next_u64();
        specs.push_back(s);
    }
    return specs;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == Experiment::ThmMes || cfg.experiment == Experiment::ThmNash)
        throw InvalidParameter("use verify_thm_mes / verify_thm_nash for statistical checks");
    if (cfg.iterations < 1) throw InvalidParameter("iterations must be >= 1");

    ExperimentResult result;
    std::vector<Instance> instances;
    auto skip = [&](const std::string& what, const std::string& why) {
        result.skipped.push_back(what + ": " + why);
        std::cerr << "skipped " << what << ": " << why << '\n';
    };

    if (cfg.experiment == Experiment::Exp4) {
        const auto specs = polarized_corpus(cfg.polarized_instances, cfg.base_seed);
        for (std::size_t i = 0; i < specs.size(); ++i) {
            char id[32];
            std::snprintf(id, sizeof id, "polarized-%04zu", i + 1);
            instances.push_back({id, "generated", std::nullopt, sample(specs[i]), specs[i], specs[i].m});
        }
    }
    for (const auto& src : cfg.sources) {
        const std::string what = src.path.empty() ? src.id : src.path;
        try {
            Instance inst{src.id, what, std::nullopt, std::nullopt, src.sample, 0};
            if (src.sample) {
                inst.election = sample(*src.sample);
            } else if (src.path.ends_with(".pb")) {
                inst.pabulib = parse_pabulib(read_file(src.path));
            } else {
                inst.election = read_native(read_file(src.path)).election;
            }
            inst.num_candidates =
                inst.pabulib ? static_cast<int>(inst.pabulib->projects.size()) : inst.election->num_candidates();
            instances.push_back(std::move(inst));
        } catch (const std::exception& ex) {
            skip(what, ex.what());
        }
    }

    std::vector<Task> tasks;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        const int m = inst.num_candidates;
        std::vector<int> sizes;
        if (!cfg.divisors.empty()) {
            for (double f : cfg.divisors) {
                if (m < 3) {
                    skip(inst.source, "m = " + std::to_string(m) + " leaves no valid committee size");
                    break;
                }
                sizes.push_back(k_from_divisor(m, f));
            }
        } else if (!cfg.committee_sizes.empty()) {
            sizes = cfg.committee_sizes;
        } else if (inst.election) {
            sizes.push_back(inst.election->committee_size());
        } else {
            skip(inst.source, "no committee size (set divisors or committee_sizes)");
        }
        std::sort(sizes.begin(), sizes.end());
        sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
        for (int k : sizes) {
            if (k < 2 || k >= m) {
                skip(inst.source, "k = " + std::to_string(k) + " infeasible for m = " + std::to_string(m));
                continue;
            }
            if (inst.pabulib && inst.pabulib->votes.empty()) {
                skip(inst.source, "no votes");
                continue;
            }
            tasks.push_back({i, k});
        }
    }

    std::vector<std::vector<RunRecord>> per_task(tasks.size());
    std::mutex log_mutex;
    parallel_for(tasks.size(), cfg.workers, [&](std::size_t t) {
        try {
            per_task[t] = run_task(instances[tasks[t].instance], tasks[t].k, cfg);
        } catch (const std::exception& ex) {
            std::lock_guard lock(log_mutex);
            skip(instances[tasks[t].instance].source + " (k=" + std::to_string(tasks[t].k) + ")", ex.what());
        }
    });
    for (auto& chunk : per_task)
        for (auto& r : chunk) result.records.push_back(std::move(r));

    std::sort(result.records.begin(), result.records.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.instance_id, a.k, a.rule, a.iteration) < std::tie(b.instance_id, b.k, b.rule, b.iteration);
    });
    std::sort(result.skipped.begin(), result.skipped.end());
    result.aggregates = aggregate(result.records);
    return result;
}

// ---------------------------------------------------------------------------
// CSV

std::string records_csv(const std::vector<RunRecord>& records) {
    std::string out =
        "instance,k,rule,iteration,seed,committee,avg_satisfaction,exclusion_ratio,bottom_quartile_mean,gini,"
        "nash_welfare,jr_satisfied,ejr_plus_share,ejr_plus_shortfall,ejr_plus_witness_candidates,quota_deserved,"
        "quota_received\n";
    for (const auto& r : records) {
        std::string committee;
        for (CandidateId c : r.committee) committee += (committee.empty() ? "" : " ") + std::to_string(c + 1);
        out += r.instance_id + ',' + std::to_string(r.k) + ',' + r.rule + ',' + std::to_string(r.iteration) + ',' +
               std::to_string(r.seed) + ',' + committee + ',' + format_number(r.metrics.average_satisfaction) + ',' +
               format_number(r.metrics.exclusion_ratio) + ',' + format_number(r.metrics.bottom_quartile_mean) + ',' +
               format_number(r.metrics.gini) + ',' + format_number(r.metrics.nash_welfare) + ',' +
               (r.jr_satisfied ? "1" : "0") + ',';
        if (r.approval)
            out += format_number(r.ejr_plus_share) + ',' + format_number(r.ejr_plus_shortfall) + ',' +
                   std::to_string(r.ejr_plus_witness_candidates);
        else
            out += ",,";
        out += ',';
        if (r.quota_deserved >= 0) out += std::to_string(r.quota_deserved) + ',' + std::to_string(r.quota_received);
        else out += ',';
        out += '\n';
    }
    return out;
}

std::string timing_csv(const std::vector<RunRecord>& records) {
    std::string out = "instance,k,rule,iteration,seconds\n";
    for (const auto& r : records)
        out += r.instance_id + ',' + std::to_string(r.k) + ',' + r.rule + ',' + std::to_string(r.iteration) + ',' +
               format_number(r.seconds) + '\n';
    return out;
}

std::string aggregates_csv(const std::vector<AggregateRow>& rows) {
    std::string out = "section,group,rule,statistic,value\n";
    for (const auto& a : rows)
        out += a.section + ',' + a.group + ',' + a.rule + ',' + a.statistic + ',' + format_number(a.value) + '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Aggregates

namespace {

struct MetricDef {
    const char* name;
    double MetricBundle::*field;
    bool higher_is_better;
};

constexpr MetricDef kMetrics[] = {
    {"avg_satisfaction", &MetricBundle::average_satisfaction, true},
    {"exclusion_ratio", &MetricBundle::exclusion_ratio, false},
    {"bottom_quartile_mean", &MetricBundle::bottom_quartile_mean, true},
    {"gini", &MetricBundle::gini, false},
    {"nash_welfare", &MetricBundle::nash_welfare, true},
};

std::string size_group(int k) { return "k=" + std::to_string(k); }

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records) {
    std::vector<AggregateRow> rows;
    std::vector<std::string> rules = {"mes"};
    for (OnlineRule r : kAllOnlineRules) rules.emplace_back(to_string(r));

    std::set<int> sizes;
    for (const auto& r : records) sizes.insert(r.k);
    const std::string all = "all";

    // Means per (k, rule) and over all k.
    auto emit_means = [&](const std::string& group, auto&& keep) {
        for (const auto& rule : rules) {
            std::map<std::string, std::vector<double>> acc;
            std::vector<double> shortfall;
            bool approval = false;
            std::size_t runs = 0;
            for (const auto& r : records) {
                if (r.rule != rule || !keep(r)) continue;
                ++runs;
                for (const auto& md : kMetrics) acc[md.name].push_back(r.metrics.*md.field);
                acc["jr_satisfied"].push_back(r.jr_satisfied ? 1.0 : 0.0);
                if (r.approval) {
                    approval = true;
                    acc["ejr_plus_share"].push_back(r.ejr_plus_share);
                    acc["ejr_plus_violation_rate"].push_back(r.ejr_plus_share > 0 ? 1.0 : 0.0);
                    acc["ejr_plus_witness_candidates"].push_back(r.ejr_plus_witness_candidates);
                    if (r.ejr_plus_share > 0) shortfall.push_back(r.ejr_plus_shortfall);
                }
            }
            if (runs == 0) continue;
            rows.push_back({"means", group, rule, "runs", static_cast<double>(runs)});
            for (const auto& md : kMetrics) rows.push_back({"means", group, rule, md.name, mean(acc[md.name])});
            rows.push_back({"means", group, rule, "jr_satisfied", mean(acc["jr_satisfied"])});
            if (approval) {
                rows.push_back({"means", group, rule, "ejr_plus_share", mean(acc["ejr_plus_share"])});
                rows.push_back({"means", group, rule, "ejr_plus_violation_rate", mean(acc["ejr_plus_violation_rate"])});
                rows.push_back({"means", group, rule, "ejr_plus_shortfall", mean(shortfall)});
                rows.push_back(
                    {"means", group, rule, "ejr_plus_witness_candidates", mean(acc["ejr_plus_witness_candidates"])});
            }
        }
    };
    for (int k : sizes) emit_means(size_group(k), [k](const RunRecord& r) { return r.k == k; });
    emit_means(all, [](const RunRecord&) { return true; });

    // Ranking of the online rules per (instance, k) on iteration-averaged metrics; ties share a place.
    std::map<std::pair<std::string, int>, std::map<std::string, std::vector<const RunRecord*>>> cases;
    for (const auto& r : records)
        if (r.rule != "mes") cases[{r.instance_id, r.k}][r.rule].push_back(&r);
    if (!cases.empty()) {
        for (const auto& md : kMetrics) {
            std::map<std::string, std::array<double, 3>> counts;  // best, top2, worst
            std::size_t total = 0;
            for (const auto& [key, by_rule] : cases) {
                std::map<std::string, double> score;
                for (const auto& [rule, recs] : by_rule) {
                    std::vector<double> v;
                    for (const auto* r : recs) v.push_back(r->metrics.*md.field);
                    score[rule] = md.higher_is_better ? mean(v) : -mean(v);
                }
                ++total;
                for (const auto& [rule, s] : score) {
                    int better = 0, worse = 0;
                    for (const auto& [other, t] : score) {
                        if (other == rule) continue;
                        if (t > s) ++better;
                        if (t < s) ++worse;
                    }
                    auto& c = counts[rule];
                    if (better == 0) c[0] += 1;
                    if (better <= 1) c[1] += 1;
                    if (worse == 0) c[2] += 1;
                }
            }
            for (const auto& rule : rules) {
                if (rule == "mes" || !counts.contains(rule)) continue;
                const auto& c = counts[rule];
                const double n = static_cast<double>(total);
                rows.push_back({"ranking", md.name, rule, "best", c[0] / n});
                rows.push_back({"ranking", md.name, rule, "top2", c[1] / n});
                rows.push_back({"ranking", md.name, rule, "worst", c[2] / n});
            }
        }
    }

    // Ratios / differences against the MES baseline of the same (instance, k).
    std::map<std::pair<std::string, int>, const RunRecord*> baseline;
    for (const auto& r : records)
        if (r.rule == "mes") baseline[{r.instance_id, r.k}] = &r;
    for (const auto& rule : rules) {
        if (rule == "mes") continue;
        std::map<std::string, std::vector<double>> acc;
        for (const auto& r : records) {
            if (r.rule != rule) continue;
            const auto it = baseline.find({r.instance_id, r.k});
            if (it == baseline.end()) continue;
            const auto rel = relative_to_baseline(r.metrics, it->second->metrics);
            for (const auto& md : kMetrics) acc[md.name].push_back(rel.*md.field);
        }
        if (acc.empty()) continue;
        for (const auto& md : kMetrics) rows.push_back({"relative", all, rule, md.name, mean(acc[md.name])});
    }

    // Proportional quota (polarized instances).
    for (const auto& rule : rules) {
        std::size_t runs = 0, under = 0;
        double deficit = 0;
        for (const auto& r : records) {
            if (r.rule != rule || r.quota_deserved < 0) continue;
            ++runs;
            const int d = std::max(0, r.quota_deserved - r.quota_received);
            if (d > 0) ++under;
            deficit += d;
        }
        if (runs == 0) continue;
        rows.push_back({"quota", all, rule, "runs", static_cast<double>(runs)});
        rows.push_back({"quota", all, rule, "underperformance_share", static_cast<double>(under) / runs});
        rows.push_back({"quota", all, rule, "mean_deficit", deficit / runs});
        rows.push_back({"quota", all, rule, "mean_deficit_when_under", under ? deficit / under : 0.0});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Probabilistic guarantees

Election single_approval_instance(int n, int m, int k, std::uint64_t seed) {
    if (n < k || n % k != 0)
        throw InvalidParameter("single-approval instance needs n to be a positive multiple of k");
    Rng rng(seed);
    std::vector<CandidateId> ids(m);
    std::iota(ids.begin(), ids.end(), 0);
    for (int j = 0; j < k; ++j) std::swap(ids[j], ids[j + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - j)))]);
    std::vector<double> table(static_cast<std::size_t>(n) * m, 0.0);
    for (int i = 0; i < n; ++i)
        table[static_cast<std::size_t>(i) * m + ids[i % k]] = 1.0 + static_cast<double>(rng.below(200));
    return Election(n, m, k, table);
}

ThmMesReport verify_thm_mes(const ExperimentConfig& cfg) {
    const int n = cfg.n, m = cfg.m, k = cfg.k;
    const int orders = cfg.orders > 0 ? cfg.orders : 5000;
    const int instances = std::max(1, cfg.instances);
    ThmMesReport rep;
    rep.orders = orders;
    rep.exploration = std::min(default_exploration(m), m - k);
    const double inv_e = 1.0 / std::numbers::e;
    rep.sigma = std::sqrt(inv_e * (1 - inv_e) / orders);
    rep.winner_threshold = inv_e - 3 * rep.sigma;
    rep.joint_frequency.assign(k + 1, 0.0);
    rep.ejr_frequency.assign(k + 1, 0.0);
    rep.ejr_orders = std::min(cfg.ejr_orders, orders);
    const bool ejr = n <= kDefaultBruteForceVoterCap;
    if (!ejr) rep.ejr_orders = 0;

    std::vector<std::vector<int>> joint_hits(instances, std::vector<int>(k + 1, 0));
    std::vector<std::vector<int>> ejr_hits(instances, std::vector<int>(k + 1, 0));
    std::vector<std::vector<CandidateId>> winners(instances);
    std::vector<std::vector<int>> winner_hits(instances);

    parallel_for(static_cast<std::size_t>(instances), cfg.workers, [&](std::size_t inst) {
        const Election e = single_approval_instance(n, m, k, derive_seed(cfg.base_seed, "thm-mes", k, static_cast<int>(inst)));
        for (int i = 0; i < n; ++i) {
            int positive = 0;
            for (CandidateId c = 0; c < m; ++c) positive += e.utility(i, c) > 0 ? 1 : 0;
            if (positive != 1) throw InvalidParameter("instance is not single-approval");
        }
        auto core = mes(e).trace.core();
        std::sort(core.begin(), core.end());
        winners[inst] = core;
        winner_hits[inst].assign(core.size(), 0);
        const std::string stream_id = "thm-mes-order-" + std::to_string(inst);
        for (int j = 0; j < orders; ++j) {
            const ArrivalOrder o = random_order(m, derive_seed(cfg.base_seed, stream_id, k, j));
            const Committee w = online_mes(e, o);
            int hired = 0;
            for (std::size_t x = 0; x < core.size(); ++x)
                if (w.contains(core[x])) {
                    ++winner_hits[inst][x];
                    ++hired;
                }
            for (int p = 0; p <= k; ++p)
                if (hired >= k - p) ++joint_hits[inst][p];
            if (j < rep.ejr_orders) {
                for (int p = 0; p < k; ++p)
                    if (check_ejr_bruteforce(e, w, EjrVariant::gamma(p)).satisfied) ++ejr_hits[inst][p];
                ++ejr_hits[inst][k];
            }
        }
    });

    rep.winners_pass = true;
    for (int inst = 0; inst < instances; ++inst) {
        for (std::size_t x = 0; x < winners[inst].size(); ++x) {
            rep.mes_winners.push_back(winners[inst][x]);
            const double f = static_cast<double>(winner_hits[inst][x]) / orders;
            rep.winner_frequency.push_back(f);
            if (f < rep.winner_threshold) rep.winners_pass = false;
        }
        for (int p = 0; p <= k; ++p) {
            rep.joint_frequency[p] += static_cast<double>(joint_hits[inst][p]) / orders / instances;
            if (rep.ejr_orders > 0)
                rep.ejr_frequency[p] += static_cast<double>(ejr_hits[inst][p]) / rep.ejr_orders / instances;
        }
    }
    rep.joint_pass = true;
    rep.joint_threshold.resize(k + 1);
    for (int p = 0; p <= k; ++p) {
        const double q = std::pow(inv_e, k - p);
        const double sd = std::sqrt(q * (1 - q) / (static_cast<double>(orders) * instances));
        rep.joint_threshold[p] = q - 3 * sd;
        if (rep.joint_frequency[p] < rep.joint_threshold[p]) rep.joint_pass = false;
    }
    rep.pass = rep.winners_pass && rep.joint_pass;
    return rep;
}

ThmNashReport verify_thm_nash(const ExperimentConfig& cfg) {
    const int orders = cfg.orders > 0 ? cfg.orders : 500;
    const int instances = std::max(1, cfg.instances);
    ThmNashReport rep;
    rep.instances = instances;
    rep.orders = orders;
    rep.threshold = (1 - 1 / std::numbers::e) / 7;

    std::vector<double> sums(instances, 0.0), mins(instances, 1.0);
    parallel_for(static_cast<std::size_t>(instances), cfg.workers, [&](std::size_t inst) {
        SampleSpec s;
        s.culture = Culture::Ic;
        s.n = cfg.n;
        s.m = cfg.m;
        s.k = cfg.k;
        s.p = cfg.p;
        s.seed = derive_seed(cfg.base_seed, "thm-nash", cfg.k, static_cast<int>(inst));
        const Election e = sample_ic(s);
        const double best = nash_optimum_bruteforce(e).second;
        const std::string stream_id = "thm-nash-order-" + std::to_string(inst);
        for (int j = 0; j < orders; ++j) {
            const ArrivalOrder o = random_order(e.num_candidates(), derive_seed(cfg.base_seed, stream_id, cfg.k, j));
            const double ratio = std::exp(nash_welfare(e, online_nash(e, o)) - best);
            sums[inst] += ratio;
            mins[inst] = std::min(mins[inst], ratio);
        }
    });
    double total = 0;
    rep.min_ratio = 1.0;
    for (int inst = 0; inst < instances; ++inst) {
        total += sums[inst];
        rep.min_ratio = std::min(rep.min_ratio, mins[inst]);
    }
    rep.mean_ratio = total / (static_cast<double>(instances) * orders);
    rep.pass = rep.mean_ratio >= rep.threshold;
    return rep;
}

std::string thm_mes_csv(const ThmMesReport& r) {
    std::string out = "statistic,index,value,threshold\n";
    for (std::size_t x = 0; x < r.winner_frequency.size(); ++x)
        out += "winner_frequency," + std::to_string(r.mes_winners[x] + 1) + ',' + format_number(r.winner_frequency[x]) +
               ',' + format_number(r.winner_threshold) + '\n';
    for (std::size_t p = 0; p < r.joint_frequency.size(); ++p)
        out += "joint_frequency," + std::to_string(p) + ',' + format_number(r.joint_frequency[p]) + ',' +
               format_number(r.joint_threshold[p]) + '\n';
    for (std::size_t p = 0; p < r.ejr_frequency.size() && r.ejr_orders > 0; ++p)
        out += "ejr_frequency," + std::to_string(p) + ',' + format_number(r.ejr_frequency[p]) + ",\n";
    out += "orders,," + std::to_string(r.orders) + ",\n";
    out += "exploration,," + std::to_string(r.exploration) + ",\n";
    out += std::string("pass,,") + (r.pass ? "1" : "0") + ",\n";
    return out;
}

std::string thm_nash_csv(const ThmNashReport& r) {
    return "statistic,value\ninstances," + std::to_string(r.instances) + "\norders," + std::to_string(r.orders) +
           "\nmean_ratio," + format_number(r.mean_ratio) + "\nmin_ratio," + format_number(r.min_ratio) +
           "\nthreshold," + format_number(r.threshold) + "\npass," + (r.pass ? "1" : "0") + "\n";
}

}  // namespace fairsec
