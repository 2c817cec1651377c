// fairsec: run online committee rules, check proportionality axioms, sample
// elections, and drive experiments from the command line.
//
// Exit codes: 0 success, 1 `check` found a violation, 2 usage or input error,
// 3 any other failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "fairsec/axioms.hpp"
#include "fairsec/harness.hpp"
#include "fairsec/io.hpp"
#include "fairsec/rules_offline.hpp"
#include "fairsec/rules_online.hpp"
#include "fairsec/samplers.hpp"

using namespace fairsec;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string label(CandidateId c) { return "c" + std::to_string(c + 1); }

std::string members_text(const std::vector<CandidateId>& members) {
    std::string out;
    for (CandidateId c : members) out += (out.empty() ? "" : " ") + label(c);
    return out;
}

// Loads a native file, or a .pb file (which needs --k or --divisor).
NativeInstance load_instance(const std::string& path, std::optional<int> k, std::optional<double> divisor) {
    if (!std::filesystem::is_regular_file(path)) throw UsageError("no such instance file: " + path);
    const std::string text = read_file(path);
    if (path.ends_with(".pb")) {
        const auto p = parse_pabulib(text);
        const int m = static_cast<int>(p.projects.size());
        if (!k && !divisor) throw UsageError(".pb instances need --k or --divisor");
        return {to_election(p, k ? *k : k_from_divisor(m, *divisor)), std::nullopt};
    }
    auto inst = read_native(text);
    if (k) inst.election = inst.election.with_committee_size(*k);
    else if (divisor) inst.election = inst.election.with_committee_size(k_from_divisor(inst.election.num_candidates(), *divisor));
    return inst;
}

std::vector<int> parse_id_list(const std::string& text) {
    std::vector<int> ids;
    std::string token;
    std::istringstream in(text);
    while (in >> std::ws && std::getline(in, token, ',')) {
        std::istringstream words(token);
        for (std::string w; words >> w;) {
            if (!w.empty() && (w[0] == 'c' || w[0] == 'C')) w.erase(0, 1);
            try {
                std::size_t used = 0;
                const int id = std::stoi(w, &used);
                if (used != w.size()) throw std::invalid_argument(w);
                ids.push_back(id);
            } catch (const std::exception&) {
                throw UsageError("malformed candidate id '" + w + "'");
            }
        }
    }
    return ids;
}

ArrivalOrder resolve_order(const std::string& spec, const NativeInstance& inst) {
    const int m = inst.election.num_candidates();
    if (spec.empty()) return inst.order ? *inst.order : ArrivalOrder::identity(m);
    if (spec == "identity") return ArrivalOrder::identity(m);
    if (spec.find_first_of(", ") != std::string::npos || spec.starts_with("c")) {
        auto ids = parse_id_list(spec);
        for (auto& id : ids) --id;
        return ArrivalOrder(std::move(ids));
    }
    try {
        std::size_t used = 0;
        const unsigned long long seed = std::stoull(spec, &used);
        if (used != spec.size()) throw std::invalid_argument(spec);
        return random_order(m, seed);
    } catch (const std::invalid_argument&) {
        throw UsageError("--order must be a seed, 'identity', or a comma-separated candidate list");
    } catch (const std::out_of_range&) {
        throw UsageError("--order seed out of range");
    }
}

void print_audit(const Committee& w, const Election& e) {
    std::cout << "position,candidate,hired,reason,excluded,running_sample,payments\n";
    for (const auto& a : w.audit) {
        std::cout << a.position << ',' << label(a.candidate) << ',' << (a.hired ? "yes" : "no") << ','
                  << to_string(a.reason) << ',';
        if (a.excluded >= 0)
            std::cout << (a.excluded < e.num_candidates() ? label(a.excluded) : "dummy" + std::to_string(a.excluded - e.num_candidates() + 1));
        std::cout << ',';
        for (std::size_t j = 0; j < a.running_sample.size(); ++j) {
            const CandidateId c = a.running_sample[j];
            std::cout << (j ? " " : "") << (c < e.num_candidates() ? label(c) : "dummy" + std::to_string(c - e.num_candidates() + 1));
        }
        std::cout << ',';
        for (std::size_t i = 0; i < a.payments.size(); ++i) std::cout << (i ? " " : "") << format_number(a.payments[i]);
        std::cout << '\n';
    }
}

void print_report(const AxiomReport& r) {
    std::cout << "axiom: " << r.axiom << '\n'
              << "satisfied: " << (r.satisfied ? "yes" : "no") << '\n'
              << "violating_voter_share: " << format_number(r.violating_voter_share) << '\n'
              << "shortfall: " << format_number(r.shortfall) << '\n'
              << "witness_candidates: " << r.witness_candidates << '\n';
    const std::size_t shown = std::min<std::size_t>(r.witnesses.size(), 20);
    for (std::size_t j = 0; j < shown; ++j) {
        const auto& w = r.witnesses[j];
        std::cout << "witness: voters";
        for (int i : w.group) std::cout << ' ' << i + 1;
        std::cout << " | candidates";
        for (std::size_t x = 0; x < w.candidates.size(); ++x)
            std::cout << ' ' << label(w.candidates[x]) << "(alpha=" << format_number(w.thresholds[x]) << ')';
        std::cout << " | required " << format_number(w.required) << " achieved " << format_number(w.achieved) << '\n';
    }
    if (shown < r.witnesses.size()) std::cout << "... " << r.witnesses.size() - shown << " more witnesses\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online committee selection with proportionality guarantees"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fairsec 1.0");

    // run
    auto* run = app.add_subcommand("run", "Run a rule on an instance and print the committee and audit");
    std::string run_rule, run_instance, run_order;
    std::optional<int> run_t, run_k;
    std::optional<double> run_divisor;
    bool run_quiet = false;
    run->add_option("rule", run_rule,
                    "greedy | online-mes | online-bos | online-nash | mes | bos | utilitarian | nash-optimum")
        ->required();
    run->add_option("--instance,-i", run_instance, "Native instance or .pb file")->required();
    run->add_option("--order,-o", run_order,
                    "Arrival order: a seed, 'identity', or 1-based ids like 3,1,2 (default: file order or identity)");
    run->add_option("--t", run_t, "Exploration length for online-mes / online-bos");
    run->add_option("--k", run_k, "Override the committee size");
    run->add_option("--divisor", run_divisor, "Committee size max(2, floor(m / divisor))");
    run->add_flag("--no-audit", run_quiet, "Print the committee only");

    // check
    auto* check = app.add_subcommand("check", "Check an axiom for a committee; exit 1 on violation");
    std::string check_axiom, check_instance, check_committee;
    std::optional<double> check_beta, check_delta;
    std::optional<int> check_gamma, check_k;
    std::optional<double> check_divisor;
    int check_cap = kDefaultBruteForceVoterCap;
    check->add_option("axiom", check_axiom, "jr | strong-jr | ejr-plus | ejr")->required();
    check->add_option("--instance,-i", check_instance, "Native instance or .pb file")->required();
    check->add_option("--committee,-c", check_committee, "1-based candidate ids, e.g. 4,6")->required();
    check->add_option("--beta", check_beta, "ejr: multiplicative relaxation (>= 1)");
    check->add_option("--gamma", check_gamma, "ejr: up to gamma extra candidates (0..k-1)");
    check->add_option("--delta", check_delta, "ejr: group-size factor in (0, k]");
    check->add_option("--voter-cap", check_cap, "ejr: largest n for the brute force")->capture_default_str();
    check->add_option("--k", check_k, "Override the committee size");
    check->add_option("--divisor", check_divisor, "Committee size max(2, floor(m / divisor))");

    // sample
    auto* smp = app.add_subcommand("sample", "Sample an election in native format");
    std::string smp_culture, smp_output;
    SampleSpec spec;
    bool no_noise = false;
    smp->add_option("culture", smp_culture, "ic | mallows | normalized-mallows | polarized")->required();
    smp->add_option("--n", spec.n, "Voters")->capture_default_str();
    smp->add_option("--m", spec.m, "Candidates")->capture_default_str();
    smp->add_option("--k", spec.k, "Committee size")->capture_default_str();
    smp->add_option("--p", spec.p, "ic: approval probability")->capture_default_str();
    smp->add_option("--phi", spec.phi, "mallows: dispersion; normalized-mallows: normalized dispersion")
        ->capture_default_str();
    smp->add_option("--x", spec.x, "polarized: bloc A share")->capture_default_str();
    smp->add_option("--q", spec.q, "polarized: bloc B approval rate")->capture_default_str();
    smp->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    smp->add_flag("--no-noise", no_noise, "mallows: disable utility noise");
    smp->add_option("--output", smp_output, "Write to a file instead of standard output");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run an experiment config and write CSV output");
    std::string exp_config, exp_output;
    std::optional<int> exp_workers;
    exp->add_option("config", exp_config, "key=value config file")->required();
    exp->add_option("--output", exp_output, "Override the output path");
    exp->add_option("--workers", exp_workers, "Worker threads");

    // counterexample
    auto* cx = app.add_subcommand("counterexample", "Emit an impossibility instance in native format");
    std::string cx_id, cx_output;
    CounterexampleSpec cx_spec;
    std::optional<double> cx_param;
    cx->add_option("construction", cx_id, "beta-ejr | ejr-gamma | delta-ejr | strong-jr")->required();
    cx->add_option("--k", cx_spec.k, "Committee size")->capture_default_str();
    cx->add_option("--beta,--gamma,--delta,--param", cx_param, "Construction parameter (default 1; gamma default k-1)");
    cx->add_option("--epsilon", cx_spec.epsilon, "Small positive perturbation")->capture_default_str();
    cx->add_option("--output", cx_output, "Write to a file instead of standard output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            auto inst = load_instance(run_instance, run_k, run_divisor);
            const Election& e = inst.election;
            Committee w;
            bool online = true;
            if (run_rule == "mes" || run_rule == "bos" || run_rule == "utilitarian" || run_rule == "nash-optimum") {
                online = false;
                if (run_rule == "mes") w = mes(e).committee;
                else if (run_rule == "bos") w = bos(e).committee;
                else if (run_rule == "utilitarian") w = utilitarian_topk(e);
                else w = nash_optimum_bruteforce(e).first;
            } else {
                OnlineRule rule;
                try {
                    rule = parse_online_rule(run_rule);
                } catch (const InvalidParameter& ex) {
                    throw UsageError(ex.what());
                }
                OnlineRuleConfig cfg;
                cfg.exploration = run_t;
                w = run_online(rule, e, resolve_order(run_order, inst), cfg);
            }
            std::cout << "rule: " << run_rule << '\n' << "committee: " << members_text(w.members) << '\n';
            std::cout << "nash_welfare: " << format_number(nash_welfare(e, w)) << '\n';
            if (online && !run_quiet) print_audit(w, e);
            return 0;
        }
        if (check->parsed()) {
            const auto inst = load_instance(check_instance, check_k, check_divisor);
            auto ids = parse_id_list(check_committee);
            for (auto& id : ids) --id;
            const Committee w = make_committee(inst.election, ids);
            AxiomReport r;
            if (check_axiom == "jr") {
                r = check_jr(inst.election, w);
            } else if (check_axiom == "strong-jr") {
                r = check_strong_jr(inst.election, w);
            } else if (check_axiom == "ejr-plus") {
                r = check_ejr_plus_approval(inst.election, w);
            } else if (check_axiom == "ejr") {
                const int given = (check_beta ? 1 : 0) + (check_gamma ? 1 : 0) + (check_delta ? 1 : 0);
                if (given > 1) throw UsageError("give at most one of --beta, --gamma, --delta");
                EjrVariant v = EjrVariant::exact();
                if (check_beta) v = EjrVariant::beta(*check_beta);
                if (check_gamma) v = EjrVariant::gamma(*check_gamma);
                if (check_delta) v = EjrVariant::delta(*check_delta);
                r = check_ejr_bruteforce(inst.election, w, v, check_cap);
            } else {
                throw UsageError("unknown axiom '" + check_axiom + "' (expected jr, strong-jr, ejr-plus or ejr)");
            }
            std::cout << "committee: " << members_text(w.members) << '\n';
            print_report(r);
            return r.satisfied ? 0 : 1;
        }
        if (smp->parsed()) {
            try {
                spec.culture = parse_culture(smp_culture);
            } catch (const InvalidParameter& ex) {
                throw UsageError(ex.what());
            }
            spec.noise = !no_noise;
            const std::string text = write_native(sample(spec));
            if (smp_output.empty()) std::cout << text;
            else write_file(smp_output, text);
            return 0;
        }
        if (exp->parsed()) {
            const auto dir = std::filesystem::path(exp_config).parent_path().string();
            auto cfg = parse_config(read_file(exp_config), dir.empty() ? "." : dir);
            if (!exp_output.empty()) cfg.output = exp_output;
            if (exp_workers) cfg.workers = std::max(1, *exp_workers);
            auto emit = [&](const std::string& path, const std::string& text) {
                if (cfg.output.empty()) std::cout << text;
                else write_file(path, text);
            };
            if (cfg.experiment == Experiment::ThmMes) {
                const auto rep = verify_thm_mes(cfg);
                emit(cfg.output, thm_mes_csv(rep));
                std::cerr << "thm-mes: " << (rep.pass ? "pass" : "fail") << '\n';
                return 0;
            }
            if (cfg.experiment == Experiment::ThmNash) {
                const auto rep = verify_thm_nash(cfg);
                emit(cfg.output, thm_nash_csv(rep));
                std::cerr << "thm-nash: mean ratio " << format_number(rep.mean_ratio) << ", "
                          << (rep.pass ? "pass" : "fail") << '\n';
                return 0;
            }
            const auto result = run_experiment(cfg);
            emit(cfg.output, records_csv(result.records));
            if (!cfg.output.empty()) {
                write_file(cfg.output + ".agg.csv", aggregates_csv(result.aggregates));
                write_file(cfg.output + ".timing.csv", timing_csv(result.records));
                std::cerr << result.records.size() << " records written to " << cfg.output << '\n';
            }
            return 0;
        }
        if (cx->parsed()) {
            try {
                cx_spec.construction = parse_construction(cx_id);
            } catch (const InvalidParameter& ex) {
                throw UsageError(ex.what());
            }
            if (cx_param) cx_spec.parameter = *cx_param;
            else if (cx_spec.construction == Construction::EjrGamma) cx_spec.parameter = cx_spec.k - 1;
            const auto out = make_counterexample(cx_spec);
            std::string text = "# " + std::string(to_string(cx_spec.construction)) + " candidates:";
            for (const auto& l : out.labels) text += ' ' + l;
            text += '\n' + write_native(out.election, out.order);
            if (cx_output.empty()) std::cout << text;
            else write_file(cx_output, text);
            return 0;
        }
    } catch (const UsageError& ex) {
        std::cerr << "error: " << ex.what() << "\n\n" << app.help();
        return 2;
    } catch (const ParseError& ex) {
        std::cerr << "parse error: " << ex.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 3;
    }
    return 2;
}
