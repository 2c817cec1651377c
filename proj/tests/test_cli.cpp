#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "fairsec/io.hpp"

using namespace fairsec;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome run(const std::string& args) {
    std::filesystem::create_directories(FAIRSEC_SCRATCH_DIR);
    const std::string out = std::string(FAIRSEC_SCRATCH_DIR) + "/stdout.txt";
    const std::string err = std::string(FAIRSEC_SCRATCH_DIR) + "/stderr.txt";
    const std::string cmd = std::string("\"") + FAIRSEC_CLI_PATH + "\" " + args + " >\"" + out + "\" 2>\"" + err + "\"";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = read_file(out);
    o.err = read_file(err);
    return o;
}

const std::string kExample = std::string("--instance \"") + FAIRSEC_DATA_DIR + "/example1.txt\"";

}  // namespace

TEST_CASE("run prints the committee") {
    const auto greedy = run("run greedy " + kExample);
    CHECK(greedy.code == 0);
    CHECK(greedy.out.find("committee: c1 c2\n") != std::string::npos);
    CHECK(greedy.out.find("position,candidate,hired,reason") != std::string::npos);

    CHECK(run("run online-mes --no-audit " + kExample).out.find("committee: c3 c4\n") != std::string::npos);
    CHECK(run("run online-nash --no-audit " + kExample).out.find("committee: c3 c6\n") != std::string::npos);
    CHECK(run("run mes " + kExample).out.find("committee: c3 c4\n") != std::string::npos);
    CHECK(run("run greedy --order 6,5,4,3,2,1 --no-audit " + kExample).code == 0);
}

TEST_CASE("check exits 1 on a violation") {
    const auto bad = run("check jr " + kExample + " --committee 4,6");
    CHECK(bad.code == 1);
    CHECK(bad.out.find("satisfied: no") != std::string::npos);
    const auto good = run("check jr " + kExample + " --committee c1,c2");
    CHECK(good.code == 0);
    CHECK(good.out.find("satisfied: yes") != std::string::npos);
    CHECK(run("check ejr " + kExample + " --committee 3,4 --beta 1.5").code == 0);
}

TEST_CASE("sample is reproducible and readable") {
    const auto a = run("sample ic --n 7 --m 9 --k 3 --seed 7");
    const auto b = run("sample ic --n 7 --m 9 --k 3 --seed 7");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto inst = read_native(a.out);
    CHECK(inst.election.num_voters() == 7);
    CHECK(inst.election.num_candidates() == 9);
    CHECK(inst.election.committee_size() == 3);
}

TEST_CASE("counterexample output parses") {
    const auto o = run("counterexample beta-ejr --k 2 --beta 3 --epsilon 0.1");
    CHECK(o.code == 0);
    const auto inst = read_native(o.out);
    CHECK(inst.election.num_voters() == 2);
    CHECK(inst.election.num_candidates() == 4);
    CHECK(inst.order.has_value());
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("run sortition " + kExample).code == 2);
    CHECK(run("check pjr " + kExample + " --committee 1,2").code == 2);
    CHECK(run("sample urn").code == 2);
    CHECK(run("run greedy --instance /nonexistent/file.txt").code == 2);
    CHECK(run("check ejr " + kExample + " --committee 3,4 --voter-cap 1").code == 3);
    CHECK(run("").code == 2);
    CHECK(run("frobnicate").code == 2);

    std::filesystem::create_directories(FAIRSEC_SCRATCH_DIR);
    const std::string bad = std::string(FAIRSEC_SCRATCH_DIR) + "/bad.txt";
    write_file(bad, "2 6 2\n0;1;2;0;0\n");
    const auto parse = run("run greedy --instance \"" + bad + "\"");
    CHECK(parse.code == 2);
    CHECK(parse.err.find("line 2") != std::string::npos);
}

TEST_CASE("experiment writes records, aggregates and timings") {
    std::filesystem::create_directories(FAIRSEC_SCRATCH_DIR);
    const std::string dir = FAIRSEC_SCRATCH_DIR;
    write_file(dir + "/tiny.cfg",
               "experiment=exp3\niterations=2\nsource=sample ic n=6 m=8 k=3 p=0.5 seed=3\noutput=tiny.csv\n");
    const auto o = run("experiment \"" + dir + "/tiny.cfg\"");
    CHECK(o.code == 0);
    const auto records = read_file(dir + "/tiny.csv");
    CHECK(records.starts_with("instance,k,rule,iteration,seed,committee,"));
    CHECK(read_file(dir + "/tiny.csv.agg.csv").starts_with("section,group,rule,statistic,value\n"));
    CHECK(read_file(dir + "/tiny.csv.timing.csv").starts_with("instance,k,rule,iteration,seconds\n"));
    const auto again = run("experiment \"" + dir + "/tiny.cfg\" --workers 3");
    CHECK(again.code == 0);
    CHECK(read_file(dir + "/tiny.csv") == records);
}
