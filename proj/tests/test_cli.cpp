#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "fpde/catalog.hpp"

using namespace fpde;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("fpde_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args) {
    static int seq = 0;
    fs::path o = scratch_dir() / ("out" + std::to_string(seq));
    fs::path e = scratch_dir() / ("err" + std::to_string(seq));
    ++seq;
    std::string cmd = std::string(FPDE_CLI_BIN) + " " + args + " > " + o.string() + " 2> " +
                      e.string();
    int st = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

} // namespace

TEST_CASE("list prints the ten catalog ids") {
    RunResult r = run_cli("list");
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 10);
    for (const auto& e : catalog_index()) CHECK(r.out.find(e.id) != std::string::npos);
}

TEST_CASE("verify with order overrides passes and prints the residual bound") {
    RunResult r = run_cli("verify --example burgers-coupled --set alpha=0.3 --set beta=0.8");
    CHECK(r.code == 0);
    CHECK(r.out.find("max_residual <= 1e-8") != std::string::npos);
    CHECK(r.out.find("result: PASS") != std::string::npos);
    CHECK(r.out.find("alpha = 3/10") != std::string::npos);
    CHECK(r.err.empty());
}

TEST_CASE("reduce prints one equation per line") {
    RunResult r = run_cli("reduce --example boussinesq-system");
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 4);
    CHECK(r.out.substr(0, 15) == "D^alpha1[K1] = ");
    CHECK(r.out.find("2.88529749572*K2^2") != std::string::npos);

    RunResult m = run_cli("reduce --example mixed-derivative");
    CHECK(m.code == 0);
    CHECK(count_lines(m.out) == 3);
    CHECK(m.out.find("D^gamma[L1]") != std::string::npos);

    RunResult w = run_cli("reduce --example scale-wave");
    CHECK(w.code == 0);
    CHECK(w.out.find("D^alpha[K1] + D^{alpha + 1}[K1]") != std::string::npos);
}

TEST_CASE("solve prints the separated form with coefficient series") {
    RunResult r = run_cli("solve --example burgers-coupled");
    CHECK(r.code == 0);
    CHECK(r.out.find("u(t, x) = K1(t) + K2(t)*x^{beta}") != std::string::npos);
    CHECK(r.out.find("K1(t) = 2*t^{-alpha}") != std::string::npos);
    CHECK(r.out.find("L2(t) = -0.174140423783*t^{-alpha}") != std::string::npos);
}

TEST_CASE("identical sample invocations are byte identical") {
    std::string csv = " sample --example burgers-coupled --grid t=0.5,2,2 --grid x=0.5,2,3 --out ";
    fs::path a = scratch_dir() / "a.csv";
    fs::path b = scratch_dir() / "b.csv";
    CHECK(run_cli(csv + a.string()).code == 0);
    CHECK(run_cli(csv + b.string()).code == 0);
    std::string ta = slurp(a);
    CHECK(ta == slurp(b));
    CHECK(ta.substr(0, 8) == "t,x,u,v\n");
    CHECK(count_lines(ta) == 7);
}

TEST_CASE("a problem JSON file drives every command") {
    auto [ps, ks] = build("kdv-system", {{"alpha", Rational(3, 10)}});
    fs::path spec = scratch_dir() / "kdv.json";
    std::ofstream(spec, std::ios::binary) << to_json(ps);

    RunResult v = run_cli("verify --spec " + spec.string());
    CHECK(v.code == 0);
    CHECK(v.out.find("alpha = 3/10") != std::string::npos);

    RunResult s = run_cli("verify --spec " + spec.string() + " --set alpha=0.7 --set a2=5");
    CHECK(s.code == 0);
    CHECK(s.out.find("alpha = 7/10") != std::string::npos);
    CHECK(s.out.find("a2 = 5") != std::string::npos);

    std::string grid = " --grid t=1,2,2 --grid x=0.5,1,2 --out ";
    fs::path a = scratch_dir() / "spec.csv";
    fs::path b = scratch_dir() / "example.csv";
    CHECK(run_cli("sample --spec " + spec.string() + grid + a.string()).code == 0);
    CHECK(run_cli("sample --example kdv-system --set alpha=0.3" + grid + b.string()).code == 0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("order parameters unlock family constants before classification") {
    RunResult r = run_cli("solve --example dispersive-kdv --set n=3 --set lambda3=2");
    CHECK(r.code == 0);
    CHECK(r.out.find("n = 3") != std::string::npos);
    CHECK(r.out.find("lambda3 = 2") != std::string::npos);
}

TEST_CASE("configuration errors exit 2 with a message on standard error") {
    const char* cases[] = {
        "verify --example nope",
        "verify --example burgers-coupled --spec /tmp/whatever.json",
        "verify",
        "verify --example burgers-coupled --set alpha",
        "verify --example burgers-coupled --set zeta=1",
        "verify --example burgers-coupled --set alpha=abc",
        "verify --example burgers-coupled --set alpha=0.5",
        "verify --example burgers-coupled --grid q=1,2,3",
        "verify --example burgers-coupled --grid t=2,1,5",
        "verify --example burgers-coupled --grid t=1,2,0",
        "verify --example burgers-coupled --grid t=1,2",
        "verify --example burgers-coupled --tolerance=-1",
        "verify --example burgers-coupled --truncation=-3",
        "verify --spec /nonexistent/path.json",
        "frobnicate",
    };
    for (const char* c : cases) {
        RunResult r = run_cli(c);
        INFO(c);
        CHECK(r.code == 2);
        CHECK(!r.err.empty());
    }

    fs::path bad = scratch_dir() / "bad.json";
    std::ofstream(bad) << "{ not json";
    RunResult r = run_cli("verify --spec " + bad.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("invalid problem JSON") != std::string::npos);
}

TEST_CASE("an unmet tolerance exits 1 and reports the failure") {
    RunResult r = run_cli("verify --example burgers-coupled --tolerance 1e-30");
    CHECK(r.code == 1);
    CHECK(r.out.find("max_residual > 1e-30") != std::string::npos);
    CHECK(r.out.find("result: FAIL") != std::string::npos);
    CHECK(r.err.find("verification failed for burgers-coupled") != std::string::npos);

    RunResult s = run_cli("sample --example burgers-coupled --tolerance 1e-30");
    CHECK(s.code == 1);
    CHECK(s.out.empty());
    CHECK(s.err.find("--force") != std::string::npos);

    RunResult f = run_cli("sample --example burgers-coupled --tolerance 1e-30 --force "
                          "--grid t=1,1,1 --grid x=1,1,1");
    CHECK(f.code == 0);
    CHECK(f.out.substr(0, 8) == "t,x,u,v\n");
}

TEST_CASE("help exits 0") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("verify --help").code == 0);
}
