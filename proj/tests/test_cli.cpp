#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mhdbl/runner.hpp"

using namespace mhdbl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

nlohmann::json report(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "report.json")); }

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("mhdbl_cli_" + name);
    fs::remove_all(d);
    return d;
}

std::vector<std::string> violations_of(const std::string& text, Command c) {
    try {
        parse_config(text, c);
    } catch (const ValidationFailure& e) {
        return e.violations();
    }
    ADD_FAILURE() << "config accepted";
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

const char* kSmallSimulate = R"(
[grid]
nx = 16
ny = 33
y_max = 4.0
[run]
T = 0.05
dt = 0.01
)";

}  // namespace

TEST(Config, MinimalSimulateGetsDefaults) {
    const auto c = parse_config("command = \"simulate\"\n", Command::simulate);
    EXPECT_EQ(c.grid.nx, 32);
    EXPECT_EQ(c.grid.ny, 65);
    EXPECT_EQ(c.run.solver, "picard");
    EXPECT_EQ(c.data.kind, "bump");
    EXPECT_EQ(c.outflow.mode, "constant");
    EXPECT_EQ(c.instability.eps_list.size(), 3u);
    EXPECT_EQ(c.seed, 0u);
}

TEST(Config, ValuesAreRead) {
    const auto c = parse_config(R"(
seed = 7
[grid]
nx = 48
y_max = 5
[instability]
eps = [0.0625, 0.03125, 0.015625, 0.0078125]
window = [0.2, 0.4]
[profile]
magnetic = "uniform"
B0 = 0.5
)",
                                Command::instability);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.grid.nx, 48);
    EXPECT_EQ(c.grid.y_max, 5.0);
    EXPECT_EQ(c.instability.eps_list.size(), 4u);
    EXPECT_EQ(c.instability.window.lo, 0.2);
    EXPECT_EQ(c.instability.magnetic, MagneticProfile::Kind::uniform);
    EXPECT_EQ(c.instability.B0, 0.5);
}

TEST(Config, NegativeNyNamed) {
    const auto v = violations_of("[grid]\nny = -5\n", Command::simulate);
    EXPECT_TRUE(any_contains(v, "grid.ny"));
}

TEST(Config, NonIntegerInverseEpsilonRejected) {
    const auto v = violations_of("[instability]\neps = [0.0625, 0.3, 0.015625]\n", Command::instability);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_TRUE(any_contains(v, "instability.eps"));
    EXPECT_TRUE(any_contains(v, "1/eps must be a positive integer"));
    EXPECT_TRUE(any_contains(v, "periodicity"));
}

TEST(Config, EveryViolationListed) {
    const auto v = violations_of(R"(
bogus = 1
[grid]
ny = 0
nx = 2.5
colour = "red"
[run]
dt = -1
solver = "rk9"
[extras]
x = 1
)",
                                 Command::simulate);
    for (const char* k : {"bogus", "grid.ny", "grid.nx", "grid.colour", "run.dt", "run.solver", "extras"})
        EXPECT_TRUE(any_contains(v, k)) << k;
    EXPECT_GE(v.size(), 7u);
}

TEST(Config, SyntaxErrorCarriesLine) {
    try {
        parse_config("[grid]\nnx = 16\nny = = 3\n", Command::simulate);
        FAIL();
    } catch (const ParseFailure& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ParseError);
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(Config, CommandMismatch) {
    const auto v = violations_of("command = \"eigen\"\n", Command::simulate);
    EXPECT_TRUE(any_contains(v, "command"));
}

TEST(Runner, ExitCodeTable) {
    EXPECT_EQ(exit_code_for(ErrorKind::ValidationErrors), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::ParseError), 2);
    EXPECT_EQ(exit_code_for(ErrorKind::NumericalBlowup), 3);
    EXPECT_EQ(exit_code_for(ErrorKind::LowerBoundLost), 4);
    EXPECT_EQ(exit_code_for(ErrorKind::EigenpairNotFound), 5);
    EXPECT_EQ(exit_code_for(ErrorKind::IoError), 1);
}

TEST(Runner, ZeroDataSimulate) {
    const auto dir = fresh_dir("zero");
    auto c = parse_config(std::string(kSmallSimulate) + "[data]\nkind = \"zero\"\n[outflow]\nU0 = 0.0\n",
                          Command::simulate);
    EXPECT_EQ(run_scenario(c, dir), 0);
    const auto r = report(dir);
    EXPECT_EQ(r["status"], "ok");
    EXPECT_EQ(r["result"]["energy_max"].get<double>(), 0.0);
    std::ifstream is(dir / "energy.csv");
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "t,energy,dissipation");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        EXPECT_NE(line.find(",0,0"), std::string::npos) << line;
    }
    EXPECT_EQ(rows, 6);
    EXPECT_EQ(slurp(dir / "iterations.csv").substr(0, 34), "iter,sup_Hm,l2_diff,ratio,min_b\n1,");
    EXPECT_TRUE(fs::exists(dir / "b_final.bin"));
}

TEST(Runner, DipBelowDelta0StopsBeforeMarching) {
    const auto dir = fresh_dir("dip");
    auto c = parse_config(std::string(kSmallSimulate) + "[data]\ndelta0 = 0.5\ndip = 0.8\n", Command::simulate);
    EXPECT_EQ(run_scenario(c, dir), 2);
    const auto r = report(dir);
    EXPECT_EQ(r["status"], "error");
    EXPECT_EQ(r["error"]["kind"], "ValidationErrors");
    EXPECT_FALSE(fs::exists(dir / "iterations.csv"));
    EXPECT_FALSE(fs::exists(dir / "energy.csv"));
}

TEST(Runner, ParseFailureWritesReport) {
    const auto dir = fresh_dir("parse");
    fs::create_directories(dir);
    {
        std::ofstream os(dir / "bad.toml");
        os << "[grid]\nny = -3\nnx = 1\n";
    }
    EXPECT_EQ(run_from_file(Command::simulate, dir / "bad.toml", dir / "out"), 2);
    const auto r = report(dir / "out");
    EXPECT_EQ(r["error"]["violations"].size(), 2u);
}

TEST(Runner, DeterministicOutputs) {
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    const auto text = std::string("seed = 3\n") + kSmallSimulate + "[data]\nkind = \"random\"\n";
    const auto cfg = parse_config(text, Command::simulate);
    ASSERT_EQ(run_scenario(cfg, a), 0);
    ASSERT_EQ(run_scenario(cfg, b), 0);
    for (const char* f : {"iterations.csv", "energy.csv", "b_final.bin", "v_final.bin"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    auto ra = report(a), rb = report(b);
    ra.erase("timestamp");
    rb.erase("timestamp");
    EXPECT_EQ(ra.dump(), rb.dump());
}

TEST(Runner, EigenCommand) {
    const auto dir = fresh_dir("eigen");
    const auto c = parse_config("", Command::eigen);
    ASSERT_EQ(run_scenario(c, dir), 0);
    const auto r = report(dir)["result"];
    EXPECT_LE(r["residual"].get<double>(), 1e-8);
    EXPECT_LE(r["tau_gap"].get<double>(), 1e-6);
    EXPECT_LT(r["tau"]["im"].get<double>(), 0.0);
    EXPECT_EQ(slurp(dir / "eigen.csv").substr(0, 22), "z,W_re,W_im,V_re,V_im\n");
    EXPECT_TRUE(fs::exists(dir / "eigenpair_Z10_n4096.bin"));
    // Second run loads the cache and reports the same pair.
    ASSERT_EQ(run_scenario(c, dir), 0);
    EXPECT_EQ(report(dir)["result"].dump(), r.dump());
}

TEST(Runner, InstabilityDefaultIsUnstable) {
    const auto dir = fresh_dir("instability");
    const auto c = parse_config("", Command::instability);
    ASSERT_EQ(run_scenario(c, dir), 0);
    const auto r = report(dir);
    EXPECT_EQ(r["result"]["verdict"], "unstable");
    EXPECT_EQ(slurp(dir / "growth.csv").substr(0, 21), "eps,t,norm,sigma_fit\n");
    EXPECT_TRUE(r["result"]["growth_report"]["remainder_exponents"]["p_t4"].is_null());
}

TEST(Runner, TransformAndOutflowChecks) {
    const auto dir = fresh_dir("checks");
    auto t = parse_config("[run]\nsamples = 2\n", Command::transform_check);
    ASSERT_EQ(run_scenario(t, dir / "t"), 0);
    EXPECT_GE(report(dir / "t")["result"]["min_error_ratio"].get<double>(), 3.5);
    EXPECT_EQ(slurp(dir / "t" / "transform.csv").substr(0, 29), "seed,nx,ny,error,divergence\n1");
    auto o = parse_config("[grid]\nnx = 64\n[run]\nT = 0.5\n[outflow]\nmode = \"evolved\"\nU0 = 0.5\n",
                          Command::outflow_check);
    ASSERT_EQ(run_scenario(o, dir / "o"), 0);
    EXPECT_GE(report(dir / "o")["result"]["min_ratio"].get<double>(), 3.5);
}
