#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "oracles.hpp"
#include "qapkit/json_io.hpp"

#ifndef QAPKIT_CLI_PATH
#define QAPKIT_CLI_PATH "qapkit"
#endif

using namespace qapkit;

namespace {
struct RunResult {
    int exit_code = -1;
    std::string out;
};

/// Runs the CLI with the given arguments (shell syntax), capturing stdout.
RunResult run(const std::string &args, const std::string &env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" + QAPKIT_CLI_PATH + "' " + args + " 2>/dev/null";
    RunResult r;
    FILE *f = popen(cmd.c_str(), "r");
    if (!f) return r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
    const int st = pclose(f);
    r.exit_code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string data(const std::string &name) { return std::string(QAPKIT_DATA_DIR) + "/" + name; }

std::filesystem::path temp_file(const std::string &name) {
    return std::filesystem::temp_directory_path() / ("qapkit_cli_test_" + std::to_string(::getpid()) + "_" + name);
}
}  // namespace

TEST(Cli, EnumerateCounts) {
    auto r = run("--p 2 enumerate --order 2");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("count=35"), std::string::npos);
    auto j = run("--p 2 --format json enumerate --order 2");
    ASSERT_EQ(j.exit_code, 0);
    EXPECT_EQ(Json::parse(j.out)["count"], 35);
    auto c = run("--p 2 --format json enumerate --order 2 --cartan-only");
    EXPECT_EQ(Json::parse(c.out)["count"], 15);
    auto id = run("--p 3 --format json enumerate --order 6");
    EXPECT_EQ(Json::parse(id.out)["count"], 1);
}

TEST(Cli, QapTablesMatchLibrary) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    auto P = build_qap(C, C);
    auto r = run("--p 3 qap --rank 0 --intrinsic");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out, render_quotient_table(*P, false));
    // Every table renders to text that parses back to the JSON output.
    for (const std::string args :
         {"qap --rank 1 --intrinsic", "qap --rank 1 --intrinsic --coquotient '100|000'",
          "qap --rank 1 --intrinsic --coquotient '100|100' --merge crossing --lambda", "decompose --rank 0 --type all",
          "decompose --mn 5,3", "sequence --length 4 --rank 1", "roots --kind D --rank 4 --verify",
          "enumerate --order 4 --abelian-only"}) {
        auto text = run("--p 3 " + args);
        auto json = run("--p 3 --format json " + args);
        ASSERT_EQ(text.exit_code, 0) << args;
        ASSERT_EQ(json.exit_code, 0) << args;
        EXPECT_EQ(parse_table_text(text.out), Json::parse(json.out)) << args;
    }
}

TEST(Cli, FixturesAndCorruption) {
    std::string args = "--p 3 verify --fixtures-only";
    for (const char *f : {"su8_rank0_intrinsic.json", "su8_rank1_intrinsic.json", "su8_rank1_cartan3_coquotient.json"})
        args += " --fixture " + data(f);
    auto r = run(args);
    EXPECT_EQ(r.exit_code, 0) << r.out;

    auto j = oracle::load_json(data("su8_rank1_intrinsic.json"));
    for (auto &row : j["rows"]) {
        if (row["W"].size() >= 1 && row["W_hat"].size() >= 1) {
            std::swap(row["W"][0], row["W_hat"][0]);
            break;
        }
    }
    auto path = temp_file("corrupt.json");
    std::ofstream(path) << j.dump(1);
    auto bad = run("--p 3 verify --fixtures-only --fixture " + path.string());
    EXPECT_EQ(bad.exit_code, 1);
    EXPECT_NE(bad.out.find("failure"), std::string::npos);
    std::filesystem::remove(path);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("--p 2 enumerate --order 1").exit_code, 0);
    EXPECT_EQ(run("--p 2 enumerate").exit_code, 2);                // missing --order
    EXPECT_EQ(run("--p 9 enumerate --order 1").exit_code, 2);       // p out of range
    EXPECT_EQ(run("--p 2 bogus").exit_code, 2);                     // unknown subcommand
    EXPECT_EQ(run("--p 3 roots --kind F --rank 4").exit_code, 2);   // unsupported system
    EXPECT_EQ(run("--p 3 roots --kind B --rank 2").exit_code, 2);   // rank error
    EXPECT_EQ(run("--p 3 sequence --length 9").exit_code, 2);       // bound violation
    EXPECT_EQ(run("--p 3 roots --kind A --rank 3 --verify --corrupt 0,5").exit_code, 1);
    EXPECT_EQ(run("--p 3 kak --type AIII --mn 4,3").exit_code, 2);
    EXPECT_EQ(run("--p 2 verify", "QAPKIT_THREADS=0").exit_code, 2);
    auto j = run("--p 9 --format json enumerate --order 1");
    EXPECT_EQ(Json::parse(j.out)["exit"], 2);
    EXPECT_EQ(run("--help").exit_code, 0);
}

TEST(Cli, VerifySmallIsFastAndPasses) {
    auto t0 = std::chrono::steady_clock::now();
    auto r = run("--p 2 verify");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_EQ(r.exit_code, 0) << r.out;
    EXPECT_NE(r.out.find("result: pass"), std::string::npos);
    EXPECT_LT(secs, 10.0);
}

TEST(Cli, DeterministicAcrossRunsThreadsAndBackends) {
    for (const std::string args :
         {"--p 3 --seed 4 kak --type AII --format json", "--p 3 --seed 4 --format json kak --type AII --matrices",
          "--p 3 --seed 5 verify --samples 200", "--p 3 decompose --rank 1 --type AIII",
          "--p 3 --format json sequence --length 4 --rank 1 --type AIII"}) {
        auto a = run(args), b = run(args);
        auto c = run(args, "QAPKIT_THREADS=1 QAPKIT_SIMD=scalar");
        EXPECT_EQ(a.out, b.out) << args;
        EXPECT_EQ(a.out, c.out) << args;
        EXPECT_EQ(a.exit_code, b.exit_code);
    }
}

TEST(Cli, KakFromFileAndSequence) {
    auto seq = run("--p 3 --format json sequence --length 3");
    ASSERT_EQ(seq.exit_code, 0);
    auto spath = temp_file("seq.json");
    std::ofstream(spath) << seq.out;
    auto k = run("--p 3 kak --sequence " + spath.string());
    EXPECT_EQ(k.exit_code, 0) << k.out;
    EXPECT_NE(k.out.find("result=pass"), std::string::npos);

    std::mt19937_64 rng(3);
    CMat U = haar_special_unitary(4, rng);
    auto mpath = temp_file("u.txt");
    {
        std::ofstream out(mpath);
        write_matrix(out, U);
    }
    auto r = run("--p 2 --format json kak --type AI --matrices --in " + mpath.string());
    ASSERT_EQ(r.exit_code, 0) << r.out;
    Json j = Json::parse(r.out);
    CMat K0 = matrix_from_json(j["K0"]), A = matrix_from_json(j["A"]), K1 = matrix_from_json(j["K1"]);
    EXPECT_LT((U - K0 * A * K1).norm(), 1e-8);
    std::filesystem::remove(spath);
    std::filesystem::remove(mpath);
}
