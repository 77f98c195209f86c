#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "crvpinn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = crvpinn::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

/// CSV text with the trailing elapsed_ms column removed from every line.
std::string without_elapsed(const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("crvpinn_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string sub(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, TrainWritesArtifactsDeterministically) {
    const std::vector<std::string> base = {"train", "--problem", "laplace-sinsin", "--n", "32", "--iters", "100",
                                           "--seed", "0", "--layers", "1", "--width", "10", "--quiet"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", sub("a"), "--svg"});
    b.insert(b.end(), {"--out", sub("b")});
    const CliRun ra = invoke(a);
    ASSERT_EQ(ra.code, 0) << ra.err;
    ASSERT_EQ(invoke(b).code, 0);
    for (auto f : {"records.csv", "manifest.json", "checkpoint.bin", "convergence.svg"}) {
        EXPECT_TRUE(fs::exists(dir_ / "a" / f)) << f;
    }
    const std::string csv = slurp(dir_ / "a" / "records.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 101);
    EXPECT_EQ(without_elapsed(csv), without_elapsed(slurp(dir_ / "b" / "records.csv")));
    EXPECT_EQ(slurp(dir_ / "a" / "checkpoint.bin"), slurp(dir_ / "b" / "checkpoint.bin"));
    const auto j = nlohmann::json::parse(slurp(dir_ / "a" / "manifest.json"));
    EXPECT_EQ(j["command"], "train");
    EXPECT_EQ(j["config"]["n"], 32);
    EXPECT_NE(slurp(dir_ / "a" / "convergence.svg").find("<svg"), std::string::npos);
}

TEST_F(CliTest, SeedFallsBackToEnvironment) {
    ::setenv("CRVPINN_SEED", "17", 1);
    const CliRun r = invoke({"train", "--n", "6", "--iters", "2", "--layers", "1", "--width", "4", "--quiet", "--out",
                       sub("env")});
    ::unsetenv("CRVPINN_SEED");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "env" / "manifest.json"))["seed"], 17);
}

TEST_F(CliTest, BadInputsExitTwo) {
    const CliRun bogus = invoke({"train", "--problem", "bogus", "--out", sub("x")});
    EXPECT_EQ(bogus.code, 2);
    EXPECT_NE(bogus.err.find("laplace-sinsin"), std::string::npos);
    EXPECT_NE(bogus.err.find("stokes"), std::string::npos);
    EXPECT_EQ(invoke({"train", "--frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"train", "--n", "abc"}).code, 2);
    EXPECT_EQ(invoke({"train", "--loss", "l2", "--out", sub("y")}).code, 2);
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"export-gram", "--format", "csv", "--out", sub("z")}).code, 2);
    EXPECT_EQ(invoke({"infsup", "--n", "40", "--out", sub("w")}).code, 2);
}

TEST_F(CliTest, DivergentTrainingExitsOneWithIteration) {
    const CliRun r = invoke({"train", "--n", "6", "--iters", "50", "--lr", "1e200", "--layers", "1", "--width", "4",
                       "--quiet", "--out", sub("div")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("iteration"), std::string::npos);
}

TEST_F(CliTest, LemmasPassFailAndVacuous) {
    const CliRun ok = invoke({"lemmas", "--out", sub("l")});
    EXPECT_EQ(ok.code, 0) << ok.out;
    EXPECT_EQ(std::count(ok.out.begin(), ok.out.end(), '\n'), 12);
    EXPECT_TRUE(fs::exists(dir_ / "l" / "manifest.json"));
    const CliRun bug = invoke({"lemmas", "--n", "8", "--inject-bug", "--seed", "5", "--out", sub("b")});
    EXPECT_EQ(bug.code, 1);
    EXPECT_NE(bug.out.find("FAIL integration-by-parts-x"), std::string::npos);
    EXPECT_NE(bug.out.find("u_seed=5"), std::string::npos);
    const CliRun zero = invoke({"lemmas", "--trials", "0", "--out", sub("z")});
    EXPECT_EQ(zero.code, 0);
    EXPECT_NE(zero.err.find("warning"), std::string::npos);
}

TEST_F(CliTest, ExportGramMatrixMarket) {
    const CliRun r = invoke({"export-gram", "--problem", "laplace-sinsin", "--n", "4", "--format", "mtx", "--out", sub("g")});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string mtx = slurp(dir_ / "g" / "gram_laplace-sinsin_n4.mtx");
    std::istringstream in(mtx);
    std::string header, size;
    std::getline(in, header);
    std::getline(in, size);
    EXPECT_EQ(header, "%%MatrixMarket matrix coordinate real general");
    EXPECT_EQ(size, "9 9 33");
    EXPECT_TRUE(fs::exists(dir_ / "g" / "manifest.json"));
}

TEST_F(CliTest, InfSupTableAndCsv) {
    const CliRun r = invoke({"infsup", "--n", "4,8", "--out", sub("i")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("0.127595"), std::string::npos);
    const std::string csv = slurp(dir_ / "i" / "infsup.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST_F(CliTest, BenchPrintsRatio) {
    const CliRun r = invoke({"bench", "--problem", "laplace-sinsin", "--n", "8", "--iters", "2", "--layers", "1", "--width",
                       "4", "--out", sub("bn")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("ratio crvpinn/pinn"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "bn" / "bench.csv"));
}
