// Runs the hir executable end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "hir/image_io.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("hir_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Exit status of `hir <args>`, output captured in dir_/log.txt.
    int run(const std::string& args) {
        const std::string cmd = std::string(HIR_CLI_PATH) + " " + args + " > " + (dir_ / "log.txt").string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string log() const { return slurp(dir_ / "log.txt"); }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    // Three classes with two 24x24 images each; one class stored as CSV.
    fs::path make_dataset() {
        const fs::path root = dir_ / "data";
        std::mt19937 rng(7);
        std::uniform_int_distribution<int> px(0, 255);
        for (const std::string cls : {"circle", "square", "zigzag"}) {
            fs::create_directories(root / cls);
            for (int i = 0; i < 2; ++i) {
                hir::Grid<double> g(24, 24);
                for (auto& v : g.values()) v = px(rng);
                if (cls == "zigzag") {
                    hir::write_csv_grid(root / cls / ("img" + std::to_string(i) + ".csv"), g);
                } else {
                    hir::write_pgm(root / cls / ("img" + std::to_string(i) + ".pgm"), g);
                }
            }
        }
        return root;
    }

    fs::path dir_;
};

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_F(Cli, ExtractWritesOneRowPerImage) {
    const fs::path data = make_dataset();
    const fs::path out = dir_ / "features.csv";
    ASSERT_EQ(run("extract --input " + q(data) + " --output " + q(out) + " --depth 1 --scale 3"), 0) << log();
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "id,n0_b0,n1_b0,n2_b0");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
    }
    EXPECT_EQ(rows, 6);
    const auto cfg = nlohmann::json::parse(slurp(dir_ / "features.csv.config.json"));
    EXPECT_EQ(cfg["depth"], 1);
    EXPECT_EQ(cfg["scale"]["w"], 3.0);
}

TEST_F(Cli, ExtractIsDeterministic) {
    const fs::path data = make_dataset();
    const std::string flags = " --depth 2 --scale 3 --bands 6:3";
    ASSERT_EQ(run("extract --input " + q(data) + " --output " + q(dir_ / "a.csv") + flags), 0) << log();
    ASSERT_EQ(run("extract --input " + q(data) + " --output " + q(dir_ / "b.csv") + flags + " --conv direct"), 0);
    ASSERT_EQ(run("extract --input " + q(data) + " --output " + q(dir_ / "c.csv") + flags), 0);
    EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "c.csv"));
    const hir::FeatureMatrix fft = hir::read_features_csv(dir_ / "a.csv");
    const hir::FeatureMatrix direct = hir::read_features_csv(dir_ / "b.csv");
    ASSERT_TRUE(fft.values.same_shape(direct.values));
    for (std::size_t k = 0; k < fft.values.size(); ++k) {
        EXPECT_NEAR(fft.values.values()[k], direct.values.values()[k], 1e-7 * fft.values.values()[k]);
    }
}

TEST_F(Cli, ConfigFileAndFlagOverride) {
    const fs::path data = make_dataset();
    std::ofstream(dir_ / "run.json") << R"({"depth": 3, "scale": {"mode": "single", "w": 2}, "bands": {"K": 4, "num_bands": 2}})";
    ASSERT_EQ(run("extract --config " + q(dir_ / "run.json") + " --depth 1 --input " + q(data) + " --output " +
                  q(dir_ / "f.csv")),
              0)
        << log();
    std::ifstream in(dir_ / "f.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "id,n0_b0,n0_b1,n1_b0,n1_b1,n2_b0,n2_b1");
}

TEST_F(Cli, ClassifyAndSelect) {
    const fs::path data = make_dataset();
    ASSERT_EQ(run("extract --input " + q(data) + " --output " + q(dir_ / "f.csv") + " --depth 2 --scale 3"), 0);
    ASSERT_EQ(run("classify --input " + q(dir_ / "f.csv") + " --output " + q(dir_ / "m.json") +
                  " --train-ratio 0.5 --classifier centroid --depth 2 --scale 3"),
              0)
        << log();
    const auto m = nlohmann::json::parse(slurp(dir_ / "m.json"));
    EXPECT_EQ(m["test_size"], 3);
    EXPECT_TRUE(m["metrics"].contains("f1"));

    // keeping every feature leaves the network untouched
    ASSERT_EQ(run("select --input " + q(dir_ / "f.csv") + " --output " + q(dir_ / "s.json") + " --depth 2 --scale 3"), 0)
        << log();
    ASSERT_EQ(run("build --output " + q(dir_ / "net.json") + " --depth 2 --scale 3"), 0);
    EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "s.json.network.json")),
              nlohmann::json::parse(slurp(dir_ / "net.json")));
    EXPECT_TRUE(fs::exists(dir_ / "s.json.scores.csv"));

    ASSERT_EQ(run("select --input " + q(dir_ / "f.csv") + " --output " + q(dir_ / "s2.json") +
                  " --depth 2 --scale 3 --select-k 2"),
              0);
    const auto s2 = nlohmann::json::parse(slurp(dir_ / "s2.json"));
    EXPECT_EQ(s2["selected_k"], 2);
    EXPECT_LE(s2["surviving_node_ids"].size(), 2u);
}

TEST_F(Cli, VerifyPassesAndDetectsAFault) {
    const std::string flags = " --depth 2 --scale 3 --bands 4:2";
    ASSERT_EQ(run("verify --output " + q(dir_ / "v.json") + flags), 0) << log();
    const auto report = nlohmann::json::parse(slurp(dir_ / "v.json"));
    EXPECT_TRUE(report["failures"].empty());
    EXPECT_EQ(report["images"], 20);

    EXPECT_EQ(run("verify --inject-fault kernel-cache --output " + q(dir_ / "bad.json") + flags), 2) << log();
    const auto bad = nlohmann::json::parse(slurp(dir_ / "bad.json"));
    EXPECT_FALSE(bad["failures"].empty());
    EXPECT_NE(log().find("invariant violated"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("build --depth 9"), 1);
    EXPECT_EQ(run("build --conv winograd"), 1);
    EXPECT_EQ(run("build --scale 4 --scales 1:2"), 1);
    EXPECT_EQ(run("extract --output x.csv"), 1);
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("extract --input " + q(dir_ / "nothing") + " --output " + q(dir_ / "o.csv")), 3);
    EXPECT_EQ(run("classify --input " + q(dir_ / "missing.csv")), 3);
    EXPECT_EQ(run("build"), 0);
    EXPECT_NE(log().find("\"max_level\": 6"), std::string::npos);
}
