#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Outcome {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;

    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / (std::string("cylcm_cli_") + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    Outcome run(const std::string& args) {
        std::string cmd = "cd '" + dir.string() + "' && CYLCM_PRESETS='" CYLCM_PRESETS "' '" CYLCM_BIN "' " + args +
                          " > stdout.txt 2> stderr.txt";
        int st = std::system(cmd.c_str());
        Outcome r;
        r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
        r.out = slurp(dir / "stdout.txt");
        r.err = slurp(dir / "stderr.txt");
        return r;
    }

    Json report(const std::string& args) {
        auto r = run(args);
        EXPECT_EQ(r.code, 0) << r.err;
        return Json::parse(r.out);
    }
};

// Smallest positive root of rho tan rho = beta, by bisection.
double rho_tan_root(double beta) {
    double lo = 0.0, hi = std::numbers::pi / 2;
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (lo + hi);
        (m * std::tan(m) > beta ? hi : lo) = m;
    }
    return 0.5 * (lo + hi);
}

// <cos^2, cos> / <cos, cos> on (0, 1) by composite Simpson.
double sigma_oracle(double rho) {
    const int n = 4000;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        double y = double(i) / n, w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2), c = std::cos(rho * y);
        num += w * c * c * c;
        den += w * c * c;
    }
    return num / den;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_F(Cli, HomogeneousWaterwaveReport) {
    auto j = report("waterwave --preset homogeneous --eps 0.01");
    const auto& k = j["results"]["coefficients"];
    EXPECT_EQ(k["lambda1_sq"]["exact"], "243/16");
    EXPECT_EQ(k["a1"]["exact"], "-2");
    EXPECT_EQ(j["application"], "waterwave");
    EXPECT_TRUE(j.contains("config_hash"));
    EXPECT_TRUE(j.contains("tolerances"));
    const auto& run0 = j["results"]["runs"][0];
    EXPECT_EQ(run0["monotonicity"]["verdict"], "decreasing");
    EXPECT_NEAR(run0["eye"]["half_width"].get<double>(), run0["eye"]["half_width_asymptotic"].get<double>(), 1e-12);
}

TEST_F(Cli, FkppFrontEndpoints) {
    auto r = run("fkpp --beta 1 --lambda1 3 --eps 0.05 --out o");
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = read_csv(dir / "o" / "front_eps0.05.csv");
    ASSERT_GT(rows.size(), 10u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"X", "x", "V", "W", "A"}));
    double sigma = sigma_oracle(rho_tan_root(1.0));
    EXPECT_NEAR(std::stod(rows[1][2]), 1.0 / sigma, 1e-6);
    EXPECT_NEAR(std::stod(rows.back()[2]), 0.0, 1e-7);
    // V is monotone along the front.
    for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_LT(std::stod(rows[i][2]), std::stod(rows[i - 1][2]));
}

TEST_F(Cli, GenericConjugateSlopes) {
    auto j = report("conjugate --rho 25/52 --omega -9/10");
    const auto& s = j["results"]["series"];
    EXPECT_EQ(s["hp1"]["exact"], "-179/725");
    EXPECT_EQ(s["c1"]["exact"], "-6/29");
    EXPECT_EQ(j["results"]["base"]["h0"]["exact"], "2/3");
    EXPECT_EQ(j["results"]["base"]["c0"]["exact"], "1/2");
}

TEST_F(Cli, BitIdenticalReports) {
    auto a = run("waterwave --preset generic --out a");
    auto b = run("waterwave --preset generic --out b");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(slurp(dir / "a" / "report.json"), a.out);
    for (const auto& e : fs::directory_iterator(dir / "a"))
        EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / e.path().filename())) << e.path().filename();
}

TEST_F(Cli, FormatFilter) {
    ASSERT_EQ(run("conjugate --preset generic --out o --format csv").code, 0);
    bool csv = false;
    for (const auto& e : fs::directory_iterator(dir / "o")) {
        EXPECT_NE(e.path().extension(), ".svg");
        EXPECT_NE(e.path().extension(), ".json");
        csv = csv || e.path().extension() == ".csv";
    }
    EXPECT_TRUE(csv);
    EXPECT_EQ(run("conjugate --preset generic --format pdf").code, 2);
}

TEST_F(Cli, ConfigFileAndOverrides) {
    std::ofstream(dir / "c.ini") << "[run]\napplication = conjugate\n\n[water]\nrho = 25/52\nomega = -9/10\n";
    auto j = report("conjugate --config c.ini");
    EXPECT_EQ(j["results"]["series"]["hp1"]["exact"], "-179/725");
    auto j2 = report("conjugate --config c.ini --rho 1 --omega -9");
    EXPECT_EQ(j2["results"]["series"]["hp1"]["exact"], "-1");
    EXPECT_NE(j["config_hash"], j2["config_hash"]);
}

TEST_F(Cli, ConfigErrors) {
    std::ofstream(dir / "bad.ini") << "[water]\nrho = 1\nomega = -9\nbogus = 3\n";
    EXPECT_EQ(run("waterwave --config bad.ini").code, 2);
    std::ofstream(dir / "wrong.ini") << "[fkpp]\nbeta = 1\n";
    EXPECT_EQ(run("waterwave --config wrong.ini --rho 1 --omega -9").code, 2);
    EXPECT_EQ(run("waterwave --preset nosuch").code, 2);
    EXPECT_EQ(run("waterwave --omega -9").code, 2);
    EXPECT_EQ(run("waterwave --preset homogeneous --bogus").code, 2);
    EXPECT_EQ(run("spectrum --grid 15").code, 2);
    EXPECT_EQ(run("conjugate --rho 1/0 --omega 1").code, 2);
    EXPECT_EQ(run("").code, 2);
}

TEST_F(Cli, PreconditionFailureIsStructured) {
    auto r = run("waterwave --rho 1 --omega 0 --h0 1/2 --c0 1/2");
    EXPECT_EQ(r.code, 3);
    auto d = Json::parse(r.err);
    EXPECT_EQ(d["application"], "waterwave");
    EXPECT_TRUE(d.contains("error"));
    EXPECT_TRUE(d.contains("message"));
}

TEST_F(Cli, VerifyEmptyEpsList) {
    auto r = run("verify --eps ''");
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("nothing to verify"), std::string::npos);
}

TEST_F(Cli, VerifyDefaultsPass) {
    auto r = run("verify --out v");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = Json::parse(slurp(dir / "v" / "verify.json"));
    std::size_t n = 0;
    std::function<void(const Json&)> walk = [&](const Json& x) {
        if (x.is_object() && x.contains("pass") && x.contains("id")) {
            EXPECT_TRUE(x["pass"].get<bool>()) << x.dump();
            ++n;
        }
        if (x.is_structured())
            for (const auto& c : x) walk(c);
    };
    walk(j);
    EXPECT_EQ(n, 12u);
}

TEST_F(Cli, VerifyFaultInjectionFailsConjugateChecks) {
    auto r = run("verify --inject-dyn-fault 1/1000");
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("FAIL"), std::string::npos);
    EXPECT_NE(r.err.find("PASS"), std::string::npos);
}

TEST_F(Cli, SpectrumAndElasticityArtifacts) {
    ASSERT_EQ(run("spectrum --preset spectrum_elasticity --out s").code, 0);
    EXPECT_TRUE(fs::exists(dir / "s" / "eigenpairs.csv"));
    EXPECT_TRUE(fs::exists(dir / "s" / "eigenpairs.svg"));
    auto r = run("elasticity --preset elasticity_front --out e");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "e" / "psi_table.json"));
    auto svg = slurp(dir / "s" / "eigenpairs.svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}
