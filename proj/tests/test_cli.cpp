#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

int run(const std::string& args) {
    const std::string cmd = std::string(VICIOUS_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::path(::testing::TempDir()) / ("vicious_cli_" + name);
    fs::remove(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(slurp(p));
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST(Cli, TracyWidomTableHasBothRoutes) {
    auto out = scratch("tw.csv");
    ASSERT_EQ(run("tw-f1 --s-min -6 --s-max 4 --step 0.1 -o " + out.string()), 0);
    auto rows = read_csv(out);
    ASSERT_EQ(rows.size(), 102u);
    EXPECT_EQ(rows[0].back(), "discrepancy");
    double worst = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) worst = std::max(worst, std::stod(rows[i].back()));
    EXPECT_LE(worst, 1e-6);
    EXPECT_DOUBLE_EQ(std::stod(rows[1][0]), -6.0);
    EXPECT_DOUBLE_EQ(std::stod(rows.back()[0]), 4.0);
}

TEST(Cli, MarginalReportsTailCoefficient) {
    auto out = scratch("marginal.json");
    ASSERT_EQ(run("marginal --w-max 4 --format json -o " + out.string()), 0);
    json doc = read_json(out);
    EXPECT_EQ(doc["schema"], 1);
    const double ratio = doc["summary"]["tail_coefficient"].get<double>() * 12;
    EXPECT_GE(ratio, 0.85);
    EXPECT_LE(ratio, 1.15);
    EXPECT_TRUE(doc["provenance"].contains("P_w"));
}

TEST(Cli, ValidateWritesReportAndSignalsFailure) {
    auto pass = scratch("validate_pass.json"), fail = scratch("validate_fail.json");
    ASSERT_EQ(run("validate --criteria 1 2 10 -o " + pass.string()), 0);
    json doc = read_json(pass);
    EXPECT_EQ(doc["schema"], 1);
    ASSERT_EQ(doc["rows"].size(), 3u);
    for (const auto& row : doc["rows"]) EXPECT_TRUE(row[2].get<bool>());
    // the Plancherel-Rotach clause of criterion 9 does not hold at M = 15
    ASSERT_EQ(run("validate --criteria 9 -o " + fail.string()), 3);
    EXPECT_FALSE(read_json(fail)["rows"][0][2].get<bool>());
}

TEST(Cli, UsageErrorsLeaveNoOutput) {
    auto out = scratch("bad.csv");
    EXPECT_EQ(run("tw-f1 --step -0.1 -o " + out.string()), 1);
    EXPECT_EQ(run("finite-n -n 65 -o " + out.string()), 1);
    EXPECT_EQ(run("ldev --c-max 2 -o " + out.string()), 1);
    EXPECT_EQ(run("mc --steps 100 -o " + out.string()), 1);
    EXPECT_EQ(run("jpdf --s-step 0.015 -o " + out.string()), 1);
    EXPECT_EQ(run("no-such-command"), 1);
    EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, ComputationFailuresLeaveNoOutput) {
    auto out = scratch("failed.csv"), dump = scratch("failed.vmcs");
    EXPECT_EQ(run("mc -n 2 --mode rejection --min-acceptance 0.5 --samples 10 --dump " + dump.string() + " -o " +
                  out.string()),
              2);
    EXPECT_EQ(run("tw-f1 --s-min -12 --s-max -11 --step 0.5 -o " + out.string()), 2);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_FALSE(fs::exists(dump));
    EXPECT_FALSE(fs::exists(out.string() + ".partial"));
}

TEST(Cli, OutputsAreDeterministic) {
    auto a = scratch("mc_a.json"), b = scratch("mc_b.json"), dump = scratch("mc.vmcs");
    const std::string args = "mc -n 1 --samples 500 --seed 9 --format json --threads 2 --dump " + dump.string();
    ASSERT_EQ(run(args + " -o " + a.string()), 0);
    ASSERT_EQ(run(args + " -o " + b.string()), 0);
    json ja = read_json(a), jb = read_json(b);
    ja.erase("generated_at");
    jb.erase("generated_at");
    EXPECT_EQ(ja, jb);
    EXPECT_EQ(ja["summary"]["seed"], 9);
    EXPECT_TRUE(fs::exists(dump));

    auto c = scratch("ldev_a.csv"), d = scratch("ldev_b.csv");
    ASSERT_EQ(run("ldev -o " + c.string()), 0);
    ASSERT_EQ(run("ldev -o " + d.string()), 0);
    EXPECT_EQ(slurp(c), slurp(d));
}

TEST(Cli, FiniteNTables) {
    auto cdf = scratch("cdf.csv"), conv = scratch("conv.json");
    ASSERT_EQ(run("finite-n -n 2 --quantity cdf --M-min 1 --M-max 4 --M-step 1 -o " + cdf.string()), 0);
    auto rows = read_csv(cdf);
    ASSERT_EQ(rows.size(), 5u);
    for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_GT(std::stod(rows[i][1]), std::stod(rows[i - 1][1]));
    ASSERT_EQ(run("finite-n -n 8 --quantity convergence --format json -o " + conv.string()), 0);
    json doc = read_json(conv);
    EXPECT_GT(doc["summary"]["sup_distance"].get<double>(), 0.0);
    EXPECT_LE(doc["summary"]["sup_distance"].get<double>(), 0.2);
}

TEST(Cli, CsvQuotesFieldsWithSeparators) {
    auto out = scratch("validate.csv");
    ASSERT_EQ(run("validate --criteria 9 --format csv -o " + out.string()), 3);
    const std::string text = slurp(out);
    EXPECT_EQ(text.substr(0, text.find("\r\n")), "id,title,passed,seconds,detail");
    EXPECT_NE(text.find(",\"G vs Hermite form, u=0, M=8"), std::string::npos);
}
