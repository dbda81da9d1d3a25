#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "geoflow/experiments.hpp"

using namespace geoflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

/// Every file in a and b, compared byte for byte.
void expect_same_tree(const fs::path& a, const fs::path& b) {
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto other = b / entry.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
        ++files;
    }
    EXPECT_EQ(files, static_cast<std::size_t>(std::distance(fs::directory_iterator(b), fs::directory_iterator{})));
    EXPECT_GT(files, 0u);
}

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("geoflow_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(d);
    return d;
}

ExperimentResult run_config(const std::string& text, unsigned threads = 1) {
    return execute(plan_run(Config::parse(text, "inline"), Parallelism{threads}));
}

} // namespace

TEST(Registry, NineExperimentsInStableOrder) {
    const std::vector<std::string> expected{"core_equidistribution_n2", "core_equidistribution_n3", "torus_sweep",
                                            "w_invariance", "nondivergence_sweep", "rep_verification",
                                            "good_function", "degenerate_picard", "haar_calibration"};
    ASSERT_EQ(registry().size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(registry()[i].name, expected[i]);
        EXPECT_FALSE(registry()[i].description.empty());
        EXPECT_FALSE(registry()[i].exercises.empty());
    }
    EXPECT_EQ(&find_experiment("torus_sweep"), &registry()[2]);
    EXPECT_THROW(find_experiment("nope"), InvalidInput);
}

TEST(Report, FormatDoubleRoundTrips) {
    for (double v : {0.1, 1.0 / 3, 1e-300, 123456789.125, -2.5, 0.0}) EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Report, PassFlagFollowsComparison) {
    using C = ReportRow::Compare;
    EXPECT_TRUE(ReportRow::check("e", "p", "s", 1.0, 0, C::AtMost, 1.0).pass);
    EXPECT_FALSE(ReportRow::check("e", "p", "s", 1.0, 0, C::Below, 1.0).pass);
    EXPECT_TRUE(ReportRow::check("e", "p", "s", 1.0, 0, C::AtLeast, 1.0).pass);
    EXPECT_FALSE(ReportRow::check("e", "p", "s", 1.0, 0, C::Above, 1.0).pass);
    EXPECT_TRUE(ReportRow::check("e", "p", "s", 0.0, 0, C::Equal, 0.0).pass);
    EXPECT_FALSE(ReportRow::check("e", "p", "s", std::nan(""), 0, C::AtMost, 1.0).pass);
}

TEST(Report, CsvQuotingAndWidth) {
    Table t{"demo", {"a", "b"}, {}};
    t.add({1.5, std::string("x,y")});
    t.add({std::int64_t{3}, std::string("say \"hi\"")});
    EXPECT_THROW(t.add({1.0}), InvalidInput);
    std::ostringstream out;
    write_table(t, out);
    EXPECT_EQ(out.str(), "a,b\n1.5,\"x,y\"\n3,\"say \"\"hi\"\"\"\n");
}

TEST(Report, SummarySchema) {
    ExperimentResult r;
    r.experiment = "demo";
    r.seed = 4;
    r.check("t=1", "stat", 0.5, 0.1, ReportRow::Compare::Below, 1.0);
    r.details["k"] = 1;
    const auto j = summary_json(r);
    EXPECT_EQ(j["experiment"], "demo");
    EXPECT_EQ(j["seed"], 4);
    EXPECT_EQ(j["pass"], true);
    ASSERT_EQ(j["checks"].size(), 1u);
    EXPECT_EQ(j["checks"][0]["compare"], "<");
    EXPECT_EQ(j["checks"][0]["bound"], 1.0);
    EXPECT_EQ(j["details"]["k"], 1);
    r.check("t=2", "stat", 2.0, 0.1, ReportRow::Compare::Below, 1.0);
    EXPECT_FALSE(summary_json(r)["pass"]);
}

TEST(Execute, ModuleErrorsGetExperimentContext) {
    RunPlan plan{&registry()[0], "", [] () -> ExperimentResult { throw InvalidInput("boom"); }};
    try {
        execute(plan);
        FAIL() << "expected ExperimentError";
    } catch (const ExperimentError& e) {
        EXPECT_NE(std::string(e.what()).find("core_equidistribution_n2"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
    }
}

TEST(Experiments, RepVerificationReportsDetCheck) {
    const auto r = run_config("[experiment]\nname = rep_verification\n[run]\ntrials = 500\nlemma_m_max = 4\n");
    EXPECT_TRUE(r.pass());
    ASSERT_TRUE(r.details.contains("det"));
    EXPECT_EQ(r.details["det_check"], "pass");
    EXPECT_EQ(r.details["det"].size(), 12u * 8u);
    for (const auto& d : r.details["det"]) EXPECT_EQ(d["det_check"], "pass");
}

TEST(Experiments, ImpossibleToleranceFails) {
    const auto r = run_config("[experiment]\nname = good_function\n[run]\ndegrees = 1\n[tolerances]\nalpha_factor = 3\n");
    EXPECT_FALSE(r.pass());
}

TEST(Experiments, ByteIdenticalReruns) {
    const std::string text = "[experiment]\nname = core_equidistribution_n2\n[run]\ncount = 20000\nt = 2 6 10\n"
                             "check_t = 10\nreference_count = 50000\nsampling = random\n[output]\nsamples = true\n";
    const auto a = scratch_dir("a"), b = scratch_dir("b");
    write_result(run_config(text, 1), a);
    write_result(run_config(text, 3), b);
    expect_same_tree(a, b);
    EXPECT_TRUE(fs::exists(a / "core_equidistribution_n2_summary.json"));
    EXPECT_TRUE(fs::exists(a / "core_equidistribution_n2_report.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Experiments, SeedChangesOutput) {
    const std::string text = "[experiment]\nname = core_equidistribution_n2\n[run]\ncount = 5000\nt = 4\n"
                             "check_t = 4\nreference_count = 5000\nsampling = random\nseed = ";
    const auto a = run_config(text + "1\n"), b = run_config(text + "2\n");
    EXPECT_NE(a.rows.front().value, b.rows.front().value);
}

TEST(Experiments, TorusWritesPlotTables) {
    const auto r = run_config("[experiment]\nname = torus_sweep\n[run]\nalpha = 0 20 80\n");
    EXPECT_TRUE(r.pass());
    std::vector<std::string> names;
    for (const auto& t : r.tables) names.push_back(t.name);
    EXPECT_NE(std::find(names.begin(), names.end(), "plot"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "coefficients"), names.end());
}
