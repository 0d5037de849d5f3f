#include <gtest/gtest.h>

#include <sstream>

#include "metacog/cli/commands.hpp"
#include "metacog/cli/report.hpp"
#include "metacog/counts_io.hpp"
#include "metacog/csv.hpp"
#include "metacog/fit_report.hpp"
#include "metacog/harness/trial_log.hpp"
#include "mock_observer.hpp"
#include "test_util.hpp"

using namespace metacog;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> fields;
    std::size_t line = 0;
    while (read_csv_record(in, ',', fields, line, p.string())) rows.push_back(fields);
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
}

// A trial log whose records are given as (truth, decision, confidence).
void write_log(const std::filesystem::path& p, harness::RiskConfig risk,
               const std::vector<std::tuple<int, int, int>>& trials, const std::string& model = "m1") {
    harness::TrialLogHeader h;
    h.model_id = model;
    h.risk = risk;
    harness::TrialLogWriter w(p, h);
    std::int64_t id = 0;
    for (const auto& [truth, decision, conf] : trials) {
        harness::TrialRecord r;
        r.trial_id = id++;
        r.risk = risk;
        r.model_id = model;
        r.true_label = Stimulus(truth);
        r.decision = Stimulus(decision);
        r.confidence = conf;
        w.append(r);
    }
}

const std::vector<std::string> kFigS3 = {"--d-prime", "3.2", "--meta-d", "3", "--c", "0", "--t2-s1=-2,-1.5,-1,-0.5",
                                         "--t2-s2", "0.5,1,1.5,2"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace

TEST(Cli, SimulateWritesCountsAndSidecar) {
    testutil::TempDir dir("cli_sim");
    const auto csv = (dir / "s3.csv").string();
    const auto r = invoke(with({"simulate", "--n-trials", "10000", "--seed", "11", "--out", csv, "--json"}, kFigS3));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto side = json::parse(r.out);
    EXPECT_EQ(side.at("seed"), 11);
    EXPECT_EQ(side.at("spec").at("meta_d"), 3.0);
    EXPECT_EQ(side.at("options").at("n_trials"), 10000);
    EXPECT_TRUE(std::filesystem::exists(dir / "s3.sim.json"));
    EXPECT_EQ(read_counts_csv(std::filesystem::path(csv)).ratings->total(), 10000);
}

TEST(Cli, FitOfFigS3CountsRecoversMetaD) {
    testutil::TempDir dir("cli_fit");
    const auto csv = (dir / "s3.csv").string();
    ASSERT_EQ(invoke(with({"simulate", "--n-trials", "10000", "--seed", "3", "--out", csv}, kFigS3)).code, 0);
    const auto r = invoke({"fit", csv, "--out", (dir / "fit.json").string(), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j.at("meta_d").get<double>(), 3.0, 0.15);
    EXPECT_NEAR(j.at("d_prime").get<double>(), 3.2, 0.02);
    EXPECT_EQ(j, to_json(read_fit_report(dir / "fit.json")));
}

TEST(Cli, IdealObserverExpectedCountsGiveUnitRatio) {
    testutil::TempDir dir("cli_ideal");
    const auto csv = (dir / "ideal.csv").string();
    ASSERT_EQ(invoke({"simulate", "--d-prime", "1.7", "--c", "0.2", "--t2-s1=-1.2,-0.6", "--t2-s2", "0.8,1.4", "--expected",
                   "--n-trials", "10000", "--out", csv})
                  .code,
              0);
    const auto r = invoke({"fit", csv, "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out).at("m_ratio").get<double>(), 1.0, 0.02);
}

TEST(Cli, FitWithBootstrapStoresInterval) {
    testutil::TempDir dir("cli_boot");
    const auto csv = (dir / "c.csv").string();
    ASSERT_EQ(invoke({"simulate", "--d-prime", "2", "--meta-d", "1.5", "--t2-s1=-1,-0.5", "--t2-s2", "0.5,1", "--n-trials",
                   "3000", "--out", csv})
                  .code,
              0);
    const auto r = invoke({"fit", csv, "--bootstrap", "150", "--seed", "4", "--statistic", "m_ratio", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto ci = json::parse(r.out).at("ci");
    EXPECT_EQ(ci.at("statistic"), "m_ratio");
    EXPECT_EQ(ci.at("n_boot"), 150);
    EXPECT_EQ(ci.at("seed"), 4);
    EXPECT_LT(ci.at("low").get<double>(), ci.at("high").get<double>());
}

TEST(Cli, ExitCodes) {
    testutil::TempDir dir("cli_codes");
    testutil::write_file(dir / "bad.csv", "stimulus,response,confidence,count\nS1,S1,1,x\n");
    EXPECT_EQ(invoke({"fit", (dir / "bad.csv").string()}).code, cli::kExitInput);
    EXPECT_EQ(invoke({"fit", (dir / "missing.csv").string()}).code, cli::kExitInput);
    EXPECT_EQ(invoke({"fit"}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"simulate", "--d-prime", "1"}).code, cli::kExitUsage);
    EXPECT_EQ(invoke({"fit", "--help"}).code, cli::kExitOk);
    // An evaluation budget too small to converge still writes the report.
    const auto csv = (dir / "c.csv").string();
    ASSERT_EQ(invoke(with({"simulate", "--n-trials", "2000", "--out", csv}, kFigS3)).code, 0);
    testutil::write_file(dir / "tight.json", R"({"max_evaluations": 15, "max_restarts": 0})");
    const auto out = (dir / "fit.json").string();
    EXPECT_EQ(invoke({"fit", csv, "--config", (dir / "tight.json").string(), "--out", out}).code, cli::kExitNotConverged);
    EXPECT_FALSE(*read_fit_report(out).converged);
}

TEST(Cli, ConfigValuesYieldToFlags) {
    testutil::TempDir dir("cli_cfg");
    testutil::write_file(dir / "sim.json", R"({"d_prime": 1.0, "c": 0.3, "t2_criteria_s1": [-1], "t2_criteria_s2": [1],
        "n_trials": 400, "seed": 9})");
    const auto r = invoke({"simulate", "--config", (dir / "sim.json").string(), "--n-trials", "800", "--out",
                        (dir / "x.csv").string(), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("options").at("n_trials"), 800);
    EXPECT_EQ(j.at("seed"), 9);
    EXPECT_EQ(j.at("spec").at("c"), 0.3);
}

TEST(Cli, CompareTypeOneFromCounts) {
    testutil::TempDir dir("cli_cmp");
    const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
    ASSERT_EQ(invoke({"simulate", "--d-prime", "2.5", "--t2-s1=-1", "--t2-s2", "1", "--n-trials", "10000", "--out", a}).code, 0);
    ASSERT_EQ(invoke({"simulate", "--d-prime", "1.5", "--t2-s1=-1", "--t2-s2", "1", "--n-trials", "10000", "--out", b}).code, 0);
    const auto r = invoke({"compare", a, b, "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j.at("diff").get<double>(), 1.0, 0.05);
    EXPECT_TRUE(j.at("statistically_significant").get<bool>());
    EXPECT_EQ(j.at("rope_verdict"), "practically_significant");
    EXPECT_NEAR(j.at("z_threshold").get<double>(), 3.113, 1e-3);
    const auto human = invoke({"compare", a, a, "--statistic", "c"});
    EXPECT_NE(human.out.find("not significant"), std::string::npos);
    EXPECT_NE(human.out.find("negligible"), std::string::npos);
    EXPECT_EQ(std::count(human.out.begin(), human.out.end(), '\n'), 1);
}

TEST(Cli, CompareReadsFitReports) {
    testutil::TempDir dir("cli_cmp2");
    const auto a = (dir / "a.csv").string();
    ASSERT_EQ(invoke({"simulate", "--d-prime", "2", "--t2-s1=-1", "--t2-s2", "1", "--n-trials", "10000", "--out", a}).code, 0);
    ASSERT_EQ(invoke({"fit", a, "--out", (dir / "a.fit.json").string()}).code, 0);
    const auto r = invoke({"compare", (dir / "a.fit.json").string(), a, "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out).at("diff").get<double>(), 0.0, 1e-12);
}

TEST(Cli, ReportAccuracyByConfidence) {
    testutil::TempDir dir("cli_acc");
    std::filesystem::create_directories(dir / "run");
    // Confidence 5: always right. Confidence 2: half right. Nobody says 1.
    std::vector<std::tuple<int, int, int>> trials;
    for (int i = 0; i < 40; ++i) trials.emplace_back(i % 2, i % 2, 5);
    for (int i = 0; i < 20; ++i) trials.emplace_back(i % 2, (i / 2) % 2, 2);
    write_log(dir / "run" / "trials.jsonl", harness::RiskConfig::None, trials);
    const auto r = invoke({"report", (dir / "run").string(), "--out", (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(dir / "out" / "accuracy_by_confidence.csv");
    ASSERT_EQ(rows.size(), 3u);
    const auto conf = column(rows[0], "confidence"), acc = column(rows[0], "accuracy");
    EXPECT_EQ(rows[1][conf], "2");
    EXPECT_EQ(rows[1][acc], "0.5");
    EXPECT_EQ(rows[2][conf], "5");
    EXPECT_EQ(rows[2][acc], "1");
    for (const auto& row : rows) EXPECT_NE(row[conf], "1");
    EXPECT_TRUE(cli::validate_report(dir / "out").empty());
}

TEST(Cli, ReportCriterionSeriesAcrossRisks) {
    testutil::TempDir dir("cli_risk");
    std::filesystem::create_directories(dir / "runs");
    int k = 0;
    for (const char* risk : {"S2", "S1", "None"}) {
        const auto csv = (dir / (std::string("c_") + risk + ".csv")).string();
        const std::string c = k == 0 ? "0.4" : k == 1 ? "-0.4" : "0";
        ASSERT_EQ(invoke({"simulate", "--d-prime", "2", "--c", c, "--t2-s1=-1.6,-0.8", "--t2-s2", "0.8,1.6", "--n-trials",
                       "4000", "--seed", std::to_string(k), "--out", csv})
                      .code,
                  0);
        ASSERT_EQ(invoke({"fit", csv, "--meta", "model_id=m1", "--meta", "task=A_sentiment", "--meta", std::string("risk=") + risk,
                       "--meta", "mode=with_confidence", "--out", (dir / "runs" / (std::string(risk) + ".json")).string()})
                      .code,
                  0);
        ++k;
    }
    const auto r = invoke({"report", (dir / "runs").string(), "--out", (dir / "out").string(), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(dir / "out" / "criterion_by_risk.csv");
    ASSERT_EQ(rows.size(), 4u);
    const auto risk = column(rows[0], "risk"), c = column(rows[0], "c"), lo = column(rows[0], "c_low"),
               hi = column(rows[0], "c_high");
    EXPECT_EQ(rows[1][risk], "S1");
    EXPECT_EQ(rows[2][risk], "None");
    EXPECT_EQ(rows[3][risk], "S2");
    EXPECT_LT(std::stod(rows[1][c]), std::stod(rows[2][c]));
    EXPECT_LT(std::stod(rows[2][c]), std::stod(rows[3][c]));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LT(std::stod(rows[i][lo]), std::stod(rows[i][c]));
        EXPECT_GT(std::stod(rows[i][hi]), std::stod(rows[i][c]));
    }
    EXPECT_EQ(json::parse(r.out).at("criterion_by_risk").size(), 3u);
}

TEST(Cli, ReportCellsRoundTripFitReports) {
    testutil::TempDir dir("cli_rt");
    std::filesystem::create_directories(dir / "runs");
    const auto csv = (dir / "c.csv").string();
    ASSERT_EQ(invoke(with({"simulate", "--n-trials", "3000", "--seed", "8", "--out", csv}, kFigS3)).code, 0);
    const auto fit_path = (dir / "runs" / "fit.json").string();
    ASSERT_EQ(invoke({"fit", csv, "--bootstrap", "100", "--out", fit_path}).code, 0);
    ASSERT_EQ(invoke({"report", (dir / "runs").string(), "--out", (dir / "out").string()}).code, 0);
    const auto rows = read_csv(dir / "out" / "summary.csv");
    ASSERT_EQ(rows.size(), 2u);
    const auto& h = rows[0];
    const auto& row = rows[1];
    const auto report = read_fit_report(fit_path);
    EXPECT_EQ(row[column(h, "source")], fit_path);
    EXPECT_EQ(std::stod(row[column(h, "meta_d")]), *report.meta_d);
    EXPECT_EQ(std::stod(row[column(h, "m_ratio")]), *report.m_ratio);
    EXPECT_EQ(std::stod(row[column(h, "d_prime")]), report.d_prime);
    EXPECT_EQ(std::stod(row[column(h, "c")]), report.c);
    EXPECT_EQ(std::stod(row[column(h, "ci_low")]), report.ci->low);
    EXPECT_EQ(std::stod(row[column(h, "ci_high")]), report.ci->high);
    EXPECT_EQ(cli::format_number(0.1), "0.1");
}

TEST(Cli, ReportNeedsInput) {
    testutil::TempDir dir("cli_empty");
    EXPECT_EQ(invoke({"report", dir.path().string(), "--out", (dir / "out").string()}).code, cli::kExitError);
    EXPECT_EQ(invoke({"report", (dir / "nope").string(), "--out", (dir / "out").string()}).code, cli::kExitInput);
}

TEST(Cli, ReportValidationCatchesBrokenTables) {
    testutil::TempDir dir("cli_valid");
    std::filesystem::create_directories(dir / "out");
    testutil::write_file(dir / "out" / "summary.csv", "source,model_id\n");
    testutil::write_file(dir / "out" / "accuracy_by_confidence.csv",
                         "source,model_id,task,risk,confidence,n,n_correct,accuracy\n" + (dir / "out" / "summary.csv").string() +
                             ",m,A,None,3,4,5,1.25\n");
    const auto problems = cli::validate_report(dir / "out");
    EXPECT_GE(problems.size(), 3u);  // bad summary header, accuracy range, n_correct > n, missing criterion file
}

TEST(Cli, AnalyzeTrialLog) {
    testutil::TempDir dir("cli_an");
    std::vector<std::tuple<int, int, int>> trials;
    std::mt19937_64 rng(1);
    ObserverSpec spec{1.5, 0.0, 1.2, {-1.0, -0.5}, {0.5, 1.0}};
    for (int i = 0; i < 3000; ++i) {
        const auto stim = Stimulus(i % 2);
        const auto [resp, conf] = sample_trial(spec, stim, rng);
        trials.emplace_back(i % 2, static_cast<int>(resp), conf);
    }
    write_log(dir / "t.jsonl", harness::RiskConfig::S1, trials, "model-x");
    const auto r = invoke({"analyze", (dir / "t.jsonl").string(), "--levels", "3", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("meta").at("model_id"), "model-x");
    EXPECT_EQ(j.at("meta").at("risk"), "S1");
    EXPECT_EQ(j.at("meta").at("validity").at("valid"), 3000);
    EXPECT_NEAR(j.at("meta_d").get<double>(), 1.2, 0.25);
}

TEST(Cli, ValidateDataset) {
    testutil::TempDir dir("cli_ds");
    testutil::write_file(dir / "d.tsv", "sentence\tlabel\na\t0\nb\t1\nc\t0\n");
    auto r = invoke({"validate-dataset", (dir / "d.tsv").string(), "--json"});
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("items"), 3);
    EXPECT_EQ(j.at("label_1"), 1);
    testutil::write_file(dir / "bad.tsv", "sentence\tlabel\na\t0\nb\t2\n");
    r = invoke({"validate-dataset", (dir / "bad.tsv").string()});
    EXPECT_EQ(r.code, cli::kExitInput);
    EXPECT_NE(r.err.find(":3:"), std::string::npos);
}

TEST(Cli, RunAgainstMockEndpoint) {
    testutil::TempDir dir("cli_run");
    std::ostringstream ds;
    ds << "sentence\tlabel\n";
    std::map<std::string, Stimulus> labels;
    for (int i = 0; i < 120; ++i) {
        const std::string text = "item " + std::to_string(i);
        ds << text << '\t' << i % 2 << '\n';
        labels[text] = Stimulus(i % 2);
    }
    testutil::write_file(dir / "d.tsv", ds.str());
    mock::Server server(mock::observer_reply({2.0, 0.0, 1.5, {-1.5, -1, -0.5, -0.2}, {0.2, 0.5, 1, 1.5}}, labels));
    testutil::write_file(dir / "run.json", json{{"endpoint_url", server.url()},
                                                {"model_id", "mock"},
                                                {"task", "A_sentiment"},
                                                {"dataset", (dir / "d.tsv").string()},
                                                {"n_trials", 50},
                                                {"concurrency", 2}}
                                               .dump());
    const auto log = (dir / "t.jsonl").string();
    const auto r = invoke({"run", "--config", (dir / "run.json").string(), "--n-trials", "120", "--risk", "S2", "--out", log, "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("validity").at("attempted"), 120);
    EXPECT_EQ(j.at("validity").at("valid"), 120);
    EXPECT_TRUE(j.at("complete").get<bool>());
    const auto parsed = harness::read_trial_log(log);
    EXPECT_EQ(parsed.header.risk, harness::RiskConfig::S2);
    EXPECT_EQ(server.requests(), 120);
    // Re-running a finished log sends nothing new.
    ASSERT_EQ(invoke({"run", "--config", (dir / "run.json").string(), "--n-trials", "120", "--risk", "S2", "--out", log}).code, 0);
    EXPECT_EQ(server.requests(), 120);
    const auto a = invoke({"analyze", log, "--json"});
    ASSERT_EQ(a.code, 0) << a.err;
}

TEST(Cli, RunAbortExitCode) {
    testutil::TempDir dir("cli_abort");
    testutil::write_file(dir / "d.tsv", "sentence\tlabel\nx\t0\ny\t1\n");
    mock::Server server([](const std::string&, const json&, const httplib::Request&) {
        return std::pair<int, std::string>{403, "forbidden"};
    });
    const auto r = invoke({"run", "--endpoint", server.url(), "--model", "m", "--dataset", (dir / "d.tsv").string(), "--n-trials",
                        "2", "--out", (dir / "t.jsonl").string()});
    EXPECT_EQ(r.code, cli::kExitAborted);
    EXPECT_NE(r.out.find("aborted"), std::string::npos);
}
