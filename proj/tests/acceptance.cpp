// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "grid_oracle.hpp"
#include "metacog/bootstrap.hpp"
#include "metacog/harness/client.hpp"
#include "metacog/harness/runner.hpp"
#include "metacog/harness/tally.hpp"
#include "metacog/harness/trial_log.hpp"
#include "metacog/metad.hpp"
#include "metacog/observer.hpp"
#include "metacog/rng.hpp"
#include "metacog/sdt.hpp"
#include "metacog/stats.hpp"
#include "mock_observer.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace metacog;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Accumulates sub-checks; the first few failures are kept for the report.
struct Checks {
    bool pass = true;
    std::vector<std::string> failures;
    void require(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        failures.push_back(what);
    }
    std::string failure_text() const {
        std::string s;
        for (std::size_t i = 0; i < failures.size() && i < 4; ++i) s += (i ? "; " : "") + failures[i];
        if (failures.size() > 4) s += "; +" + std::to_string(failures.size() - 4) + " more";
        return s;
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

double sd(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return v.size() > 1 ? std::sqrt(s / double(v.size() - 1)) : 0.0;
}

const std::vector<double> kS3Low = {-2.0, -1.5, -1.0, -0.5};
const std::vector<double> kS3High = {0.5, 1.0, 1.5, 2.0};

Outcome fig_s3_recovery() {
    constexpr double kDPrimeTol = 0.02;
    constexpr double kMetaDTol = 0.1;
    constexpr int kReps = 20;
    const std::vector<std::int64_t> grid = {100, 300, 1000, 3000, 10000};
    const ObserverSpec spec{3.2, 0.0, 3.0, kS3Low, kS3High};

    Checks checks;
    std::vector<double> meta_sds;
    double meta_mean_last = 0;
    std::string table;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> dp, md;
        for (int rep = 0; rep < kReps; ++rep) {
            SimOptions opts;
            opts.n_trials = grid[g];
            opts.seed = derive_seed(1001 + g, rep);
            const auto fit = fit_meta_d(simulate_counts(spec, opts));
            dp.push_back(fit.type1.d_prime);
            md.push_back(fit.params.meta_d);
        }
        const double dp_mean = mean(dp);
        const double dp_spread = *std::max_element(dp.begin(), dp.end()) - *std::min_element(dp.begin(), dp.end());
        checks.require(std::abs(dp_mean - 3.2) <= kDPrimeTol, fmt("N=%lld mean d'=%.4f", (long long)grid[g], dp_mean));
        checks.require(dp_spread == 0.0, fmt("N=%lld d' spread=%.3g", (long long)grid[g], dp_spread));
        meta_sds.push_back(sd(md));
        meta_mean_last = mean(md);
        table += fmt("%sN=%lld d'=%.4f meta-d'=%.3f(sd %.3f)", g ? ", " : "", (long long)grid[g], dp_mean, mean(md),
                     meta_sds.back());
    }
    checks.require(std::abs(meta_mean_last - 3.0) <= kMetaDTol, fmt("N=10000 mean meta-d'=%.4f", meta_mean_last));
    for (std::size_t g = 1; g < meta_sds.size(); ++g)
        checks.require(meta_sds[g] <= meta_sds[g - 1],
                       fmt("meta-d' sd rises %.4f -> %.4f at N=%lld", meta_sds[g - 1], meta_sds[g], (long long)grid[g]));
    return {checks.pass, checks.pass ? table : checks.failure_text() + " [" + table + "]"};
}

Outcome closed_form_oracle() {
    constexpr double kTol = 1e-8;
    Rng rng(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    int done = 0;
    while (done < 1000) {
        const double hr = u(rng), far = u(rng);
        if (hr <= 0.0 || far <= 0.0) continue;
        const oracle::Big zh = oracle::probit(oracle::Big(hr)), zf = oracle::probit(oracle::Big(far));
        const oracle::Big d = zh - zf;
        const oracle::Big c = -(zh + zf) / 2;
        const double dp = d_prime(hr, far), cc = criterion_c(hr, far);
        worst = std::max(worst, std::abs(dp - static_cast<double>(d)));
        worst = std::max(worst, std::abs(cc - static_cast<double>(c)));
        if (d != 0) worst = std::max(worst, std::abs(c_prime(cc, dp) - static_cast<double>(c / d)));
        ++done;
    }
    return {worst <= kTol, fmt("1000 pairs, max abs error %.3g (tol %.0e)", worst, kTol)};
}

Outcome brute_force_fit() {
    constexpr double kMetaDTol = 2e-3;
    constexpr double kLlTol = 1e-3;
    const auto toy = grid_oracle::toy();
    RatingCounts counts(2);
    for (int s = 0; s < 2; ++s)
        for (int r = 0; r < 2; ++r)
            for (int k = 0; k < 2; ++k) counts.at(Stimulus(s), Stimulus(r), k + 1) = toy.n[s][r][k];
    const auto fit = fit_meta_d(counts);
    const auto grid = grid_oracle::search(toy);
    const double n = counts.total();
    const double dmd = std::abs(fit.params.meta_d - grid.meta_d);
    const double dll = std::abs(fit.log_likelihood - grid.log_likelihood) / n;
    return {n <= 200 && dmd <= kMetaDTol && dll <= kLlTol,
            fmt("%g trials, meta_d %.5f vs grid %.5f (|diff| %.2g), LL/trial |diff| %.2g", n, fit.params.meta_d,
                grid.meta_d, dmd, dll)};
}

Outcome ideal_observer() {
    constexpr double kLow = 0.98, kHigh = 1.02;
    Rng rng(777);
    std::uniform_real_distribution<double> dprime(0.5, 3.5), bias(-0.5, 0.5), gap(0.2, 0.8);
    std::uniform_int_distribution<int> levels(2, 5);
    double lo = 10, hi = -10;
    Checks checks;
    for (int i = 0; i < 50; ++i) {
        ObserverSpec spec;
        spec.d_prime = dprime(rng);
        spec.c = bias(rng);
        spec.meta_d = spec.d_prime;
        const int h = levels(rng);
        const double mc = spec.meta_c();
        double t = mc;
        for (int k = 0; k < h - 1; ++k) spec.t2_criteria_s1.insert(spec.t2_criteria_s1.begin(), t -= gap(rng));
        t = mc;
        for (int k = 0; k < h - 1; ++k) spec.t2_criteria_s2.push_back(t += gap(rng));
        SimOptions opts;
        opts.n_trials = 10000;
        opts.sample_type2 = false;
        const auto fit = fit_meta_d(simulate_counts(spec, opts));
        const double m = fit.m_ratio.value_or(NAN);
        lo = std::min(lo, m), hi = std::max(hi, m);
        checks.require(m >= kLow && m <= kHigh, fmt("spec %d (d'=%.2f h=%d) M_ratio=%.4f", i, spec.d_prime, h, m));
    }
    return {checks.pass, fmt("50 specs, M_ratio range [%.4f, %.4f]", lo, hi) +
                             (checks.pass ? std::string() : ": " + checks.failure_text())};
}

Outcome statistical_protocol() {
    Checks checks;
    const double z = bonferroni_threshold(0.05, 27);
    checks.require(std::round(z * 100) / 100 == 3.11, fmt("Bonferroni z=%.5f", z));

    const Rope rope{-0.1, 0.1};
    struct Case {
        Interval ci;
        RopeVerdict want;
    };
    const std::vector<Case> table = {
        {{0.2, 0.5}, RopeVerdict::PracticallySignificant},  {{-0.5, -0.2}, RopeVerdict::PracticallySignificant},
        {{-0.05, 0.05}, RopeVerdict::Negligible},            {{-0.09, 0.0}, RopeVerdict::Negligible},
        {{0.05, 0.3}, RopeVerdict::Inconclusive},            {{-0.3, -0.05}, RopeVerdict::Inconclusive},
        {{-0.3, 0.3}, RopeVerdict::Inconclusive},            {{0.1, 0.4}, RopeVerdict::Inconclusive},
        {{-0.4, -0.1}, RopeVerdict::Inconclusive},           {{-0.1, 0.1}, RopeVerdict::Inconclusive},
    };
    for (const auto& c : table)
        checks.require(rope_classify(c.ci, rope) == c.want, fmt("ROPE [%g, %g]", c.ci.low, c.ci.high));

    constexpr double kRelTol = 0.10;
    constexpr double kN = 1e4;
    constexpr int kDraws = 20000;
    std::string detail;
    for (auto [hr, far] : {std::pair{0.8, 0.2}, std::pair{0.95, 0.05}}) {
        Rng rng(derive_seed(55, static_cast<std::uint64_t>(hr * 100)));
        std::binomial_distribution<long> hits(long(kN), hr), fas(long(kN), far);
        std::vector<double> dp, cc, cp;
        for (int i = 0; i < kDraws; ++i) {
            const double h = double(hits(rng)) / kN, f = double(fas(rng)) / kN;
            dp.push_back(d_prime(h, f));
            cc.push_back(criterion_c(h, f));
            cp.push_back(cc.back() / dp.back());
        }
        const double vd = sd(dp) * sd(dp), vc = sd(cc) * sd(cc), vcp = sd(cp) * sd(cp);
        const double ed = delta_var_dprime(hr, far, kN, kN), ec = delta_var_c(hr, far, kN, kN),
                     ecp = delta_var_c_prime(hr, far, kN, kN);
        const double rd = std::abs(ed / vd - 1), rc = std::abs(ec / vc - 1), rcp = std::abs(ecp / vcp - 1);
        checks.require(rd <= kRelTol, fmt("(%.2f,%.2f) var d' off by %.1f%%", hr, far, 100 * rd));
        checks.require(rc <= kRelTol, fmt("(%.2f,%.2f) var c off by %.1f%%", hr, far, 100 * rc));
        checks.require(rcp <= kRelTol, fmt("(%.2f,%.2f) var c' off by %.1f%%", hr, far, 100 * rcp));
        detail += fmt(", (%.2f,%.2f) delta/MC - 1: d' %+.3f c %+.3f c' %+.3f", hr, far, ed / vd - 1, ec / vc - 1,
                      ecp / vcp - 1);
    }
    return {checks.pass, fmt("z=%.4f, %zu ROPE cases", z, table.size()) + detail +
                             (checks.pass ? std::string() : ": " + checks.failure_text())};
}

Outcome bootstrap_coverage() {
    constexpr int kDatasets = 200;
    constexpr double kTarget = 0.95, kTol = 0.05;
    constexpr double kBudgetSeconds = 30 * 60;
    const ObserverSpec spec{2.0, 0.0, 1.5, {-1.5, -1.0, -0.5}, {0.5, 1.0, 1.5}};
    const auto start = std::chrono::steady_clock::now();
    int covered = 0, errors = 0;
    for (int i = 0; i < kDatasets; ++i) {
        SimOptions opts;
        opts.n_trials = 3000;
        opts.deterministic_type1 = false;
        opts.seed = derive_seed(606, i);
        BootstrapOptions bo;
        bo.n_boot = 1000;
        bo.level = 0.95;
        bo.seed = derive_seed(707, i);
        bo.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        try {
            const auto ci = bootstrap_ci(simulate_counts(spec, opts), Statistic::MetaD, bo);
            if (ci.low <= 1.5 && 1.5 <= ci.high) ++covered;
        } catch (const std::exception&) {
            ++errors;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double rate = double(covered) / kDatasets;
    const bool ok = std::abs(rate - kTarget) <= kTol + 1e-12 && secs <= kBudgetSeconds;
    return {ok, fmt("coverage %d/%d = %.1f%% (target 95 +/- 5), %d failed fits, %.0f s", covered, kDatasets, 100 * rate,
                    errors, secs)};
}

Outcome harness_round_trip() {
    using namespace metacog::harness;
    constexpr double kDTol = 0.15, kMetaTol = 0.3;
    constexpr int kItems = 2000;
    const ObserverSpec spec{2.0, 0.0, 1.5, {-1.5, -1.0, -0.5, -0.2}, {0.2, 0.5, 1.0, 1.5}};
    testutil::TempDir dir("acceptance_harness");

    std::ostringstream ds;
    ds << "sentence\tlabel\n";
    for (int i = 0; i < kItems; ++i) ds << "review " << i << " of the film\t" << (i % 2) << "\n";
    testutil::write_file(dir / "items.tsv", ds.str());

    RunConfig config;
    config.model_id = "scripted-observer";
    config.task = TaskKind::ASentiment;
    config.mode = PromptMode::WithConfidence;
    config.dataset_path = dir / "items.tsv";
    config.template_dir = METACOG_DEFAULT_TEMPLATE_DIR;
    config.output_path = dir / "trials.jsonl";
    config.n_trials = kItems;
    config.concurrency = 4;
    config.retry.backoff_ms = 1;
    config.seed = 42;

    std::map<std::string, Stimulus> labels;
    for (const auto& it : prepare_items(config)) labels[it.text] = it.label;
    // One item in fifty gets a reply the parser must reject.
    auto observer = mock::observer_reply(spec, labels);
    std::set<std::string> garbled;
    mock::Server server([&](const std::string& prompt, const nlohmann::json& body, const httplib::Request& req) {
        const auto text = mock::item_text(prompt);
        if (mock::fnv1a(text) % 50 == 0) return std::pair<int, std::string>{200, "I would rather not say."};
        return observer(prompt, body, req);
    });
    for (const auto& [text, label] : labels)
        if (mock::fnv1a(text) % 50 == 0) garbled.insert(text);
    config.endpoint_url = server.url();

    Checks checks;
    HttpChatClient client(config.endpoint_url, std::nullopt, 30);
    const auto first = run_experiment(config, client, RunHooks{700});
    checks.require(!first.complete && !first.aborted, "interrupted run reported complete or aborted");
    const auto second = run_experiment(config, client);
    checks.require(second.complete && !second.aborted, "resumed run incomplete");
    checks.require(second.resumed_records >= 700, fmt("resumed only %lld records", (long long)second.resumed_records));

    const auto log = read_trial_log(config.output_path);
    std::set<std::int64_t> ids;
    for (const auto& r : log.records) ids.insert(r.trial_id);
    checks.require(log.records.size() == kItems && ids.size() == kItems,
                   fmt("%zu records, %zu unique ids", log.records.size(), ids.size()));
    checks.require(server.requests() == kItems, fmt("%d requests for %d items", server.requests(), kItems));

    const auto v = validity_report(log.records);
    std::int64_t reason_total = 0;
    for (const auto& [reason, n] : v.reasons) reason_total += n;
    checks.require(v.attempted == kItems && v.valid + v.invalid == v.attempted, "validity totals do not add up");
    checks.require(v.invalid == static_cast<std::int64_t>(garbled.size()) && reason_total == v.invalid &&
                       v.invalid_trial_ids.size() == garbled.size(),
                   fmt("%lld invalid recorded, %zu garbled sent", (long long)v.invalid, garbled.size()));
    checks.require(second.validity.valid == v.valid && second.validity.invalid == v.invalid,
                   "run outcome disagrees with the log");

    const auto counts = tally(log.records, spec.h());
    checks.require(counts.total() == double(v.valid), "tally does not match valid records");
    const auto fit = fit_meta_d(counts);
    const double dd = std::abs(fit.type1.d_prime - spec.d_prime);
    const double dm = std::abs(fit.params.meta_d - *spec.meta_d);
    checks.require(dd <= kDTol, fmt("d' %.3f", fit.type1.d_prime));
    checks.require(dm <= kMetaTol, fmt("meta-d' %.3f", fit.params.meta_d));
    return {checks.pass, fmt("%lld valid + %lld invalid of %lld, resumed %lld, d'=%.3f (scripted 2), meta-d'=%.3f "
                             "(scripted 1.5)",
                             (long long)v.valid, (long long)v.invalid, (long long)v.attempted,
                             (long long)second.resumed_records, fit.type1.d_prime, fit.params.meta_d) +
                             (checks.pass ? std::string() : ": " + checks.failure_text())};
}

Outcome m_ratio_regression() {
    constexpr double kTol = 1e-4;
    const double a = m_ratio(2.7738, 3.2396), b = m_ratio(1.6510, 2.5217);
    const double ea = std::abs(a - 0.8563), eb = std::abs(b - 0.6548);
    return {ea <= kTol && eb <= kTol, fmt("%.6f vs 0.8563, %.6f vs 0.6548 (tol %.0e)", a, b, kTol)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"simulated recovery (d' 3.2, meta-d' 3)", fig_s3_recovery},
        {"closed-form d', c, c' against 50-digit oracle", closed_form_oracle},
        {"fit against exhaustive grid", brute_force_fit},
        {"ideal observer M_ratio", ideal_observer},
        {"Bonferroni, ROPE and Delta-method variances", statistical_protocol},
        {"bootstrap coverage of meta-d'", bootstrap_coverage},
        {"harness round trip against scripted endpoint", harness_round_trip},
        {"M_ratio arithmetic", m_ratio_regression},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s criterion %zu: %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
