#include "metacog/harness/runner.hpp"
#include "metacog/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "metacog/harness/depletion.hpp"
#include "metacog/harness/response.hpp"
#include "metacog/rng.hpp"

namespace metacog::harness {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

class RateLimiter {
public:
    explicit RateLimiter(double per_sec) : interval_(per_sec > 0.0 ? 1.0 / per_sec : 0.0) {}

    void acquire() {
        if (interval_ <= 0.0) return;
        Clock::time_point slot;
        {
            std::lock_guard lock(mutex_);
            const auto now = Clock::now();
            next_ = std::max(next_, now);
            slot = next_;
            next_ += std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(interval_));
        }
        std::this_thread::sleep_until(slot);
    }

private:
    double interval_;
    std::mutex mutex_;
    Clock::time_point next_{};
};

bool retryable(const ChatResponse& r) {
    return r.http_status == 0 || r.http_status == 408 || r.http_status == 429 || r.http_status >= 500;
}

bool credentials_rejected(const ChatResponse& r) { return r.http_status == 401 || r.http_status == 403; }

template <typename T, typename Parse>
T enum_field(const json& j, const char* key, Parse parse) {
    const auto v = parse(j.at(key).get<std::string>());
    if (!v) throw std::invalid_argument(std::string("run config: bad value for '") + key + "'");
    return *v;
}

}  // namespace

void RunConfig::validate() const {
    if (endpoint_url.empty()) throw std::invalid_argument("run config: endpoint_url is required");
    if (model_id.empty()) throw std::invalid_argument("run config: model_id is required");
    if (dataset_path.empty()) throw std::invalid_argument("run config: dataset path is required");
    if (output_path.empty()) throw std::invalid_argument("run config: output path is required");
    if (template_dir.empty()) throw std::invalid_argument("run config: template_dir is required");
    if (n_trials && *n_trials < 0) throw std::invalid_argument("run config: n_trials must be >= 0");
    if (concurrency < 1) throw std::invalid_argument("run config: concurrency must be >= 1");
    if (retry.max < 0 || retry.backoff_ms < 0) throw std::invalid_argument("run config: bad retry policy");
    if (!(invalid_ceiling >= 0.0 && invalid_ceiling <= 1.0)) {
        throw std::invalid_argument("run config: invalid_ceiling must be in [0, 1]");
    }
    if (!(p_delete >= 0.0 && p_delete <= 1.0)) throw std::invalid_argument("run config: p_delete must be in [0, 1]");
}

void apply_config_json(RunConfig& c, const json& j) {
    if (!j.is_object()) throw std::invalid_argument("run config: expected a JSON object");
    if (j.contains("endpoint_url")) c.endpoint_url = j.at("endpoint_url").get<std::string>();
    if (j.contains("model_id")) c.model_id = j.at("model_id").get<std::string>();
    if (j.contains("task")) c.task = enum_field<TaskKind>(j, "task", parse_task);
    if (j.contains("risk")) c.risk = enum_field<RiskConfig>(j, "risk", parse_risk);
    if (j.contains("mode")) c.mode = enum_field<PromptMode>(j, "mode", parse_mode);
    if (j.contains("n_trials")) c.n_trials = j.at("n_trials").get<std::int64_t>();
    if (j.contains("concurrency")) c.concurrency = j.at("concurrency").get<int>();
    if (j.contains("retry")) {
        const auto& r = j.at("retry");
        c.retry.max = r.value("max", c.retry.max);
        c.retry.backoff_ms = r.value("backoff_ms", c.retry.backoff_ms);
    }
    if (j.contains("invalid_ceiling")) c.invalid_ceiling = j.at("invalid_ceiling").get<double>();
    if (j.contains("min_trials_for_ceiling")) c.min_trials_for_ceiling = j.at("min_trials_for_ceiling").get<std::int64_t>();
    if (j.contains("rate_limit_per_sec")) c.rate_limit_per_sec = j.at("rate_limit_per_sec").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("template_dir")) c.template_dir = j.at("template_dir").get<std::string>();
    if (j.contains("dataset")) c.dataset_path = j.at("dataset").get<std::string>();
    if (j.contains("text_field")) c.text_field = j.at("text_field").get<std::string>();
    if (j.contains("label_field")) c.label_field = j.at("label_field").get<std::string>();
    if (j.contains("output")) c.output_path = j.at("output").get<std::string>();
    if (j.contains("api_key_env")) c.api_key_env = j.at("api_key_env").get<std::string>();
    if (j.contains("decoding")) c.decoding = j.at("decoding");
    if (j.contains("target_word")) c.target_word = j.at("target_word").get<std::string>();
    if (j.contains("p_delete")) c.p_delete = j.at("p_delete").get<double>();
    if (j.contains("timeout_seconds")) c.timeout_seconds = j.at("timeout_seconds").get<int>();
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw metacog::IoError("cannot open run config " + path.string());
    RunConfig c;
    try {
        apply_config_json(c, json::parse(in));
    } catch (const json::exception& e) {
        throw metacog::ParseError(path.string(), 0, e.what());
    }
    return c;
}

std::vector<PreparedItem> prepare_items(const RunConfig& config) {
    TaskSpec spec{config.task, config.dataset_path, config.text_field, config.label_field};
    const auto data = load_dataset(spec);
    std::vector<PreparedItem> pool;
    if (config.task == TaskKind::CWordDepletion) {
        std::vector<std::string> texts;
        texts.reserve(data.size());
        for (const auto& d : data) texts.push_back(d.text);
        for (auto& item : make_depletion_corpus(texts, config.target_word, config.p_delete, config.seed)) {
            pool.push_back({0, std::move(item.presented_text), item.deleted ? Stimulus::S2 : Stimulus::S1});
        }
    } else {
        for (const auto& d : data) pool.push_back({0, d.text, d.label});
    }
    const std::int64_t wanted = config.n_trials.value_or(default_trial_count(config.task));
    if (wanted > static_cast<std::int64_t>(pool.size())) {
        throw std::invalid_argument("run: " + std::to_string(wanted) + " trials requested but only " +
                                    std::to_string(pool.size()) + " items are available (set n_trials)");
    }
    // Seeded sample without replacement, kept in dataset order.
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (wanted > 0 && wanted < static_cast<std::int64_t>(pool.size())) {
        Rng rng(derive_seed(config.seed, 0xda7a));
        std::shuffle(order.begin(), order.end(), rng);
        order.resize(static_cast<std::size_t>(wanted));
        std::sort(order.begin(), order.end());
    }
    std::vector<PreparedItem> out;
    out.reserve(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto item = pool[order[i]];
        item.trial_id = static_cast<std::int64_t>(i);
        out.push_back(std::move(item));
    }
    return out;
}

RunOutcome run_experiment(const RunConfig& config, ChatClient& client, const RunHooks& hooks) {
    config.validate();
    const auto templates = TemplateSet::load(config.template_dir);
    const auto items = prepare_items(config);

    TrialLogHeader header;
    header.task = config.task;
    header.risk = config.risk;
    header.mode = config.mode;
    header.model_id = config.model_id;
    header.endpoint_url = config.endpoint_url;
    header.template_version = templates.version();
    header.seed = config.seed;
    header.decoding = config.decoding;
    header.created = utc_timestamp();
    if (config.task == TaskKind::BOralWritten) {
        header.assumptions.push_back("task B labels: oral=0->S1, written=1->S2 (inferred, not stated by the dataset)");
    }
    if (config.task == TaskKind::CWordDepletion) {
        header.assumptions.push_back("depletion target '" + config.target_word + "' matched case-insensitively at word boundaries");
    }

    RunOutcome outcome;
    outcome.log_path = config.output_path;
    std::vector<TrialRecord> records;
    std::set<std::int64_t> done;
    std::optional<std::uintmax_t> keep;
    if (std::filesystem::exists(config.output_path)) {
        auto existing = read_trial_log(config.output_path);
        const auto& h = existing.header;
        if (h.task != config.task || h.risk != config.risk || h.mode != config.mode || h.model_id != config.model_id) {
            throw std::runtime_error("run: existing log " + config.output_path.string() +
                                     " belongs to a different (task, risk, mode, model)");
        }
        for (auto& r : existing.records) {
            if (done.insert(r.trial_id).second) records.push_back(std::move(r));
        }
        keep = existing.valid_bytes;
        outcome.resumed_records = static_cast<std::int64_t>(records.size());
    }
    TrialLogWriter writer(config.output_path, header, keep);

    std::vector<const PreparedItem*> pending;
    for (const auto& item : items) {
        if (!done.count(item.trial_id)) pending.push_back(&item);
    }

    std::mutex state_mutex;
    std::int64_t attempted = static_cast<std::int64_t>(records.size());
    std::int64_t invalid = std::count_if(records.begin(), records.end(), [](const TrialRecord& r) { return !r.valid(); });
    std::int64_t persisted_now = 0;
    std::atomic<bool> stop{false};
    std::atomic<std::size_t> next{0};
    RateLimiter limiter(config.rate_limit_per_sec);

    auto worker = [&] {
        while (!stop.load()) {
            const std::size_t idx = next++;
            if (idx >= pending.size()) return;
            const PreparedItem& item = *pending[idx];

            TrialRecord rec;
            rec.trial_id = item.trial_id;
            rec.task = config.task;
            rec.risk = config.risk;
            rec.mode = config.mode;
            rec.input_text = item.text;
            rec.true_label = item.label;
            rec.model_id = config.model_id;
            rec.request_timestamp = utc_timestamp();

            const ChatRequest request{config.model_id, templates.render(config.task, config.risk, config.mode, item.text),
                                      config.decoding};
            const auto started = Clock::now();
            ChatResponse response;
            bool rejected = false;
            for (int attempt = 1; attempt <= config.retry.max + 1; ++attempt) {
                limiter.acquire();
                const auto t0 = Clock::now();
                response = client.complete(request);
                const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
                rec.attempts.push_back({attempt, response.http_status, response.error, ms});
                rec.attempt_count = attempt;
                if (credentials_rejected(response)) {
                    rejected = true;
                    break;
                }
                if (response.error.empty() || !retryable(response) || attempt == config.retry.max + 1) break;
                std::this_thread::sleep_for(std::chrono::milliseconds(
                    static_cast<long long>(config.retry.backoff_ms) << std::min(attempt - 1, 20)));
            }
            rec.latency_ms = std::chrono::duration<double, std::milli>(Clock::now() - started).count();

            if (rejected) {
                std::lock_guard lock(state_mutex);
                if (!outcome.aborted) {
                    outcome.aborted = true;
                    outcome.abort_reason = "credentials rejected (HTTP " + std::to_string(response.http_status) + ")";
                }
                stop = true;
                return;  // not persisted: the trial was never answered
            }
            if (!response.error.empty()) {
                rec.invalid_reason = response.http_status == 0 ? "transport_failure"
                                     : response.http_status == 200 ? "malformed_payload"
                                                                   : "http_" + std::to_string(response.http_status);
            } else {
                rec.raw_response = response.content;
                const auto parsed = parse_response(response.content, config.mode);
                if (parsed.valid()) {
                    rec.decision = parsed.decision;
                    rec.confidence = parsed.confidence;
                } else {
                    rec.invalid_reason = parsed.reason;
                }
            }

            writer.append(rec);
            std::lock_guard lock(state_mutex);
            ++attempted;
            ++persisted_now;
            if (!rec.valid()) ++invalid;
            records.push_back(std::move(rec));
            if (attempted >= config.min_trials_for_ceiling &&
                static_cast<double>(invalid) > config.invalid_ceiling * static_cast<double>(attempted) && !outcome.aborted) {
                outcome.aborted = true;
                outcome.abort_reason = "invalid-response rate " + std::to_string(invalid) + "/" + std::to_string(attempted) +
                                       " exceeds ceiling";
                stop = true;
            }
            if (hooks.stop_after && persisted_now >= *hooks.stop_after) stop = true;
        }
    };

    {
        std::vector<std::jthread> pool;
        const int width = std::max(1, std::min<int>(config.concurrency, static_cast<int>(std::max<std::size_t>(pending.size(), 1))));
        for (int i = 0; i < width; ++i) pool.emplace_back(worker);
    }

    if (!outcome.aborted && attempted > 0 &&
        static_cast<double>(invalid) > config.invalid_ceiling * static_cast<double>(attempted)) {
        outcome.aborted = true;
        outcome.abort_reason = "invalid-response rate " + std::to_string(invalid) + "/" + std::to_string(attempted) +
                               " exceeds ceiling";
    }
    std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) { return a.trial_id < b.trial_id; });
    outcome.validity = validity_report(records);
    outcome.complete = records.size() == items.size();
    return outcome;
}

RunOutcome run_experiment(const RunConfig& config) {
    config.validate();
    std::optional<std::string> key;
    if (const char* v = std::getenv(config.api_key_env.c_str()); v && *v) key = v;
    HttpChatClient client(config.endpoint_url, key, config.timeout_seconds);
    return run_experiment(config, client);
}

}  // namespace metacog::harness
