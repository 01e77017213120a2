// ptme: run experiments, compute metrics, distill and query policies.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ptme/ptme.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kIo = 2, kNumerical = 3 };

struct Failure {
    int code;
    std::string message;
};

int exit_code(ptme_status status) {
    switch (status) {
        case PTME_OK: return kOk;
        case PTME_ERR_INVALID_ARGUMENT: return kValidation;
        case PTME_ERR_IO:
        case PTME_ERR_PARSE: return kIo;
        default: return kNumerical;
    }
}

void check(ptme_status status, const std::string& context = {}) {
    if (status == PTME_OK) return;
    std::string msg = ptme_last_error();
    if (!context.empty()) msg = context + ": " + msg;
    throw Failure{exit_code(status), msg};
}

[[noreturn]] void invalid(const std::string& message) { throw Failure{kValidation, message}; }
[[noreturn]] void io_error(const std::string& message) { throw Failure{kIo, message}; }

template <class T, void (*Destroy)(T*)>
struct Deleter {
    void operator()(T* p) const { Destroy(p); }
};
using Problem = std::unique_ptr<ptme_problem, Deleter<ptme_problem, ptme_problem_destroy>>;
using Log = std::unique_ptr<ptme_log, Deleter<ptme_log, ptme_log_destroy>>;
using Policy = std::unique_ptr<ptme_policy, Deleter<ptme_policy, ptme_policy_destroy>>;

Problem open_problem(const std::string& spec) {
    ptme_problem* p = nullptr;
    ptme_status s = ptme_problem_create(spec.c_str(), &p);
    // An unknown problem name is a manifest error, not a data error.
    if (s != PTME_OK) throw Failure{kValidation, std::string("problem: ") + ptme_last_error()};
    return Problem(p);
}

Log open_log(const fs::path& path) {
    ptme_log* log = nullptr;
    check(ptme_log_load(path.string().c_str(), &log));
    Log owned(log);
    fs::path meta = path.parent_path() / "meta.json";
    if (fs::exists(meta)) check(ptme_log_load_metadata(owned.get(), meta.string().c_str()));
    return owned;
}

json metadata_of(const ptme_log* log) {
    try {
        return json::parse(ptme_log_metadata(log));
    } catch (const json::exception&) {
        return json::object();
    }
}

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        auto first = item.data(), last = item.data() + item.size();
        while (first < last && *first == ' ') ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) invalid("not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

/// "0..9", "3" or "1,4,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    auto to_u64 = [&](std::string_view s) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) invalid("seeds: bad value '" + std::string(s) + "'");
        return v;
    };
    if (auto dots = text.find(".."); dots != std::string::npos) {
        std::uint64_t lo = to_u64(std::string_view(text).substr(0, dots));
        std::uint64_t hi = to_u64(std::string_view(text).substr(dots + 2));
        if (hi < lo) invalid("seeds: empty range '" + text + "'");
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_u64(item));
    if (out.empty()) invalid("seeds: none given");
    return out;
}

std::vector<std::uint64_t> schedule_from(const std::optional<std::string>& text, std::uint64_t budget) {
    size_t count = 0;
    if (text) {
        check(ptme_schedule_parse(text->c_str(), nullptr, 0, &count), "schedule");
        std::vector<std::uint64_t> out(count);
        check(ptme_schedule_parse(text->c_str(), out.data(), out.size(), &count), "schedule");
        return out;
    }
    std::vector<std::uint64_t> out(50);
    check(ptme_schedule_logspace(1, std::min<std::uint64_t>(100000, budget), 50, out.data(), &count), "schedule");
    out.resize(count);
    return out;
}

std::ofstream open_output(const fs::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path);
    if (!out) io_error("cannot write " + path.string());
    return out;
}

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs `work(i)` for i in [0, n) on up to `jobs` threads; rethrows the first
/// failure after all workers stop.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F work) {
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::optional<Failure> first;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            {
                std::lock_guard lock(mu);
                if (first) return;
            }
            try {
                work(i);
            } catch (const Failure& f) {
                std::lock_guard lock(mu);
                if (!first) first = f;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::min<std::size_t>(jobs, n); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first) throw *first;
}

// ---- run -------------------------------------------------------------------------

struct RunOptions {
    std::optional<std::string> manifest, problem, method, seeds, out, sizes;
    std::optional<std::uint64_t> budget, cells, tasks;
    std::optional<double> sigma_sbx, sigma_reg, regression_fraction;
    unsigned jobs = default_jobs();
    bool quiet = false;
};

int cmd_run(const RunOptions& o) {
    json manifest = json::object();
    if (o.manifest) {
        std::ifstream in(*o.manifest);
        if (!in) io_error("cannot open manifest " + *o.manifest);
        try {
            in >> manifest;
        } catch (const json::exception& e) {
            io_error("manifest " + *o.manifest + ": " + e.what());
        }
        if (!manifest.is_object()) invalid("manifest: expected a JSON object");
    }

    std::vector<std::string> problems;
    auto text_field = [&](const char* key, const std::optional<std::string>& flag,
                          const std::string& fallback) -> std::string {
        if (flag) return *flag;
        if (!manifest.contains(key)) return fallback;
        if (!manifest[key].is_string()) {
            problems.push_back(std::string(key) + ": expected a string");
            return fallback;
        }
        return manifest[key].get<std::string>();
    };
    const std::string problem_name = text_field("problem", o.problem, "");
    const std::string method = text_field("method", o.method, "ptme");
    const std::string out_dir = text_field("output_dir", o.out, "runs");
    std::string seed_text = "0";
    if (o.seeds) {
        seed_text = *o.seeds;
    } else if (manifest.contains("seeds")) {
        const json& s = manifest["seeds"];
        if (s.is_string()) {
            seed_text = s.get<std::string>();
        } else if (s.is_array() && !s.empty() && std::all_of(s.begin(), s.end(), [](const json& v) {
                       return v.is_number_unsigned();
                   })) {
            seed_text.clear();
            for (const auto& v : s) seed_text += (seed_text.empty() ? "" : ",") + std::to_string(v.get<std::uint64_t>());
        } else {
            problems.push_back("seeds: expected \"LO..HI\" or a list of non-negative integers");
        }
    }
    if (problem_name.empty()) problems.push_back("problem: required");

    ptme_run_config config;
    ptme_run_config_init(&config);
    if (manifest.contains("config")) {
        if (ptme_run_config_apply_json(manifest["config"].dump().c_str(), &config) != PTME_OK)
            problems.push_back(ptme_last_error());
    }
    if (ptme_run_config_for_method(method.c_str(), &config) != PTME_OK)
        problems.push_back(std::string("method: ") + ptme_last_error());
    if (o.budget) config.budget = *o.budget;
    if (o.cells) config.cells = *o.cells;
    if (o.tasks) config.fixed_tasks = *o.tasks;
    if (o.sigma_sbx) config.sigma_sbx = *o.sigma_sbx;
    if (o.sigma_reg) config.sigma_reg = *o.sigma_reg;
    if (o.regression_fraction) config.regression_fraction = *o.regression_fraction;
    if (o.sizes) {
        try {
            auto values = parse_doubles(*o.sizes);
            if (values.size() > PTME_MAX_TOURNAMENT_SIZES) invalid("too many");
            config.tournament_size_count = values.size();
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (values[i] < 1 || values[i] != static_cast<std::uint32_t>(values[i])) invalid("not a positive integer");
                config.tournament_sizes[i] = static_cast<std::uint32_t>(values[i]);
            }
        } catch (const Failure& f) {
            problems.push_back("tournament_sizes: " + f.message);
        }
    }
    if (ptme_run_config_validate(&config) != PTME_OK) problems.push_back(ptme_last_error());

    std::vector<std::uint64_t> seeds;
    try {
        seeds = parse_seeds(seed_text);
    } catch (const Failure& f) {
        problems.push_back(f.message);
    }
    Problem problem;
    if (!problem_name.empty()) {
        try {
            problem = open_problem(problem_name);
        } catch (const Failure& f) {
            problems.push_back(f.message);
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid manifest:";
        for (const auto& p : problems) msg += "\n  " + p;
        invalid(msg);
    }

    const fs::path root = fs::path(out_dir) / method;
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) io_error("cannot create " + root.string() + ": " + ec.message());

    std::mutex print_mu;
    parallel_for(seeds.size(), o.jobs, [&](std::size_t k) {
        ptme_run_config c = config;
        c.seed = seeds[k];
        const fs::path dir = root / std::to_string(c.seed);
        std::error_code dir_ec;
        fs::create_directories(dir, dir_ec);
        if (dir_ec) io_error("cannot create " + dir.string() + ": " + dir_ec.message());
        ptme_log* raw = nullptr;
        check(ptme_run(problem.get(), &c, method.c_str(), &raw), "seed " + std::to_string(c.seed));
        Log log(raw);
        check(ptme_log_save(log.get(), (dir / "log.jsonl").string().c_str(), (dir / "meta.json").string().c_str()));
        if (!o.quiet) {
            std::lock_guard lock(print_mu);
            std::cout << (dir / "log.jsonl").string() << '\n';
        }
    });
    return kOk;
}

// ---- metrics / compare -----------------------------------------------------

struct LogScores {
    std::string path, method;
    std::string seed;
    std::vector<double> qd;
    double mr = 0.0;
};

std::string label(const json& meta, const char* key, const std::string& fallback) {
    if (!meta.contains(key)) return fallback;
    const json& v = meta[key];
    return v.is_string() ? v.get<std::string>() : v.dump();
}

struct MetricsOptions {
    std::vector<std::string> logs;
    std::optional<std::string> schedule;
    std::uint64_t master_seed = 0;
    std::string out = "metrics";
    unsigned jobs = default_jobs();
};

std::vector<LogScores> score_logs(const MetricsOptions& o, std::vector<std::uint64_t>& schedule) {
    if (o.logs.empty()) invalid("no logs given");
    std::vector<Log> logs;
    std::vector<LogScores> scores(o.logs.size());
    std::uint64_t shortest = UINT64_MAX;
    for (std::size_t i = 0; i < o.logs.size(); ++i) {
        fs::path p(o.logs[i]);
        logs.push_back(open_log(p));
        json meta = metadata_of(logs.back().get());
        scores[i].path = o.logs[i];
        scores[i].method = label(meta, "method", p.parent_path().parent_path().filename().string());
        scores[i].seed = label(meta, "seed", p.parent_path().filename().string());
        shortest = std::min<std::uint64_t>(shortest, ptme_log_size(logs.back().get()));
    }
    schedule = schedule_from(o.schedule, shortest);
    if (schedule.empty()) invalid("schedule: empty");
    parallel_for(logs.size(), o.jobs, [&](std::size_t i) {
        scores[i].qd.resize(schedule.size());
        check(ptme_qd_scores(logs[i].get(), schedule.data(), schedule.size(), o.master_seed, scores[i].qd.data()),
              scores[i].path);
        double sum = 0.0;
        for (double q : scores[i].qd) sum += q;
        scores[i].mr = sum / static_cast<double>(schedule.size());
    });
    return scores;
}

std::map<std::string, std::vector<double>> by_method(const std::vector<LogScores>& scores) {
    std::map<std::string, std::vector<double>> out;
    for (const auto& s : scores) out[s.method].push_back(s.mr);
    return out;
}

void write_metric_tables(const std::vector<LogScores>& scores, const std::vector<std::uint64_t>& schedule,
                         const fs::path& dir) {
    auto qd = open_output(dir / "qd_scores.csv");
    qd << "method,seed,log,resolution,qd_score\n";
    for (const auto& s : scores)
        for (std::size_t r = 0; r < schedule.size(); ++r)
            qd << s.method << ',' << s.seed << ',' << s.path << ',' << schedule[r] << ',' << fmt(s.qd[r]) << '\n';

    auto mr = open_output(dir / "mr_qd_scores.csv");
    mr << "method,seed,log,mr_qd_score\n";
    for (const auto& s : scores) mr << s.method << ',' << s.seed << ',' << s.path << ',' << fmt(s.mr) << '\n';

    auto groups = by_method(scores);
    auto pv = open_output(dir / "pvalues.csv");
    pv << "method_a,method_b,p_value\n";
    for (const auto& [a, va] : groups)
        for (const auto& [b, vb] : groups) {
            if (a == b) continue;
            double p = 1.0;
            check(ptme_rank_sum_test(va.data(), va.size(), vb.data(), vb.size(), &p), "rank-sum");
            pv << a << ',' << b << ',' << fmt(p) << '\n';
        }
}

int cmd_metrics(const MetricsOptions& o) {
    std::vector<std::uint64_t> schedule;
    auto scores = score_logs(o, schedule);
    write_metric_tables(scores, schedule, o.out);
    return kOk;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct CompareOptions {
    std::string root;
    std::optional<std::string> methods;
    MetricsOptions metrics;
};

int cmd_compare(CompareOptions o) {
    const fs::path root(o.root);
    if (!fs::is_directory(root)) io_error("not a directory: " + o.root);
    std::vector<std::string> wanted;
    if (o.methods) {
        std::stringstream ss(*o.methods);
        for (std::string m; std::getline(ss, m, ',');) wanted.push_back(m);
    }
    std::vector<std::string> logs;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file() && entry.path().filename() == "log.jsonl") {
            const std::string method = entry.path().parent_path().parent_path().filename().string();
            if (wanted.empty() || std::find(wanted.begin(), wanted.end(), method) != wanted.end())
                logs.push_back(entry.path().string());
        }
    std::sort(logs.begin(), logs.end());
    if (logs.empty()) invalid("no logs under " + o.root);
    o.metrics.logs = logs;

    std::vector<std::uint64_t> schedule;
    auto scores = score_logs(o.metrics, schedule);
    write_metric_tables(scores, schedule, o.metrics.out);

    auto groups = by_method(scores);
    auto summary = open_output(fs::path(o.metrics.out) / "summary.csv");
    summary << "method,runs,median_mr_qd_score\n";
    std::cout << "method,runs,median_mr_qd_score\n";
    for (const auto& [m, v] : groups) {
        const std::string row = m + ',' + std::to_string(v.size()) + ',' + fmt(median(v)) + '\n';
        summary << row;
        std::cout << row;
    }
    return kOk;
}

// ---- distill / infer ---------------------------------------------------------

struct DistillOptions {
    std::string log;
    std::uint64_t resolution = 5000;
    std::string out = "policy.json";
    std::uint64_t master_seed = 0, train_seed = 0, probe_seed = 0;
    std::uint64_t probes = 0;
    std::optional<std::string> problem, report;
    std::optional<std::size_t> max_epochs;
};

std::string problem_for(const ptme_log* log, const std::optional<std::string>& flag) {
    if (flag) return *flag;
    json meta = metadata_of(log);
    if (meta.contains("problem") && meta["problem"].is_string()) return meta["problem"].get<std::string>();
    invalid("--problem required: log metadata does not name one");
}

int cmd_distill(const DistillOptions& o) {
    if (o.resolution < 2) invalid("resolution must be at least 2");
    Log log = open_log(o.log);
    ptme_train_settings settings;
    ptme_train_settings_init(&settings);
    if (o.max_epochs) settings.max_epochs = *o.max_epochs;
    ptme_policy* raw = nullptr;
    check(ptme_policy_distill(log.get(), o.resolution, o.master_seed, &settings, o.train_seed, &raw), "distill");
    Policy policy(raw);
    {
        std::error_code ec;
        fs::path out(o.out);
        if (out.has_parent_path()) fs::create_directories(out.parent_path(), ec);
    }
    check(ptme_policy_save(policy.get(), o.out.c_str()));
    if (o.probes == 0) return kOk;

    Problem problem = open_problem(problem_for(log.get(), o.problem));
    double score = 0.0;
    check(ptme_inference_score(policy.get(), problem.get(), o.probes, o.probe_seed, &score), "inference");
    const std::string header = "log,resolution,probes,inference_score\n";
    const std::string row = o.log + ',' + std::to_string(o.resolution) + ',' + std::to_string(o.probes) + ',' +
                            fmt(score) + '\n';
    if (o.report) {
        auto rep = open_output(*o.report);
        rep << header << row;
    }
    std::cout << header << row;
    return kOk;
}

struct InferOptions {
    std::string policy;
    std::vector<std::string> thetas;
    std::optional<std::string> problem;
    std::uint64_t probes = 0, probe_seed = 0;
};

int cmd_infer(const InferOptions& o) {
    ptme_policy* raw = nullptr;
    check(ptme_policy_load(o.policy.c_str(), &raw));
    Policy policy(raw);
    Problem problem;
    if (o.problem) problem = open_problem(*o.problem);
    if (o.thetas.empty() && o.probes == 0) invalid("give --theta or --probes");

    const std::size_t dt = ptme_policy_input_dim(policy.get()), dx = ptme_policy_output_dim(policy.get());
    if (!o.thetas.empty()) {
        for (std::size_t i = 0; i < dt; ++i) std::cout << "theta" << i << ',';
        for (std::size_t i = 0; i < dx; ++i) std::cout << "x" << i << (i + 1 < dx || problem ? "," : "");
        std::cout << (problem ? "f\n" : "\n");
        for (const auto& text : o.thetas) {
            auto theta = parse_doubles(text);
            std::vector<double> x(dx);
            check(ptme_policy_infer(policy.get(), theta.data(), theta.size(), x.data(), x.size()), "theta " + text);
            for (double t : theta) std::cout << fmt(t) << ',';
            for (std::size_t i = 0; i < dx; ++i) std::cout << fmt(x[i]) << (i + 1 < dx || problem ? "," : "");
            if (problem) {
                double f = 0.0;
                check(ptme_problem_evaluate(problem.get(), x.data(), x.size(), theta.data(), theta.size(), &f));
                std::cout << fmt(f);
            }
            std::cout << '\n';
        }
    }
    if (o.probes > 0) {
        if (!problem) invalid("--probes needs --problem");
        double score = 0.0;
        check(ptme_inference_score(policy.get(), problem.get(), o.probes, o.probe_seed, &score), "inference");
        std::cout << "probes,inference_score\n" << o.probes << ',' << fmt(score) << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parametric-task MAP-Elites experiments"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run one method over several seeds");
    run_cmd->add_option("--manifest", run.manifest, "Experiment manifest (JSON)");
    run_cmd->add_option("--problem", run.problem, "arm10, archery or linear_toy(seed)");
    run_cmd->add_option("--method", run.method, "ptme, ptme_no_reg, ptme_full_reg, ptme_no_tournament, "
                                                "ptme_no_reg_no_tournament, mtme(K) or random");
    run_cmd->add_option("--budget", run.budget, "Evaluations per run");
    run_cmd->add_option("--cells", run.cells, "Archive cells");
    run_cmd->add_option("--seeds", run.seeds, "Seeds, e.g. 0..9 or 1,4,7");
    run_cmd->add_option("--out", run.out, "Output directory");
    run_cmd->add_option("--tasks", run.tasks, "Task pool size for mtme");
    run_cmd->add_option("--sigma-sbx", run.sigma_sbx, "SBX distribution index");
    run_cmd->add_option("--sigma-reg", run.sigma_reg, "Regression noise factor");
    run_cmd->add_option("--regression-fraction", run.regression_fraction, "Probability of the regression operator");
    run_cmd->add_option("--tournament-sizes", run.sizes, "Comma-separated bandit arms");
    run_cmd->add_option("--jobs", run.jobs, "Parallel runs")->check(CLI::PositiveNumber);
    run_cmd->add_flag("--quiet", run.quiet, "Do not list written logs");

    MetricsOptions metrics;
    auto* metrics_cmd = app.add_subcommand("metrics", "QD-Score tables and rank-sum p-values for logs");
    metrics_cmd->add_option("logs", metrics.logs, "Evaluation logs (JSON Lines)")->required();
    metrics_cmd->add_option("--schedule", metrics.schedule, "logspace:LO:HI:COUNT or a,b,c");
    metrics_cmd->add_option("--master-seed", metrics.master_seed, "Seed of the re-archiving tessellations");
    metrics_cmd->add_option("--out", metrics.out, "Output directory");
    metrics_cmd->add_option("--jobs", metrics.jobs, "Parallel logs")->check(CLI::PositiveNumber);

    CompareOptions compare;
    auto* compare_cmd = app.add_subcommand("compare", "Metrics and per-method medians for a run directory");
    compare_cmd->add_option("root", compare.root, "Directory written by `run`")->required();
    compare_cmd->add_option("--methods", compare.methods, "Comma-separated subset of methods");
    compare_cmd->add_option("--schedule", compare.metrics.schedule, "logspace:LO:HI:COUNT or a,b,c");
    compare_cmd->add_option("--master-seed", compare.metrics.master_seed, "Seed of the re-archiving tessellations");
    compare_cmd->add_option("--out", compare.metrics.out, "Output directory");
    compare_cmd->add_option("--jobs", compare.metrics.jobs, "Parallel logs")->check(CLI::PositiveNumber);

    DistillOptions distill;
    auto* distill_cmd = app.add_subcommand("distill", "Train a task-to-solution policy from a log");
    distill_cmd->add_option("log", distill.log, "Evaluation log")->required();
    distill_cmd->add_option("--resolution", distill.resolution, "Re-archiving resolution (>= 2)");
    distill_cmd->add_option("--out", distill.out, "Policy file");
    distill_cmd->add_option("--master-seed", distill.master_seed, "Seed of the re-archiving tessellation");
    distill_cmd->add_option("--train-seed", distill.train_seed, "Seed of initialization and batching");
    distill_cmd->add_option("--max-epochs", distill.max_epochs, "Epoch cap");
    distill_cmd->add_option("--probes", distill.probes, "Inference probes (0 skips evaluation)");
    distill_cmd->add_option("--probe-seed", distill.probe_seed, "Seed of the probe tessellation");
    distill_cmd->add_option("--problem", distill.problem, "Problem, if the log metadata lacks it");
    distill_cmd->add_option("--report", distill.report, "Inference report CSV");

    InferOptions infer;
    auto* infer_cmd = app.add_subcommand("infer", "Query a policy");
    infer_cmd->add_option("policy", infer.policy, "Policy file")->required();
    infer_cmd->add_option("--theta", infer.thetas, "Task as comma-separated values (repeatable)");
    infer_cmd->add_option("--problem", infer.problem, "Evaluate outputs on this problem");
    infer_cmd->add_option("--probes", infer.probes, "Report the inference score over this many probes");
    infer_cmd->add_option("--probe-seed", infer.probe_seed, "Seed of the probe tessellation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*metrics_cmd) return cmd_metrics(metrics);
        if (*compare_cmd) return cmd_compare(compare);
        if (*distill_cmd) return cmd_distill(distill);
        if (*infer_cmd) return cmd_infer(infer);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
