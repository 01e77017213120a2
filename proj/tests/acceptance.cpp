// End-to-end acceptance runner. Prints one PASS/FAIL line per criterion and
// exits non-zero if any selected criterion fails.
//
//   acceptance [--only N]... [--seeds K]
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "property_checks.hpp"
#include "ptme/distill.hpp"
#include "ptme/engine.hpp"
#include "ptme/metrics.hpp"
#include "ptme/problems.hpp"

namespace {

using namespace ptme;

struct Outcome {
    bool passed;
    std::string detail;
};

std::string num(double v, int precision = 4) {
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

class Runner {
public:
    explicit Runner(std::size_t seeds) : seeds_(seeds) {}

    std::size_t seeds() const { return seeds_; }

    /// Logs are memoized so criteria sharing a setting reuse the runs.
    const EvaluationLog& log(const std::string& problem, const std::string& method, std::uint64_t budget,
                             std::uint64_t seed) {
        auto key = std::make_tuple(problem, method, budget, seed);
        auto it = logs_.find(key);
        if (it != logs_.end()) return it->second;
        RunConfig config = config_for_method(method);
        config.budget = budget;
        config.cells = 200;
        config.seed = seed;
        auto p = make_problem(problem);
        return logs_.emplace(key, run(*p, config, method).log).first->second;
    }

    std::vector<double> mr_qd(const std::string& problem, const std::string& method, std::uint64_t budget) {
        const auto schedule = default_schedule(budget);
        std::vector<double> out;
        for (std::uint64_t s = 0; s < seeds_; ++s) out.push_back(mr_qd_score(log(problem, method, budget, s), schedule, 0));
        return out;
    }

private:
    std::size_t seeds_;
    std::map<std::tuple<std::string, std::string, std::uint64_t, std::uint64_t>, EvaluationLog> logs_;
};

Outcome archery_end_to_end(Runner& r) {
    const ArcheryProblem archery;
    std::vector<double> scores;
    for (std::uint64_t s = 0; s < r.seeds(); ++s) {
        RunConfig config;
        config.budget = 100000;
        config.cells = 200;
        config.seed = s;
        const EvaluationLog log = run(archery, config, "ptme").log;
        const MlpPolicy policy = distill_log(log, 5000, 0, TrainSettings{}, s);
        scores.push_back(inference_score([&](std::span<const double> t) { return policy.infer(t); }, archery, 10000, 0));
    }
    const double med = median(scores), lo = *std::min_element(scores.begin(), scores.end());
    return {med >= 0.99 && lo >= 0.95, "inference score median " + num(med) + ", min " + num(lo)};
}

Outcome archery_ordering(Runner& r) {
    const auto ptme = r.mr_qd("archery", "ptme", 20000);
    const auto no_reg = r.mr_qd("archery", "ptme_no_reg", 20000);
    const auto random = r.mr_qd("archery", "random", 20000);
    const double p = rank_sum_test(ptme, random);
    const bool ok = median(ptme) > median(no_reg) && median(no_reg) > median(random) && p < 0.01;
    return {ok, "MR-QD medians ptme " + num(median(ptme), 6) + " > no_reg " + num(median(no_reg), 6) + " > random " +
                    num(median(random), 6) + ", p(ptme>random) " + num(p, 3)};
}

Outcome fixed_task_cliff(Runner& r) {
    constexpr std::size_t kResolution = 20000;
    std::vector<double> ptme, mtme;
    for (std::uint64_t s = 0; s < r.seeds(); ++s) {
        ptme.push_back(qd_score(rearchive(r.log("archery", "ptme", 20000, s), kResolution, 0)) / kResolution);
        mtme.push_back(qd_score(rearchive(r.log("archery", "mtme(1000)", 20000, s), kResolution, 0)) / kResolution);
    }
    const double ratio = median(ptme) / median(mtme);
    return {ratio >= 2.0, "QD-Score per cell at 20000 cells: ptme " + num(median(ptme)) + ", mtme(1000) " +
                              num(median(mtme)) + ", ratio " + num(ratio, 3)};
}

Outcome random_sparsity(Runner& r) {
    const EvaluationLog& log = r.log("archery", "random", 100000, 0);
    const auto& f = log.fitnesses();
    const double share = static_cast<double>(std::count_if(f.begin(), f.end(), [](double v) { return v > 0.0; })) /
                         static_cast<double>(f.size());
    return {share >= 0.03 && share <= 0.07, "nonzero fitness share " + num(share) + " over " + std::to_string(f.size())};
}

Outcome linear_toy_oracle(Runner&) {
    constexpr std::size_t kInstances = 5;
    double worst_fitness = 1.0, worst_distance = 0.0;
    for (std::uint64_t s = 0; s < kInstances; ++s) {
        const LinearToyProblem toy(s);
        RunConfig config;
        config.budget = 10000;
        config.cells = 200;
        config.seed = s;
        const RunResult result = run(toy, config, "ptme");
        const Archive& archive = *result.archive;
        double total = 0.0;
        for (std::size_t c = 0; c < archive.size(); ++c) total += archive.fitness(c);
        worst_fitness = std::min(worst_fitness, total / static_cast<double>(archive.size()));

        // Distill at budget/20 cells, the same ratio as 5000 cells for 10^5 evaluations.
        const MlpPolicy policy = distill_log(result.log, 500, 0, TrainSettings{}, s);
        const auto probes = cached_tessellation(1000, toy.task_dim(), derive_seed(s, 0x70));
        double distance = 0.0;
        for (std::size_t i = 0; i < probes->size(); ++i) {
            const auto theta = probes->centroid(i);
            const auto x = policy.infer(theta);
            const Eigen::VectorXd opt = toy.optimum(theta);
            distance += (Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) - opt).norm();
        }
        worst_distance = std::max(worst_distance, distance / static_cast<double>(probes->size()));
    }
    return {worst_fitness > 0.95 && worst_distance < 0.05,
            "over " + std::to_string(kInstances) + " instances: worst mean elite fitness " + num(worst_fitness) +
                ", worst mean policy distance to optimum " + num(worst_distance)};
}

Outcome property_suites(Runner&) {
    using namespace ptme::checks;
    const std::vector<std::pair<const char*, CheckResult>> results = {
        {"nearest-cell", nearest_neighbor_exactness(10, 1000, 1)},
        {"prefix monotonicity", rearchive_prefix_monotonicity(2)},
        {"sbx fixed point", sbx_fixed_point(10000, 3)},
        {"affine recovery", regression_affine_recovery(4)},
        {"ucb1 arms", bandit_best_arm_share(10000, 5)},
        {"mlp gradient", mlp_gradient(6)},
        {"log replay", log_replay(7)},
    };
    bool ok = true;
    std::string detail;
    for (const auto& [name, r] : results) {
        ok = ok && r.passed;
        detail += std::string("\n      ") + (r.passed ? "ok   " : "FAIL ") + name + ": " + r.detail;
    }
    return {ok, "7 suites" + detail};
}

Outcome arm_ordering(Runner& r) {
    const auto ptme = r.mr_qd("arm10", "ptme", 20000);
    const auto random = r.mr_qd("arm10", "random", 20000);
    const double m_ptme = median(ptme), m_random = median(random);
    bool ok = true;
    std::string detail = "MR-QD medians ptme " + num(m_ptme, 6);
    for (const char* ablation : {"ptme_no_reg", "ptme_full_reg", "ptme_no_tournament", "ptme_no_reg_no_tournament"}) {
        const double m = median(r.mr_qd("arm10", ablation, 20000));
        ok = ok && m_ptme > m && m > m_random;
        detail += std::string(", ") + ablation + " " + num(m, 6);
    }
    const double p = rank_sum_test(ptme, random);
    ok = ok && p < 0.01;
    return {ok, detail + ", random " + num(m_random, 6) + ", p(ptme>random) " + num(p, 3)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    std::size_t seeds = 10;
    app.add_option("--only", only, "Run only these criteria (1-7)")->check(CLI::Range(1, 7));
    app.add_option("--seeds", seeds, "Replications per method")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome(Runner&)>>> criteria = {
        {"archery end-to-end inference", archery_end_to_end},
        {"archery method ordering", archery_ordering},
        {"fixed-task resolution cliff", fixed_task_cliff},
        {"random-search sparsity", random_sparsity},
        {"linear toy oracle", linear_toy_oracle},
        {"property suites", property_suites},
        {"arm method ordering", arm_ordering},
    };
    const std::set<int> selected(only.begin(), only.end());
    Runner runner(seeds);
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!selected.empty() && !selected.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome{false, ""};
        try {
            outcome = criteria[i].second(runner);
        } catch (const std::exception& e) {
            outcome = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !outcome.passed;
        std::printf("criterion %d %s: %s (%s) [%.0fs]\n", id, outcome.passed ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), outcome.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
