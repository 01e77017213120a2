#include "ptme/engine.hpp"

#include <chrono>
#include <charconv>

#include "ptme/error.hpp"
#include "ptme/variation.hpp"

namespace ptme {

namespace {

constexpr std::uint64_t kTessellationSalt = 1;
constexpr std::uint64_t kLoopSalt = 2;

std::string_view mode_name(RunMode mode) {
    switch (mode) {
        case RunMode::Parametric: return "parametric";
        case RunMode::FixedTasks: return "fixed_tasks";
        case RunMode::RandomSearch: return "random_search";
    }
    return "parametric";
}

RunMode parse_mode(std::string_view name) {
    if (name == "parametric") return RunMode::Parametric;
    if (name == "fixed_tasks") return RunMode::FixedTasks;
    if (name == "random_search") return RunMode::RandomSearch;
    throw InvalidArgument("config: unknown mode '" + std::string(name) + "'");
}

std::vector<double> uniform_point(std::size_t dim, Rng& rng) {
    std::vector<double> p(dim);
    for (double& v : p) v = uniform01(rng);
    return p;
}

std::size_t uniform_index(std::size_t n, Rng& rng) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

void observe(const CellObserver& observer, std::size_t cell, double before, double after) {
    if (observer) observer(cell, before, after);
}

}  // namespace

void RunConfig::validate() const {
    std::vector<std::string> problems;
    if (budget == 0) problems.emplace_back("budget must be positive");
    switch (mode) {
        case RunMode::Parametric:
            if (cells == 0) problems.emplace_back("cells must be at least 1");
            if (budget <= cells) problems.emplace_back("budget must exceed cells");
            break;
        case RunMode::FixedTasks:
            if (fixed_tasks == 0) problems.emplace_back("fixed_tasks must be at least 1");
            if (budget <= fixed_tasks) problems.emplace_back("budget must exceed fixed_tasks");
            break;
        case RunMode::RandomSearch: break;
    }
    if (tournament_sizes.empty()) problems.emplace_back("tournament_sizes must not be empty");
    for (std::size_t i = 0; i < tournament_sizes.size(); ++i) {
        if (tournament_sizes[i] == 0) problems.emplace_back("tournament_sizes must be positive");
        for (std::size_t j = 0; j < i; ++j)
            if (tournament_sizes[i] == tournament_sizes[j]) problems.emplace_back("tournament_sizes must be distinct");
    }
    if (!(sigma_sbx >= 0.0)) problems.emplace_back("sigma_sbx must be non-negative");
    if (!(sigma_reg >= 0.0)) problems.emplace_back("sigma_reg must be non-negative");
    if (!(regression_fraction >= 0.0 && regression_fraction <= 1.0))
        problems.emplace_back("regression_fraction must lie in [0,1]");
    if (problems.empty()) return;
    std::string msg = "invalid run config:";
    for (const auto& p : problems) msg += " " + p + ";";
    msg.pop_back();
    throw InvalidArgument(msg);
}

const std::vector<std::string>& method_names() {
    static const std::vector<std::string> names = {
        "ptme", "ptme_no_reg", "ptme_full_reg", "ptme_no_tournament", "ptme_no_reg_no_tournament", "mtme", "random"};
    return names;
}

RunConfig config_for_method(std::string_view method, RunConfig base) {
    base.mode = RunMode::Parametric;
    if (method == "ptme") {
        base.regression_fraction = 0.5;
        base.tournament_enabled = true;
    } else if (method == "ptme_no_reg") {
        base.regression_fraction = 0.0;
        base.tournament_enabled = true;
    } else if (method == "ptme_full_reg") {
        base.regression_fraction = 1.0;
        base.tournament_enabled = false;
    } else if (method == "ptme_no_tournament") {
        base.regression_fraction = 0.5;
        base.tournament_enabled = false;
    } else if (method == "ptme_no_reg_no_tournament") {
        base.regression_fraction = 0.0;
        base.tournament_enabled = false;
    } else if (method == "random") {
        base.mode = RunMode::RandomSearch;
    } else if (method.substr(0, 4) == "mtme") {
        base.mode = RunMode::FixedTasks;
        base.regression_fraction = 0.0;
        base.tournament_enabled = true;
        std::string_view rest = method.substr(4);
        if (!rest.empty()) {
            if (rest.size() < 3 || rest.front() != '(' || rest.back() != ')')
                throw InvalidArgument("method: expected mtme or mtme(K), got '" + std::string(method) + "'");
            rest = rest.substr(1, rest.size() - 2);
            std::uint64_t k = 0;
            const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
            if (ec != std::errc() || ptr != rest.data() + rest.size() || k == 0)
                throw InvalidArgument("method: invalid task count in '" + std::string(method) + "'");
            base.fixed_tasks = k;
        }
    } else {
        throw InvalidArgument("method: unknown method '" + std::string(method) + "'");
    }
    return base;
}

nlohmann::json to_json(const RunConfig& c) {
    return {{"budget", c.budget},
            {"cells", c.cells},
            {"tournament_sizes", c.tournament_sizes},
            {"sigma_sbx", c.sigma_sbx},
            {"sigma_reg", c.sigma_reg},
            {"regression_fraction", c.regression_fraction},
            {"tournament_enabled", c.tournament_enabled},
            {"mode", mode_name(c.mode)},
            {"fixed_tasks", c.fixed_tasks},
            {"seed", c.seed}};
}

RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig c) {
    try {
        if (doc.contains("budget")) c.budget = doc.at("budget").get<std::uint64_t>();
        if (doc.contains("cells")) c.cells = doc.at("cells").get<std::uint64_t>();
        if (doc.contains("tournament_sizes")) c.tournament_sizes = doc.at("tournament_sizes").get<std::vector<std::uint32_t>>();
        if (doc.contains("sigma_sbx")) c.sigma_sbx = doc.at("sigma_sbx").get<double>();
        if (doc.contains("sigma_reg")) c.sigma_reg = doc.at("sigma_reg").get<double>();
        if (doc.contains("regression_fraction")) c.regression_fraction = doc.at("regression_fraction").get<double>();
        if (doc.contains("tournament_enabled")) c.tournament_enabled = doc.at("tournament_enabled").get<bool>();
        if (doc.contains("mode")) c.mode = parse_mode(doc.at("mode").get<std::string>());
        if (doc.contains("fixed_tasks")) c.fixed_tasks = doc.at("fixed_tasks").get<std::uint64_t>();
        if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    return c;
}

Archive initialize_archive(const Problem& problem, std::shared_ptr<const Tessellation> tessellation,
                           EvaluationLog& log, Operator tag, Rng& rng) {
    Archive archive(std::move(tessellation), problem.solution_dim());
    const Tessellation& tess = archive.tessellation();
    for (std::size_t c = 0; c < tess.size(); ++c) {
        const auto theta = tess.centroid(c);
        const auto x = uniform_point(problem.solution_dim(), rng);
        const double f = problem.evaluate(x, theta);
        log.append(tag, theta, x, f);
        archive.set(c, theta, x, f);
    }
    return archive;
}

RunResult ptme_run(const Problem& problem, const RunConfig& config, const CellObserver& observer) {
    config.validate();
    if (config.mode != RunMode::Parametric) throw InvalidArgument("ptme_run: config is not in parametric mode");
    const std::size_t dt = problem.task_dim();
    auto tess = std::make_shared<const Tessellation>(Tessellation::build(
        config.cells, dt, derive_seed(config.seed, kTessellationSalt), config.regression_fraction > 0.0));

    Rng rng(derive_seed(config.seed, kLoopSalt));
    EvaluationLog log(dt, problem.solution_dim());
    log.reserve(config.budget);
    Archive archive = initialize_archive(problem, tess, log, Operator::Init, rng);
    BanditState bandit(config.tournament_sizes);

    for (std::uint64_t it = config.cells; it < config.budget; ++it) {
        std::vector<double> theta, x;
        std::uint32_t size = 1;
        const bool regression = uniform01(rng) < config.regression_fraction;
        if (regression) {
            theta = uniform_point(dt, rng);
            x = local_linear_candidate(archive, theta, config.sigma_reg, rng);
        } else {
            const std::size_t p1 = uniform_index(archive.size(), rng);
            const std::size_t p2 = uniform_index(archive.size(), rng);
            if (config.tournament_enabled) size = bandit.select();
            theta = tournament_select_task(archive.theta(p1), size, rng);
            x = sbx_crossover(archive.solution(p1), archive.solution(p2), config.sigma_sbx, rng);
        }
        const double f = problem.evaluate(x, theta);
        log.append(regression ? Operator::Regression : Operator::Sbx, theta, x, f);
        const std::size_t cell = tess->nearest_cell(theta);
        const double before = archive.fitness(cell);
        const bool replaced = archive.try_insert(cell, theta, x, f);
        observe(observer, cell, before, archive.fitness(cell));
        if (!regression && config.tournament_enabled) bandit.update(size, replaced);
    }
    return RunResult{std::move(log), std::move(archive)};
}

RunResult fixed_task_run(const Problem& problem, const RunConfig& config, const CellObserver& observer) {
    config.validate();
    if (config.mode != RunMode::FixedTasks) throw InvalidArgument("fixed_task_run: config is not in fixed-task mode");
    const std::size_t dt = problem.task_dim();
    auto pool = std::make_shared<const Tessellation>(
        Tessellation::build(config.fixed_tasks, dt, derive_seed(config.seed, kTessellationSalt), false));

    Rng rng(derive_seed(config.seed, kLoopSalt));
    EvaluationLog log(dt, problem.solution_dim());
    log.reserve(config.budget);
    Archive archive = initialize_archive(problem, pool, log, Operator::Init, rng);
    BanditState bandit(config.tournament_sizes);
    const std::size_t k = archive.size();

    std::vector<double> candidates;
    for (std::uint64_t it = k; it < config.budget; ++it) {
        const std::size_t p1 = uniform_index(k, rng);
        const std::size_t p2 = uniform_index(k, rng);
        const std::uint32_t size = config.tournament_enabled ? bandit.select() : 1;
        std::vector<std::size_t> picks(size);
        candidates.clear();
        for (auto& pick : picks) {
            pick = uniform_index(k, rng);
            const auto t = pool->centroid(pick);
            candidates.insert(candidates.end(), t.begin(), t.end());
        }
        const std::size_t task = picks[closest_candidate(candidates, archive.theta(p1))];
        const auto theta = pool->centroid(task);
        const auto x = sbx_crossover(archive.solution(p1), archive.solution(p2), config.sigma_sbx, rng);
        const double f = problem.evaluate(x, theta);
        log.append(Operator::FixedTask, theta, x, f);
        const double before = archive.fitness(task);
        const bool replaced = archive.try_insert(task, theta, x, f);
        observe(observer, task, before, archive.fitness(task));
        if (config.tournament_enabled) bandit.update(size, replaced);
    }
    return RunResult{std::move(log), std::move(archive)};
}

RunResult random_search_run(const Problem& problem, const RunConfig& config) {
    config.validate();
    Rng rng(derive_seed(config.seed, kLoopSalt));
    EvaluationLog log(problem.task_dim(), problem.solution_dim());
    log.reserve(config.budget);
    for (std::uint64_t it = 0; it < config.budget; ++it) {
        const auto theta = uniform_point(problem.task_dim(), rng);
        const auto x = uniform_point(problem.solution_dim(), rng);
        log.append(Operator::Random, theta, x, problem.evaluate(x, theta));
    }
    return RunResult{std::move(log), std::nullopt};
}

RunResult run(const Problem& problem, const RunConfig& config, const std::string& method,
              const CellObserver& observer) {
    const auto start = std::chrono::steady_clock::now();
    RunResult result = [&] {
        switch (config.mode) {
            case RunMode::FixedTasks: return fixed_task_run(problem, config, observer);
            case RunMode::RandomSearch: return random_search_run(problem, config);
            case RunMode::Parametric: break;
        }
        return ptme_run(problem, config, observer);
    }();
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.log.metadata = {{"problem", problem.name()},
                           {"method", method},
                           {"seed", config.seed},
                           {"config", to_json(config)},
                           {"evaluations", result.log.size()},
                           {"task_dim", problem.task_dim()},
                           {"solution_dim", problem.solution_dim()},
                           {"wall_time_seconds", elapsed.count()}};
    return result;
}

}  // namespace ptme
