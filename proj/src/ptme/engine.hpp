#pragma once

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptme/archive.hpp"
#include "ptme/evaluation_log.hpp"
#include "ptme/problems.hpp"
#include "ptme/rng.hpp"

namespace ptme {

enum class RunMode { Parametric, FixedTasks, RandomSearch };

struct RunConfig {
    std::uint64_t budget = 100000;
    std::uint64_t cells = 200;
    std::vector<std::uint32_t> tournament_sizes{1, 5, 10, 50, 100, 500};
    double sigma_sbx = 10.0;  // SBX distribution index
    double sigma_reg = 1.0;
    double regression_fraction = 0.5;
    bool tournament_enabled = true;
    RunMode mode = RunMode::Parametric;
    std::uint64_t fixed_tasks = 5000;  // pool size in FixedTasks mode
    std::uint64_t seed = 0;

    /// Throws InvalidArgument listing every offending field.
    void validate() const;
};

/// Method names and the configuration switches they stand for:
///   ptme                      regression 0.5, tournament on
///   ptme_no_reg               regression 0,   tournament on
///   ptme_full_reg             regression 1,   tournament off
///   ptme_no_tournament        regression 0.5, tournament off
///   ptme_no_reg_no_tournament regression 0,   tournament off
///   mtme / mtme(K)            fixed pool of K CVT tasks (default 5000)
///   random                    uniform (theta, x) sampling
RunConfig config_for_method(std::string_view method, RunConfig base = {});
const std::vector<std::string>& method_names();

nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& doc, RunConfig base = {});

/// Called on every attempted archive update with the cell's fitness before
/// and after the attempt.
using CellObserver = std::function<void(std::size_t cell, double before, double after)>;

struct RunResult {
    EvaluationLog log;
    std::optional<Archive> archive;  // absent for random search
};

/// One elite per centroid, each a uniform random solution evaluated at the
/// centroid task. Appends one record per cell to `log`.
Archive initialize_archive(const Problem& problem, std::shared_ptr<const Tessellation> tessellation,
                           EvaluationLog& log, Operator tag, Rng& rng);

RunResult ptme_run(const Problem& problem, const RunConfig& config, const CellObserver& observer = {});
RunResult fixed_task_run(const Problem& problem, const RunConfig& config, const CellObserver& observer = {});
RunResult random_search_run(const Problem& problem, const RunConfig& config);

/// Dispatches on config.mode and fills log.metadata.
RunResult run(const Problem& problem, const RunConfig& config, const std::string& method = {},
              const CellObserver& observer = {});

}  // namespace ptme
