#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "ptme/archive.hpp"
#include "ptme/evaluation_log.hpp"
#include "ptme/problems.hpp"

namespace ptme {

// --- resolution schedules ---------------------------------------------------

/// `count` points evenly spaced in log10 between lo and hi, rounded to
/// integers; duplicates collapse, so the result may be shorter than count.
std::vector<std::uint64_t> logspace_schedule(std::uint64_t lo, std::uint64_t hi, std::size_t count);

/// 50 log-spaced resolutions from 1 to min(100000, budget).
std::vector<std::uint64_t> default_schedule(std::uint64_t budget);

/// "logspace:LO:HI:COUNT" or a comma-separated list of cell counts (kept as
/// given, duplicates included).
std::vector<std::uint64_t> parse_schedule(std::string_view text);

// --- re-archiving -----------------------------------------------------------------

/// CVT seed used when re-archiving at resolution `cells`; shared by every log
/// compared under the same master seed.
std::uint64_t rearchive_seed(std::uint64_t cells, std::uint64_t master_seed);

/// Process-wide memo of CVT tessellations keyed by (cells, dim, seed).
/// Thread-safe; building the same key twice concurrently is serialized.
std::shared_ptr<const Tessellation> cached_tessellation(std::size_t cells, std::size_t dim, std::uint64_t seed);

/// Replays the log in order into a fresh archive over `tessellation`; a cell
/// takes an evaluation iff its f >= the cell's current f (empty cells hold 0).
Archive rearchive(const EvaluationLog& log, std::shared_ptr<const Tessellation> tessellation);
Archive rearchive(const EvaluationLog& log, std::size_t cells, std::uint64_t master_seed);

// --- scores ---------------------------------------------------------------------------

/// Sum of elite fitness; empty cells contribute 0.
double qd_score(const Archive& archive);

std::vector<double> qd_scores(const EvaluationLog& log, std::span<const std::uint64_t> schedule,
                              std::uint64_t master_seed);

/// Mean QD-Score over the schedule.
double mr_qd_score(const EvaluationLog& log, std::span<const std::uint64_t> schedule, std::uint64_t master_seed);

using PolicyFn = std::function<std::vector<double>(std::span<const double>)>;

/// Mean fitness of policy(theta) over the centroids of an m-cell CVT of the
/// task space built from `probe_seed`.
double inference_score(const PolicyFn& policy, const Problem& problem, std::size_t probes,
                       std::uint64_t probe_seed);

// --- significance -----------------------------------------------------------------

/// One-sided Mann-Whitney U p-value for the alternative "a tends to exceed b".
/// Exact null distribution (midranks for ties) when min(|a|,|b|) <= 8,
/// tie-corrected normal approximation otherwise.
double rank_sum_test(std::span<const double> a, std::span<const double> b);

}  // namespace ptme
