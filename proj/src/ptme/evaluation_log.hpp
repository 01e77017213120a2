#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ptme {

enum class Operator : std::uint8_t { Init, Sbx, Regression, Random, FixedTask };

std::string_view operator_tag(Operator op);
std::optional<Operator> parse_operator(std::string_view tag);

/// Ordered record of every (theta, x, f) evaluated by a run.
class EvaluationLog {
public:
    EvaluationLog(std::size_t task_dim, std::size_t solution_dim);

    void reserve(std::size_t count);
    void append(Operator op, std::span<const double> theta, std::span<const double> x, double f);

    std::size_t size() const { return fitness_.size(); }
    bool empty() const { return fitness_.empty(); }
    std::size_t task_dim() const { return task_dim_; }
    std::size_t solution_dim() const { return solution_dim_; }

    std::span<const double> theta(std::size_t i) const { return {thetas_.data() + i * task_dim_, task_dim_}; }
    std::span<const double> solution(std::size_t i) const {
        return {solutions_.data() + i * solution_dim_, solution_dim_};
    }
    double fitness(std::size_t i) const { return fitness_[i]; }
    Operator op(std::size_t i) const { return ops_[i]; }

    const std::vector<double>& thetas() const { return thetas_; }
    const std::vector<double>& fitnesses() const { return fitness_; }

    /// First `count` records.
    EvaluationLog prefix(std::size_t count) const;

    /// Run description written to the sidecar file (config, problem, timing).
    nlohmann::json metadata = nlohmann::json::object();

    bool operator==(const EvaluationLog& other) const;

private:
    std::size_t task_dim_;
    std::size_t solution_dim_;
    std::vector<double> thetas_;
    std::vector<double> solutions_;
    std::vector<double> fitness_;
    std::vector<Operator> ops_;
};

/// 17 significant digits, enough for an exact round trip.
std::string format_double(double value);

/// One JSON object per line: {"i","op","theta","x","f"}.
void write_jsonl(const EvaluationLog& log, std::ostream& out);
void save_log(const EvaluationLog& log, const std::filesystem::path& path);

/// Throws ParseError naming `source` and the 1-based line on malformed input.
EvaluationLog read_jsonl(std::istream& in, const std::string& source = "<stream>");
EvaluationLog load_log(const std::filesystem::path& path);

void save_metadata(const EvaluationLog& log, const std::filesystem::path& path);
/// Loads the sidecar into log.metadata; missing file leaves it empty.
void load_metadata(EvaluationLog& log, const std::filesystem::path& path);

}  // namespace ptme
