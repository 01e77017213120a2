#include "ptme/evaluation_log.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "ptme/error.hpp"

namespace ptme {

namespace {
constexpr std::array<std::string_view, 5> kOperatorTags = {"init", "sbx", "regression", "random", "fixed-task"};
}

std::string_view operator_tag(Operator op) { return kOperatorTags[static_cast<std::size_t>(op)]; }

std::optional<Operator> parse_operator(std::string_view tag) {
    for (std::size_t i = 0; i < kOperatorTags.size(); ++i)
        if (kOperatorTags[i] == tag) return static_cast<Operator>(i);
    return std::nullopt;
}

EvaluationLog::EvaluationLog(std::size_t task_dim, std::size_t solution_dim)
    : task_dim_(task_dim), solution_dim_(solution_dim) {
    if (task_dim == 0 || solution_dim == 0) throw InvalidArgument("log: dimensions must be positive");
}

void EvaluationLog::reserve(std::size_t count) {
    thetas_.reserve(count * task_dim_);
    solutions_.reserve(count * solution_dim_);
    fitness_.reserve(count);
    ops_.reserve(count);
}

void EvaluationLog::append(Operator op, std::span<const double> theta, std::span<const double> x, double f) {
    if (theta.size() != task_dim_ || x.size() != solution_dim_)
        throw InvalidArgument("log: evaluation dimensions do not match the log");
    thetas_.insert(thetas_.end(), theta.begin(), theta.end());
    solutions_.insert(solutions_.end(), x.begin(), x.end());
    fitness_.push_back(f);
    ops_.push_back(op);
}

EvaluationLog EvaluationLog::prefix(std::size_t count) const {
    count = std::min(count, size());
    EvaluationLog out(task_dim_, solution_dim_);
    out.thetas_.assign(thetas_.begin(), thetas_.begin() + static_cast<std::ptrdiff_t>(count * task_dim_));
    out.solutions_.assign(solutions_.begin(), solutions_.begin() + static_cast<std::ptrdiff_t>(count * solution_dim_));
    out.fitness_.assign(fitness_.begin(), fitness_.begin() + static_cast<std::ptrdiff_t>(count));
    out.ops_.assign(ops_.begin(), ops_.begin() + static_cast<std::ptrdiff_t>(count));
    out.metadata = metadata;
    return out;
}

bool EvaluationLog::operator==(const EvaluationLog& other) const {
    return task_dim_ == other.task_dim_ && solution_dim_ == other.solution_dim_ && thetas_ == other.thetas_ &&
           solutions_ == other.solutions_ && fitness_ == other.fitness_ && ops_ == other.ops_;
}

std::string format_double(double value) {
    std::array<char, 40> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    if (ec != std::errc()) throw NumericalFailure("log: cannot format value");
    return {buf.data(), ptr};
}

namespace {

void write_array(std::string& line, std::span<const double> values) {
    line += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_double(values[i]);
    }
    line += ']';
}

}  // namespace

void write_jsonl(const EvaluationLog& log, std::ostream& out) {
    std::string line;
    for (std::size_t i = 0; i < log.size(); ++i) {
        line.clear();
        line += "{\"i\":";
        line += std::to_string(i);
        line += ",\"op\":\"";
        line += operator_tag(log.op(i));
        line += "\",\"theta\":";
        write_array(line, log.theta(i));
        line += ",\"x\":";
        write_array(line, log.solution(i));
        line += ",\"f\":";
        line += format_double(log.fitness(i));
        line += "}\n";
        out << line;
    }
}

void save_log(const EvaluationLog& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_jsonl(log, out);
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

EvaluationLog read_jsonl(std::istream& in, const std::string& source) {
    std::optional<EvaluationLog> log;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& why) -> ParseError {
        return ParseError(source + ":" + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw fail(std::string("invalid JSON (") + e.what() + ")");
        }
        if (!rec.is_object()) throw fail("record is not an object");
        std::vector<double> theta, x;
        double f = 0.0;
        std::size_t index = 0;
        std::string tag;
        try {
            index = rec.at("i").get<std::size_t>();
            tag = rec.at("op").get<std::string>();
            theta = rec.at("theta").get<std::vector<double>>();
            x = rec.at("x").get<std::vector<double>>();
            f = rec.at("f").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw fail(std::string("missing or mistyped field (") + e.what() + ")");
        }
        const auto op = parse_operator(tag);
        if (!op) throw fail("unknown operator tag '" + tag + "'");
        if (theta.empty() || x.empty()) throw fail("empty theta or x");
        if (!std::isfinite(f)) throw fail("non-finite fitness");
        if (!log) log.emplace(theta.size(), x.size());
        if (theta.size() != log->task_dim() || x.size() != log->solution_dim())
            throw fail("dimensions differ from earlier records");
        if (index != log->size()) throw fail("record index " + std::to_string(index) + " out of sequence");
        log->append(*op, theta, x, f);
    }
    if (in.bad()) throw IoError("failed reading " + source);
    if (!log) throw ParseError(source + ": log contains no records");
    return std::move(*log);
}

EvaluationLog load_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_jsonl(in, path.string());
}

void save_metadata(const EvaluationLog& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << log.metadata.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

void load_metadata(EvaluationLog& log, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return;
    try {
        log.metadata = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace ptme
