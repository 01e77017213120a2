#include "ptme/ptme.h"

#include <algorithm>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "ptme/distill.hpp"
#include "ptme/engine.hpp"
#include "ptme/error.hpp"
#include "ptme/evaluation_log.hpp"
#include "ptme/metrics.hpp"
#include "ptme/problems.hpp"
#include "ptme/tessellation.hpp"

struct ptme_problem {
    std::shared_ptr<const ptme::Problem> impl;
    std::string name;
};

struct ptme_tessellation {
    ptme::Tessellation impl;
};

struct ptme_log {
    ptme::EvaluationLog impl;
    std::string metadata_text;
};

struct ptme_policy {
    ptme::MlpPolicy impl;
};

namespace {

thread_local std::string last_error;

ptme_status fail(ptme_status status, const std::string& message) {
    last_error = message;
    return status;
}

ptme_status status_for(ptme::ErrorKind kind) {
    switch (kind) {
        case ptme::ErrorKind::InvalidArgument: return PTME_ERR_INVALID_ARGUMENT;
        case ptme::ErrorKind::Io: return PTME_ERR_IO;
        case ptme::ErrorKind::Parse: return PTME_ERR_PARSE;
        case ptme::ErrorKind::DegenerateGeometry: return PTME_ERR_DEGENERATE_GEOMETRY;
        case ptme::ErrorKind::InsufficientData: return PTME_ERR_INSUFFICIENT_DATA;
        case ptme::ErrorKind::Numerical: return PTME_ERR_NUMERICAL;
    }
    return PTME_ERR_INTERNAL;
}

template <class F>
ptme_status guarded(F&& body) {
    try {
        body();
        return PTME_OK;
    } catch (const ptme::Error& e) {
        return fail(status_for(e.kind()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(PTME_ERR_PARSE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PTME_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PTME_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PTME_ERR_INTERNAL, "unknown error");
    }
}

void require(bool condition, const char* message) {
    if (!condition) throw ptme::InvalidArgument(message);
}

ptme::RunConfig to_core(const ptme_run_config& c) {
    require(c.tournament_size_count <= PTME_MAX_TOURNAMENT_SIZES, "too many tournament sizes");
    ptme::RunConfig out;
    out.budget = c.budget;
    out.cells = c.cells;
    out.tournament_sizes.assign(c.tournament_sizes, c.tournament_sizes + c.tournament_size_count);
    out.sigma_sbx = c.sigma_sbx;
    out.sigma_reg = c.sigma_reg;
    out.regression_fraction = c.regression_fraction;
    out.tournament_enabled = c.tournament_enabled != 0;
    switch (c.mode) {
        case PTME_MODE_PARAMETRIC: out.mode = ptme::RunMode::Parametric; break;
        case PTME_MODE_FIXED_TASKS: out.mode = ptme::RunMode::FixedTasks; break;
        case PTME_MODE_RANDOM_SEARCH: out.mode = ptme::RunMode::RandomSearch; break;
        default: throw ptme::InvalidArgument("unknown run mode");
    }
    out.fixed_tasks = c.fixed_tasks;
    out.seed = c.seed;
    return out;
}

void from_core(const ptme::RunConfig& c, ptme_run_config& out) {
    require(c.tournament_sizes.size() <= PTME_MAX_TOURNAMENT_SIZES, "too many tournament sizes");
    out.budget = c.budget;
    out.cells = c.cells;
    std::fill(std::begin(out.tournament_sizes), std::end(out.tournament_sizes), 0u);
    std::copy(c.tournament_sizes.begin(), c.tournament_sizes.end(), out.tournament_sizes);
    out.tournament_size_count = c.tournament_sizes.size();
    out.sigma_sbx = c.sigma_sbx;
    out.sigma_reg = c.sigma_reg;
    out.regression_fraction = c.regression_fraction;
    out.tournament_enabled = c.tournament_enabled ? 1 : 0;
    switch (c.mode) {
        case ptme::RunMode::Parametric: out.mode = PTME_MODE_PARAMETRIC; break;
        case ptme::RunMode::FixedTasks: out.mode = PTME_MODE_FIXED_TASKS; break;
        case ptme::RunMode::RandomSearch: out.mode = PTME_MODE_RANDOM_SEARCH; break;
    }
    out.fixed_tasks = c.fixed_tasks;
    out.seed = c.seed;
}

ptme::TrainSettings to_core(const ptme_train_settings* s) {
    ptme::TrainSettings out;
    if (s == nullptr) return out;
    out.learning_rate = s->learning_rate;
    out.batch_size = s->batch_size;
    out.max_epochs = s->max_epochs;
    out.patience = s->patience;
    out.validation_fraction = s->validation_fraction;
    return out;
}

}  // namespace

extern "C" {

const char* ptme_last_error(void) { return last_error.c_str(); }

const char* ptme_status_string(ptme_status status) {
    switch (status) {
        case PTME_OK: return "ok";
        case PTME_ERR_INVALID_ARGUMENT: return "invalid argument";
        case PTME_ERR_IO: return "i/o error";
        case PTME_ERR_PARSE: return "parse error";
        case PTME_ERR_DEGENERATE_GEOMETRY: return "degenerate geometry";
        case PTME_ERR_INSUFFICIENT_DATA: return "insufficient data";
        case PTME_ERR_NUMERICAL: return "numerical failure";
        case PTME_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

// ---- problems

ptme_status ptme_problem_create(const char* spec, ptme_problem** out) {
    return guarded([&] {
        require(spec != nullptr && out != nullptr, "null argument");
        auto impl = ptme::make_problem(spec);
        auto name = impl->name();
        *out = new ptme_problem{std::move(impl), std::move(name)};
    });
}

void ptme_problem_destroy(ptme_problem* problem) { delete problem; }

const char* ptme_problem_name(const ptme_problem* problem) { return problem ? problem->name.c_str() : ""; }
size_t ptme_problem_solution_dim(const ptme_problem* problem) { return problem ? problem->impl->solution_dim() : 0; }
size_t ptme_problem_task_dim(const ptme_problem* problem) { return problem ? problem->impl->task_dim() : 0; }

ptme_status ptme_problem_evaluate(const ptme_problem* problem, const double* x, size_t x_len, const double* theta,
                                  size_t theta_len, double* fitness) {
    return guarded([&] {
        require(problem && x && theta && fitness, "null argument");
        *fitness = problem->impl->evaluate({x, x_len}, {theta, theta_len});
    });
}

// ---- tessellations

ptme_status ptme_tessellation_create(uint64_t cells, size_t dim, uint64_t seed, int with_adjacency,
                                     ptme_tessellation** out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        *out = new ptme_tessellation{ptme::Tessellation::build(cells, dim, seed, with_adjacency != 0)};
    });
}

ptme_status ptme_tessellation_load(const char* path, ptme_tessellation** out) {
    return guarded([&] {
        require(path && out, "null argument");
        std::ifstream in(path);
        if (!in) throw ptme::IoError(std::string("cannot open ") + path);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ptme::ParseError(std::string(path) + ": " + e.what());
        }
        *out = new ptme_tessellation{ptme::tessellation_from_json(doc)};
    });
}

ptme_status ptme_tessellation_save(const ptme_tessellation* tess, const char* path) {
    return guarded([&] {
        require(tess && path, "null argument");
        std::ofstream out(path);
        if (!out) throw ptme::IoError(std::string("cannot write ") + path);
        out << ptme::to_json(tess->impl).dump() << '\n';
        if (!out) throw ptme::IoError(std::string("write failed: ") + path);
    });
}

void ptme_tessellation_destroy(ptme_tessellation* tess) { delete tess; }
size_t ptme_tessellation_size(const ptme_tessellation* tess) { return tess ? tess->impl.size() : 0; }
size_t ptme_tessellation_dim(const ptme_tessellation* tess) { return tess ? tess->impl.dim() : 0; }

ptme_status ptme_tessellation_centroid(const ptme_tessellation* tess, size_t cell, double* out) {
    return guarded([&] {
        require(tess && out, "null argument");
        require(cell < tess->impl.size(), "cell index out of range");
        auto c = tess->impl.centroid(cell);
        std::copy(c.begin(), c.end(), out);
    });
}

ptme_status ptme_tessellation_nearest(const ptme_tessellation* tess, const double* theta, size_t theta_len,
                                      size_t* cell) {
    return guarded([&] {
        require(tess && theta && cell, "null argument");
        *cell = tess->impl.nearest_cell({theta, theta_len});
    });
}

ptme_status ptme_tessellation_neighbors(const ptme_tessellation* tess, size_t cell, size_t* out, size_t cap,
                                        size_t* count) {
    return guarded([&] {
        require(tess && count, "null argument");
        require(cell < tess->impl.size(), "cell index out of range");
        require(tess->impl.has_adjacency(), "tessellation has no adjacency");
        const auto& nb = tess->impl.neighbors(cell);
        *count = nb.size();
        if (out != nullptr) std::copy_n(nb.begin(), std::min(cap, nb.size()), out);
    });
}

// ---- runs

void ptme_run_config_init(ptme_run_config* config) {
    if (config != nullptr) from_core(ptme::RunConfig{}, *config);
}

ptme_status ptme_run_config_for_method(const char* method, ptme_run_config* config) {
    return guarded([&] {
        require(method && config, "null argument");
        from_core(ptme::config_for_method(method, to_core(*config)), *config);
    });
}

ptme_status ptme_run_config_validate(const ptme_run_config* config) {
    return guarded([&] {
        require(config != nullptr, "null argument");
        to_core(*config).validate();
    });
}

ptme_status ptme_run_config_apply_json(const char* json, ptme_run_config* config) {
    return guarded([&] {
        require(json && config, "null argument");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(json);
        } catch (const nlohmann::json::exception& e) {
            throw ptme::ParseError(std::string("config: ") + e.what());
        }
        require(doc.is_object(), "config: expected a JSON object");
        from_core(ptme::run_config_from_json(doc, to_core(*config)), *config);
    });
}

ptme_status ptme_run(const ptme_problem* problem, const ptme_run_config* config, const char* method,
                     ptme_log** out) {
    return guarded([&] {
        require(problem && config && out, "null argument");
        auto result = ptme::run(*problem->impl, to_core(*config), method ? method : "");
        *out = new ptme_log{std::move(result.log), {}};
    });
}

// ---- logs

ptme_status ptme_log_load(const char* path, ptme_log** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new ptme_log{ptme::load_log(path), {}};
    });
}

ptme_status ptme_log_save(const ptme_log* log, const char* path, const char* metadata_path) {
    return guarded([&] {
        require(log && path, "null argument");
        ptme::save_log(log->impl, path);
        if (metadata_path != nullptr) ptme::save_metadata(log->impl, metadata_path);
    });
}

ptme_status ptme_log_load_metadata(ptme_log* log, const char* metadata_path) {
    return guarded([&] {
        require(log && metadata_path, "null argument");
        ptme::load_metadata(log->impl, metadata_path);
    });
}

void ptme_log_destroy(ptme_log* log) { delete log; }
size_t ptme_log_size(const ptme_log* log) { return log ? log->impl.size() : 0; }
size_t ptme_log_task_dim(const ptme_log* log) { return log ? log->impl.task_dim() : 0; }
size_t ptme_log_solution_dim(const ptme_log* log) { return log ? log->impl.solution_dim() : 0; }

ptme_status ptme_log_get(const ptme_log* log, size_t index, double* theta, double* x, double* fitness,
                         const char** op) {
    return guarded([&] {
        require(log != nullptr, "null argument");
        require(index < log->impl.size(), "record index out of range");
        if (theta != nullptr) std::ranges::copy(log->impl.theta(index), theta);
        if (x != nullptr) std::ranges::copy(log->impl.solution(index), x);
        if (fitness != nullptr) *fitness = log->impl.fitness(index);
        // Tags are string literals, so the view is null-terminated.
        if (op != nullptr) *op = ptme::operator_tag(log->impl.op(index)).data();
    });
}

const char* ptme_log_metadata(const ptme_log* log) {
    if (log == nullptr) return "";
    auto* mutable_log = const_cast<ptme_log*>(log);
    mutable_log->metadata_text = log->impl.metadata.dump();
    return mutable_log->metadata_text.c_str();
}

// ---- metrics

ptme_status ptme_schedule_logspace(uint64_t lo, uint64_t hi, size_t count, uint64_t* out, size_t* out_count) {
    return guarded([&] {
        require(out && out_count, "null argument");
        auto schedule = ptme::logspace_schedule(lo, hi, count);
        std::ranges::copy(schedule, out);
        *out_count = schedule.size();
    });
}

ptme_status ptme_schedule_parse(const char* text, uint64_t* out, size_t cap, size_t* out_count) {
    return guarded([&] {
        require(text && out_count, "null argument");
        auto schedule = ptme::parse_schedule(text);
        *out_count = schedule.size();
        if (out != nullptr) std::copy_n(schedule.begin(), std::min(cap, schedule.size()), out);
    });
}

ptme_status ptme_qd_scores(const ptme_log* log, const uint64_t* schedule, size_t count, uint64_t master_seed,
                           double* out) {
    return guarded([&] {
        require(log && schedule && out, "null argument");
        auto scores = ptme::qd_scores(log->impl, {schedule, count}, master_seed);
        std::ranges::copy(scores, out);
    });
}

ptme_status ptme_mr_qd_score(const ptme_log* log, const uint64_t* schedule, size_t count, uint64_t master_seed,
                             double* out) {
    return guarded([&] {
        require(log && schedule && out, "null argument");
        *out = ptme::mr_qd_score(log->impl, {schedule, count}, master_seed);
    });
}

ptme_status ptme_rank_sum_test(const double* a, size_t a_len, const double* b, size_t b_len, double* p_value) {
    return guarded([&] {
        require(a && b && p_value, "null argument");
        *p_value = ptme::rank_sum_test({a, a_len}, {b, b_len});
    });
}

// ---- distillation

void ptme_train_settings_init(ptme_train_settings* settings) {
    if (settings == nullptr) return;
    ptme::TrainSettings d;
    settings->learning_rate = d.learning_rate;
    settings->batch_size = d.batch_size;
    settings->max_epochs = d.max_epochs;
    settings->patience = d.patience;
    settings->validation_fraction = d.validation_fraction;
}

ptme_status ptme_policy_distill(const ptme_log* log, uint64_t resolution, uint64_t master_seed,
                                const ptme_train_settings* settings, uint64_t train_seed, ptme_policy** out) {
    return guarded([&] {
        require(log && out, "null argument");
        *out = new ptme_policy{ptme::distill_log(log->impl, resolution, master_seed, to_core(settings), train_seed)};
    });
}

ptme_status ptme_policy_load(const char* path, ptme_policy** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new ptme_policy{ptme::load_policy(path)};
    });
}

ptme_status ptme_policy_save(const ptme_policy* policy, const char* path) {
    return guarded([&] {
        require(policy && path, "null argument");
        ptme::save_policy(policy->impl, path);
    });
}

void ptme_policy_destroy(ptme_policy* policy) { delete policy; }
size_t ptme_policy_input_dim(const ptme_policy* policy) { return policy ? policy->impl.input_dim() : 0; }
size_t ptme_policy_output_dim(const ptme_policy* policy) { return policy ? policy->impl.output_dim() : 0; }

ptme_status ptme_policy_infer(const ptme_policy* policy, const double* theta, size_t theta_len, double* x,
                              size_t x_len) {
    return guarded([&] {
        require(policy && theta && x, "null argument");
        require(x_len == policy->impl.output_dim(), "output buffer has the wrong length");
        auto y = policy->impl.infer({theta, theta_len});
        std::ranges::copy(y, x);
    });
}

ptme_status ptme_inference_score(const ptme_policy* policy, const ptme_problem* problem, uint64_t probes,
                                 uint64_t probe_seed, double* score) {
    return guarded([&] {
        require(policy && problem && score, "null argument");
        const auto& mlp = policy->impl;
        *score = ptme::inference_score([&mlp](std::span<const double> t) { return mlp.infer(t); }, *problem->impl,
                                       probes, probe_seed);
    });
}

}  // extern "C"
