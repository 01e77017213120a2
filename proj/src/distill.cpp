#include "ptme/distill.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "ptme/error.hpp"
#include "ptme/metrics.hpp"

namespace ptme {

MlpPolicy::MlpPolicy(const std::vector<std::size_t>& widths, Rng& rng) {
    if (widths.size() < 2) throw InvalidArgument("mlp: need at least an input and an output width");
    for (std::size_t w : widths)
        if (w == 0) throw InvalidArgument("mlp: layer widths must be positive");
    for (std::size_t l = 1; l < widths.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(widths[l - 1]);
        const auto out = static_cast<Eigen::Index>(widths[l]);
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        DenseLayer layer{Eigen::MatrixXd(out, in), Eigen::VectorXd::Zero(out)};
        for (Eigen::Index i = 0; i < out; ++i)
            for (Eigen::Index j = 0; j < in; ++j) layer.weight(i, j) = dist(rng);
        layers_.push_back(std::move(layer));
    }
}

MlpPolicy::MlpPolicy(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw InvalidArgument("mlp: no layers");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (layer.weight.rows() == 0 || layer.weight.cols() == 0 || layer.bias.size() != layer.weight.rows())
            throw InvalidArgument("mlp: layer " + std::to_string(l) + " has inconsistent shapes");
        if (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows())
            throw InvalidArgument("mlp: layer " + std::to_string(l) + " does not chain with its predecessor");
        if (!layer.weight.allFinite() || !layer.bias.allFinite())
            throw InvalidArgument("mlp: non-finite weights");
    }
}

std::vector<std::size_t> MlpPolicy::widths() const {
    std::vector<std::size_t> w{input_dim()};
    for (const auto& layer : layers_) w.push_back(static_cast<std::size_t>(layer.weight.rows()));
    return w;
}

std::size_t MlpPolicy::parameter_count() const {
    std::size_t total = 0;
    for (const auto& layer : layers_) total += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
    return total;
}

Eigen::MatrixXd MlpPolicy::forward(const Eigen::MatrixXd& inputs) const {
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Eigen::MatrixXd z = layers_[l].weight * a;
        z.colwise() += layers_[l].bias;
        a = l + 1 < layers_.size() ? Eigen::MatrixXd(z.array().tanh()) : z;
    }
    return a;
}

std::vector<double> MlpPolicy::infer(std::span<const double> theta) const {
    if (theta.size() != input_dim())
        throw InvalidArgument("policy: expected a " + std::to_string(input_dim()) + "-dimensional task, got " +
                              std::to_string(theta.size()));
    Eigen::MatrixXd in(static_cast<Eigen::Index>(theta.size()), 1);
    for (std::size_t j = 0; j < theta.size(); ++j) in(static_cast<Eigen::Index>(j), 0) = theta[j];
    const Eigen::MatrixXd out = forward(in);
    std::vector<double> x(output_dim());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(out(static_cast<Eigen::Index>(j), 0), 0.0, 1.0);
    return x;
}

double MlpPolicy::loss(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                       std::vector<DenseLayer>* gradient) const {
    const std::size_t depth = layers_.size();
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(depth + 1);
    acts.push_back(inputs);
    for (std::size_t l = 0; l < depth; ++l) {
        Eigen::MatrixXd z = layers_[l].weight * acts.back();
        z.colwise() += layers_[l].bias;
        acts.push_back(l + 1 < depth ? Eigen::MatrixXd(z.array().tanh()) : z);
    }
    const Eigen::MatrixXd diff = acts.back() - targets;
    const double scale = 1.0 / static_cast<double>(diff.size());
    const double value = diff.squaredNorm() * scale;
    if (!gradient) return value;

    gradient->resize(depth);
    Eigen::MatrixXd delta = 2.0 * scale * diff;
    for (std::size_t l = depth; l-- > 0;) {
        (*gradient)[l].weight = delta * acts[l].transpose();
        (*gradient)[l].bias = delta.rowwise().sum();
        if (l > 0)
            delta = (layers_[l].weight.transpose() * delta).cwiseProduct(
                (1.0 - acts[l].array().square()).matrix());
    }
    return value;
}

DistillationSet elite_dataset(const Archive& archive) {
    std::vector<std::size_t> cells;
    for (std::size_t c = 0; c < archive.size(); ++c)
        if (archive.filled(c)) cells.push_back(c);
    const auto n = static_cast<Eigen::Index>(cells.size());
    DistillationSet set{Eigen::MatrixXd(static_cast<Eigen::Index>(archive.task_dim()), n),
                        Eigen::MatrixXd(static_cast<Eigen::Index>(archive.solution_dim()), n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto t = archive.theta(cells[static_cast<std::size_t>(i)]);
        const auto x = archive.solution(cells[static_cast<std::size_t>(i)]);
        for (std::size_t j = 0; j < t.size(); ++j) set.inputs(static_cast<Eigen::Index>(j), i) = t[j];
        for (std::size_t j = 0; j < x.size(); ++j) set.targets(static_cast<Eigen::Index>(j), i) = x[j];
    }
    return set;
}

namespace {

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, std::span<const std::size_t> cols) {
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(cols[i]));
    return out;
}

struct AdamState {
    std::vector<DenseLayer> m, v;
    std::size_t step = 0;

    explicit AdamState(const std::vector<DenseLayer>& params) {
        for (const auto& p : params) {
            m.push_back({Eigen::MatrixXd::Zero(p.weight.rows(), p.weight.cols()), Eigen::VectorXd::Zero(p.bias.size())});
            v.push_back(m.back());
        }
    }

    void apply(std::vector<DenseLayer>& params, const std::vector<DenseLayer>& grad, double lr) {
        constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
        ++step;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
        auto update = [&](auto& param, auto& mom, auto& var, const auto& g) {
            mom = b1 * mom + (1.0 - b1) * g;
            var = (b2 * var.array() + (1.0 - b2) * g.array().square()).matrix();
            param.array() -= lr * (mom.array() / c1) / ((var.array() / c2).sqrt() + eps);
        };
        for (std::size_t l = 0; l < params.size(); ++l) {
            update(params[l].weight, m[l].weight, v[l].weight, grad[l].weight);
            update(params[l].bias, m[l].bias, v[l].bias, grad[l].bias);
        }
    }
};

}  // namespace

MlpPolicy train_distillation(const DistillationSet& data, const TrainSettings& settings, Rng& rng,
                             TrainingReport* report) {
    const auto n = static_cast<std::size_t>(data.inputs.cols());
    if (n < 2) throw InsufficientData("distillation: need at least 2 elites, got " + std::to_string(n));
    if (data.targets.cols() != data.inputs.cols()) throw InvalidArgument("distillation: inputs and targets differ in count");
    if (settings.batch_size == 0 || !(settings.learning_rate > 0.0))
        throw InvalidArgument("distillation: batch size and learning rate must be positive");
    if (!(settings.validation_fraction > 0.0 && settings.validation_fraction < 1.0))
        throw InvalidArgument("distillation: validation fraction must lie in (0,1)");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    auto n_val = static_cast<std::size_t>(std::llround(settings.validation_fraction * static_cast<double>(n)));
    n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
    std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    const std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    const Eigen::MatrixXd train_in = gather_columns(data.inputs, train);
    const Eigen::MatrixXd train_out = gather_columns(data.targets, train);
    const Eigen::MatrixXd val_in = gather_columns(data.inputs, val);
    const Eigen::MatrixXd val_out = gather_columns(data.targets, val);

    const std::vector<std::size_t> widths{static_cast<std::size_t>(data.inputs.rows()), kHiddenUnits, kHiddenUnits,
                                          static_cast<std::size_t>(data.targets.rows())};
    MlpPolicy policy(widths, rng);
    MlpPolicy best = policy;
    double best_val = policy.loss(val_in, val_out);
    AdamState adam(policy.layers());
    std::vector<DenseLayer> grad;
    std::vector<std::size_t> batch_order(train.size());
    std::iota(batch_order.begin(), batch_order.end(), 0);

    TrainingReport local;
    std::size_t stagnant = 0;
    for (std::size_t epoch = 1; epoch <= settings.max_epochs; ++epoch) {
        std::shuffle(batch_order.begin(), batch_order.end(), rng);
        for (std::size_t start = 0; start < batch_order.size(); start += settings.batch_size) {
            const std::size_t end = std::min(start + settings.batch_size, batch_order.size());
            const std::span<const std::size_t> idx(batch_order.data() + start, end - start);
            policy.loss(gather_columns(train_in, idx), gather_columns(train_out, idx), &grad);
            adam.apply(policy.layers(), grad, settings.learning_rate);
        }
        const double val_loss = policy.loss(val_in, val_out);
        if (!std::isfinite(val_loss)) throw NumericalFailure("distillation: validation loss diverged");
        local.epochs = epoch;
        local.training_loss.push_back(policy.loss(train_in, train_out));
        if (val_loss < best_val) {
            best_val = val_loss;
            best = policy;
            local.best_epoch = epoch;
            stagnant = 0;
        } else {
            ++stagnant;
        }
        local.best_validation.push_back(best_val);
        if (stagnant >= settings.patience) break;
    }
    local.best_validation_loss = best_val;
    if (report) *report = std::move(local);
    return best;
}

MlpPolicy distill_log(const EvaluationLog& log, std::size_t resolution, std::uint64_t master_seed,
                      const TrainSettings& settings, std::uint64_t train_seed, TrainingReport* report) {
    if (resolution < 2) throw InvalidArgument("distillation: resolution must be at least 2");
    const Archive archive = rearchive(log, resolution, master_seed);
    Rng rng(train_seed);
    return train_distillation(elite_dataset(archive), settings, rng, report);
}

nlohmann::json to_json(const MlpPolicy& policy) {
    nlohmann::json doc;
    doc["dims"] = policy.widths();
    doc["activation"] = "tanh";
    auto& layers = doc["layers"] = nlohmann::json::array();
    for (const auto& layer : policy.layers()) {
        nlohmann::json w = nlohmann::json::array();
        for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(layer.weight.cols()));
            for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) row[static_cast<std::size_t>(j)] = layer.weight(i, j);
            w.push_back(row);
        }
        layers.push_back({{"W", w}, {"b", std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size())}});
    }
    return doc;
}

MlpPolicy policy_from_json(const nlohmann::json& doc) {
    try {
        if (doc.value("activation", std::string("tanh")) != "tanh")
            throw ParseError("policy: only tanh activations are supported");
        std::vector<DenseLayer> layers;
        for (const auto& entry : doc.at("layers")) {
            const auto rows = entry.at("W").get<std::vector<std::vector<double>>>();
            const auto bias = entry.at("b").get<std::vector<double>>();
            if (rows.empty()) throw ParseError("policy: empty weight matrix");
            DenseLayer layer{Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size())),
                             Eigen::VectorXd(static_cast<Eigen::Index>(bias.size()))};
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i].size() != rows[0].size()) throw ParseError("policy: ragged weight matrix");
                for (std::size_t j = 0; j < rows[i].size(); ++j)
                    layer.weight(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
            }
            for (std::size_t i = 0; i < bias.size(); ++i) layer.bias(static_cast<Eigen::Index>(i)) = bias[i];
            layers.push_back(std::move(layer));
        }
        MlpPolicy policy(std::move(layers));
        if (doc.contains("dims") && doc.at("dims").get<std::vector<std::size_t>>() != policy.widths())
            throw ParseError("policy: 'dims' disagrees with the layer shapes");
        return policy;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("policy: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what());
    }
}

void save_policy(const MlpPolicy& policy, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    // Written by hand so every weight carries 17 significant digits.
    auto write_vec = [&](const double* data, Eigen::Index count) {
        out << '[';
        for (Eigen::Index i = 0; i < count; ++i) out << (i ? "," : "") << format_double(data[i]);
        out << ']';
    };
    out << "{\"dims\":" << nlohmann::json(policy.widths()).dump() << ",\"activation\":\"tanh\",\"layers\":[";
    for (std::size_t l = 0; l < policy.layers().size(); ++l) {
        const auto& layer = policy.layers()[l];
        out << (l ? "," : "") << "{\"W\":[";
        for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
            if (i) out << ',';
            const Eigen::RowVectorXd row = layer.weight.row(i);
            write_vec(row.data(), row.size());
        }
        out << "],\"b\":";
        write_vec(layer.bias.data(), layer.bias.size());
        out << '}';
    }
    out << "]}\n";
    if (!out) throw IoError("failed writing " + path.string());
}

MlpPolicy load_policy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return policy_from_json(doc);
}

}  // namespace ptme
