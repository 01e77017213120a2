#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <span>
#include <vector>

#include "ptme/archive.hpp"
#include "ptme/evaluation_log.hpp"
#include "ptme/rng.hpp"

namespace ptme {

inline constexpr std::size_t kHiddenUnits = 64;

struct DenseLayer {
    Eigen::MatrixXd weight;  // outputs x inputs
    Eigen::VectorXd bias;
};

/// Fully connected regressor theta -> x: tanh hidden layers, linear output.
/// Inference clips the output to [0,1]; training works on the raw output.
class MlpPolicy {
public:
    /// Layer widths from input to output, e.g. {dtheta, 64, 64, dx}; weights
    /// drawn Glorot-uniform.
    MlpPolicy(const std::vector<std::size_t>& widths, Rng& rng);
    explicit MlpPolicy(std::vector<DenseLayer> layers);

    std::size_t input_dim() const { return static_cast<std::size_t>(layers_.front().weight.cols()); }
    std::size_t output_dim() const { return static_cast<std::size_t>(layers_.back().weight.rows()); }
    std::vector<std::size_t> widths() const;
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }

    /// Raw outputs for a batch stored column-wise (inputs x batch).
    Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;

    /// Clipped prediction for one task. Throws InvalidArgument on a dimension
    /// mismatch.
    std::vector<double> infer(std::span<const double> theta) const;

    /// Mean squared error over every output of the batch (column-wise
    /// inputs/targets); fills `gradient` (same shapes as the layers) when
    /// non-null.
    double loss(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                std::vector<DenseLayer>* gradient = nullptr) const;

    std::size_t parameter_count() const;

private:
    std::vector<DenseLayer> layers_;
};

struct TrainSettings {
    double learning_rate = 1e-3;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 2000;
    std::size_t patience = 50;  // epochs without a validation improvement
    double validation_fraction = 0.1;
};

struct TrainingReport {
    std::size_t epochs = 0;
    std::size_t best_epoch = 0;
    double best_validation_loss = 0.0;
    std::vector<double> training_loss;   // per epoch, on the training split
    std::vector<double> best_validation; // best-so-far validation loss per epoch
};

/// Column-wise (theta, x) pairs of every filled cell.
struct DistillationSet {
    Eigen::MatrixXd inputs;   // dtheta x n
    Eigen::MatrixXd targets;  // dx x n
};

DistillationSet elite_dataset(const Archive& archive);

/// Adam on the MSE loss over a shuffled train/validation split; returns the
/// weights with the lowest validation loss. Throws InsufficientData for
/// fewer than two pairs.
MlpPolicy train_distillation(const DistillationSet& data, const TrainSettings& settings, Rng& rng,
                             TrainingReport* report = nullptr);

/// Re-archives `log` at `resolution` cells (geometry from `master_seed`) and
/// distills the elites.
MlpPolicy distill_log(const EvaluationLog& log, std::size_t resolution, std::uint64_t master_seed,
                      const TrainSettings& settings, std::uint64_t train_seed, TrainingReport* report = nullptr);

nlohmann::json to_json(const MlpPolicy& policy);
MlpPolicy policy_from_json(const nlohmann::json& doc);
void save_policy(const MlpPolicy& policy, const std::filesystem::path& path);
MlpPolicy load_policy(const std::filesystem::path& path);

}  // namespace ptme
