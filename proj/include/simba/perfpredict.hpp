#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "simba/benchio.hpp"
#include "simba/grid.hpp"
#include "simba/repset.hpp"

namespace simba {

enum class PredictorKind { kRidge, kKnn, kMlp1, kMlp2 };

std::string_view predictor_name(PredictorKind k);
std::optional<PredictorKind> parse_predictor(std::string_view name);

struct MlpTraining {
  double step_size = 0.01;
  std::size_t max_iterations = 5000;
  double min_improvement = 1e-8;
};

struct PredictorSpec {
  PredictorKind kind = PredictorKind::kRidge;
  double ridge_lambda = 1.0;
  std::size_t knn_k = 5;
  std::vector<std::size_t> mlp_hidden;  // [12] for kMlp1, [12, 12] for kMlp2
  std::uint64_t seed = 0;
  MlpTraining training;

  static PredictorSpec of(PredictorKind kind, std::uint64_t seed = 0);
};

/// Feedforward regressor: ReLU hidden layers, linear output, mean squared
/// error over every output cell, full-batch gradient descent.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::size_t inputs, std::span<const std::size_t> hidden, std::size_t outputs, std::uint64_t seed);

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  double loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const;
  /// Loss plus its gradient, flattened in parameters() order.
  double loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::vector<double>& grad) const;

  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> params);
  std::size_t parameter_count() const;

  /// Returns the number of iterations taken.
  std::size_t fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const MlpTraining& training);

 private:
  // Buffers reused across gradient steps.
  struct Workspace {
    std::vector<Eigen::MatrixXd> pre;   // pre-activations per layer
    std::vector<Eigen::MatrixXd> acts;  // hidden activations
    std::vector<Eigen::MatrixXd> grad_w;
    std::vector<Eigen::VectorXd> grad_b;
    Eigen::MatrixXd delta;
    Eigen::MatrixXd back;
  };
  double backprop(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Workspace& ws) const;

  struct Layer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;
  };
  std::vector<Layer> layers_;
};

class Predictor {
 public:
  struct Ridge {
    Eigen::MatrixXd weights;  // inputs x outputs
    Eigen::RowVectorXd intercept;
  };
  struct Knn {
    Eigen::MatrixXd inputs;
    Eigen::MatrixXd targets;
    std::size_t k = 1;
  };

  const PredictorSpec& spec() const noexcept { return spec_; }
  std::size_t input_arity() const noexcept { return input_arity_; }
  std::size_t output_arity() const noexcept { return output_arity_; }
  const std::vector<std::string>& input_ids() const noexcept { return input_ids_; }
  const std::vector<std::string>& output_ids() const noexcept { return output_ids_; }
  std::size_t effective_k() const;

 private:
  friend Predictor train_predictor(const Grid&, const Grid&, const PredictorSpec&, std::vector<std::string>,
                                   std::vector<std::string>);
  friend Grid predict_scores(const Predictor&, const Grid&, bool);

  PredictorSpec spec_;
  std::size_t input_arity_ = 0;
  std::size_t output_arity_ = 0;
  std::vector<std::string> input_ids_;
  std::vector<std::string> output_ids_;
  std::variant<Ridge, Knn, Mlp> state_;
};

Predictor train_predictor(const Grid& train_inputs, const Grid& train_targets, const PredictorSpec& spec,
                          std::vector<std::string> input_ids = {}, std::vector<std::string> output_ids = {});

/// One row per input row; values are clamped to [0, 1] unless `clamp` is false.
Grid predict_scores(const Predictor& pred, const Grid& inputs, bool clamp = true);

double mean_squared_error(const Grid& predicted, const Grid& truth);

struct NoiseSpec {
  double mean = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct MseCurve {
  std::vector<std::size_t> sizes;  // 1..d-1
  std::vector<double> mses;
  PredictorSpec spec;
  double noise_sigma = 0.0;
};

/// For each prefix size k of a full-length trace, trains on the train models
/// (first k picks -> remaining datasets) and scores the test models. Noise,
/// when requested, perturbs the train half only.
MseCurve mse_curve(const ModelSplit& split, const SelectionTrace& trace, const PredictorSpec& spec,
                   const NoiseSpec& noise = {});

/// Unsigned trapezoidal area with size k at x = k/n, held constant down to x = 0.
double auc_mse(std::span<const double> mses);
double auc_mse(const MseCurve& curve);

struct KFoldResult {
  std::vector<double> fold_auc_mse;
  double mean = 0.0;
  double stddev = 0.0;  // population
};

KFoldResult kfold_stability(const Benchmark& train_bench, const SelectionTrace& trace, const PredictorSpec& spec,
                            std::size_t k_folds, std::uint64_t seed = 0);

}  // namespace simba
