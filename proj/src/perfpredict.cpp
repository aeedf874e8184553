#include "simba/perfpredict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parallel.hpp"
#include "simba/rng.hpp"

namespace simba {
namespace {

Eigen::MatrixXd to_eigen(const Grid& g) {
  Eigen::MatrixXd m(g.rows(), g.cols());
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c) m(r, c) = g(r, c);
  return m;
}

Grid to_grid(const Eigen::MatrixXd& m) {
  Grid g(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) g(r, c) = m(r, c);
  return g;
}

void require_finite(const Grid& g, const char* what) {
  for (double v : g.values())
    if (!std::isfinite(v)) throw IncompleteDataError(std::string(what) + " must be complete and finite");
}

Predictor::Ridge fit_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double lambda) {
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const Eigen::RowVectorXd y_mean = y.colwise().mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::MatrixXd yc = y.rowwise() - y_mean;

  Predictor::Ridge r;
  if (lambda > 0.0) {
    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += lambda;
    r.weights = gram.ldlt().solve(xc.transpose() * yc);
  } else {
    r.weights = xc.completeOrthogonalDecomposition().solve(yc);
  }
  r.intercept = y_mean - x_mean * r.weights;
  return r;
}

Eigen::MatrixXd predict_knn(const Predictor::Knn& knn, const Eigen::MatrixXd& x) {
  const Eigen::Index n_train = knn.inputs.rows();
  Eigen::MatrixXd out(x.rows(), knn.targets.cols());
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n_train));
  for (Eigen::Index q = 0; q < x.rows(); ++q) {
    for (Eigen::Index t = 0; t < n_train; ++t)
      dist[static_cast<std::size_t>(t)] = {(knn.inputs.row(t) - x.row(q)).squaredNorm(), t};
    // Equal distances resolve to the earlier training row.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(knn.k), dist.end());
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(knn.targets.cols());
    for (std::size_t i = 0; i < knn.k; ++i) acc += knn.targets.row(dist[i].second);
    out.row(q) = acc / static_cast<double>(knn.k);
  }
  return out;
}

}  // namespace

std::string_view predictor_name(PredictorKind k) {
  switch (k) {
    case PredictorKind::kRidge:
      return "ridge";
    case PredictorKind::kKnn:
      return "knn";
    case PredictorKind::kMlp1:
      return "mlp1";
    case PredictorKind::kMlp2:
      return "mlp2";
  }
  return "?";
}

std::optional<PredictorKind> parse_predictor(std::string_view name) {
  for (auto k : {PredictorKind::kRidge, PredictorKind::kKnn, PredictorKind::kMlp1, PredictorKind::kMlp2})
    if (predictor_name(k) == name) return k;
  return std::nullopt;
}

PredictorSpec PredictorSpec::of(PredictorKind kind, std::uint64_t seed) {
  PredictorSpec s;
  s.kind = kind;
  s.seed = seed;
  if (kind == PredictorKind::kMlp1) s.mlp_hidden = {12};
  if (kind == PredictorKind::kMlp2) s.mlp_hidden = {12, 12};
  return s;
}

// ---- Mlp ------------------------------------------------------------------

Mlp::Mlp(std::size_t inputs, std::span<const std::size_t> hidden, std::size_t outputs, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t fan_in = inputs;
  auto add_layer = [&](std::size_t width) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Layer layer{Eigen::MatrixXd(width, fan_in), Eigen::VectorXd(width)};
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = rng.uniform(-bound, bound);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = rng.uniform(-bound, bound);
    layers_.push_back(std::move(layer));
    fan_in = width;
  };
  for (auto w : hidden) add_layer(w);
  add_layer(outputs);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = (a * layers_[l].weights.transpose()).rowwise() + layers_[l].bias.transpose();
    a = l + 1 < layers_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

double Mlp::loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const {
  return (forward(x) - y).squaredNorm() / static_cast<double>(y.size());
}

double Mlp::backprop(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, Workspace& ws) const {
  const std::size_t depth = layers_.size();
  ws.pre.resize(depth);
  ws.acts.resize(depth);
  ws.grad_w.resize(depth);
  ws.grad_b.resize(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    const Eigen::MatrixXd& input = l == 0 ? x : ws.acts[l - 1];
    ws.pre[l].noalias() = input * layers_[l].weights.transpose();
    ws.pre[l].rowwise() += layers_[l].bias.transpose();
    if (l + 1 < depth) ws.acts[l] = ws.pre[l].cwiseMax(0.0);
  }
  const double count = static_cast<double>(y.size());
  ws.delta = ws.pre.back() - y;
  const double loss = ws.delta.squaredNorm() / count;
  ws.delta *= 2.0 / count;
  for (std::size_t l = depth; l-- > 0;) {
    const Eigen::MatrixXd& input = l == 0 ? x : ws.acts[l - 1];
    ws.grad_w[l].noalias() = ws.delta.transpose() * input;
    ws.grad_b[l] = ws.delta.colwise().sum().transpose();
    if (l > 0) {
      ws.back.noalias() = ws.delta * layers_[l].weights;
      ws.delta = ws.back.cwiseProduct((ws.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

double Mlp::loss_and_gradient(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::vector<double>& grad) const {
  Workspace ws;
  const double loss = backprop(x, y, ws);
  grad.clear();
  grad.reserve(parameter_count());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    for (Eigen::Index r = 0; r < ws.grad_w[l].rows(); ++r)
      for (Eigen::Index c = 0; c < ws.grad_w[l].cols(); ++c) grad.push_back(ws.grad_w[l](r, c));
    for (Eigen::Index r = 0; r < ws.grad_b[l].size(); ++r) grad.push_back(ws.grad_b[l](r));
  }
  return loss;
}

std::vector<double> Mlp::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  for (const auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) p.push_back(layer.weights(r, c));
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) p.push_back(layer.bias(r));
  }
  return p;
}

void Mlp::set_parameters(std::span<const double> params) {
  if (params.size() != parameter_count()) throw ShapeError("parameter vector has the wrong length");
  std::size_t i = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = params[i++];
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = params[i++];
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  return n;
}

std::size_t Mlp::fit(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const MlpTraining& training) {
  Workspace ws;
  double previous = backprop(x, y, ws);
  std::size_t it = 0;
  while (it < training.max_iterations) {
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      layers_[l].weights -= training.step_size * ws.grad_w[l];
      layers_[l].bias -= training.step_size * ws.grad_b[l];
    }
    ++it;
    const double current = backprop(x, y, ws);
    if (previous - current < training.min_improvement) break;
    previous = current;
  }
  return it;
}

// ---- Predictor ------------------------------------------------------------

std::size_t Predictor::effective_k() const {
  if (const auto* knn = std::get_if<Knn>(&state_)) return knn->k;
  return 0;
}

Predictor train_predictor(const Grid& train_inputs, const Grid& train_targets, const PredictorSpec& spec,
                          std::vector<std::string> input_ids, std::vector<std::string> output_ids) {
  if (train_inputs.rows() != train_targets.rows()) throw ShapeError("inputs and targets differ in row count");
  if (train_inputs.rows() < 1) throw ShapeError("need at least one training row");
  if (train_inputs.cols() < 1 || train_targets.cols() < 1) throw ShapeError("need at least one input and one output");
  if (!input_ids.empty() && input_ids.size() != train_inputs.cols()) throw ShapeError("input id count mismatch");
  if (!output_ids.empty() && output_ids.size() != train_targets.cols()) throw ShapeError("output id count mismatch");
  require_finite(train_inputs, "training inputs");
  require_finite(train_targets, "training targets");

  Predictor p;
  p.spec_ = spec;
  p.input_arity_ = train_inputs.cols();
  p.output_arity_ = train_targets.cols();
  p.input_ids_ = std::move(input_ids);
  p.output_ids_ = std::move(output_ids);

  const Eigen::MatrixXd x = to_eigen(train_inputs);
  const Eigen::MatrixXd y = to_eigen(train_targets);
  switch (spec.kind) {
    case PredictorKind::kRidge:
      if (!(spec.ridge_lambda >= 0.0)) throw ConfigError("ridge lambda must be non-negative");
      p.state_ = fit_ridge(x, y, spec.ridge_lambda);
      break;
    case PredictorKind::kKnn:
      if (spec.knn_k < 1) throw ConfigError("knn k must be at least 1");
      p.state_ = Predictor::Knn{x, y, std::min(spec.knn_k, train_inputs.rows())};
      break;
    case PredictorKind::kMlp1:
    case PredictorKind::kMlp2: {
      auto hidden = spec.mlp_hidden;
      if (hidden.empty()) hidden = PredictorSpec::of(spec.kind).mlp_hidden;
      Mlp net(p.input_arity_, hidden, p.output_arity_, spec.seed);
      net.fit(x, y, spec.training);
      p.state_ = std::move(net);
      break;
    }
  }
  return p;
}

Grid predict_scores(const Predictor& pred, const Grid& inputs, bool clamp) {
  if (inputs.cols() != pred.input_arity_)
    throw ShapeError("predictor expects " + std::to_string(pred.input_arity_) + " inputs, got " +
                     std::to_string(inputs.cols()));
  require_finite(inputs, "prediction inputs");
  const Eigen::MatrixXd x = to_eigen(inputs);
  Eigen::MatrixXd y = std::visit(
      [&](const auto& state) -> Eigen::MatrixXd {
        using T = std::decay_t<decltype(state)>;
        if constexpr (std::is_same_v<T, Predictor::Ridge>) {
          return (x * state.weights).rowwise() + state.intercept;
        } else if constexpr (std::is_same_v<T, Predictor::Knn>) {
          return predict_knn(state, x);
        } else {
          return state.forward(x);
        }
      },
      pred.state_);
  if (clamp) y = y.cwiseMax(0.0).cwiseMin(1.0);
  return to_grid(y);
}

double mean_squared_error(const Grid& predicted, const Grid& truth) {
  if (predicted.rows() != truth.rows() || predicted.cols() != truth.cols())
    throw ShapeError("prediction and truth differ in shape");
  if (predicted.empty()) throw ShapeError("mean squared error of an empty grid");
  double s = 0.0;
  const auto a = predicted.values();
  const auto b = truth.values();
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

// ---- curves ---------------------------------------------------------------

MseCurve mse_curve(const ModelSplit& split, const SelectionTrace& trace, const PredictorSpec& spec,
                   const NoiseSpec& noise) {
  const std::size_t d = split.train.datasets();
  if (split.test.datasets() != d) throw ShapeError("train and test halves differ in dataset count");
  if (d < 2) throw ShapeError("an mse curve needs at least 2 datasets");
  if (trace.order.size() != d) throw ShapeError("mse curves need a full-length selection trace");
  split.train.require_complete("pounce (train models)");
  split.test.require_complete("pounce (test models)");

  const Benchmark train = noise.sigma > 0.0 || noise.mean != 0.0
                              ? perturb_with_noise(split.train, noise.mean, noise.sigma, noise.seed)
                              : split.train;

  MseCurve curve;
  curve.spec = spec;
  curve.noise_sigma = noise.sigma;
  curve.sizes.resize(d - 1);
  curve.mses.resize(d - 1);
  detail::parallel_for(d - 1, [&](std::size_t slot) {
    const std::size_t k = slot + 1;
    std::vector<std::size_t> inputs(trace.order.begin(), trace.order.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<std::size_t> outputs(trace.order.begin() + static_cast<std::ptrdiff_t>(k), trace.order.end());
    std::sort(outputs.begin(), outputs.end());

    std::vector<std::string> in_ids, out_ids;
    for (auto c : inputs) in_ids.push_back(split.train.dataset_ids()[c]);
    for (auto c : outputs) out_ids.push_back(split.train.dataset_ids()[c]);

    const auto pred = train_predictor(train.scores().select_columns(inputs), train.scores().select_columns(outputs),
                                      spec, std::move(in_ids), std::move(out_ids));
    const Grid predicted = predict_scores(pred, split.test.scores().select_columns(inputs));
    curve.sizes[slot] = k;
    curve.mses[slot] = mean_squared_error(predicted, split.test.scores().select_columns(outputs));
  });
  return curve;
}

double auc_mse(std::span<const double> mses) {
  const std::size_t n = mses.size();
  if (n == 0) throw ShapeError("auc_mse of an empty curve");
  const double width = 1.0 / static_cast<double>(n);
  double area = mses[0] * width;
  for (std::size_t k = 1; k < n; ++k) area += 0.5 * (mses[k - 1] + mses[k]) * width;
  return area;
}

double auc_mse(const MseCurve& curve) { return auc_mse(curve.mses); }

KFoldResult kfold_stability(const Benchmark& train_bench, const SelectionTrace& trace, const PredictorSpec& spec,
                            std::size_t k_folds, std::uint64_t seed) {
  const std::size_t m = train_bench.models();
  if (k_folds < 2 || k_folds > m)
    throw ConfigError("k_folds must lie in [2, " + std::to_string(m) + "], got " + std::to_string(k_folds));

  Rng rng(seed);
  const auto perm = rng.permutation(m);
  KFoldResult out;
  for (std::size_t f = 0; f < k_folds; ++f) {
    std::vector<std::size_t> held, kept;
    for (std::size_t i = 0; i < m; ++i) (i % k_folds == f ? held : kept).push_back(perm[i]);
    std::sort(held.begin(), held.end());
    std::sort(kept.begin(), kept.end());
    ModelSplit split{train_bench.select_models(kept), train_bench.select_models(held), seed, 0.0};
    out.fold_auc_mse.push_back(auc_mse(mse_curve(split, trace, spec)));
  }
  const double n = static_cast<double>(k_folds);
  out.mean = std::accumulate(out.fold_auc_mse.begin(), out.fold_auc_mse.end(), 0.0) / n;
  double var = 0.0;
  for (double v : out.fold_auc_mse) var += (v - out.mean) * (v - out.mean);
  out.stddev = std::sqrt(var / n);
  return out;
}

}  // namespace simba
