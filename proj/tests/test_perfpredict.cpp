#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "simba/perfpredict.hpp"
#include "support/fixtures.hpp"

using namespace simba;

namespace {

Grid grid_of(const std::vector<std::vector<double>>& rows) {
  Grid g(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) g(r, c) = rows[r][c];
  return g;
}

PredictorSpec ridge(double lambda) {
  auto s = PredictorSpec::of(PredictorKind::kRidge);
  s.ridge_lambda = lambda;
  return s;
}

SelectionTrace identity_trace(std::size_t d) {
  SelectionTrace t;
  for (std::size_t i = 0; i < d; ++i) t.order.push_back(i);
  return t;
}

}  // namespace

TEST_CASE("ridge with a tiny penalty fits exact linear data") {
  const Grid x = grid_of({{0.1, 0.2}, {0.4, 0.1}, {0.3, 0.7}, {0.9, 0.5}, {0.6, 0.6}});
  Grid y(5, 2);
  for (std::size_t r = 0; r < 5; ++r) {
    y(r, 0) = 0.1 + 0.5 * x(r, 0) + 0.2 * x(r, 1);
    y(r, 1) = 0.3 * x(r, 0);
  }
  const auto p = train_predictor(x, y, ridge(1e-8));
  CHECK(mean_squared_error(predict_scores(p, x), y) <= 1e-10);
  const Grid fresh = grid_of({{0.5, 0.5}});
  CHECK(predict_scores(p, fresh)(0, 0) == doctest::Approx(0.45).epsilon(1e-6));

  // lambda = 0 takes the unpenalized path.
  const auto p0 = train_predictor(x, y, ridge(0.0));
  CHECK(mean_squared_error(predict_scores(p0, x), y) <= 1e-20);
}

TEST_CASE("ridge copy task and constant target") {
  Rng rng(3);
  Grid x(30, 1);
  for (auto& v : x.values()) v = rng.uniform();
  const auto p = train_predictor(x, x, ridge(1e-10));
  const auto out = predict_scores(p, x);
  for (std::size_t r = 0; r < 30; ++r) CHECK(std::fabs(out(r, 0) - x(r, 0)) <= 1e-6);

  const Grid c(30, 1, 0.42);
  for (auto kind : {PredictorKind::kRidge, PredictorKind::kKnn}) {
    const auto pc = train_predictor(x, c, PredictorSpec::of(kind));
    const Grid out_c = predict_scores(pc, x);
    for (double v : out_c.values()) CHECK(v == doctest::Approx(0.42).epsilon(1e-12));
  }
}

TEST_CASE("ridge shrinks toward the mean as the penalty grows") {
  Rng rng(4);
  Grid x(20, 2), y(20, 1);
  for (std::size_t r = 0; r < 20; ++r) {
    x(r, 0) = rng.uniform();
    x(r, 1) = rng.uniform();
    y(r, 0) = 0.8 * x(r, 0) - 0.3 * x(r, 1) + 0.3;
  }
  double prev_spread = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    const auto out = predict_scores(train_predictor(x, y, ridge(lambda)), x, false);
    double mean = 0, spread = 0;
    for (double v : out.values()) mean += v / 20;
    for (double v : out.values()) spread += (v - mean) * (v - mean);
    CHECK(spread <= prev_spread + 1e-12);
    prev_spread = spread;
  }
}

TEST_CASE("knn") {
  const Grid x = grid_of({{0.0}, {0.1}, {0.5}, {0.9}});
  const Grid y = grid_of({{0.2}, {0.6}, {0.9}, {0.1}});
  auto spec = PredictorSpec::of(PredictorKind::kKnn);
  SUBCASE("k = 1 reproduces training rows") {
    spec.knn_k = 1;
    const auto p = train_predictor(x, y, spec);
    CHECK(predict_scores(p, x) == y);
  }
  SUBCASE("k = 2 averages the two nearest") {
    spec.knn_k = 2;
    const auto p = train_predictor(x, y, spec);
    CHECK(predict_scores(p, grid_of({{0.04}}))(0, 0) == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("k is capped at the training size") {
    const auto p = train_predictor(x, y, spec);
    CHECK(p.effective_k() == 4);
    CHECK(predict_scores(p, grid_of({{0.3}}))(0, 0) == doctest::Approx(0.45).epsilon(1e-12));
  }
  SUBCASE("ties go to the lower training index") {
    spec.knn_k = 1;
    const auto p = train_predictor(grid_of({{0.2}, {0.4}}), grid_of({{0.1}, {0.9}}), spec);
    CHECK(predict_scores(p, grid_of({{0.3}}))(0, 0) == doctest::Approx(0.1).epsilon(1e-12));
  }
}

TEST_CASE("knn predictions stay inside the hull of training targets") {
  Rng rng(10);
  Grid x(25, 3), y(25, 2);
  for (auto& v : x.values()) v = rng.uniform();
  for (auto& v : y.values()) v = rng.uniform();
  Grid q(40, 3);
  for (auto& v : q.values()) v = rng.uniform();
  const auto out = predict_scores(train_predictor(x, y, PredictorSpec::of(PredictorKind::kKnn)), q);
  for (std::size_t c = 0; c < 2; ++c) {
    const auto col = y.column(c);
    const double lo = *std::min_element(col.begin(), col.end()), hi = *std::max_element(col.begin(), col.end());
    for (std::size_t r = 0; r < 40; ++r) {
      CHECK(out(r, c) >= lo - 1e-15);
      CHECK(out(r, c) <= hi + 1e-15);
    }
  }
}

TEST_CASE("mlp gradient matches central differences") {
  Eigen::MatrixXd x(3, 2), y(3, 2);
  x << 0.1, 0.8, 0.5, 0.3, 0.9, 0.6;
  y << 0.2, 0.4, 0.7, 0.1, 0.3, 0.9;
  for (std::vector<std::size_t> hidden : {std::vector<std::size_t>{4}, std::vector<std::size_t>{3, 3}}) {
    Mlp net(2, hidden, 2, 11);
    std::vector<double> grad;
    net.loss_and_gradient(x, y, grad);
    auto params = net.parameters();
    REQUIRE(grad.size() == params.size());
    REQUIRE(params.size() == net.parameter_count());
    const double h = 1e-6;
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto p = params;
      p[i] += h;
      net.set_parameters(p);
      const double up = net.loss(x, y);
      p[i] -= 2 * h;
      net.set_parameters(p);
      const double down = net.loss(x, y);
      net.set_parameters(params);
      const double numeric = (up - down) / (2 * h);
      CHECK(std::fabs(grad[i] - numeric) <= 1e-4 * std::max(1.0, std::fabs(numeric)));
    }
  }
}

TEST_CASE("mlp training lowers the loss and is deterministic") {
  Rng rng(2);
  Eigen::MatrixXd x(20, 2), y(20, 1);
  for (Eigen::Index r = 0; r < 20; ++r) {
    x(r, 0) = rng.uniform();
    x(r, 1) = rng.uniform();
    y(r, 0) = 0.5 * x(r, 0) + 0.3 * x(r, 1);
  }
  const std::vector<std::size_t> hidden{12};
  Mlp a(2, hidden, 1, 5), b(2, hidden, 1, 5);
  const double before = a.loss(x, y);
  a.fit(x, y, MlpTraining{});
  b.fit(x, y, MlpTraining{});
  CHECK(a.loss(x, y) < before);
  CHECK(a.parameters() == b.parameters());

  const Grid gx = fixtures::uniform(15, 3, 1).scores(), gy = fixtures::uniform(15, 2, 2).scores();
  for (auto kind : {PredictorKind::kMlp1, PredictorKind::kMlp2}) {
    const auto p1 = train_predictor(gx, gy, PredictorSpec::of(kind, 9));
    const auto p2 = train_predictor(gx, gy, PredictorSpec::of(kind, 9));
    const auto o = predict_scores(p1, gx);
    CHECK(o == predict_scores(p2, gx));
    for (double v : o.values()) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("predict_scores checks arity") {
  const auto p = train_predictor(Grid(4, 2, 0.5), Grid(4, 1, 0.5), ridge(1.0));
  CHECK_THROWS_AS(predict_scores(p, Grid(3, 3, 0.1)), ShapeError);
  CHECK_THROWS_AS(mean_squared_error(Grid(2, 2), Grid(2, 3)), ShapeError);
}

TEST_CASE("auc_mse") {
  CHECK(auc_mse(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
  CHECK(auc_mse(std::vector<double>{0.1, 0.1, 0.1, 0.1}) == doctest::Approx(0.1).epsilon(1e-15));
  // (0.2/3) + (0.2+0.1)/2/3 + (0.1+0)/2/3
  CHECK(auc_mse(std::vector<double>{0.2, 0.1, 0.0}) == doctest::Approx(0.2 / 3 + 0.05 + 0.05 / 3).epsilon(1e-12));
}

TEST_CASE("mse curve on duplicated columns is zero") {
  Rng rng(21);
  Grid g(20, 5);
  for (std::size_t r = 0; r < 20; ++r) {
    const double v = rng.uniform();
    for (std::size_t c = 0; c < 5; ++c) g(r, c) = v;
  }
  const Benchmark bench(fixtures::ids("m", 20), fixtures::ids("d", 5), g);
  const auto split = split_models(bench, 0.8, 1);
  const auto curve = mse_curve(split, identity_trace(5), ridge(1e-10));
  CHECK(curve.sizes == std::vector<std::size_t>{1, 2, 3, 4});
  for (double v : curve.mses) CHECK(v <= 1e-12);
  CHECK_THROWS_AS(mse_curve(split, SelectionTrace{}, ridge(1.0)), ShapeError);
}

TEST_CASE("planted linear benchmark is predicted exactly once two columns are known") {
  const auto bench = fixtures::planted_linear(40, 6, 8);
  const auto split = split_models(bench, 0.8, 2);
  const auto curve = mse_curve(split, identity_trace(6), ridge(1e-12));
  for (std::size_t k = 1; k < curve.mses.size(); ++k) CHECK(curve.mses[k] <= 1e-8);
}

TEST_CASE("noise perturbs only the training half") {
  const auto bench = fixtures::planted_linear(30, 5, 3);
  const auto split = split_models(bench, 0.8, 2);
  const auto clean = mse_curve(split, identity_trace(5), ridge(1e-6));
  const auto noisy = mse_curve(split, identity_trace(5), ridge(1e-6), NoiseSpec{0.0, 0.1, 4});
  CHECK(noisy.noise_sigma == 0.1);
  CHECK(auc_mse(noisy) > auc_mse(clean));
  const auto again = mse_curve(split, identity_trace(5), ridge(1e-6), NoiseSpec{0.0, 0.1, 4});
  CHECK(again.mses == noisy.mses);
}

TEST_CASE("k-fold stability") {
  SUBCASE("identical models give zero spread") {
    Grid g(10, 4);
    for (std::size_t r = 0; r < 10; ++r)
      for (std::size_t c = 0; c < 4; ++c) g(r, c) = 0.1 * static_cast<double>(c + 1);
    const Benchmark bench(fixtures::ids("m", 10), fixtures::ids("d", 4), g);
    for (auto kind : {PredictorKind::kRidge, PredictorKind::kKnn}) {
      const auto res = kfold_stability(bench, identity_trace(4), PredictorSpec::of(kind), 5, 1);
      CHECK(res.fold_auc_mse.size() == 5);
      CHECK(res.stddev <= 1e-12);
      CHECK(res.mean <= 1e-12);
    }
  }
  SUBCASE("population standard deviation of the folds") {
    const auto bench = fixtures::uniform(20, 4, 6);
    const auto res = kfold_stability(bench, identity_trace(4), ridge(1.0), 4, 3);
    double mean = 0;
    for (double v : res.fold_auc_mse) mean += v / 4;
    double var = 0;
    for (double v : res.fold_auc_mse) var += (v - mean) * (v - mean) / 4;
    CHECK(res.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(res.stddev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  }
  SUBCASE("fold count validation") {
    const auto bench = fixtures::uniform(4, 3, 6);
    CHECK_THROWS_AS(kfold_stability(bench, identity_trace(3), ridge(1.0), 1), ConfigError);
    CHECK_THROWS_AS(kfold_stability(bench, identity_trace(3), ridge(1.0), 5), ConfigError);
  }
}

TEST_CASE("predictor names round-trip") {
  for (auto k : {PredictorKind::kRidge, PredictorKind::kKnn, PredictorKind::kMlp1, PredictorKind::kMlp2})
    CHECK(parse_predictor(predictor_name(k)) == k);
}

TEST_CASE("planted rank-one benchmark: exact-fit folds have no spread") {
  // Every column is affine in one latent ability, so any single input column
  // determines the rest exactly.
  Rng rng(31);
  Grid g(40, 6);
  std::vector<double> a(6), w(6);
  for (std::size_t c = 0; c < 6; ++c) {
    a[c] = rng.uniform(0.05, 0.3);
    w[c] = rng.uniform(0.2, 0.6);
  }
  for (std::size_t r = 0; r < 40; ++r) {
    const double z = rng.uniform();
    for (std::size_t c = 0; c < 6; ++c) g(r, c) = a[c] + w[c] * z;
  }
  const Benchmark bench(fixtures::ids("m", 40), fixtures::ids("d", 6), g);
  const auto res = kfold_stability(bench, identity_trace(6), ridge(1e-12), 5, 2);
  CHECK(res.stddev < 1e-6);
  for (double v : res.fold_auc_mse) CHECK(v < 1e-12);
}

TEST_CASE("mse curves do not depend on the worker count") {
  const auto bench = fixtures::uniform(30, 7, 12);
  const auto split = split_models(bench, 0.8, 3);
  const auto spec = PredictorSpec::of(PredictorKind::kMlp1, 4);
  ::setenv("SIMBA_THREADS", "1", 1);
  const auto serial = mse_curve(split, identity_trace(7), spec);
  ::setenv("SIMBA_THREADS", "3", 1);
  const auto threaded = mse_curve(split, identity_trace(7), spec);
  ::unsetenv("SIMBA_THREADS");
  CHECK(serial.mses == threaded.mses);
  CHECK(serial.sizes == threaded.sizes);
}
