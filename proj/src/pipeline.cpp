#include "simba/pipeline.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "simba/kernels.hpp"
#include "simba/perfpredict.hpp"
#include "simba/relate.hpp"
#include "simba/repset.hpp"
#include "simba/simmeasure.hpp"

namespace simba {
namespace {

using Json = nlohmann::ordered_json;

std::string short_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string census_table(const RelationshipCensus& census, const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << "axis,id_a,id_b,class,direction,slope,intercept,r_squared,n_common,diagnostic\n";
  for (const auto& pv : census.verdicts) {
    const auto& v = pv.verdict;
    out << axis_name(census.axis) << ',' << csv_field(ids[pv.a]) << ',' << csv_field(ids[pv.b]) << ',' << class_name(v.klass) << ',';
    if (v.best_fit) {
      out << direction_name(v.best_fit->direction) << ',' << format_real(v.best_fit->slope) << ','
          << format_real(v.best_fit->intercept) << ',' << format_real(v.best_fit->r_squared);
    } else {
      out << ",,,";
    }
    out << ',' << v.n_common << ',' << csv_field(v.diagnostic) << '\n';
  }
  return out.str();
}

Json census_summary(const RelationshipCensus& census) {
  Json counts = Json::object(), percentages = Json::object();
  const double total = static_cast<double>(census.total());
  for (auto k : {RelationClass::kLinear, RelationClass::kExponential, RelationClass::kPowerLaw, RelationClass::kNone}) {
    counts[std::string(class_name(k))] = census.count(k);
    percentages[std::string(class_name(k))] = total > 0 ? 100.0 * static_cast<double>(census.count(k)) / total : 0.0;
  }
  std::size_t flagged = 0;
  for (const auto& pv : census.verdicts)
    if (!pv.verdict.diagnostic.empty()) ++flagged;
  return Json{{"total", census.total()}, {"counts", counts}, {"percentages", percentages}, {"flagged_pairs", flagged}};
}

std::string trace_table(const SelectionTrace& trace, const CoverageCurve& curve,
                        const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << "rank,dataset_id,delta,eta\n";
  for (std::size_t k = 0; k < trace.order.size(); ++k) {
    out << k + 1 << ',' << csv_field(ids[trace.order[k]]) << ',';
    if (k < trace.deltas.size()) out << format_real(trace.deltas[k]);
    out << ',';
    if (k < curve.etas.size()) out << format_real(curve.etas[k]);
    out << '\n';
  }
  return out.str();
}

std::string curve_table(std::span<const double> etas) {
  std::ostringstream out;
  out << "size,eta\n";
  for (std::size_t k = 0; k < etas.size(); ++k) out << k + 1 << ',' << format_real(etas[k]) << '\n';
  return out.str();
}

std::size_t gamma_prefix(const SelectionTrace& trace, double gamma) {
  for (std::size_t k = 0; k < trace.deltas.size(); ++k)
    if (trace.deltas[k] >= gamma) return k + 1;
  return trace.order.size();
}

SimilarityMatrix load_or_compute(const RunConfig& config, const Benchmark& bench, Measure measure,
                                 std::size_t& flagged) {
  flagged = 0;
  if (!config.similarity_dir.empty()) {
    const auto path = std::filesystem::path(config.similarity_dir) / ("similarity_" + std::string(measure_name(measure)) + ".csv");
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open saved similarity matrix '" + path.string() + "'");
    return read_similarity_matrix(in, measure, bench.dataset_ids());
  }
  auto report = similarity_matrix_report(bench, measure);
  flagged = report.diagnostics.size();
  return std::move(report.matrix);
}

}  // namespace

void ReportWriter::add(std::string path, std::string kind, std::string content,
                       std::map<std::string, std::string> params) {
  if (contents_.count(path)) throw InvariantError("report '" + path + "' written twice");
  contents_.emplace(path, std::move(content));
  artifacts_.push_back({std::move(path), std::move(kind), std::move(params)});
}

const std::string& ReportWriter::content(const std::string& path) const {
  const auto it = contents_.find(path);
  if (it == contents_.end()) throw InvariantError("no report named '" + path + "'");
  return it->second;
}

std::string ReportWriter::manifest() const {
  Json doc = Json::object();
  for (const auto& [k, v] : header_) doc[k] = v;
  Json list = Json::array();
  for (const auto& a : artifacts_) {
    Json params = Json::object();
    for (const auto& [k, v] : a.params) params[k] = v;
    list.push_back(Json{{"path", a.path}, {"kind", a.kind}, {"params", params}});
  }
  doc["artifacts"] = list;
  return doc.dump(2) + "\n";
}

void ReportWriter::commit(const std::string& output_dir) const {
  namespace fs = std::filesystem;
  const fs::path root(output_dir);
  auto write = [&](const fs::path& rel, const std::string& text) {
    const auto full = root / rel;
    fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + full.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + full.string() + "'");
  };
  for (const auto& a : artifacts_) write(a.path, contents_.at(a.path));
  write("manifest.json", manifest());
}

Benchmark load_config_benchmark(const RunConfig& config) {
  return normalize_scores(load_benchmark_files(config.matrix_path, config.chance_path));
}

void run_stalk(const RunConfig& config, const Benchmark& bench, ReportWriter& out) {
  const auto datasets = compare_all_datasets(bench, config.r2_threshold, config.log_offset);
  const auto models = compare_all_models(bench, config.r2_threshold, config.log_offset);
  const std::map<std::string, std::string> params{{"r2_threshold", format_real(config.r2_threshold)},
                                                  {"log_offset", format_real(config.log_offset)}};
  out.add("stalk/dataset_census.csv", "census", census_table(datasets, bench.dataset_ids()), params);
  out.add("stalk/model_census.csv", "census", census_table(models, bench.model_ids()), params);

  Json summary{{"benchmark", config.benchmark_name},
               {"r2_threshold", config.r2_threshold},
               {"log_offset", config.log_offset},
               {"datasets", census_summary(datasets)},
               {"models", census_summary(models)}};
  out.add("stalk/summary.json", "census_summary", summary.dump(2) + "\n", params);
}

void run_prowl(const RunConfig& config, const Benchmark& bench, ReportWriter& out) {
  bench.require_complete("prowl");
  const std::uint64_t seed = config.seed.value();
  const WinTable wins(bench);
  const auto& ids = bench.dataset_ids();

  std::ostringstream summary, versus, randoms;
  summary << "system,sc_auc,s_star,gamma_subset_size\n";
  versus << "system,auc_prop,max2_prop,window\n";

  const auto random = random_curves(bench, config.random_runs, seed);
  if (!random.empty()) {
    double mean_auc = 0.0, mean_star = 0.0;
    randoms << "run,seed,sc_auc,s_star\n";
    for (std::size_t r = 0; r < random.size(); ++r) {
      const double auc = sc_auc(random[r]);
      const std::size_t star = smallest_covering_prefix(random[r], config.coverage_threshold);
      mean_auc += auc;
      mean_star += static_cast<double>(star);
      randoms << r << ',' << seed + r << ',' << format_real(auc) << ',' << star << '\n';
    }
    mean_auc /= static_cast<double>(random.size());
    mean_star /= static_cast<double>(random.size());
    summary << "random," << format_real(mean_auc) << ',' << format_real(mean_star) << ",\n";
    const auto mean = mean_etas(random);
    out.add("prowl/curve_random_mean.csv", "coverage_curve", curve_table(mean),
            {{"system", "random"}, {"runs", std::to_string(random.size())}, {"base_seed", std::to_string(seed)}});
    out.add("prowl/random_runs.csv", "random_runs", randoms.str(),
            {{"runs", std::to_string(random.size())}, {"base_seed", std::to_string(seed)}});
  }

  auto report_system = [&](const std::string& name, const SelectionTrace& trace, std::size_t gamma_size,
                           std::map<std::string, std::string> params) {
    const auto curve = coverage_curve(wins, trace);
    const double auc = sc_auc(curve);
    const std::size_t star = smallest_covering_prefix(curve, config.coverage_threshold);
    summary << name << ',' << format_real(auc) << ',' << star << ',';
    if (gamma_size) summary << gamma_size;
    summary << '\n';
    params["system"] = name;
    out.add("prowl/trace_" + name + ".csv", "selection_trace", trace_table(trace, curve, ids), params);
    out.add("prowl/curve_" + name + ".csv", "coverage_curve", curve_table(curve.etas), params);
    if (!random.empty()) {
      const auto cmp = proportion_vs_random(curve, random, config.coverage_threshold);
      versus << name << ',' << format_real(cmp.auc_prop) << ',' << format_real(cmp.max2_prop) << ',' << cmp.window
             << '\n';
    }
  };

  report_system("greedy_min", baseline_order(bench, SelectionMethod::kGreedyMin), 0, {});
  report_system("greedy_max", baseline_order(bench, SelectionMethod::kGreedyMax), 0, {});

  for (Measure measure : config.measures) {
    const std::string name(measure_name(measure));
    std::size_t flagged = 0;
    const auto sim = load_or_compute(config, bench, measure, flagged);
    std::ostringstream matrix;
    write_similarity_matrix(matrix, sim, ids);
    out.add("prowl/similarity_" + name + ".csv", "similarity_matrix", matrix.str(),
            {{"measure", name}, {"degenerate_entries", std::to_string(flagged)}});

    const auto full = discover_representative(sim, 1.0, config.beam_width);
    std::size_t gamma_size = full.order.size();
    if (config.gamma < 1.0) gamma_size = discover_representative(sim, config.gamma, config.beam_width).order.size();
    report_system(name, full, gamma_size,
                  {{"measure", name},
                   {"beam_width", std::to_string(config.beam_width)},
                   {"gamma", format_real(config.gamma)}});
  }

  const std::map<std::string, std::string> params{{"coverage_threshold", format_real(config.coverage_threshold)},
                                                  {"sc_auc_x_axis", "k/d, first value held to x=0"},
                                                  {"random_runs", std::to_string(config.random_runs)}};
  out.add("prowl/summary.csv", "coverage_summary", summary.str(), params);
  if (!random.empty()) out.add("prowl/vs_random.csv", "random_comparison", versus.str(), params);
}

void run_pounce(const RunConfig& config, const Benchmark& bench, ReportWriter& out) {
  bench.require_complete("pounce");
  const std::uint64_t seed = config.seed.value();
  const auto split = split_models(bench, config.split_ratio, seed);

  std::ostringstream split_csv;
  split_csv << "model_id,role\n";
  for (const auto& id : split.train.model_ids()) split_csv << csv_field(id) << ",train\n";
  for (const auto& id : split.test.model_ids()) split_csv << csv_field(id) << ",test\n";
  out.add("pounce/split.csv", "model_split", split_csv.str(),
          {{"seed", std::to_string(seed)}, {"ratio", format_real(config.split_ratio)}});

  // Discovery sees the train models only.
  const std::string measure(measure_name(config.pounce_measure));
  const auto sim = similarity_matrix(split.train, config.pounce_measure);
  const auto trace = discover_representative(sim, 1.0, config.beam_width);
  const std::size_t rep_size = std::min(gamma_prefix(trace, config.pounce_gamma), trace.order.size() - 1);
  {
    std::ostringstream t;
    t << "rank,dataset_id,delta,representative\n";
    for (std::size_t k = 0; k < trace.order.size(); ++k)
      t << k + 1 << ',' << csv_field(split.train.dataset_ids()[trace.order[k]]) << ',' << format_real(trace.deltas[k]) << ','
        << (k < rep_size ? 1 : 0) << '\n';
    out.add("pounce/trace.csv", "selection_trace", t.str(),
            {{"measure", measure}, {"pounce_gamma", format_real(config.pounce_gamma)}});
  }

  std::ostringstream summary;
  summary << "regressor,benchmark,sigma,auc_mse,representative_size,mse_at_representative\n";
  for (PredictorKind kind : config.predictors) {
    auto spec = PredictorSpec::of(kind, seed);
    spec.ridge_lambda = config.ridge_lambda;
    spec.knn_k = config.knn_k;
    const std::string pname(predictor_name(kind));
    for (std::size_t s = 0; s < config.noise_sigmas.size(); ++s) {
      const double sigma = config.noise_sigmas[s];
      const NoiseSpec noise{config.noise_mean, sigma, seed + 1 + s};
      const auto curve = mse_curve(split, trace, spec, noise);
      const double area = auc_mse(curve);
      std::ostringstream c;
      c << "size,mse\n";
      for (std::size_t k = 0; k < curve.sizes.size(); ++k) c << curve.sizes[k] << ',' << format_real(curve.mses[k]) << '\n';
      out.add("pounce/mse_" + pname + "_sigma" + short_real(sigma) + ".csv", "mse_curve", c.str(),
              {{"regressor", pname},
               {"sigma", format_real(sigma)},
               {"noise_mean", format_real(config.noise_mean)},
               {"noise_seed", std::to_string(noise.seed)},
               {"measure", measure}});
      summary << pname << ',' << csv_field(config.benchmark_name) << ',' << format_real(sigma) << ',' << format_real(area) << ','
              << rep_size << ',' << format_real(curve.mses[rep_size - 1]) << '\n';
    }
  }
  out.add("pounce/summary.csv", "auc_mse_summary", summary.str(), {{"measure", measure}});

  if (config.k_folds >= 2) {
    if (config.k_folds > split.train.models())
      throw ConfigError("k_folds exceeds the number of train models (" + std::to_string(split.train.models()) + ")");
    std::ostringstream folds, fold_summary;
    folds << "regressor,fold,auc_mse\n";
    fold_summary << "regressor,k_folds,mean,stddev\n";
    for (PredictorKind kind : config.predictors) {
      auto spec = PredictorSpec::of(kind, seed);
      spec.ridge_lambda = config.ridge_lambda;
      spec.knn_k = config.knn_k;
      const std::string pname(predictor_name(kind));
      const auto res = kfold_stability(split.train, trace, spec, config.k_folds, seed);
      for (std::size_t f = 0; f < res.fold_auc_mse.size(); ++f)
        folds << pname << ',' << f << ',' << format_real(res.fold_auc_mse[f]) << '\n';
      fold_summary << pname << ',' << config.k_folds << ',' << format_real(res.mean) << ','
                   << format_real(res.stddev) << '\n';
    }
    const std::map<std::string, std::string> params{{"k_folds", std::to_string(config.k_folds)},
                                                    {"seed", std::to_string(seed)}};
    out.add("pounce/kfold.csv", "kfold_folds", folds.str(), params);
    out.add("pounce/kfold_summary.csv", "kfold_summary", fold_summary.str(), params);
  }
}

ReportWriter run_pipeline(const RunConfig& input, const std::string& command) {
  RunConfig config = input;
  if (config.benchmark_name.empty())
    config.benchmark_name = std::filesystem::path(config.matrix_path).stem().string();
  validate_config(config);

  std::vector<Phase> phases;
  if (command == "all")
    phases = config.phases;
  else if (command == "stalk")
    phases = {Phase::kStalk};
  else if (command == "prowl")
    phases = {Phase::kProwl};
  else if (command == "pounce")
    phases = {Phase::kPounce};
  else
    throw ConfigError("unknown command '" + command + "'");

  for (Phase p : phases)
    if (p != Phase::kStalk && !config.seed)
      throw ConfigError(std::string(phase_name(p)) + " requires --seed");

  const Benchmark bench = load_config_benchmark(config);
  ReportWriter out;
  std::set<Phase> done;
  for (Phase p : phases) {
    if (!done.insert(p).second) continue;
    switch (p) {
      case Phase::kStalk:
        run_stalk(config, bench, out);
        break;
      case Phase::kProwl:
        run_prowl(config, bench, out);
        break;
      case Phase::kPounce:
        run_pounce(config, bench, out);
        break;
    }
  }
  out.set_header({{"command", command},
                  {"benchmark", config.benchmark_name},
                  {"models", std::to_string(bench.models())},
                  {"datasets", std::to_string(bench.datasets())},
                  {"seed", config.seed ? std::to_string(*config.seed) : ""},
                  {"kernels", std::string(kernels::isa_name(kernels::active().isa))},
                  {"config", render_config(config)}});
  out.commit(config.output_dir);
  return out;
}

}  // namespace simba
