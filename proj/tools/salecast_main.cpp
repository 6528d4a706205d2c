// salecast: home-sale price classification pipeline CLI.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "salecast/frame.hpp"
#include "salecast/pipeline.hpp"
#include "salecast/rng.hpp"
#include "salecast/stack.hpp"
#include "salecast/svg.hpp"
#include "salecast/synth.hpp"
#include "salecast/tune.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace salecast;

namespace {

constexpr int kArtifactVersion = 1;

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommonOpts {
  std::string market_csv, socio_csv, out_dir = ".", config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int stage = 3;
  std::string model = "boosted";
  double holdout = 0.25;
  int n_threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_data = true) {
  if (needs_data) {
    cmd->add_option("--market", o.market_csv, "market sales CSV")->required();
    cmd->add_option("--socio", o.socio_csv, "monthly socio-economic CSV")
        ->required();
  }
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--seed", o.seed, "root RNG seed (required, no clock default)")
      ->required();
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--threads", o.n_threads, "worker threads (0 = all cores)");
}

struct RunConfig {
  ModelSpec model;
  ModelSpec generator;  // stacking meta-feature generator
  EncodeParams enc;
  int oof_folds = 5;
  EvalProtocol protocol;
};

RunConfig load_config(const CommonOpts& o) {
  RunConfig cfg;
  cfg.generator.family = ModelFamily::Boosted;
  if (!o.config_path.empty()) {
    const json j = json::parse(slurp(o.config_path));
    if (j.contains("model")) cfg.model = spec_from_json(j.at("model"));
    if (j.contains("generator"))
      cfg.generator = spec_from_json(j.at("generator"));
    if (j.contains("encoding")) {
      cfg.enc.k = j.at("encoding").value("k", cfg.enc.k);
      cfg.enc.n_folds = j.at("encoding").value("n_folds", cfg.enc.n_folds);
    }
    if (j.contains("oof_folds")) cfg.oof_folds = j.at("oof_folds");
    if (j.contains("protocol")) {
      const auto& p = j.at("protocol");
      if (p.value("kind", "holdout") == "cv") cfg.protocol.kind = Protocol::Cv;
      cfg.protocol.holdout_fraction =
          p.value("holdout_fraction", cfg.protocol.holdout_fraction);
      cfg.protocol.cv_k = p.value("cv_k", cfg.protocol.cv_k);
    }
  }
  cfg.model.family = family_from_name(o.model);
  return cfg;
}

Frame load_joined(const CommonOpts& o, std::size_t* rejected = nullptr) {
  Frame market = load_csv(o.market_csv, Schema::market());
  const SocioTable socio = SocioTable::load_csv(o.socio_csv);
  std::size_t rej_target = 0, rej_prepare = 0;
  Frame f = derive_target(market, &rej_target);
  f = join_socio(f, socio);
  f = prepare(f, &rej_prepare);
  if (rejected) *rejected = rej_target + rej_prepare;
  return f;
}

json fingerprint(const CommonOpts& o, const RunConfig& cfg) {
  return json{{"seed", o.seed},
              {"stage", o.stage},
              {"model", spec_to_json(cfg.model)},
              {"generator", spec_to_json(cfg.generator)},
              {"encoding", {{"k", cfg.enc.k}, {"n_folds", cfg.enc.n_folds}}},
              {"holdout", o.holdout}};
}

int cmd_synth(const CommonOpts& o, std::size_t rows, double signal) {
  SynthConfig sc;
  sc.n_rows = rows;
  sc.seed = o.seed;
  sc.signal_strength = signal;
  const SynthResult r = generate_synth(sc);
  fs::create_directories(o.out_dir);
  write_csv(r.market, o.out_dir + "/market.csv");
  write_csv(r.socio_frame, o.out_dir + "/socio.csv");
  const json truth{{"bayes_accuracy", r.bayes_accuracy},
                   {"prevalence", r.prevalence},
                   {"n_rows", sc.n_rows},
                   {"seed", sc.seed},
                   {"signal_strength", sc.signal_strength}};
  atomic_write(o.out_dir + "/truth.json", truth.dump(2) + "\n");
  std::cout << "wrote " << sc.n_rows << " rows, bayes accuracy "
            << r.bayes_accuracy << ", prevalence " << r.prevalence << "\n";
  return 0;
}

int cmd_prepare(const CommonOpts& o) {
  std::size_t rejected = 0;
  Frame market = load_csv(o.market_csv, Schema::market());
  const std::size_t rows_in = market.n_rows();
  const Frame joined = load_joined(o, &rejected);
  fs::create_directories(o.out_dir);
  write_csv(joined, o.out_dir + "/prepared.csv");

  std::ostringstream rep;
  rep << "rows_in," << rows_in << "\n"
      << "rows_out," << joined.n_rows() << "\n"
      << "rows_rejected," << rejected << "\n"
      << "n_features," << joined.feature_names().size() << "\n";
  double mean = 0;
  for (int y : target_vector(joined)) mean += y;
  rep << "target_mean," << mean / static_cast<double>(joined.n_rows()) << "\n";
  atomic_write(o.out_dir + "/prepare_report.csv", rep.str());
  std::cout << "prepared " << joined.n_rows() << " rows ("
            << joined.feature_names().size() << " features), rejected "
            << rejected << "\n";

  // per-year summary to stdout
  std::cout << "year,count,positive_rate\n";
  for (const auto& s : summarize(joined))
    std::cout << s.year << "," << s.count << "," << s.positive_rate << "\n";
  return 0;
}

// rows used for fitting under the holdout protocol; holdout=0 trains on all
std::vector<std::size_t> train_rows_of(const Frame& joined, double holdout,
                                       std::uint64_t seed) {
  std::vector<std::size_t> all(joined.n_rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (holdout <= 0.0) return all;
  return holdout_split(target_vector(joined), holdout, derive_seed(seed, 300))
      .first;
}

std::vector<std::size_t> test_rows_of(const Frame& joined, double holdout,
                                      std::uint64_t seed) {
  if (holdout <= 0.0) {
    std::vector<std::size_t> all(joined.n_rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  return holdout_split(target_vector(joined), holdout, derive_seed(seed, 300))
      .second;
}

int cmd_train(const CommonOpts& o) {
  const RunConfig cfg = load_config(o);
  const Frame joined = load_joined(o);
  const Frame train =
      joined.select_rows(train_rows_of(joined, o.holdout, o.seed));

  json artifact{{"format_version", kArtifactVersion},
                {"stage", o.stage},
                {"model_family", family_name(cfg.model.family)},
                {"fingerprint", fingerprint(o, cfg)}};
  if (o.stage == 3) {
    StackConfig sc{cfg.generator, cfg.model, cfg.oof_folds, true, cfg.enc};
    const StackedModel sm =
        build_stack_joined(train, sc, derive_seed(o.seed, 400), o.n_threads);
    artifact["kind"] = "stacked";
    artifact["stacked"] = sm.to_json();
  } else {
    PipelineSpec spec;
    spec.model = cfg.model;
    spec.features = o.stage == 1 ? market_feature_list(joined)
                                 : joined_feature_list(joined);
    spec.encode = false;
    const FittedPipeline fp =
        fit_pipeline(spec, train, derive_seed(o.seed, 400), o.n_threads);
    artifact["kind"] = "pipeline";
    artifact["pipeline"] = fp.to_json();
  }
  fs::create_directories(o.out_dir);
  atomic_write(o.out_dir + "/model.json", artifact.dump(2) + "\n");
  std::cout << "trained stage " << o.stage << " "
            << family_name(cfg.model.family) << " model on " << train.n_rows()
            << " rows -> " << o.out_dir << "/model.json\n";
  return 0;
}

json load_artifact(const std::string& path) {
  const json j = json::parse(slurp(path));
  if (j.at("format_version") != kArtifactVersion)
    throw std::runtime_error("unsupported artifact format version");
  return j;
}

std::vector<double> artifact_scores(const json& artifact, const Frame& rows) {
  if (artifact.at("kind") == "stacked") {
    const StackedModel sm = StackedModel::from_json(artifact.at("stacked"));
    return predict_stacked_proba(sm, rows);
  }
  const FittedPipeline fp = FittedPipeline::from_json(artifact.at("pipeline"));
  return fp.predict_proba(rows);
}

int cmd_evaluate(const CommonOpts& o, const std::string& artifact_path) {
  const json artifact = load_artifact(artifact_path);
  const Frame joined = load_joined(o);
  const Frame test = joined.select_rows(test_rows_of(joined, o.holdout, o.seed));

  const auto scores = artifact_scores(artifact, test);
  const auto y_true = target_vector(test);
  std::vector<int> y_pred(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    y_pred[i] = scores[i] >= 0.5 ? 1 : 0;
  const EvalReport rep = report(y_true, y_pred);

  fs::create_directories(o.out_dir);
  std::ostringstream metrics;
  metrics << "model,stage,accuracy,precision,recall,f1,error_rate\n"
          << artifact.at("model_family").get<std::string>() << ","
          << artifact.at("stage").get<int>() << "," << rep.accuracy << ","
          << rep.macro_precision << "," << rep.macro_recall << ","
          << rep.macro_f1 << "," << rep.error_rate << "\n";
  atomic_write(o.out_dir + "/metrics.csv", metrics.str());

  std::ostringstream txt;
  txt << "n," << rep.n << "\naccuracy," << rep.accuracy << "\nerror_rate,"
      << rep.error_rate << "\n"
      << "class0 precision," << rep.precision0 << "\nclass0 recall,"
      << rep.recall0 << "\nclass0 f1," << rep.f1_0 << "\n"
      << "class1 precision," << rep.precision1 << "\nclass1 recall,"
      << rep.recall1 << "\nclass1 f1," << rep.f1_1 << "\n"
      << "macro f1," << rep.macro_f1 << "\n";

  // 4 curve kinds x 2 classes; class 0 treats 1-score as the score
  for (int cls = 0; cls <= 1; ++cls) {
    std::vector<double> s = scores;
    std::vector<int> y = y_true;
    if (cls == 0) {
      for (auto& v : s) v = 1.0 - v;
      for (auto& v : y) v = 1 - v;
    }
    const std::string suffix = "_class" + std::to_string(cls);
    const Curve roc = roc_curve(s, y);
    const Curve ks = ks_curve(s, y);
    const Curve gains = cumulative_gains(s, y, 1);
    const Curve lift = lift_curve(s, y, 1);
    for (const Curve* c : {&roc, &ks, &gains, &lift}) {
      const std::string base = o.out_dir + "/" + curve_kind_name(c->kind) + suffix;
      write_curve_csv(*c, base + ".csv");
      write_curve_svg(*c, curve_kind_name(c->kind) + " (class " +
                              std::to_string(cls) + ")",
                      base + ".svg");
    }
    txt << "class" << cls << " auc," << roc.auc << "\nclass" << cls << " ks,"
        << ks.ks_value << "\nclass" << cls << " ks_threshold,"
        << ks.ks_threshold << "\n";
  }
  atomic_write(o.out_dir + "/report.txt", txt.str());
  std::cout << "accuracy " << rep.accuracy << ", macro f1 " << rep.macro_f1
            << " on " << rep.n << " rows -> " << o.out_dir << "\n";
  return 0;
}

int cmd_importance(const CommonOpts& o, const std::string& artifact_path) {
  const json artifact = load_artifact(artifact_path);
  const json& pj = artifact.at("kind") == "stacked"
                       ? artifact.at("stacked").at("final_model")
                       : artifact.at("pipeline");
  const FittedPipeline fp = FittedPipeline::from_json(pj);
  const auto imp = fp.model->importance();

  std::vector<std::pair<std::string, double>> ranked;
  for (std::size_t i = 0; i < imp.size(); ++i)
    ranked.emplace_back(fp.features[i], imp[i]);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  fs::create_directories(o.out_dir);
  std::ostringstream csv;
  csv << "feature,importance\n";
  for (const auto& [name, v] : ranked) csv << name << "," << v << "\n";
  atomic_write(o.out_dir + "/importance.csv", csv.str());
  write_bar_svg(ranked, "feature importance", o.out_dir + "/importance.svg");
  std::cout << "wrote importance ranking (" << ranked.size() << " features)\n";
  return 0;
}

int cmd_stack(const CommonOpts& o) {
  const RunConfig cfg = load_config(o);
  Frame market = load_csv(o.market_csv, Schema::market());
  const SocioTable socio = SocioTable::load_csv(o.socio_csv);
  std::size_t rejected = 0;
  Frame f = derive_target(market, &rejected);
  f = prepare(f, &rejected);

  StackConfig sc{cfg.generator, cfg.model, cfg.oof_folds, true, cfg.enc};
  const auto rows =
      ablation_table(f, socio, sc, cfg.protocol, o.seed, o.n_threads);

  fs::create_directories(o.out_dir);
  std::ostringstream csv;
  csv << "model,stage,accuracy,precision,recall,f1,error_rate\n";
  for (const auto& r : rows)
    csv << family_name(r.family) << "," << r.stage << "," << r.report.accuracy
        << "," << r.report.macro_precision << "," << r.report.macro_recall
        << "," << r.report.macro_f1 << "," << r.report.error_rate << "\n";
  atomic_write(o.out_dir + "/metrics.csv", csv.str());
  std::cout << csv.str();
  return 0;
}

int cmd_cv(const CommonOpts& o, int k, bool nested) {
  const RunConfig cfg = load_config(o);
  const Frame joined = load_joined(o);

  PipelineSpec spec;
  spec.model = cfg.model;
  spec.features = o.stage == 1 ? market_feature_list(joined)
                               : joined_feature_list(joined);
  spec.encode = false;

  fs::create_directories(o.out_dir);
  std::ostringstream csv;
  if (nested) {
    const auto grid = default_grid(cfg.model, spec.features.size());
    const auto res = nested_cv(spec, grid, joined, k, 5,
                               derive_seed(o.seed, 500), true, o.n_threads);
    csv << "fold,score,n_features\n";
    for (std::size_t i = 0; i < res.folds.size(); ++i)
      csv << i << "," << res.folds[i].score << ","
          << res.folds[i].chosen_features.size() << "\n";
    csv << "mean," << res.mean_score << ",\n";
  } else {
    const FoldPlan plan =
        stratified_kfold(target_vector(joined), k, derive_seed(o.seed, 501));
    const auto cv =
        cross_val_score(spec, joined, plan, derive_seed(o.seed, 502), o.n_threads);
    csv << "fold,score\n";
    for (std::size_t i = 0; i < cv.fold_scores.size(); ++i)
      csv << i << "," << cv.fold_scores[i] << "\n";
    csv << "mean," << cv.mean << "\n";
  }
  atomic_write(o.out_dir + "/cv_report.csv", csv.str());
  std::cout << csv.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"home-sale price classification pipeline"};
  app.require_subcommand(1);

  CommonOpts o;
  std::size_t synth_rows = 10000;
  double synth_signal = 3.0;
  std::string artifact_path;
  int cv_k = 10;
  bool nested = false;

  auto* synth = app.add_subcommand("synth", "generate synthetic market+socio data");
  synth->add_option("--rows", synth_rows, "number of market rows");
  synth->add_option("--signal", synth_signal, "socio signal strength");
  add_common(synth, o, false);

  auto* prep = app.add_subcommand("prepare", "load, derive target, join socio");
  add_common(prep, o);

  auto* train = app.add_subcommand("train", "fit a model and write the artifact");
  add_common(train, o);
  train->add_option("--stage", o.stage, "1=21 features, 2=26, 3=full stack")
      ->check(CLI::Range(1, 3));
  train->add_option("--model", o.model, "logistic|forest|boosted|voting");
  train->add_option("--holdout", o.holdout, "test fraction held out (0 = none)");

  auto* eval = app.add_subcommand("evaluate", "score an artifact; emit curves");
  add_common(eval, o);
  eval->add_option("--artifact", artifact_path, "model.json path")->required();
  eval->add_option("--holdout", o.holdout, "evaluate on this held-out fraction");

  auto* imp = app.add_subcommand("importance", "ranked feature importance");
  imp->add_option("--artifact", artifact_path, "model.json path")->required();
  imp->add_option("--out", o.out_dir, "output directory");

  auto* stack = app.add_subcommand("stack", "full staged ablation run");
  add_common(stack, o);

  auto* cv = app.add_subcommand("cv", "cross-validation report");
  add_common(cv, o);
  cv->add_option("--stage", o.stage, "1 or 2 (feature set)")->check(CLI::Range(1, 2));
  cv->add_option("--model", o.model, "logistic|forest|boosted|voting");
  cv->add_option("--k", cv_k, "number of folds");
  cv->add_flag("--nested", nested, "nested CV with grid search + feature selection");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(o, synth_rows, synth_signal);
    if (prep->parsed()) return cmd_prepare(o);
    if (train->parsed()) return cmd_train(o);
    if (eval->parsed()) return cmd_evaluate(o, artifact_path);
    if (imp->parsed()) return cmd_importance(o, artifact_path);
    if (stack->parsed()) return cmd_stack(o);
    if (cv->parsed()) return cmd_cv(o, cv_k, nested);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
