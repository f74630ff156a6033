#pragma once

// Command-line front end: train, eval, stats, indicator, synth.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scn2d/scn2d.hpp"

namespace scn2d::cli {

inline constexpr const char* kVersion = "1.0.0";

namespace detail {

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  unsigned threads = 1;
};

struct DataOptions {
  std::string data = "synth";  // "synth" or a CSV path
  std::string shape;           // "d1xd2" or "d" for CSV
  std::size_t target_cols = 1;
  std::size_t classes = 0;
  bool header = false;
  std::string idx_images, idx_labels;
  std::string test;  // CSV path for a held-out set
  std::string test_idx_images, test_idx_labels;
  // synthetic task
  std::size_t n = 500;
  std::size_t d1 = 16;
  std::size_t d2 = 16;
  std::size_t k = 5;
  double noise = 0.05;
  std::optional<std::uint64_t> data_seed;

  void add_to(CLI::App& app) {
    app.add_option("--data", data, "'synth' or a CSV file (row = column-major sample, then targets)")
        ->capture_default_str();
    app.add_option("--shape", shape, "CSV input shape: d1xd2 or d");
    app.add_option("--target-cols", target_cols, "CSV target columns")->capture_default_str();
    app.add_option("--classes", classes, "CSV: one label column, one-hot encoded into this many classes");
    app.add_flag("--header", header, "CSV files start with a header row");
    app.add_option("--idx-images", idx_images, "IDX image file (overrides --data)");
    app.add_option("--idx-labels", idx_labels, "IDX label file");
    app.add_option("--test", test, "held-out CSV file");
    app.add_option("--test-idx-images", test_idx_images, "held-out IDX image file");
    app.add_option("--test-idx-labels", test_idx_labels, "held-out IDX label file");
    app.add_option("--n", n, "synthetic: samples per split")->capture_default_str();
    app.add_option("--d1", d1, "synthetic: input rows")->capture_default_str();
    app.add_option("--d2", d2, "synthetic: input columns")->capture_default_str();
    app.add_option("--k", k, "synthetic: planted nodes")->capture_default_str();
    app.add_option("--noise", noise, "synthetic: train target noise sd")->capture_default_str();
    app.add_option("--data-seed", data_seed, "synthetic: seed for the task (defaults to --seed)");
  }
};

struct LoadedData {
  Dataset train;
  std::optional<Dataset> test;
};

inline InputShape parse_shape(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) return InputShape::flat(std::stoul(s));
    return InputShape::grid(std::stoul(s.substr(0, x)), std::stoul(s.substr(x + 1)));
  } catch (const std::logic_error&) {
    throw Error("bad --shape '" + s + "' (expected d1xd2 or d)");
  }
}

inline LoadedData load_data(const DataOptions& o, std::uint64_t seed) {
  LoadedData out;
  if (!o.idx_images.empty() || !o.idx_labels.empty()) {
    if (o.idx_images.empty() || o.idx_labels.empty()) throw Error("--idx-images and --idx-labels go together");
    out.train = load_idx(o.idx_images, o.idx_labels, o.classes);
  } else if (o.data == "synth") {
    auto task = synth_matrix_regression(o.n, o.d1, o.d2, o.k, o.noise, o.data_seed.value_or(seed));
    out.train = std::move(task.train);
    out.test = std::move(task.test);
  } else {
    if (o.shape.empty()) throw Error("--shape is required with a CSV --data file");
    out.train = load_csv(o.data, parse_shape(o.shape), CsvOptions{o.target_cols, o.header, o.classes});
  }
  if (!o.test_idx_images.empty() || !o.test_idx_labels.empty()) {
    if (o.test_idx_images.empty() || o.test_idx_labels.empty())
      throw Error("--test-idx-images and --test-idx-labels go together");
    out.test = load_idx(o.test_idx_images, o.test_idx_labels, out.train.targets.cols());
  } else if (!o.test.empty()) {
    const InputShape shape = o.shape.empty() ? out.train.inputs.shape : parse_shape(o.shape);
    out.test = load_csv(o.test, shape, CsvOptions{o.target_cols, o.header, o.classes});
  }
  return out;
}

inline std::string num(double x) { return format_double(x); }

inline std::string stamp(const char* what, std::uint64_t seed) {
  return std::string("# scn2d ") + kVersion + " " + what + " seed=" + std::to_string(seed) + "\n";
}

inline std::filesystem::path out_path(const GlobalOptions& g, const std::string& name) {
  std::filesystem::path dir(g.out_dir);
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot open '" + p.string() + "' for writing");
  f << text;
  if (!f) throw Error("failed writing '" + p.string() + "'");
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(std::stod(tok));
    } catch (const std::logic_error&) {
      throw Error("bad number '" + tok + "' in list '" + s + "'");
    }
  }
  return out;
}

/// Prints the metrics for one split; returns the residual ||H beta - T||_F.
inline double report_split(std::ostream& out, const char* split, const Network& net, const Dataset& ds,
                           const std::vector<double>& thetas) {
  const Matrix pred = predict(net, ds.inputs);
  const double residual = frobenius_norm(pred - ds.targets);
  out << split << "_residual " << num(residual) << "\n";
  out << split << "_rmse " << num(rmse(pred, ds.targets)) << "\n";
  if (ds.labels) {
    out << split << "_accuracy " << num(accuracy(pred, *ds.labels)) << "\n";
  } else if (ds.targets.cols() == 1) {
    for (double th : thetas)
      out << split << "_ppa[" << num(th) << "] " << num(ppa(pred.data(), ds.targets.data(), th)) << "\n";
  }
  return residual;
}

// ------------------------------------------------------------------ train

struct TrainOptions {
  std::string algo;
  std::size_t max_nodes = 100;
  double tol = 0.0;
  std::size_t max_trials = 5;
  std::string lambdas = "1,5,15,30,50,100,150,200,250";
  std::string rs = "0.99,0.999,0.9999,0.99999,0.999999,0.9999999";
  double lambda = 1.0;  // RVFL range
  std::string model_out;
  DataOptions data;
};

inline int cmd_train(const GlobalOptions& g, const TrainOptions& o, std::ostream& out) {
  const LoadedData d = load_data(o.data, g.seed);
  const bool is_scn = o.algo == "scn" || o.algo == "2dscn";
  const NodeKind kind = (o.algo == "2dscn" || o.algo == "2drvfl") ? NodeKind::two_d : NodeKind::one_d;
  const std::string base = o.algo + "-seed" + std::to_string(g.seed);

  std::optional<Network> net;
  if (is_scn) {
    TrainConfig cfg;
    cfg.max_nodes = o.max_nodes;
    cfg.tol = o.tol;
    cfg.max_trials = o.max_trials;
    cfg.lambdas = parse_list(o.lambdas);
    cfg.rs = parse_list(o.rs);
    cfg.seed = g.seed;
    auto result = train_scn(d.train.inputs, d.train.targets, cfg, kind, g.threads);
    std::ostringstream csv;
    csv << stamp("build-report", g.seed);
    result.report.write_csv(csv);
    const auto report_path = out_path(g, base + "-report.csv");
    write_text(report_path, csv.str());
    out << "report " << report_path.string() << "\n";
    out << "nodes " << result.network.hidden_count() << "\n";
    out << "terminated_by " << termination_name(result.report.terminated_by) << "\n";
    net = std::move(result.network);
  } else {
    net = train_rvfl(d.train.inputs, d.train.targets, o.max_nodes, o.lambda, kind, g.seed);
    out << "nodes " << net->hidden_count() << "\n";
  }

  const auto model_path = o.model_out.empty() ? out_path(g, base + ".model") : std::filesystem::path(o.model_out);
  save_network(*net, model_path.string());
  out << "model " << model_path.string() << "\n";
  out << "seed " << g.seed << "\n";
  report_split(out, "train", *net, d.train, {15, 25});
  if (d.test) report_split(out, "test", *net, *d.test, {15, 25});
  return 0;
}

// ------------------------------------------------------------------ eval

struct EvalOptions {
  std::string model;
  std::string thetas = "15,25";
  std::string errors_csv;
  bool on_test = false;
  DataOptions data;
};

inline int cmd_eval(const GlobalOptions& g, const EvalOptions& o, std::ostream& out) {
  const Network net = load_network(o.model);
  const LoadedData d = load_data(o.data, g.seed);
  const Dataset& ds = (o.on_test && d.test) ? *d.test : d.train;
  if (o.on_test && !d.test) throw Error("--on-test given but no held-out data is available");
  check_input(net, ds.inputs);
  if (net.output_count() != ds.targets.cols())
    throw ShapeError("model has " + std::to_string(net.output_count()) + " outputs, data has " +
                     std::to_string(ds.targets.cols()));
  const auto thetas = parse_list(o.thetas);
  out << "model " << o.model << "\n";
  out << "builder " << builder_name(net.provenance().builder) << "\n";
  report_split(out, o.on_test ? "test" : "train", net, ds, thetas);

  if (!o.errors_csv.empty()) {
    const Matrix pred = predict(net, ds.inputs);
    std::string csv = stamp("errors", g.seed);
    csv += "index";
    for (std::size_t q = 0; q < pred.cols(); ++q) csv += ",error" + std::to_string(q);
    csv += "\n";
    for (std::size_t i = 0; i < pred.rows(); ++i) {
      csv += std::to_string(i);
      for (std::size_t q = 0; q < pred.cols(); ++q) csv += "," + num(pred(i, q) - ds.targets(i, q));
      csv += "\n";
    }
    write_text(o.errors_csv, csv);
    out << "errors " << o.errors_csv << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------ stats

struct StatsOptions {
  std::size_t trials = 100000;
  std::string dist = "both";
  std::string taus = "0.001,0.005,0.01";
  std::string ps = "0.08,0.10,0.12,0.15";
  std::size_t d1 = 28;
  std::size_t d2 = 28;
  std::string format = "text";
  std::string csv_out;
};

inline std::string stats_csv(const std::vector<StatsGrid>& grids, std::uint64_t seed) {
  std::string s = stamp("stats", seed);
  s += "dist,p,tau,M3,M3_se,M2,M2_se,M1,M1_se,trials\n";
  for (const auto& g : grids)
    for (std::size_t pi = 0; pi < g.ps.size(); ++pi)
      for (std::size_t ti = 0; ti < g.taus.size(); ++ti) {
        s += dist_name(g.dist) + "," + num(g.ps[pi]) + "," + num(g.taus[ti]);
        for (auto m : {SamplingMethod::m3, SamplingMethod::m2, SamplingMethod::m1}) {
          const auto& e = g.at(m, pi, ti);
          s += "," + num(e.p_hat) + "," + num(e.std_error);
        }
        s += "," + std::to_string(g.trials) + "\n";
      }
  return s;
}

inline std::string stats_text(const std::vector<StatsGrid>& grids, std::uint64_t seed) {
  std::string s = stamp("stats", seed);
  char buf[128];
  for (const auto& g : grids) {
    s += "\n" + dist_name(g.dist) + "  (cells: M3/M2/M1, standard errors in brackets, " +
         std::to_string(g.trials) + " trials)\n";
    std::snprintf(buf, sizeof buf, "%-8s", "p \\ tau");
    s += buf;
    for (double tau : g.taus) {
      std::snprintf(buf, sizeof buf, " | %-44g", tau);
      s += buf;
    }
    s += "\n";
    for (std::size_t pi = 0; pi < g.ps.size(); ++pi) {
      std::snprintf(buf, sizeof buf, "%-8g", g.ps[pi] * 100.0);
      s += buf;
      for (std::size_t ti = 0; ti < g.taus.size(); ++ti) {
        const auto& a = g.at(SamplingMethod::m3, pi, ti);
        const auto& b = g.at(SamplingMethod::m2, pi, ti);
        const auto& c = g.at(SamplingMethod::m1, pi, ti);
        std::snprintf(buf, sizeof buf, " | %-.4g/%-.4g/%-.4g [%.1e/%.1e/%.1e]", a.p_hat, b.p_hat, c.p_hat,
                      a.std_error, b.std_error, c.std_error);
        std::string cell(buf);
        cell.resize(std::max<std::size_t>(cell.size(), 47), ' ');
        s += cell;
      }
      s += "\n";
    }
  }
  return s;
}

inline int cmd_stats(const GlobalOptions& g, const StatsOptions& o, std::ostream& out) {
  std::vector<WeightDist> dists;
  if (o.dist == "uniform" || o.dist == "both") dists.push_back(WeightDist::uniform_pm1);
  if (o.dist == "gaussian" || o.dist == "both") dists.push_back(WeightDist::standard_normal);
  const auto taus = parse_list(o.taus);
  const auto ps = parse_list(o.ps);
  std::vector<StatsGrid> grids;
  for (auto dist : dists) grids.push_back(estimate_grid(dist, o.d1, o.d2, ps, taus, o.trials, g.seed, g.threads));
  out << (o.format == "csv" ? stats_csv(grids, g.seed) : stats_text(grids, g.seed));
  if (!o.csv_out.empty()) write_text(o.csv_out, stats_csv(grids, g.seed));
  return 0;
}

// ------------------------------------------------------------------ indicator

struct IndicatorOptions {
  std::vector<std::string> models;
  std::string csv_out;
  DataOptions data;
};

inline std::string indicator_csv(const std::vector<std::string>& names, const std::vector<Network>& nets,
                                 const Inputs& x, std::uint64_t seed) {
  std::vector<double> raws;
  raws.reserve(nets.size());
  for (const auto& net : nets) raws.push_back(indicator_theta_raw(net, x));
  const auto theta = normalize_indicators(raws);
  std::string s = stamp("indicator", seed);
  s += "model,provenance,model_seed,raw,theta\n";
  for (std::size_t k = 0; k < nets.size(); ++k)
    s += names[k] + "," + builder_name(nets[k].provenance().builder) + "," +
         std::to_string(nets[k].provenance().seed) + "," + num(raws[k]) + "," + num(theta[k]) + "\n";
  return s;
}

inline int cmd_indicator(const GlobalOptions& g, const IndicatorOptions& o, std::ostream& out) {
  const LoadedData d = load_data(o.data, g.seed);
  std::vector<Network> nets;
  for (const auto& m : o.models) {
    nets.push_back(load_network(m));
    check_input(nets.back(), d.train.inputs);
  }
  const std::string csv = indicator_csv(o.models, nets, d.train.inputs, g.seed);
  out << csv;
  if (!o.csv_out.empty()) write_text(o.csv_out, csv);
  return 0;
}

// ------------------------------------------------------------------ synth

inline int cmd_synth(const GlobalOptions& g, const DataOptions& o, std::ostream& out) {
  const std::uint64_t seed = o.data_seed.value_or(g.seed);
  const auto task = synth_matrix_regression(o.n, o.d1, o.d2, o.k, o.noise, seed);
  const std::string comment = std::string("scn2d ") + kVersion + " synth seed=" + std::to_string(seed) +
                              " shape=" + std::to_string(o.d1) + "x" + std::to_string(o.d2);
  const auto train = out_path(g, "synth-train.csv");
  const auto test = out_path(g, "synth-test.csv");
  write_text(train, to_csv(task.train, comment + " split=train"));
  write_text(test, to_csv(task.test, comment + " split=test"));
  out << "train " << train.string() << "\n";
  out << "test " << test.string() << "\n";
  out << "shape " << o.d1 << "x" << o.d2 << "\n";
  out << "seed " << seed << "\n";
  return 0;
}

}  // namespace detail

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using namespace detail;
  CLI::App app{"Stochastic configuration networks with matrix inputs", "scn2d"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "master seed, echoed in every output")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for generated files")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  TrainOptions train;
  auto* tr = app.add_subcommand("train", "train a network and write the model file");
  tr->add_option("--algo", train.algo, "scn, 2dscn, rvfl or 2drvfl")
      ->required()
      ->check(CLI::IsMember({"scn", "2dscn", "rvfl", "2drvfl"}));
  tr->add_option("--max-nodes,-L", train.max_nodes, "L_max (SCN kinds) or L (RVFL kinds)")->capture_default_str();
  tr->add_option("--tol", train.tol, "stop when ||e||_F <= tol")->capture_default_str();
  tr->add_option("--tmax", train.max_trials, "candidates per (lambda, r) attempt")->capture_default_str();
  tr->add_option("--lambdas", train.lambdas, "ascending lambda grid")->capture_default_str();
  tr->add_option("--rs", train.rs, "ascending r grid in (0,1)")->capture_default_str();
  tr->add_option("--lambda", train.lambda, "RVFL weight range [-lambda, lambda]")->capture_default_str();
  tr->add_option("--model-out", train.model_out, "model path (default <out-dir>/<algo>-seed<seed>.model)");
  train.data.add_to(*tr);

  EvalOptions eval;
  auto* ev = app.add_subcommand("eval", "evaluate a model file on a dataset");
  ev->add_option("--model", eval.model, "model file")->required();
  ev->add_option("--theta", eval.thetas, "comma-separated PPA thresholds")->capture_default_str();
  ev->add_option("--errors-csv", eval.errors_csv, "write per-sample errors here");
  ev->add_flag("--on-test", eval.on_test, "evaluate on the held-out split");
  eval.data.add_to(*ev);

  StatsOptions stats;
  auto* st = app.add_subcommand("stats", "Monte Carlo near-zero weight study (M1/M2/M3)");
  st->add_option("--trials", stats.trials, "independent trials per cell")->capture_default_str();
  st->add_option("--dist", stats.dist, "uniform, gaussian or both")
      ->check(CLI::IsMember({"uniform", "gaussian", "both"}))
      ->capture_default_str();
  st->add_option("--taus", stats.taus, "comma-separated tau grid")->capture_default_str();
  st->add_option("--ps", stats.ps, "comma-separated p grid (fractions)")->capture_default_str();
  st->add_option("--d1", stats.d1, "rows of the weight matrix")->capture_default_str();
  st->add_option("--d2", stats.d2, "columns of the weight matrix")->capture_default_str();
  st->add_option("--format", stats.format, "text or csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
  st->add_option("--csv-out", stats.csv_out, "also write the CSV table here");

  IndicatorOptions ind;
  auto* in = app.add_subcommand("indicator", "generalization indicator for a set of models");
  in->add_option("--models", ind.models, "model files")->required();
  in->add_option("--csv-out", ind.csv_out, "also write the CSV here");
  ind.data.add_to(*in);

  DataOptions synth;
  auto* sy = app.add_subcommand("synth", "write the planted matrix-regression task as CSV");
  synth.add_to(*sy);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*tr) return cmd_train(g, train, out);
    if (*ev) return cmd_eval(g, eval, out);
    if (*st) return cmd_stats(g, stats, out);
    if (*in) return cmd_indicator(g, ind, out);
    if (*sy) return cmd_synth(g, synth, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace scn2d::cli
