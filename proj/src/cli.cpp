#include "gpnam/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gpnam/data.hpp"
#include "gpnam/io.hpp"
#include "gpnam/metrics.hpp"
#include "gpnam/model.hpp"
#include "gpnam/pipeline.hpp"
#include "gpnam/rng.hpp"

namespace gpnam::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kCommands[] = {"train", "predict", "evaluate", "shapes", "kernel-check",
                                     "synth"};

// Long flags taking a value. Keys of the --config JSON use the same names.
constexpr const char* kValueFlags[] = {
    "data",   "target",      "task",         "S",         "mode",        "seed",
    "bandwidth-scale", "lambda", "split",    "model",     "out",         "grid-points",
    "interactions",    "cg-tol", "cg-max-iter", "sgd-lr", "sgd-batch",   "sgd-epochs",
    "sgd-decay",       "sgd-tol", "threads", "bins",      "n",           "d",
    "noise",
};

[[noreturn]] void usage(const std::string& message) { fail(ErrorKind::configuration, message); }

double to_real(const std::string& key, const std::string& text) {
  const auto value = parse_real(text);
  if (!value) usage("--" + key + ": expected a number, got '" + text + "'");
  return *value;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  const std::string_view trimmed = text;
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
  if (ec != std::errc() || ptr != trimmed.data() + trimmed.size()) {
    usage("--" + key + ": expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, sep)) parts.push_back(part);
  return parts;
}

std::string json_scalar_text(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_array()) {
    std::string joined;
    for (const auto& item : value) {
      if (!joined.empty()) joined += ',';
      joined += json_scalar_text(item);
    }
    return joined;
  }
  return value.dump();
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "data") cfg.data_path = value;
  else if (key == "target") cfg.target = value;
  else if (key == "task") {
    if (value != "reg" && value != "clf" && value != "regression" &&
        value != "binary_classification" && value != "classification") {
      usage("--task must be reg or clf");
    }
    cfg.task = parse_task(value);
  } else if (key == "S") cfg.sample_size = to_unsigned(key, value);
  else if (key == "mode") {
    if (value != "mc" && value != "grid" && value != "monte_carlo") usage("--mode must be mc or grid");
    cfg.mode = parse_basis_mode(value);
  } else if (key == "seed") cfg.seed = to_unsigned(key, value);
  else if (key == "bandwidth-scale") {
    if (value == "auto") {
      cfg.bandwidth_scale.reset();
    } else {
      cfg.bandwidth_scale = to_real(key, value);
    }
  } else if (key == "lambda") cfg.lambda = to_real(key, value);
  else if (key == "split") {
    const auto parts = split_list(value, ',');
    if (parts.size() != 3) usage("--split expects three fractions A,B,C");
    for (std::size_t k = 0; k < 3; ++k) cfg.split[k] = to_real(key, parts[k]);
  } else if (key == "model") cfg.model_path = value;
  else if (key == "out") cfg.output_path = value;
  else if (key == "grid-points") cfg.grid_points = to_unsigned(key, value);
  else if (key == "interactions") {
    cfg.interactions.clear();
    for (const auto& item : split_list(value, ',')) {
      if (item.empty()) continue;
      const auto ends = split_list(item, ':');
      if (ends.size() != 2) usage("--interactions expects i:j pairs");
      auto i = to_unsigned(key, ends[0]);
      auto j = to_unsigned(key, ends[1]);
      if (i == j) usage("--interactions: a pair needs two distinct features");
      if (i > j) std::swap(i, j);
      cfg.interactions.emplace_back(i, j);
    }
  } else if (key == "cg-tol") cfg.cg_tol = to_real(key, value);
  else if (key == "cg-max-iter") cfg.cg_max_iter = to_unsigned(key, value);
  else if (key == "sgd-lr") cfg.sgd_lr = to_real(key, value);
  else if (key == "sgd-batch") cfg.sgd_batch = to_unsigned(key, value);
  else if (key == "sgd-epochs") cfg.sgd_epochs = to_unsigned(key, value);
  else if (key == "sgd-decay") cfg.sgd_lr_decay = to_real(key, value);
  else if (key == "sgd-tol") cfg.sgd_tol = to_real(key, value);
  else if (key == "threads") cfg.threads = to_unsigned(key, value);
  else if (key == "bins") cfg.bins = to_unsigned(key, value);
  else if (key == "n") cfg.synth_n = to_unsigned(key, value);
  else if (key == "d") cfg.synth_d = to_unsigned(key, value);
  else if (key == "noise") cfg.synth_noise = to_real(key, value);
  else if (key == "regularize-bias") {
    cfg.regularize_bias = value == "true" || value == "1";
  } else if (key == "verbose") {
    cfg.verbose = value == "true" || value == "1";
  } else {
    usage("unknown setting '" + key + "'");
  }
}

void validate(const RunConfig& cfg) {
  const std::string& c = cfg.command;
  const bool needs_data = c == "train" || c == "predict" || c == "evaluate";
  if (needs_data && cfg.data_path.empty()) usage(c + " requires --data");
  if (c == "train" && cfg.target.empty()) usage("train requires --target");
  if ((c == "train" || c == "predict" || c == "evaluate" || c == "shapes") &&
      cfg.model_path.empty()) {
    usage(c + " requires --model");
  }
  if (c == "shapes" && cfg.output_path.empty()) usage("shapes requires --out");
  if (cfg.sample_size == 0) usage("--S must be >= 1");
  if (cfg.bandwidth_scale && !(*cfg.bandwidth_scale > 0.0)) {
    usage("--bandwidth-scale must be > 0 or auto");
  }
  if (!(cfg.lambda >= 0.0)) usage("--lambda must be >= 0");
  if (!(cfg.sgd_lr > 0.0)) usage("--sgd-lr must be > 0");
  if (cfg.sgd_batch == 0) usage("--sgd-batch must be >= 1");
  if (!(cfg.cg_tol > 0.0)) usage("--cg-tol must be > 0");
  if (!(cfg.sgd_tol >= 0.0)) usage("--sgd-tol must be >= 0");
  if (!(cfg.sgd_lr_decay > 0.0)) usage("--sgd-decay must be > 0");
  if (cfg.grid_points < 2) usage("--grid-points must be >= 2");
  if (cfg.bins == 0) usage("--bins must be >= 1");
  double total = 0.0;
  for (double f : cfg.split) {
    if (!(f > 0.0)) usage("--split fractions must be positive");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) usage("--split fractions must sum to 1");
  if (c == "synth" && (cfg.synth_n == 0 || cfg.synth_d == 0)) usage("synth needs --n, --d >= 1");
  if (c == "synth" && !(cfg.synth_noise >= 0.0)) usage("--noise must be >= 0");
}

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.output_path.empty()) {
    out << content;
  } else {
    write_file_atomic(cfg.output_path, content);
  }
}

void report_ingestion(const RunConfig& cfg, const IngestReport& report, std::ostream& err) {
  if (cfg.verbose) err << to_json(report).dump() << '\n';
}

std::string format_full(double value) { return format_real(value, 17); }

// Targets of an evaluation file, decoded with the model's label mapping.
std::vector<double> targets_for_model(const CsvTable& table, const GPNAMModel& model,
                                      const std::string& target) {
  const auto it = std::find(table.header.begin(), table.header.end(), target);
  if (it == table.header.end()) {
    fail(ErrorKind::missing_target, "target column '" + target + "' not found");
  }
  const auto col = static_cast<std::size_t>(it - table.header.begin());
  std::vector<double> y;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& cell = table.rows[r].at(col);
    if (model.task == Task::regression) {
      const auto value = parse_real(cell);
      if (!value) fail(ErrorKind::malformed_file, "row " + std::to_string(r + 1) + ": bad target");
      y.push_back(*value);
      continue;
    }
    if (model.class_labels.size() != 2) {
      fail(ErrorKind::malformed_file, "model has no class labels");
    }
    const auto matches = [&](const std::string& label) {
      if (cell == label) return true;
      const auto a = parse_real(cell);
      const auto b = parse_real(label);
      return a && b && *a == *b;
    };
    if (matches(model.class_labels[1])) {
      y.push_back(1.0);
    } else if (matches(model.class_labels[0])) {
      y.push_back(0.0);
    } else {
      fail(ErrorKind::malformed_file, "row " + std::to_string(r + 1) + ": unknown class '" + cell + "'");
    }
  }
  return y;
}

std::filesystem::path density_path(const std::filesystem::path& shapes_path) {
  std::filesystem::path out = shapes_path;
  const std::string ext = shapes_path.has_extension() ? shapes_path.extension().string() : ".csv";
  out.replace_filename(shapes_path.stem().string() + "_density" + ext);
  return out;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::configuration:
    case ErrorKind::precondition:
      return kUsage;
    case ErrorKind::numeric_breakdown:
      return kNumeric;
    default:
      return kData;
  }
}

ordered_json to_json(const RunConfig& cfg) {
  ordered_json pairs = ordered_json::array();
  for (const auto& [i, j] : cfg.interactions) pairs.push_back({i, j});
  ordered_json doc;
  doc["command"] = cfg.command;
  doc["data"] = cfg.data_path;
  doc["target"] = cfg.target;
  doc["task"] = to_string(cfg.task);
  doc["S"] = cfg.sample_size;
  doc["mode"] = to_string(cfg.mode);
  doc["seed"] = cfg.seed;
  if (cfg.bandwidth_scale) {
    doc["bandwidth_scale"] = *cfg.bandwidth_scale;
  } else {
    doc["bandwidth_scale"] = "auto";
  }
  doc["lambda"] = cfg.lambda;
  doc["cg_tol"] = cfg.cg_tol;
  doc["cg_max_iter"] = cfg.cg_max_iter;
  doc["sgd_lr"] = cfg.sgd_lr;
  doc["sgd_batch"] = cfg.sgd_batch;
  doc["sgd_epochs"] = cfg.sgd_epochs;
  doc["sgd_decay"] = cfg.sgd_lr_decay;
  doc["sgd_tol"] = cfg.sgd_tol;
  doc["regularize_bias"] = cfg.regularize_bias;
  doc["split"] = cfg.split;
  doc["model"] = cfg.model_path;
  doc["out"] = cfg.output_path;
  doc["grid_points"] = cfg.grid_points;
  doc["bins"] = cfg.bins;
  doc["interactions"] = std::move(pairs);
  if (cfg.command == "synth") {
    doc["n"] = cfg.synth_n;
    doc["d"] = cfg.synth_d;
    doc["noise"] = cfg.synth_noise;
  }
  return doc;
}

RunConfig parse_run_config(const std::vector<std::string>& args) {
  CLI::App app{"gpnam: additive Gaussian process models with random Fourier features", "gpnam"};
  app.require_subcommand(1);
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  bool verbose = false;
  bool regularize_bias = false;
  std::vector<CLI::App*> subcommands;
  for (const char* name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    for (const char* flag : kValueFlags) {
      options[std::string(name) + "/" + flag] =
          sub->add_option(std::string("--") + flag, values[flag]);
    }
    sub->add_option("--config", config_path, "JSON file with default settings");
    sub->add_flag("--verbose", verbose);
    sub->add_flag("--regularize-bias", regularize_bias);
    subcommands.push_back(sub);
  }

  std::vector<std::string> argv_storage{"gpnam"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& arg : argv_storage) argv.push_back(arg.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    usage(e.what());
  }

  RunConfig cfg;
  for (CLI::App* sub : subcommands) {
    if (sub->parsed()) cfg.command = sub->get_name();
  }

  if (!config_path.empty()) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::parse_error& e) {
      usage(std::string("--config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) usage("--config: expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
      std::string name = key;
      std::replace(name.begin(), name.end(), '_', '-');
      if (name == "bandwidth-scale" || name == "S" ||
          std::find(std::begin(kValueFlags), std::end(kValueFlags), name) != std::end(kValueFlags) ||
          name == "verbose" || name == "regularize-bias") {
        apply_setting(cfg, name, json_scalar_text(value));
      } else {
        usage("--config: unknown key '" + key + "'");
      }
    }
  }
  for (const char* flag : kValueFlags) {
    if (options.at(cfg.command + "/" + flag)->count() > 0) apply_setting(cfg, flag, values[flag]);
  }
  if (verbose) cfg.verbose = true;
  if (regularize_bias) cfg.regularize_bias = true;
  validate(cfg);
  return cfg;
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  IngestReport ingest;
  const Dataset data = load_csv(cfg.data_path, cfg.target, cfg.task, &ingest);
  report_ingestion(cfg, ingest, err);
  const DataSplit parts = split(data, cfg.split, cfg.seed);

  TrainOptions options;
  options.sample_size = cfg.sample_size;
  options.mode = cfg.mode;
  options.seed = cfg.seed;
  options.bandwidth_scale = cfg.bandwidth_scale;
  options.interactions = cfg.interactions;
  options.fit.lambda = cfg.lambda;
  options.fit.cg_tol = cfg.cg_tol;
  options.fit.cg_max_iter = cfg.cg_max_iter;
  options.fit.sgd_lr = cfg.sgd_lr;
  options.fit.sgd_batch = cfg.sgd_batch;
  options.fit.sgd_epochs = cfg.sgd_epochs;
  options.fit.sgd_lr_decay = cfg.sgd_lr_decay;
  options.fit.sgd_tol = cfg.sgd_tol;
  options.fit.sgd_seed = cfg.seed;
  options.fit.regularize_bias = cfg.regularize_bias;
  options.fit.threads = cfg.threads;

  TrainOutcome outcome = train_gpnam(parts.train, &parts.validation, options);
  outcome.model.config = to_json(cfg);
  save_model(outcome.model, cfg.model_path);

  ordered_json metrics = ordered_json::array();
  for (const auto& [name, part] : {std::pair{"validation", &parts.validation},
                                   std::pair{"test", &parts.test}}) {
    for (const auto& result : evaluate_model(outcome.model, *part)) {
      metrics.push_back(to_json(result, name, cfg.model_path));
    }
  }
  ordered_json trials = ordered_json::array();
  for (const auto& trial : outcome.trials) {
    trials.push_back({{"scale", trial.scale}, {"validation_metric", trial.validation_metric}});
  }
  ordered_json doc;
  doc["command"] = "train";
  doc["config"] = to_json(cfg);
  doc["rows"] = {{"train", parts.train.n()},
                 {"validation", parts.validation.n()},
                 {"test", parts.test.n()}};
  doc["bandwidth_scale"] = outcome.model.bandwidth_scale;
  doc["bandwidth_search"] = std::move(trials);
  doc["param_count"] = param_count(outcome.model);
  doc["metrics"] = std::move(metrics);
  doc["solver"] = to_json(outcome.report);
  emit(cfg, doc.dump(2) + "\n", out);

  if (outcome.validation) {
    err << "validation " << to_string(outcome.validation->metric) << " = "
        << format_real(outcome.validation->value, 6) << " (n=" << outcome.validation->n << ")\n";
  }
  if (!outcome.report.converged) {
    err << "warning: solver did not converge; model saved and flagged\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const GPNAMModel model = load_model(cfg.model_path);
  const CsvTable table = read_csv(cfg.data_path);
  const Matrix X = features_from_table(table, model.feature_names, model.encodings);
  if (cfg.verbose && model.feature_ranges.size() == model.num_features()) {
    std::size_t outside = 0;
    for (std::size_t r = 0; r < X.rows(); ++r) {
      for (std::size_t i = 0; i < X.cols(); ++i) {
        if (X(r, i) < model.feature_ranges[i].min || X(r, i) > model.feature_ranges[i].max) {
          ++outside;
        }
      }
    }
    if (outside > 0) {
      err << "note: " << outside << " input values lie outside the training range (extrapolation)\n";
    }
  }
  const std::vector<double> pred = predict(model, X);
  std::string content = "row_id,prediction\n";
  for (std::size_t r = 0; r < pred.size(); ++r) {
    content += std::to_string(r) + "," + format_full(pred[r]) + "\n";
  }
  emit(cfg, content, out);
  return kOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  const GPNAMModel model = load_model(cfg.model_path);
  const CsvTable table = read_csv(cfg.data_path);
  const std::string target = cfg.target.empty() ? model.target : cfg.target;
  Dataset data;
  data.task = model.task;
  data.X = features_from_table(table, model.feature_names, model.encodings);
  data.y = targets_for_model(table, model, target);
  ordered_json metrics = ordered_json::array();
  for (const auto& result : evaluate_model(model, data)) {
    metrics.push_back(to_json(result, cfg.data_path, cfg.model_path));
  }
  ordered_json doc;
  doc["command"] = "evaluate";
  doc["config"] = to_json(cfg);
  doc["metrics"] = std::move(metrics);
  emit(cfg, doc.dump(2) + "\n", out);
  return kOk;
}

int cmd_shapes(const RunConfig& cfg, std::ostream& /*out*/, std::ostream& err) {
  const GPNAMModel model = load_model(cfg.model_path);
  std::vector<ShapeTable> tables;
  for (std::size_t i = 0; i < model.num_features(); ++i) {
    tables.push_back(shape_function(model, i, default_shape_grid(model, i, cfg.grid_points)));
  }
  std::ostringstream shapes;
  write_shape_csv(shapes, tables);

  std::string density;
  if (!cfg.data_path.empty()) {
    const CsvTable table = read_csv(cfg.data_path);
    const Matrix X = features_from_table(table, model.feature_names, model.encodings);
    density = "feature,bin_left,bin_right,count\n";
    for (std::size_t i = 0; i < model.num_features(); ++i) {
      const auto [lo, hi] = model.feature_ranges[i];
      const double width = (hi - lo) / static_cast<double>(cfg.bins);
      std::vector<std::size_t> counts(cfg.bins, 0);
      for (std::size_t r = 0; r < X.rows(); ++r) {
        const double x = X(r, i);
        if (x < lo || x > hi) continue;
        auto bin = width > 0.0 ? static_cast<std::size_t>((x - lo) / width) : 0;
        counts[std::min(bin, cfg.bins - 1)] += 1;
      }
      for (std::size_t k = 0; k < cfg.bins; ++k) {
        const double left = lo + width * static_cast<double>(k);
        const double right = k + 1 == cfg.bins ? hi : lo + width * static_cast<double>(k + 1);
        density += model.feature_names[i] + "," + format_real(left, 9) + "," +
                   format_real(right, 9) + "," + std::to_string(counts[k]) + "\n";
      }
    }
  }
  write_file_atomic(cfg.output_path, shapes.str());
  if (!density.empty()) {
    const auto path = density_path(cfg.output_path);
    write_file_atomic(path, density);
    if (cfg.verbose) err << "density written to " << path.string() << '\n';
  }
  return kOk;
}

ordered_json kernel_check_report(BasisMode mode, std::uint64_t seed) {
  constexpr double kWidth = 1.0;
  constexpr std::size_t kProbes = 200;
  constexpr std::uint64_t kProbeSeed = 20240229;
  Rng probe_rng(kProbeSeed);
  std::vector<std::pair<double, double>> probes;
  for (std::size_t k = 0; k < kProbes; ++k) {
    const double x = probe_rng.uniform(-3.0, 3.0);
    probes.emplace_back(x, probe_rng.uniform(-3.0, 3.0));
  }

  ordered_json approximation = ordered_json::array();
  for (std::size_t S : {50u, 100u, 500u, 2000u}) {
    const FeatureBasis basis = build_basis(S, mode, seed);
    std::vector<double> errors;
    double diagonal = 0.0;
    for (const auto& [x, x_prime] : probes) {
      errors.push_back(
          std::abs(approx_kernel(basis, x, x_prime, kWidth) - rbf_kernel(x, x_prime, kWidth)));
      diagonal = std::max(diagonal, std::abs(approx_kernel(basis, x, x, kWidth) - 1.0));
    }
    std::sort(errors.begin(), errors.end());
    const double median = 0.5 * (errors[(kProbes - 1) / 2] + errors[kProbes / 2]);
    approximation.push_back({{"S", S},
                             {"max_abs_error", errors.back()},
                             {"median_abs_error", median},
                             {"diagonal_max_abs_error", diagonal}});
  }

  ordered_json identity = ordered_json::array();
  constexpr std::size_t kSamples = 1000000;
  for (const auto& [x, x_prime] : {std::pair{0.0, 0.0}, std::pair{0.0, 1.0}, std::pair{0.0, 2.0},
                                   std::pair{1.5, -0.5}}) {
    const double estimate = mc_verify_integral_identity(kWidth, x, x_prime, kSamples, seed);
    const double exact = rbf_kernel(x, x_prime, kWidth);
    identity.push_back({{"x", x},
                        {"x_prime", x_prime},
                        {"n_samples", kSamples},
                        {"estimate", estimate},
                        {"exact", exact},
                        {"abs_error", std::abs(estimate - exact)}});
  }

  ordered_json doc;
  doc["command"] = "kernel-check";
  doc["mode"] = to_string(mode);
  doc["seed"] = seed;
  doc["bandwidth"] = kWidth;
  doc["probe_count"] = kProbes;
  doc["approximation"] = std::move(approximation);
  doc["integral_identity"] = std::move(identity);
  return doc;
}

int cmd_kernel_check(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  ordered_json doc = kernel_check_report(cfg.mode, cfg.seed);
  doc["config"] = to_json(cfg);
  emit(cfg, doc.dump(2) + "\n", out);
  return kOk;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  const Dataset data = synth_additive(cfg.synth_n, cfg.synth_d, cfg.synth_noise, cfg.seed);
  std::ostringstream csv;
  write_dataset_csv(csv, data);
  emit(cfg, csv.str(), out);
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (!args.empty() && (args[0] == "--help" || args[0] == "-h")) {
    out << "usage: gpnam <train|predict|evaluate|shapes|kernel-check|synth> [--data PATH] "
           "[--target NAME] [--task reg|clf] [--S INT] [--mode mc|grid] [--seed INT] "
           "[--bandwidth-scale FLOAT|auto] [--lambda FLOAT] [--split A,B,C] [--model PATH] "
           "[--out PATH] [--grid-points INT] [--interactions i:j,...] [--config PATH] "
           "[--verbose]\n";
    return kOk;
  }
  try {
    const RunConfig cfg = parse_run_config(args);
    if (cfg.command == "train") return cmd_train(cfg, out, err);
    if (cfg.command == "predict") return cmd_predict(cfg, out, err);
    if (cfg.command == "evaluate") return cmd_evaluate(cfg, out, err);
    if (cfg.command == "shapes") return cmd_shapes(cfg, out, err);
    if (cfg.command == "kernel-check") return cmd_kernel_check(cfg, out, err);
    if (cfg.command == "synth") return cmd_synth(cfg, out, err);
    err << "error: unknown command\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
}

}  // namespace gpnam::cli
