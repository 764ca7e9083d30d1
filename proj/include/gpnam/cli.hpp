#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpnam/common.hpp"
#include "gpnam/error.hpp"
#include "gpnam/rff.hpp"

namespace gpnam::cli {

/// Process exit codes. Stable; documented in the README.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kNotConverged = 3,
  kNumeric = 4,
};

int exit_code_for(ErrorKind kind);

struct RunConfig {
  std::string command;
  std::string data_path;
  std::string target;
  Task task = Task::regression;
  std::size_t sample_size = 100;
  BasisMode mode = BasisMode::grid;
  std::uint64_t seed = 0;
  std::optional<double> bandwidth_scale = 1.0;  // nullopt means `auto`
  double lambda = 1.0;
  double cg_tol = 1e-8;
  std::size_t cg_max_iter = 0;
  double sgd_lr = 0.1;
  std::size_t sgd_batch = 256;
  std::size_t sgd_epochs = 100;
  double sgd_lr_decay = 0.99;
  double sgd_tol = 1e-3;
  bool regularize_bias = false;
  std::size_t threads = 1;
  std::array<double, 3> split = {0.8, 0.1, 0.1};
  std::string model_path;
  std::string output_path;
  std::size_t grid_points = 256;
  std::size_t bins = 32;
  std::vector<std::pair<std::size_t, std::size_t>> interactions;
  std::size_t synth_n = 1000;
  std::size_t synth_d = 3;
  double synth_noise = 0.1;
  bool verbose = false;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);

/// Parses `gpnam <command> [flags]` (args excludes the program name). Values
/// from --config JSON are applied first and explicit flags override them.
/// Throws Error(configuration) on inconsistent or invalid settings.
RunConfig parse_run_config(const std::vector<std::string>& args);

/// Full entry point: parse, dispatch, map errors to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_predict(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_shapes(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_kernel_check(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Kernel diagnostics document written by `kernel-check`.
nlohmann::ordered_json kernel_check_report(BasisMode mode, std::uint64_t seed);

}  // namespace gpnam::cli
