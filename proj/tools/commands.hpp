#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "noct/zero_test.hpp"

namespace noct::cli {

/// Result of one CLI command: process exit code (0 pass, 1 failed
/// verification/computation, 2 invalid input), the JSON run report, a human
/// summary, and — for integrate — the trajectory CSV.
struct CommandOutcome {
  int exit_code = 0;
  nlohmann::ordered_json report;
  std::string human;
  std::string csv;
};

struct CheckOptions {
  double tol = 1e-9;
  std::uint64_t seed = kDefaultSeed;
};

struct FindOptions {
  int degree = 1;
  bool gauge = false;
  double tol = 1e-9;
  std::uint64_t seed = kDefaultSeed;
  std::string emit_path;  // write an augmented problem file when non-empty
};

struct IntegrateOptions {
  std::optional<double> h;
  std::optional<long> steps;  // h = (b - a) / steps
  std::uint64_t seed = kDefaultSeed;
};

struct VerifyOptions {
  std::optional<double> h;
  std::optional<double> h2;  // convergence-order study when given
  double drift_tol = 1e-6;
  double tol = 1e-9;
  double order_min = 3.5;
  std::uint64_t seed = kDefaultSeed;
};

CommandOutcome cmd_check(const std::string& path, const CheckOptions& options = {});
CommandOutcome cmd_find(const std::string& path, const FindOptions& options = {});
CommandOutcome cmd_integrate(const std::string& path, const IntegrateOptions& options = {});
CommandOutcome cmd_verify(const std::string& path, const VerifyOptions& options = {});

}  // namespace noct::cli
