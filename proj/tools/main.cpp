#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "noct/errors.hpp"

namespace {

std::uint64_t seed_from_env() {
  if (const char* text = std::getenv("NOETHER_SEED")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(text, &end, 0);
    if (end && *end == '\0') return value;
    std::cerr << "warning: ignoring malformed NOETHER_SEED '" << text << "'\n";
  }
  return noct::kDefaultSeed;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw noct::ValidationError("cannot write " + path);
  out << content;
}

void deliver(const noct::cli::CommandOutcome& outcome, const std::string& report_path,
             const std::string& csv_path) {
  std::cout << outcome.human;
  if (!report_path.empty()) write_file(report_path, outcome.report.dump(2) + "\n");
  if (!csv_path.empty() && !outcome.csv.empty()) write_file(csv_path, outcome.csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symmetries and conservation laws of nonconservative optimal-control problems"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // keep -h free for the step-size flag
  const std::uint64_t seed = seed_from_env();

  std::string file;
  std::string report_path;
  std::string csv_path = "trajectory.csv";

  auto* check = app.add_subcommand("check", "verify the declared symmetries");
  check->set_help_flag("--help", "print help");
  noct::cli::CheckOptions check_options;
  check_options.seed = seed;
  check->add_option("file", file, "problem file (JSON)")->required();
  check->add_option("--tol", check_options.tol, "invariance tolerance");
  check->add_option("--report", report_path, "write the JSON run report here");

  auto* find = app.add_subcommand("find", "search for symmetries by polynomial ansatz");
  find->set_help_flag("--help", "print help");
  noct::cli::FindOptions find_options;
  find_options.seed = seed;
  find->add_option("file", file, "problem file (JSON)")->required();
  find->add_option("--degree", find_options.degree, "ansatz polynomial degree")
      ->check(CLI::Range(0, 4));
  find->add_flag("--gauge", find_options.gauge, "allow a nonzero gauge term");
  find->add_option("--tol", find_options.tol, "invariance tolerance");
  find->add_option("--emit", find_options.emit_path,
                   "write an augmented problem file with the discovered symmetries");
  find->add_option("--report", report_path, "write the JSON run report here");

  auto* integrate = app.add_subcommand("integrate", "integrate the nonconservative extremal");
  integrate->set_help_flag("--help", "print help");
  noct::cli::IntegrateOptions integrate_options;
  integrate_options.seed = seed;
  double h_flag = 0.0;
  long steps_flag = 0;
  integrate->add_option("file", file, "problem file (JSON)")->required();
  auto* h_opt = integrate->add_option("--h", h_flag, "step size");
  auto* steps_opt = integrate->add_option("--steps", steps_flag, "number of steps");
  integrate->add_option("--out", csv_path, "trajectory CSV path (default trajectory.csv)");
  integrate->add_option("--report", report_path, "write the JSON run report here");

  auto* verify = app.add_subcommand("verify", "check, integrate, and validate conservation");
  verify->set_help_flag("--help", "print help");
  noct::cli::VerifyOptions verify_options;
  verify_options.seed = seed;
  double vh = 0.0, vh2 = 0.0;
  verify->add_option("file", file, "problem file (JSON)")->required();
  auto* vh_opt = verify->add_option("--h", vh, "step size");
  auto* vh2_opt = verify->add_option("--h2", vh2, "second step size for the order study");
  verify->add_option("--drift-tol", verify_options.drift_tol, "relative drift tolerance");
  verify->add_option("--tol", verify_options.tol, "invariance tolerance");
  verify->add_option("--out", report_path, "write the JSON run report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;  // malformed flags are invalid input; --help stays 0
  }

  try {
    noct::cli::CommandOutcome outcome;
    if (*check) {
      outcome = noct::cli::cmd_check(file, check_options);
      deliver(outcome, report_path, "");
    } else if (*find) {
      outcome = noct::cli::cmd_find(file, find_options);
      deliver(outcome, report_path, "");
    } else if (*integrate) {
      if (*h_opt) integrate_options.h = h_flag;
      if (*steps_opt) integrate_options.steps = steps_flag;
      outcome = noct::cli::cmd_integrate(file, integrate_options);
      deliver(outcome, report_path, csv_path);
    } else {
      if (*vh_opt) verify_options.h = vh;
      if (*vh2_opt) verify_options.h2 = vh2;
      outcome = noct::cli::cmd_verify(file, verify_options);
      deliver(outcome, report_path, "");
      if (report_path.empty()) std::cout << outcome.report.dump(2) << "\n";
    }
    return outcome.exit_code;
  } catch (const noct::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const noct::ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const noct::AnsatzTooLargeError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const noct::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
