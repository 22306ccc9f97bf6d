#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "noct/dynamics.hpp"
#include "noct/problem.hpp"

namespace noct::cli {

/// One problem description as stored on disk. Expressions are strings in the
/// expression grammar; cv2 forces may use the reserved `qdddot` token.
struct ProblemFile {
  std::string name;
  std::string description;
  std::string order;  // "ocp" | "cv1" | "cv2"
  int n = 0;
  int m = 0;
  std::string lagrangian;
  std::vector<std::string> dynamics;  // ocp only
  std::vector<std::string> force;
  std::array<double, 2> interval{0.0, 1.0};

  std::optional<std::vector<double>> initial_q;  // ocp / cv1
  std::optional<std::vector<double>> initial_p;
  std::optional<SecondOrderInitial> initial_second_order;  // cv2

  std::optional<std::vector<std::string>> control_law;

  struct SymmetryDecl {
    std::string tau = "0";
    std::vector<std::string> xi;
    std::vector<std::string> sigma;
    std::vector<std::string> alpha;
    std::string gauge = "0";
  };
  std::vector<SymmetryDecl> symmetries;

  double h = 1e-3;
  double newton_tol = 1e-12;

  nlohmann::ordered_json raw;  // original document, kept for --emit
};

ProblemFile load_problem_file(const std::string& path);

/// Compiled form: the optimal-control problem (lifted when cv1/cv2), parsed
/// generators and the integrator configuration.
struct LoadedProblem {
  ProblemFile file;
  OCProblem problem;
  std::optional<LiftedProblem> lifted;
  std::vector<Generators> symmetries;
  IntegratorConfig config;

  bool second_order() const { return lifted && lifted->order == CvOrder::Second; }
};

LoadedProblem instantiate(const ProblemFile& file);
LoadedProblem load_problem(const std::string& path);

/// Serializes a generator set back to expression strings.
ProblemFile::SymmetryDecl to_decl(const Generators& gen);

}  // namespace noct::cli
