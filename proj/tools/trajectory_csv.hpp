#pragma once

#include <string>
#include <vector>

#include "noct/conservation.hpp"
#include "noct/dynamics.hpp"

namespace noct::cli {

/// Serializes a trajectory as CSV: header
///   t,q1..qn,u1..um,p1..pn,f_1..f_K,C_1..C_K
/// one row per node, 17 significant digits, '\n' line endings. The C columns
/// come from the conservation reports (one per f column, same order).
std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<ConservationReport>& constants);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& text);

}  // namespace noct::cli
