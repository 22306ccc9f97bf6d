#include "trajectory_csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "noct/errors.hpp"

namespace noct::cli {

std::string trajectory_csv(const Trajectory& traj,
                           const std::vector<ConservationReport>& constants) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  const std::size_t m = traj.controls.empty() ? 0 : traj.controls.front().size();
  const std::size_t K = traj.f_columns();
  if (constants.size() != K)
    throw ValidationError("need one conservation report per f column");

  std::string out;
  out += "t";
  for (std::size_t i = 1; i <= n; ++i) out += ",q" + std::to_string(i);
  for (std::size_t j = 1; j <= m; ++j) out += ",u" + std::to_string(j);
  for (std::size_t i = 1; i <= n; ++i) out += ",p" + std::to_string(i);
  for (std::size_t k = 1; k <= K; ++k) out += ",f_" + std::to_string(k);
  for (std::size_t k = 1; k <= K; ++k) out += ",C_" + std::to_string(k);
  out += "\n";

  char buf[40];
  auto put = [&](double v, bool lead_comma) {
    if (lead_comma) out += ',';
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
  };
  for (std::size_t row = 0; row < traj.size(); ++row) {
    put(traj.times[row], false);
    for (std::size_t i = 0; i < n; ++i) put(traj.states[row][i], true);
    for (std::size_t j = 0; j < m; ++j) put(traj.controls[row][j], true);
    for (std::size_t i = 0; i < n; ++i) put(traj.costates[row][i], true);
    for (std::size_t k = 0; k < K; ++k) put(traj.f[row][k], true);
    for (std::size_t k = 0; k < K; ++k) put(constants[k].series[row], true);
    out += "\n";
  }
  return out;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& cell : cells) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != table.header.size())
      throw ValidationError("CSV row width does not match the header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace noct::cli
