#include "problem_file.hpp"

#include <fstream>

#include "noct/errors.hpp"
#include "noct/parse.hpp"

namespace noct::cli {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ValidationError(path + ": " + message);
}

std::vector<std::string> string_list(const ordered_json& j) {
  std::vector<std::string> out;
  for (const auto& item : j) out.push_back(item.get<std::string>());
  return out;
}

std::vector<double> number_list(const ordered_json& j) {
  std::vector<double> out;
  for (const auto& item : j) out.push_back(item.get<double>());
  return out;
}

}  // namespace

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open problem file: " + path);
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& err) {
    fail(path, std::string("invalid JSON: ") + err.what());
  } catch (const std::exception& err) {
    // e.g. ios failure when the path is a directory
    fail(path, std::string("cannot read: ") + err.what());
  }

  ProblemFile file;
  file.raw = doc;
  try {
    file.name = doc.value("name", std::string("unnamed"));
    file.description = doc.value("description", std::string());
    file.order = doc.at("order").get<std::string>();
    file.n = doc.at("n").get<int>();
    file.m = doc.at("m").get<int>();
    file.lagrangian = doc.at("lagrangian").get<std::string>();
    if (doc.contains("dynamics")) file.dynamics = string_list(doc.at("dynamics"));
    file.force = string_list(doc.at("force"));
    const auto interval = number_list(doc.at("interval"));
    if (interval.size() != 2) fail(path, "interval must have two entries");
    file.interval = {interval[0], interval[1]};

    if (doc.contains("initial")) {
      const ordered_json& init = doc.at("initial");
      if (file.order == "cv2") {
        SecondOrderInitial s;
        s.q = init.at("q").get<double>();
        s.qdot = init.at("qdot").get<double>();
        s.qddot = init.at("qddot").get<double>();
        s.qdddot = init.at("qdddot").get<double>();
        file.initial_second_order = s;
      } else {
        file.initial_q = number_list(init.at("q"));
        file.initial_p = number_list(init.at("p"));
      }
    }

    if (doc.contains("control_law")) file.control_law = string_list(doc.at("control_law"));

    if (doc.contains("symmetries")) {
      for (const ordered_json& s : doc.at("symmetries")) {
        ProblemFile::SymmetryDecl decl;
        decl.tau = s.value("tau", std::string("0"));
        if (s.contains("xi")) decl.xi = string_list(s.at("xi"));
        if (s.contains("sigma")) decl.sigma = string_list(s.at("sigma"));
        if (s.contains("alpha")) decl.alpha = string_list(s.at("alpha"));
        decl.gauge = s.value("gauge", std::string("0"));
        file.symmetries.push_back(std::move(decl));
      }
    }

    if (doc.contains("integrator")) {
      const ordered_json& integ = doc.at("integrator");
      file.h = integ.value("h", file.h);
      file.newton_tol = integ.value("newton_tol", file.newton_tol);
    }
  } catch (const nlohmann::json::exception& err) {
    fail(path, std::string("missing or mistyped field: ") + err.what());
  }
  return file;
}

LoadedProblem instantiate(const ProblemFile& file) {
  LoadedProblem loaded;
  loaded.file = file;
  const int n = file.n;
  const int m = file.m;

  auto parse_plain = [&](const std::string& text) { return parse(text, n, m); };

  if (file.order == "ocp") {
    if (static_cast<int>(file.dynamics.size()) != n)
      throw ValidationError("ocp problems need n dynamics expressions");
    OCProblem prob;
    prob.n = n;
    prob.m = m;
    prob.lagrangian = parse_plain(file.lagrangian);
    for (const std::string& text : file.dynamics) prob.dynamics.push_back(parse_plain(text));
    for (const std::string& text : file.force) prob.force.push_back(parse_plain(text));
    prob.t_initial = file.interval[0];
    prob.t_final = file.interval[1];
    prob.validate();
    loaded.problem = std::move(prob);
  } else if (file.order == "cv1") {
    if (!file.dynamics.empty())
      throw ValidationError("cv1 problems derive their dynamics; drop the dynamics field");
    if (m != n) throw ValidationError("cv1 problems need m == n");
    std::vector<Expr> force;
    for (const std::string& text : file.force) force.push_back(parse_plain(text));
    loaded.lifted = lift_cv1(parse_plain(file.lagrangian), std::move(force), file.interval[0],
                             file.interval[1], n);
    loaded.problem = loaded.lifted->problem;
  } else if (file.order == "cv2") {
    if (!file.dynamics.empty())
      throw ValidationError("cv2 problems derive their dynamics; drop the dynamics field");
    if (n != 2 || m != 1)
      throw ValidationError("cv2 problems are single-dof: n must be 2 and m must be 1");
    if (file.force.size() != 1)
      throw ValidationError("cv2 problems take a single scalar force");
    ParseOptions slot;
    slot.allow_qdddot = true;
    loaded.lifted = lift_cv2(parse_plain(file.lagrangian), parse(file.force[0], n, m, slot),
                             file.interval[0], file.interval[1]);
    loaded.problem = loaded.lifted->problem;
  } else {
    throw ValidationError("order must be one of ocp, cv1, cv2");
  }

  for (const ProblemFile::SymmetryDecl& decl : file.symmetries) {
    Generators gen = Generators::zero(n, m);
    gen.tau = parse_plain(decl.tau);
    gen.gauge = parse_plain(decl.gauge);
    if (static_cast<int>(decl.xi.size()) != n)
      throw ValidationError("symmetry xi must have n entries");
    if (static_cast<int>(decl.sigma.size()) != m)
      throw ValidationError("symmetry sigma must have m entries");
    if (static_cast<int>(decl.alpha.size()) != n)
      throw ValidationError("symmetry alpha must have n entries");
    for (int i = 0; i < n; ++i) gen.xi[static_cast<std::size_t>(i)] = parse_plain(decl.xi[static_cast<std::size_t>(i)]);
    for (int j = 0; j < m; ++j)
      gen.sigma[static_cast<std::size_t>(j)] = parse_plain(decl.sigma[static_cast<std::size_t>(j)]);
    for (int i = 0; i < n; ++i)
      gen.alpha[static_cast<std::size_t>(i)] = parse_plain(decl.alpha[static_cast<std::size_t>(i)]);
    gen.validate(n, m);
    loaded.symmetries.push_back(std::move(gen));
  }

  loaded.config.step = file.h;
  loaded.config.newton_tol = file.newton_tol;
  if (file.control_law) {
    std::vector<Expr> law;
    for (const std::string& text : *file.control_law) law.push_back(parse_plain(text));
    loaded.config.control_law = std::move(law);
  }

  if (file.initial_q) {
    if (static_cast<int>(file.initial_q->size()) != n ||
        static_cast<int>(file.initial_p->size()) != n)
      throw ValidationError("initial q and p must have n entries");
  }
  return loaded;
}

LoadedProblem load_problem(const std::string& path) {
  return instantiate(load_problem_file(path));
}

ProblemFile::SymmetryDecl to_decl(const Generators& gen) {
  ProblemFile::SymmetryDecl decl;
  decl.tau = to_string(gen.tau);
  for (const Expr& e : gen.xi) decl.xi.push_back(to_string(e));
  for (const Expr& e : gen.sigma) decl.sigma.push_back(to_string(e));
  for (const Expr& e : gen.alpha) decl.alpha.push_back(to_string(e));
  decl.gauge = to_string(gen.gauge);
  return decl;
}

}  // namespace noct::cli
