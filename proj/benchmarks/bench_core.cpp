#include <benchmark/benchmark.h>

#include "noct/conservation.hpp"
#include "noct/parse.hpp"
#include "noct/symmetry.hpp"

using namespace noct;

namespace {

LiftedProblem drag_problem() {
  return lift_cv1(parse("(1/2)*u1^2", 1, 1), {parse("u1^2", 1, 1)}, 0.0, 1.0, 1);
}

Generators drag_scaling() {
  Generators gen = Generators::zero(1, 1);
  gen.tau = parse("2*t", 1, 1);
  gen.xi = {parse("q1", 1, 1)};
  gen.sigma = {parse("-u1", 1, 1)};
  gen.alpha = {parse("-p1", 1, 1)};
  return gen;
}

void BM_parse(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(parse("-(1/2)*(u1^2 - q1^2) + p1*u1 + sin(2*t)*q1", 1, 1));
}
BENCHMARK(BM_parse);

void BM_eval(benchmark::State& state) {
  const Expr e = parse("-(1/2)*(u1^2 - q1^2) + p1*u1 + sin(2*t)*q1", 1, 1);
  Env env;
  env.t = 0.7;
  env.q = {1.2};
  env.u = {-0.4};
  env.p = {0.9};
  for (auto _ : state) benchmark::DoNotOptimize(e.eval(env));
}
BENCHMARK(BM_eval);

void BM_diff_simplify(benchmark::State& state) {
  const Expr e = parse("-(1/2)*(u1^2 - q1^2) + p1*u1 + sin(2*t)*q1", 1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(e.diff(VarId::control(0)).simplified());
}
BENCHMARK(BM_diff_simplify);

void BM_is_zero(benchmark::State& state) {
  const LiftedProblem lifted = drag_problem();
  const Residual res = build_residual(lifted.problem, drag_scaling());
  const Expr raw = res.raw();
  for (auto _ : state) benchmark::DoNotOptimize(is_zero(raw));
}
BENCHMARK(BM_is_zero);

void BM_solve_control(benchmark::State& state) {
  const LiftedProblem lifted = drag_problem();
  IntegratorConfig config;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solve_control(lifted.problem, 0.3, {0.1}, {-0.8}, {0.0}, config));
}
BENCHMARK(BM_solve_control);

void BM_integrate_extremal(benchmark::State& state) {
  const LiftedProblem lifted = drag_problem();
  const std::vector<Generators> symmetries{drag_scaling()};
  IntegratorConfig config;
  config.step = 1e-3;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        integrate_extremal(lifted.problem, {0.0}, {-1.0}, symmetries, config));
}
BENCHMARK(BM_integrate_extremal);

void BM_find_symmetries_degree1(benchmark::State& state) {
  const LiftedProblem lifted = drag_problem();
  for (auto _ : state)
    benchmark::DoNotOptimize(find_symmetries(lifted.problem, AnsatzSpec::uniform(1), 1e-9));
}
BENCHMARK(BM_find_symmetries_degree1);


void BM_integrate_second_order(benchmark::State& state) {
  ParseOptions slot;
  slot.allow_qdddot = true;
  const LiftedProblem lifted =
      lift_cv2(parse("(1/2)*(u1^2 + q2^2 + q1^2)", 2, 1),
               parse("0.1*q2 + 0.01*u1 - 0.2*qdddot", 2, 1, slot), 0.0, 1.0);
  Generators gen = Generators::zero(2, 1);
  gen.tau = Expr::constant(1.0);
  const std::vector<Generators> symmetries{gen};
  IntegratorConfig config;
  config.step = 1e-3;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        integrate_el2(lifted, SecondOrderInitial{1.0, 0.0, 0.5, 0.0}, symmetries, config));
}
BENCHMARK(BM_integrate_second_order);

}  // namespace

BENCHMARK_MAIN();
