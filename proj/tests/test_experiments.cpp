#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace admmq;
using admmq::fixtures::vec;

namespace {

ProtocolSpec tiny_protocol() {
  ProtocolSpec p = ProtocolSpec::desk();
  p.n_inits = 3;
  p.iters_admm = 40;
  p.iters_pgd = 60;
  p.window = 10;
  p.rho_grid = {1.0, 100.0};
  p.beta_grid = {0.1, 10.0};
  p.p_grid = {0.5, 1.0};
  p.seed = 5;
  p.threads = 1;
  return p;
}

std::vector<Instance> tiny_instances(std::size_t n, std::size_t d = 3) {
  std::vector<Instance> out;
  for (std::size_t i = 0; i < n; ++i) {
    InstanceSpec s;
    s.d = d;
    s.v = 2.0;
    s.sigma_q_sq = 2.0;
    s.seed = 100 + i;
    out.push_back(generate_instance(s));
  }
  return out;
}

}  // namespace

TEST(Generator, SymmetricPsdAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    InstanceSpec s;
    s.d = 12;
    s.seed = seed;
    const Instance a = generate_instance(s);
    const Instance b = generate_instance(s);
    EXPECT_EQ(a.objective.Q(), b.objective.Q());
    EXPECT_EQ(a.objective.b(), b.objective.b());
    EXPECT_EQ(a.objective.Q(), a.objective.Q().transpose());
    EXPECT_GE(a.objective.lambda_min(), -1e-8 * a.objective.Q().norm());
    EXPECT_EQ(a.objective.weak_convexity(), 0.0);
    EXPECT_EQ(a.set.dim(), 12u);
    EXPECT_FALSE(a.set.finite());
  }
}

TEST(Generator, ZeroVarianceDropsRankOneTerm) {
  InstanceSpec s;
  s.d = 4;
  s.sigma_q_sq = 0.0;
  s.seed = 3;
  const Instance inst = generate_instance(s);
  // Rebuild Qt from the same stream: it is drawn first.
  CounterRng rng(CounterRng::derive(3, 0x9E11));
  Matrix qt(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) qt(i, j) = rng.normal();
  EXPECT_LE((inst.objective.Q() - qt.transpose() * qt).norm(), 1e-12);
  EXPECT_EQ(inst.objective.b(), Vector::Zero(4));
}

TEST(Generator, BScaleKnob) {
  InstanceSpec s;
  s.d = 400;
  s.sigma_q_sq = 1.0;
  s.b_scale = 3.0;
  const Instance inst = generate_instance(s);
  const double sd = std::sqrt(inst.objective.b().squaredNorm() / 400.0);
  EXPECT_NEAR(sd, 3.0, 0.4);
  s.b_scale.reset();
  EXPECT_DOUBLE_EQ(s.effective_b_scale(), 20.0);
}

TEST(Generator, Validation) {
  InstanceSpec s;
  s.d = 0;
  EXPECT_THROW(generate_instance(s), std::invalid_argument);
  s = {};
  s.v = 0.0;
  EXPECT_THROW(generate_instance(s), std::invalid_argument);
  s = {};
  s.sigma_q_sq = -1.0;
  EXPECT_THROW(generate_instance(s), std::invalid_argument);
}

TEST(InstanceJson, RoundTrip) {
  InstanceSpec s;
  s.d = 3;
  s.seed = 8;
  const Instance inst = generate_instance(s);
  const Instance back = instance_from_json(nlohmann::json::parse(to_json(inst).dump()));
  EXPECT_EQ(back.objective.Q(), inst.objective.Q());
  EXPECT_EQ(back.objective.b(), inst.objective.b());
  EXPECT_EQ(to_json(back.set), to_json(inst.set));
  EXPECT_EQ(back.spec.seed, 8u);
  const Instance hand = instance_from_json(nlohmann::json::parse(R"({"Q":[[2,0],[0,2]],"b":[-1.2,2.6]})"));
  EXPECT_EQ(hand.set.dim(), 2u);
  EXPECT_EQ(project(hand.set, vec({3.9, 4.1})), vec({0.0, 8.0}));
}

TEST(Quantile, Values) {
  EXPECT_EQ(quantile({3.0, 3.0, 3.0}, 0.25), 3.0);
  EXPECT_EQ(quantile({1.0, 2.0, 3.0, 4.0}, 0.5), 2.5);
  EXPECT_EQ(quantile({4.0, 1.0, 3.0, 2.0}, 0.25), 1.75);
  EXPECT_EQ(quantile({4.0, 1.0, 3.0, 2.0}, 0.75), 3.25);
  EXPECT_EQ(quantile({7.0}, 0.9), 7.0);
  EXPECT_THROW(quantile({}, 0.5), std::invalid_argument);
  EXPECT_THROW(quantile({1.0}, 1.5), std::invalid_argument);
}

TEST(Protocol, DefaultGrids) {
  const auto p = ProtocolSpec::full();
  ASSERT_EQ(p.rho_grid.size(), 9u);
  EXPECT_DOUBLE_EQ(p.rho_grid.front(), 1e-2);
  EXPECT_DOUBLE_EQ(p.rho_grid.back(), 1e6);
  ASSERT_EQ(p.beta_grid.size(), 21u);
  EXPECT_DOUBLE_EQ(p.beta_grid.front(), 1e-5);
  EXPECT_NEAR(p.beta_grid[1], std::pow(10.0, -4.5), 1e-20);
  EXPECT_DOUBLE_EQ(p.beta_grid.back(), 1e5);
  EXPECT_EQ(p.p_grid, (std::vector<double>{0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}));
  EXPECT_EQ(p.n_inits, 50);
  EXPECT_EQ(p.iters_admm, 30000);
  EXPECT_EQ(p.iters_pgd, 100000);
  const auto d = ProtocolSpec::desk();
  EXPECT_EQ(d.n_inits, 20);
  EXPECT_EQ(d.iters_admm, 3000);
  EXPECT_EQ(d.iters_pgd, 10000);
  EXPECT_EQ(d.grid_for(Method::AdmmS).size(), 9u * 21u);
  EXPECT_EQ(d.grid_for(Method::AdmmR).size(), 9u * 7u);
  EXPECT_EQ(d.grid_for(Method::GdProj).size(), 1u);
}

TEST(Protocol, JsonOverridesAndValidation) {
  const auto p = protocol_from_json(nlohmann::json::parse(R"({"n_inits":4,"rho_grid":[1,2],"dual_init":"zero"})"));
  EXPECT_EQ(p.n_inits, 4);
  EXPECT_EQ(p.rho_grid, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(p.iters_admm, 3000);
  EXPECT_EQ(p.dual_init, DualInit::Zero);
  EXPECT_THROW(protocol_from_json(nlohmann::json::parse(R"({"n_inits":0})")), std::invalid_argument);
  EXPECT_THROW(protocol_from_json(nlohmann::json::parse(R"({"rho_grid":[]})")), std::invalid_argument);
  const auto back = protocol_from_json(to_json(ProtocolSpec::full()));
  EXPECT_EQ(back.iters_pgd, 100000);
  EXPECT_EQ(back.beta_grid, ProtocolSpec::full().beta_grid);
}

TEST(RunProtocol, ZeroIterationsGiveStartObjective) {
  const auto inst = tiny_instances(1);
  ProtocolSpec p = tiny_protocol();
  p.n_inits = 1;
  p.iters_admm = 0;
  p.iters_pgd = 0;
  const auto res = run_protocol(inst, {Method::AdmmQ, Method::AdmmR, Method::AdmmS, Method::Pgd}, p);
  const double f0 = inst[0].objective.value(initial_point(inst[0].set, p.init_seed(0, 0)));
  for (const auto& row : res.rows) EXPECT_DOUBLE_EQ(row.best_objective, f0);
}

TEST(RunProtocol, ToyInstanceReachesBruteForceOptimum) {
  const QuadraticObjective f(Matrix(vec({2.0, 1.0}).asDiagonal()), vec({-1.3, 0.6}));
  const Instance inst{InstanceSpec{}, f, DiscreteProductSet::uniform(2, CoordinateSet::lattice(1.0, -4.0, 4.0))};
  ProtocolSpec p = tiny_protocol();
  p.n_inits = 8;
  p.iters_admm = 300;
  p.rho_grid = {0.1, 1.0, 10.0};
  const auto res = run_protocol({inst}, {Method::AdmmQ}, p);
  const double fmin = brute_force_minimize(f, inst.set).value;
  EXPECT_NEAR(res.best(0, Method::AdmmQ)->median, fmin, 1e-12);
}

TEST(RunProtocol, RowLayoutAndQuantileOrder) {
  const auto inst = tiny_instances(2);
  const auto p = tiny_protocol();
  const std::vector<Method> methods{Method::AdmmQ, Method::IAdmmQ, Method::AdmmR, Method::AdmmS, Method::Pgd,
                                    Method::GdProj};
  const auto res = run_protocol(inst, methods, p);
  std::size_t expected = 0;
  for (Method m : methods) expected += p.grid_for(m).size();
  EXPECT_EQ(res.aggregates.size(), 2 * expected);
  EXPECT_EQ(res.rows.size(), 2 * expected * 3);
  for (const auto& a : res.aggregates) {
    EXPECT_EQ(a.values.size(), 3u);
    if (!std::isnan(a.median)) {
      EXPECT_LE(a.q25, a.median);
      EXPECT_LE(a.median, a.q75);
    }
  }
}

TEST(RunProtocol, DeterministicAcrossThreadCounts) {
  const auto inst = tiny_instances(2);
  ProtocolSpec p = tiny_protocol();
  const auto one = run_protocol(inst, {Method::AdmmQ, Method::AdmmR, Method::Pgd}, p);
  p.threads = 4;
  const auto four = run_protocol(inst, {Method::AdmmQ, Method::AdmmR, Method::Pgd}, p);
  std::ostringstream a, b;
  write_sweep_csv(a, one);
  write_sweep_csv(b, four);
  EXPECT_EQ(a.str(), b.str());
}

TEST(RunProtocol, SharedInitialisation) {
  const auto inst = tiny_instances(2);
  const auto p = tiny_protocol();
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::int64_t r = 0; r < p.n_inits; ++r) {
      SolverConfig cfg;
      cfg.max_iters = 0;
      const Vector x0 = initial_point(inst[i].set, p.init_seed(i, r));
      for (Method m : {Method::AdmmQ, Method::AdmmS, Method::Pgd}) {
        const auto rr = run_from(m, inst[i].objective, inst[i].set, cfg, x0);
        EXPECT_EQ(rr.final_state.y, x0);
      }
    }
  }
  EXPECT_NE(p.init_seed(0, 0), p.init_seed(0, 1));
  EXPECT_NE(p.init_seed(0, 0), p.init_seed(1, 0));
}

TEST(RunProtocol, DivergedRunsAreCountedAndExcluded) {
  const auto inst = tiny_instances(1, 4);
  ProtocolSpec p = tiny_protocol();
  p.rho_grid = {1e-9, 1e3};
  p.iters_pgd = 2000;
  const auto res = run_protocol(inst, {Method::Pgd}, p);
  const GridAggregate& tiny = res.aggregates[0];
  EXPECT_EQ(tiny.diverged, 3);
  EXPECT_TRUE(tiny.infeasible());
  EXPECT_TRUE(std::isnan(tiny.median));
  EXPECT_EQ(res.best(0, Method::Pgd)->hyper.rho, 1e3);
  std::ostringstream csv;
  write_sweep_csv(csv, res);
  EXPECT_NE(csv.str().find(",nan,1\n"), std::string::npos);
}

TEST(Histogram, SelfDifferenceIsSingleSpike) {
  const auto res = run_protocol(tiny_instances(2), {Method::AdmmQ}, tiny_protocol());
  const auto h = pairwise_histogram(res.best_runs(Method::AdmmQ), res.best_runs(Method::AdmmQ), 20);
  ASSERT_EQ(h.counts.size(), 1u);
  EXPECT_EQ(h.counts[0], 6);
  EXPECT_EQ(h.edges, (std::vector<double>{0.0, 0.0}));
}

TEST(Histogram, FullMaskAdmmRMatchesAdmmQ) {
  ProtocolSpec p = tiny_protocol();
  p.p_grid = {1.0};
  p.rho_grid = {10.0};
  const auto res = run_protocol(tiny_instances(2), {Method::AdmmQ, Method::AdmmR}, p);
  const auto h = pairwise_histogram(res.best_runs(Method::AdmmR), res.best_runs(Method::AdmmQ), 10);
  for (double d : h.differences) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(h.differences.size(), 6u);
}

TEST(Histogram, BinsCoverRangeAndCountEverything) {
  RunSet a, b;
  for (int k = 0; k < 100; ++k) {
    a.keys.emplace_back(0, k);
    b.keys.emplace_back(0, k);
    a.values.push_back(k);
    b.values.push_back(0.0);
  }
  a.values[5] = std::numeric_limits<double>::quiet_NaN();
  const auto h = pairwise_histogram(a, b, 9);
  ASSERT_EQ(h.edges.size(), 10u);
  EXPECT_EQ(h.edges.front(), 0.0);
  EXPECT_EQ(h.edges.back(), 99.0);
  std::int64_t total = 0;
  for (auto c : h.counts) total += c;
  EXPECT_EQ(total, 99);
  EXPECT_EQ(h.skipped, 1);
  std::ostringstream csv;
  write_histogram_csv(csv, h);
  EXPECT_EQ(csv.str().substr(0, 21), "bin_left,bin_right,co");
}

TEST(Histogram, MismatchedRunSetsRejected) {
  RunSet a, b;
  a.keys = {{0, 0}, {0, 1}};
  a.values = {1.0, 2.0};
  b.keys = {{0, 0}, {1, 1}};
  b.values = {1.0, 2.0};
  EXPECT_THROW(pairwise_histogram(a, b, 5), std::invalid_argument);
  EXPECT_THROW(pairwise_histogram(a, a, 0), std::invalid_argument);
}

TEST(SweepOutput, CsvAndSummaryShape) {
  const auto res = run_protocol(tiny_instances(1), {Method::AdmmQ, Method::AdmmS}, tiny_protocol());
  std::ostringstream csv;
  write_sweep_csv(csv, res);
  std::istringstream lines(csv.str());
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  EXPECT_EQ(header, "instance_id,algorithm,hyper_json,init,best_objective,diverged");
  EXPECT_EQ(first.substr(0, 27), "0,admm-q,\"{\"\"rho\"\":1.0}\",0,");
  const auto s = summary_json(res);
  ASSERT_EQ(s["instances"].size(), 1u);
  EXPECT_TRUE(s["instances"][0]["algorithms"].contains("admm-s"));
  EXPECT_EQ(s["instances"][0]["algorithms"]["admm-s"]["grid"].size(), 4u);
  EXPECT_FALSE(s["instances"][0]["algorithms"]["admm-q"]["best"].is_null());
}
