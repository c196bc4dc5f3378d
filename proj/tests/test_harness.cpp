#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pgg/error.hpp"
#include "pgg/harness.hpp"
#include "support.hpp"

using namespace pgg;

TEST_CASE("sensing matrix ensemble") {
  const Index m = 100, n = 400;
  Matrix a = gen_matrix(m, n, 42);
  const double count = static_cast<double>(m * n);
  const double mean = a.sum() / count;
  const double var = (a.array() - mean).square().sum() / (count - 1.0);
  const double sd = 1.0 / std::sqrt(static_cast<double>(m));
  CHECK(std::abs(mean) <= 4.0 * sd / std::sqrt(count));
  CHECK(var == doctest::Approx(1.0 / m).epsilon(0.1));
  CHECK(gen_matrix(m, n, 42) == a);
  CHECK(gen_matrix(m, n, 43) != a);
  CHECK_THROWS_AS(gen_matrix(5, 5, 1), ConfigError);
}

TEST_CASE("sparse signals") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Vector g = gen_signal(50, 7, NonzeroDist::Gaussian, seed);
    CHECK((g.array() != 0.0).count() == 7);
    CHECK(std::abs(g.norm() - 1.0) <= 1e-12);
    Vector b = gen_signal(50, 7, NonzeroDist::Bernoulli, seed);
    CHECK((b.array() != 0.0).count() == 7);
    CHECK(std::abs(b.norm() - 1.0) <= 1e-12);
    for (Index i = 0; i < 50; ++i) {
      if (b[i] != 0.0) CHECK(std::abs(b[i]) == doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-15));
    }
  }
  // Every index is about equally likely to be in the support.
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    Vector x = gen_signal(10, 3, NonzeroDist::Gaussian, seed);
    for (Index i = 0; i < 10; ++i) hits[static_cast<std::size_t>(i)] += x[i] != 0.0;
  }
  for (int h : hits) CHECK(std::abs(h - 1200) < 150);
  CHECK(gen_signal(30, 4, NonzeroDist::Gaussian, 9) == gen_signal(30, 4, NonzeroDist::Gaussian, 9));
}

TEST_CASE("measurement noise") {
  Vector ax = gen_signal(40, 40, NonzeroDist::Gaussian, 3) * 3.0;
  CHECK(gen_noise(ax, std::numeric_limits<double>::infinity(), 1).isZero(0.0));
  CHECK(std::abs(gen_noise(ax, 0.0, 1).norm() - ax.norm()) <= 1e-12 * ax.norm());
  CHECK(gen_noise(ax, 20.0, 1).norm() == doctest::Approx(0.1 * ax.norm()).epsilon(1e-14));
  for (double db : {-5.0, 13.0, 60.0}) {
    Vector e = gen_noise(ax, db, 7);
    CHECK(20.0 * std::log10(ax.norm() / e.norm()) == doctest::Approx(db).epsilon(1e-12));
  }
  CHECK_THROWS_WITH(gen_noise(Vector::Zero(5), 10.0, 1), "zero signal power");
}

TEST_CASE("recovery SNR") {
  Vector x = gen_signal(20, 3, NonzeroDist::Gaussian, 5);
  CHECK(rsnr_db(x, x) == kRsnrCapDb);
  Vector d = Vector::Zero(20);
  d[0] = 0.01;
  CHECK(rsnr_db(x + d, x) == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(rsnr_db(Vector::Zero(20), x) == doctest::Approx(0.0));
}

TEST_CASE("confidence interval") {
  auto c = ci95({3.0, 3.0, 3.0, 3.0});
  CHECK(c.first == 3.0);
  CHECK(c.second == 3.0);
  auto two = ci95({0.0, 2.0});
  CHECK(two.first == doctest::Approx(-11.706).epsilon(1e-4));
  CHECK(two.second == doctest::Approx(13.706).epsilon(1e-4));
  std::vector<double> s{1.0, 4.0, 2.5, 7.0, 3.0};
  auto ci = ci95(s);
  const double mean = std::accumulate(s.begin(), s.end(), 0.0) / 5.0;
  CHECK(mean - ci.first == doctest::Approx(ci.second - mean));
  CHECK_THROWS_AS(ci95({1.0}), ConfigError);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(2, {2, 3}));
  CHECK(derive_seed(0, {0}) != derive_seed(0, {}));
}

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.experiment_id = "t";
  s.m = 20;
  s.n = 60;
  s.k_values = {1, 2, 3, 4, 5, 6, 7, 8};
  s.penalty = Penalty(PenaltyKind::Mcp);
  s.nonconvexity = {1.0};
  s.kappas = {1e-3};
  s.trials = 5;
  s.max_iters = 4000;
  s.base_seed = 77;
  return s;
}

}  // namespace

TEST_CASE("spec validation") {
  ExperimentSpec s = small_spec();
  CHECK_NOTHROW(s.validate());
  s.k_values.clear();
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_spec();
  s.trials = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_spec();
  s.m = 60;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = small_spec();
  s.penalty = Penalty(PenaltyKind::Abs);
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("easy and infeasible regimes") {
  ExperimentSpec s;
  s.m = 50;
  s.n = 250;
  s.k_values = {1};
  s.solver = SolverKind::L1;
  s.kappas = {1e-4};
  s.max_iters = 20000;
  s.trials = 20;
  s.base_seed = 5;
  ExperimentRecord easy = run_cell(s, 1, 0.0, 1e-4, std::numeric_limits<double>::infinity());
  CHECK(easy.success_rate == 1.0);

  s.trials = 5;
  s.max_iters = 5000;
  ExperimentRecord hard = run_cell(s, 50, 0.0, 1e-4, std::numeric_limits<double>::infinity());
  CHECK(hard.success_rate <= 0.2);
}

TEST_CASE("phase run and first-failure rule") {
  ExperimentSpec s = small_spec();
  PhaseResult r = run_phase(s);
  REQUIRE(r.kmax.size() == 1);
  const Index km = r.kmax[0].kmax;
  for (const ExperimentRecord& c : r.cells) {
    if (c.k <= km) CHECK(c.success_rate == 1.0);
  }
  if (km < 8) {
    CHECK(r.cells.back().k == km + 1);
    CHECK(r.cells.back().success_rate < 1.0);
  }
  for (const ExperimentRecord& c : r.cells) {
    CHECK(c.success_rate >= 0.0);
    CHECK(c.success_rate <= 1.0);
    CHECK(c.ci95_low <= c.mean_rsnr_db);
    CHECK(c.mean_rsnr_db <= c.ci95_high);
  }
}

TEST_CASE("Kmax does not grow as the measurements get noisier") {
  std::vector<double> avg(3, 0.0);
  const std::vector<double> levels{std::numeric_limits<double>::infinity(), 60.0, 45.0};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ExperimentSpec s = small_spec();
    s.base_seed = 100 + seed;
    s.msnr_db = levels;
    PhaseResult r = run_phase(s);
    REQUIRE(r.kmax.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) avg[i] += static_cast<double>(r.kmax[i].kmax) / 5.0;
  }
  CHECK(avg[1] <= avg[0]);
  CHECK(avg[2] <= avg[1]);
}

TEST_CASE("RSNR sweep trends and determinism") {
  ExperimentSpec s;
  s.m = 20;
  s.n = 60;
  s.k_values = {3};
  s.penalty = Penalty(PenaltyKind::Mcp);
  s.nonconvexity = {1.0};
  s.kappas = {1e-2, 1e-3, 1e-4};
  s.msnr_db = {std::numeric_limits<double>::infinity(), 30.0, 50.0};
  s.trials = 6;
  s.max_iters = 30000;
  s.base_seed = 3;
  auto cells = run_rsnr_sweep(s);
  REQUIRE(cells.size() == 9);
  auto at = [&](std::size_t kappa, std::size_t msnr) { return cells[kappa * 3 + msnr]; };
  for (std::size_t k = 1; k < 3; ++k) {
    CHECK(at(k, 0).ci95_high >= at(k - 1, 0).ci95_low);
    CHECK(at(k, 0).mean_rsnr_db >= at(k - 1, 0).mean_rsnr_db - 1.0);
  }
  CHECK(at(2, 2).mean_rsnr_db > at(2, 1).mean_rsnr_db);
  CHECK(at(2, 0).mean_rsnr_db > at(2, 2).mean_rsnr_db);

  auto again = run_rsnr_sweep(s);
  CHECK(trials_csv(s, again) == trials_csv(s, cells));
  s.jobs = 3;
  CHECK(aggregate_csv(s, run_rsnr_sweep(s)) == aggregate_csv(s, cells));
}

TEST_CASE("trials are independent of each other") {
  ExperimentSpec s = small_spec();
  const double inf = std::numeric_limits<double>::infinity();
  ExperimentRecord cell = run_cell(s, 4, 1.0, 1e-3, inf);
  for (int t : {4, 0, 2}) {
    TrialRecord alone = run_trial(s, 4, 1.0, 1e-3, inf, t);
    CHECK(alone.rsnr_db == cell.trials[static_cast<std::size_t>(t)].rsnr_db);
    CHECK(alone.seed == cell.trials[static_cast<std::size_t>(t)].seed);
  }
  s.trials = 3;
  ExperimentRecord fewer = run_cell(s, 4, 1.0, 1e-3, inf);
  for (int t = 0; t < 3; ++t) CHECK(fewer.trials[static_cast<std::size_t>(t)].rsnr_db == cell.trials[static_cast<std::size_t>(t)].rsnr_db);
}

TEST_CASE("other solvers and CSV layout") {
  ExperimentSpec s = small_spec();
  s.k_values = {2};
  for (SolverKind k : {SolverKind::Omp, SolverKind::Irls, SolverKind::Apgg, SolverKind::L1}) {
    s.solver = k;
    if (k == SolverKind::L1 || k == SolverKind::Omp || k == SolverKind::Irls) s.nonconvexity.clear();
    auto cells = run_rsnr_sweep(s);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].success_rate == 1.0);
    const std::string csv = trials_csv(s, cells);
    CHECK(csv.rfind("experiment_id,M,N,K,dist,penalty_kind,nonconvexity,kappa,msnr_db,zeta,solver,trial,seed,rsnr_db,success,iters,wall_ms\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  }
  s.solver = SolverKind::Apgg;
  s.nonconvexity = {1.0};
  const std::string csv = trials_csv(s, run_rsnr_sweep(s));
  CHECK(csv.find(",apgg(4),") != std::string::npos);
  s.timing = true;
  const std::string timed = aggregate_csv(s, run_rsnr_sweep(s));
  CHECK(timed.back() == '\n');
  CHECK(timed[timed.size() - 2] != ',');
}

TEST_CASE("default iteration cap comes from the constants") {
  ExperimentSpec s = small_spec();
  s.max_iters.reset();
  s.kappas = {1e-2};
  s.trials = 2;
  TrialRecord t = run_trial(s, 2, 1.0, 1e-2, std::numeric_limits<double>::infinity(), 0);
  CHECK(t.iters > 0);
  CHECK(t.iters <= kHarnessIterCap);
}
