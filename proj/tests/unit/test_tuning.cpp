#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pnp/tuning.hpp"
#include "test_images.hpp"

using namespace pnp;

TEST_SUITE("tuning") {

TEST_CASE("simulate_problem: infinite input SNR gives exact measurements") {
  const int w = 16, h = 16;
  auto model = ForwardModel::masked_fourier(make_radial_mask(w, h, 0.4));
  Image truth = testing::phantom_shapes(w, h);
  auto problem = simulate_problem(truth, model,
                                  std::numeric_limits<double>::infinity(), 1);
  CHECK(problem.sigma == 0.0);
  auto clean = model.apply(truth);
  CHECK(problem.y.re == clean.re);
  CHECK(problem.y.im == clean.im);
}

TEST_CASE("simulate_problem: identity model matches sigma_for_input_snr") {
  Image truth = Image::constant(64, 64, 1, 128.57);
  auto model = ForwardModel::identity(64, 64, 1);
  auto problem = simulate_problem(truth, model, 25.0, 2);
  CHECK(problem.sigma == doctest::Approx(7.23).epsilon(2e-3));
  CHECK(problem.sigma ==
        doctest::Approx(sigma_for_input_snr(truth, 25.0)).epsilon(1e-15));
}

TEST_CASE("simulate_problem: measured input SNR within 0.2 dB, three seeds") {
  const int w = 64, h = 64;
  Image truth = testing::phantom_mixed(w, h);
  auto ident = ForwardModel::identity(w, h, 1);
  for (std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
    auto problem = simulate_problem(truth, ident, 30.0, seed);
    CHECK(std::abs(problem.achieved_input_snr_db - 30.0) < 0.2);
  }
  // Masked Fourier keeps m ~ n/3 samples; the sample-statistics bound scales
  // with 1/sqrt(m).
  auto fourier = ForwardModel::masked_fourier(make_radial_mask(w, h, 1.0 / 3.0));
  for (std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
    auto problem = simulate_problem(truth, fourier, 30.0, seed);
    CHECK(std::abs(problem.achieved_input_snr_db - 30.0) < 0.2 * std::sqrt(3.0));
  }
}

TEST_CASE("simulate_problem: rejects all-zero measurements") {
  Image zero = Image::zeros(8, 8, 1);
  auto model = ForwardModel::identity(8, 8, 1);
  CHECK_THROWS_AS(simulate_problem(zero, model, 20.0, 1), ConfigError);
}

TEST_CASE("log grid: endpoints exact, ascending, positive") {
  auto grid = log_spaced_grid(std::pow(10.0, -1.5), std::pow(10.0, 0.5), 40);
  REQUIRE(grid.size() == 40);
  CHECK(grid.front() == std::pow(10.0, -1.5));
  CHECK(grid.back() == std::pow(10.0, 0.5));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("sweep: singleton grid reproduces a direct solver run bitwise") {
  const int w = 24, h = 24;
  auto model = ForwardModel::identity(w, h, 1);
  Image truth = testing::phantom_shapes(w, h);
  auto problem = simulate_problem(truth, model, 25.0, 3);

  auto base = make_tv_prox_denoiser({2.0, 400, 1e-9});
  SweepSpec spec;
  spec.parameter = SweepParameter::mu;
  spec.grid = {1.0};
  spec.algorithm = Algorithm::fista;
  spec.config.gamma = 1.0;
  spec.config.max_iters = 60;
  spec.config.fp_tol = 1e-7;

  auto curve = sweep(model, problem.y, truth, base, spec);
  REQUIRE(curve.points.size() == 1);
  REQUIRE(curve.best.has_value());

  auto direct = run_solver(Algorithm::fista, model, problem.y, base, spec.config);
  CHECK(curve.points[0].snr_db == snr_db(truth, direct.x_final));
  CHECK(curve.points[0].iterations == direct.iterations);
}

TEST_CASE("sweep: best SNR at least the mu=1 point when the grid contains it") {
  const int w = 24, h = 24;
  auto model = ForwardModel::identity(w, h, 1);
  Image truth = testing::phantom_shapes(w, h);
  auto problem = simulate_problem(truth, model, 22.0, 4);

  auto base = make_tv_prox_denoiser({6.0, 400, 1e-9});
  SweepSpec spec;
  spec.parameter = SweepParameter::mu;
  spec.grid = {0.5, 1.0, 2.0, 4.0};
  spec.config.max_iters = 60;
  spec.config.fp_tol = 1e-7;

  auto curve = sweep(model, problem.y, truth, base, spec);
  REQUIRE(curve.best.has_value());
  double snr_at_one = 0.0;
  for (const auto& p : curve.points)
    if (p.param == 1.0) snr_at_one = p.snr_db;
  CHECK(curve.points[*curve.best].snr_db >= snr_at_one);
}

TEST_CASE("sweep: parallel evaluation matches sequential, in order") {
  const int w = 16, h = 16;
  auto model = ForwardModel::identity(w, h, 1);
  Image truth = testing::phantom_mixed(w, h);
  auto problem = simulate_problem(truth, model, 20.0, 5);

  auto base = make_tv_prox_denoiser({4.0, 300, 1e-9});
  SweepSpec spec;
  spec.parameter = SweepParameter::mu;
  spec.grid = log_spaced_grid(0.25, 4.0, 9);
  spec.config.max_iters = 40;
  spec.config.fp_tol = 1e-7;

  auto seq = sweep(model, problem.y, truth, base, spec, 1);
  auto par = sweep(model, problem.y, truth, base, spec, 4);
  REQUIRE(seq.points.size() == par.points.size());
  for (std::size_t i = 0; i < seq.points.size(); ++i) {
    CHECK(seq.points[i].param == par.points[i].param);
    CHECK(seq.points[i].snr_db == par.points[i].snr_db);
    CHECK(seq.points[i].iterations == par.points[i].iterations);
  }
  CHECK(seq.best == par.best);
}

TEST_CASE("sweep: per-point failures are recorded, sweep continues") {
  const int w = 8, h = 8;
  auto model = ForwardModel::identity(w, h, 1);
  Image truth = testing::phantom_shapes(w, h);
  auto problem = simulate_problem(truth, model, 20.0, 6);

  // gamma sweep with values above the ista step bound: those points fail.
  SweepSpec spec;
  spec.parameter = SweepParameter::gamma;
  spec.grid = {0.5, 1.0, 1.5};
  spec.algorithm = Algorithm::ista;
  spec.config.max_iters = 30;
  spec.config.fp_tol = 1e-6;

  auto curve = sweep(model, problem.y, truth, make_tv_prox_denoiser({2.0, 200, 1e-9}),
                     spec);
  REQUIRE(curve.points.size() == 3);
  CHECK(curve.points[2].converged == false);
  CHECK(!curve.points[2].error.empty());
  CHECK(curve.points[0].converged);
  REQUIRE(curve.best.has_value());
  CHECK(*curve.best != 2);
}

TEST_CASE("sweep csv: one row per grid point plus header") {
  SweepCurve curve;
  curve.points = {{0.5, 21.0, 12, true, ""}, {1.0, 22.5, 10, true, ""}};
  curve.best = 1;
  std::ostringstream out;
  write_sweep_csv(out, curve);
  std::string text = out.str();
  CHECK(text.rfind("param,snr_db,iters,converged\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("equivalence_tv: lambda = 1 pair is identical by construction") {
  const int w = 20, h = 20;
  Image truth = testing::phantom_shapes(w, h);
  Image noisy = add_awgn(truth, NoiseSpec{8.0, 7});
  double lambdas[] = {1.0};
  double mus[] = {1.0};
  auto report = equivalence_tv(truth, noisy, lambdas, mus);
  CHECK(report.pairs[0].rel_discrepancy == 0.0);
  CHECK(report.max_snr_discrepancy_db == 0.0);
}

TEST_CASE("equivalence_tv: reciprocal pairs agree to 1e-5 and 0.01 dB") {
  const int w = 24, h = 24;
  Image truth = testing::phantom_mixed(w, h);
  Image noisy = add_awgn(truth, NoiseSpec{10.0, 8});
  std::vector<double> lambdas = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> mus;
  for (double l : lambdas) mus.push_back(1.0 / l);
  auto report = equivalence_tv(truth, noisy, lambdas, mus, 1.0, 4000, 1e-9);
  CHECK(report.max_rel_discrepancy <= 1e-5);
  CHECK(report.max_snr_discrepancy_db <= 0.01);
}

TEST_CASE("equivalence_tv: lambda=4 vs mu=0.25 against the high-precision solve") {
  const int w = 32, h = 32;
  Image truth = testing::phantom_shapes(w, h);
  Image noisy = add_awgn(truth, NoiseSpec{12.0, 9});
  double lambdas[] = {4.0};
  double mus[] = {0.25};
  auto report = equivalence_tv(truth, noisy, lambdas, mus, 1.0, 6000, 1e-10);

  Image precise = tv_prox_denoise(noisy, 4.0, 100000, 1e-12).image;
  Image direct = tv_prox_denoise(noisy, 4.0, 6000, 1e-10).image;
  CHECK(norm2(direct - precise) <= 1e-5 * norm2(precise));
  CHECK(report.max_rel_discrepancy <= 1e-5);
}

TEST_CASE("equivalence_tv: rejects non-reciprocal grids") {
  Image truth = testing::phantom_shapes(8, 8);
  Image noisy = add_awgn(truth, NoiseSpec{5.0, 10});
  double lambdas[] = {2.0};
  double mus[] = {0.6};
  CHECK_THROWS_AS(equivalence_tv(truth, noisy, lambdas, mus), ConfigError);
}

}  // TEST_SUITE
