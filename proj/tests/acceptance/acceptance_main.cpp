// Acceptance suite: each criterion prints one [PASS]/[FAIL] line; the binary
// exits nonzero if any executed criterion fails. Run a single criterion with
// --criterion N.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "pnp/denoiser.hpp"
#include "pnp/image_io.hpp"
#include "pnp/oracles.hpp"
#include "pnp/solver.hpp"
#include "pnp/tuning.hpp"
#include "test_images.hpp"

using namespace pnp;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& label) {
    if (!condition) {
      ok = false;
      detail << (detail.tellp() > 0 ? "; " : "") << "FAILED: " << label;
    }
  }
  void note(const std::string& text) {
    detail << (detail.tellp() > 0 ? "; " : "") << text;
  }
};

std::vector<Image> test_images(int w, int h) {
  return {testing::phantom_shapes(w, h), testing::phantom_smooth(w, h),
          testing::phantom_mixed(w, h)};
}

// ---------------------------------------------------------------------------
// Criterion 1: scaled TV prox (lambda fixed at 1) is the directly tuned TV
// prox; outputs within 1e-5 relative and SNRs within 0.05 dB over
// lambda in {0.25, 0.5, 1, 2, 4}, mu = 1/lambda, 3 images x 3 noise levels.
Check criterion1() {
  Check check;
  const std::vector<double> lambdas = {0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> mus;
  for (double l : lambdas) mus.push_back(1.0 / l);

  double worst_rel = 0.0, worst_snr = 0.0;
  std::uint64_t seed = 1;
  for (const Image& truth : test_images(64, 64)) {
    for (double sigma : {5.0, 10.0, 20.0}) {
      Image noisy = add_awgn(truth, NoiseSpec{sigma, seed++});
      auto report = equivalence_tv(truth, noisy, lambdas, mus, 1.0, 4000, 1e-9);
      worst_rel = std::max(worst_rel, report.max_rel_discrepancy);
      worst_snr = std::max(worst_snr, report.max_snr_discrepancy_db);
    }
  }
  check.require(worst_rel <= 1e-5, "relative output discrepancy <= 1e-5");
  check.require(worst_snr <= 0.05, "SNR discrepancy <= 0.05 dB");
  std::ostringstream s;
  s << "max rel " << worst_rel << ", max SNR diff " << worst_snr << " dB";
  check.note(s.str());
  return check;
}

// ---------------------------------------------------------------------------
// Criterion 2: the scaled unit-noise MMSE denoiser solves the transformed
// problem (prior p(mu .), noise variance 1/mu^2) within 1e-6 over
// z in [-5, 5] (201 points), mu in {0.5, 1, 2}, three priors.
Check criterion2() {
  Check check;
  std::vector<GmmPrior> priors = {
      {{1.0}, {0.0}, {2.5}},
      {{0.5, 0.5}, {-2.0, 2.0}, {0.6, 0.6}},
      {{0.5, 0.3, 0.2}, {-1.0, 0.0, 3.0}, {0.3, 1.0, 2.0}},
  };
  double worst = 0.0, worst_analytic = 0.0;
  for (std::size_t pi = 0; pi < priors.size(); ++pi) {
    const auto& prior = priors[pi];
    auto base = make_gmm_mmse_denoiser(prior, 1.0);
    for (double mu : {0.5, 1.0, 2.0}) {
      auto scaled = scale_denoiser(base, mu);
      GmmPrior transformed = prior;
      for (double& m : transformed.means) m /= mu;
      for (double& v : transformed.variances) v /= (mu * mu);
      for (int i = 0; i < 201; ++i) {
        double z = -5.0 + 0.05 * i;
        double fast = scaled->denoise(Image::constant(1, 1, 1, z)).data[0];
        double reference =
            oracles::quadrature_mmse(transformed, 1.0 / (mu * mu), z);
        worst = std::max(worst, std::abs(fast - reference));
        if (pi == 0) {
          // Analytic single-Gaussian shrinkage (v/(v+1)) z is mu-invariant.
          double analytic = 2.5 / (2.5 + 1.0) * z;
          worst_analytic = std::max(worst_analytic, std::abs(fast - analytic));
        }
      }
    }
  }
  check.require(worst <= 1e-6, "scaled MMSE vs quadrature <= 1e-6");
  check.require(worst_analytic <= 1e-9, "analytic shrinkage case");
  std::ostringstream s;
  s << "max |scaled - quadrature| " << worst << ", analytic case " << worst_analytic;
  check.note(s.str());
  return check;
}

// ---------------------------------------------------------------------------
// Criterion 3: consensus residuals of converged runs (fp_tol 1e-8) on a
// 64x64 masked-fourier problem with the TV prox, mu in {0.5, 1, 2}: both
// residuals <= 1e-5; the analytic scalar linear-denoiser fixed point reaches
// 1e-10.
Check criterion3() {
  Check check;
  const int w = 64, h = 64;
  auto model = ForwardModel::masked_fourier(make_radial_mask(w, h, 1.0 / 3.0));
  Image truth = testing::phantom_shapes(w, h);
  auto problem = simulate_problem(truth, model, 30.0, 17);

  const double gamma = 1.0;
  auto base = make_tv_prox_denoiser({1.5, 300, 1e-10});
  double worst = 0.0;
  for (double mu : {0.5, 1.0, 2.0}) {
    for (auto algorithm : {Algorithm::ista, Algorithm::admm}) {
      SolverConfig config;
      config.gamma = gamma;
      config.mu = mu;
      config.max_iters = 6000;
      config.fp_tol = 1e-8;
      auto result = run_solver(algorithm, model, problem.y, base, config);
      std::ostringstream label;
      label << (algorithm == Algorithm::ista ? "ista" : "admm") << " mu=" << mu;
      check.require(result.converged, label.str() + " converged at 1e-8");
      auto report = verify_ce(model, problem.y, base, gamma, mu, result.x_final);
      worst = std::max(worst, std::max(report.r_prior, report.r_fidelity));
      check.require(report.r_prior <= 1e-5, label.str() + " r_prior <= 1e-5");
      check.require(report.r_fidelity <= 1e-5, label.str() + " r_fidelity <= 1e-5");
    }
  }

  // Analytic scalar fixed point: x = alpha (x - gamma (x - y)).
  auto scalar_model = ForwardModel::identity(1, 1, 1);
  const double alpha = 0.5, g2 = 0.7, yv = 4.0;
  auto y2 = MeasurementVector::spatial(Image::constant(1, 1, 1, yv));
  Image x_star = Image::constant(1, 1, 1, alpha * g2 * yv / (1.0 - alpha + alpha * g2));
  double scalar_worst = 0.0;
  for (double mu : {0.5, 1.0, 2.0}) {
    auto report = verify_ce(scalar_model, y2, testing::make_linear_denoiser(alpha),
                            g2, mu, x_star);
    scalar_worst = std::max(scalar_worst, std::max(report.r_prior, report.r_fidelity));
  }
  check.require(scalar_worst <= 1e-10, "analytic scalar residuals <= 1e-10");
  std::ostringstream s;
  s << "max run residual " << worst << ", scalar residual " << scalar_worst;
  check.note(s.str());
  return check;
}

// ---------------------------------------------------------------------------
// Criterion 4: PnP-ADMM, PnP-ISTA and PnP-FISTA share fixed points: final
// images within 1e-4 relative on identity and masked-fourier problems.
Check criterion4() {
  Check check;
  const int w = 64, h = 64;
  Image truth = testing::phantom_mixed(w, h);

  struct ProblemCase {
    std::string name;
    ForwardModel model;
    double tau;
    double gamma;
  };
  std::vector<ProblemCase> cases;
  cases.push_back({"identity", ForwardModel::identity(w, h, 1), 5.0, 0.9});
  cases.push_back(
      {"fourier", ForwardModel::masked_fourier(make_radial_mask(w, h, 1.0 / 3.0)),
       1.5, 1.0});

  for (auto& pc : cases) {
    auto problem = simulate_problem(truth, pc.model, 30.0, 23);
    auto denoiser = make_tv_prox_denoiser({pc.tau, 300, 1e-10});
    SolverConfig config;
    config.gamma = pc.gamma;
    config.max_iters = 6000;
    config.fp_tol = 1e-8;

    auto admm = run_solver(Algorithm::admm, pc.model, problem.y, denoiser, config);
    auto ista = run_solver(Algorithm::ista, pc.model, problem.y, denoiser, config);
    auto fista = run_solver(Algorithm::fista, pc.model, problem.y, denoiser, config);
    check.require(admm.converged && ista.converged && fista.converged,
                  pc.name + " all converged");
    double scale = norm2(admm.x_final);
    double d1 = norm2(admm.x_final - ista.x_final) / scale;
    double d2 = norm2(admm.x_final - fista.x_final) / scale;
    double d3 = norm2(ista.x_final - fista.x_final) / scale;
    double worst = std::max({d1, d2, d3});
    check.require(worst <= 1e-4, pc.name + " pairwise <= 1e-4");
    std::ostringstream s;
    s << pc.name << " max pairwise " << worst;
    check.note(s.str());
  }
  return check;
}

// ---------------------------------------------------------------------------
// Criterion 5: the mu-sweep repairs a mismatched TV denoiser: tau tuned for
// sigma=10 applied at sigma=2 (and the reverse) gains >= 0.5 dB over mu = 1,
// with the best mu strictly inside the grid.
Check criterion5() {
  Check check;
  const int w = 64, h = 64;
  Image truth = testing::phantom_shapes(w, h);
  auto model = ForwardModel::identity(w, h, 1);

  auto tune_tau = [&](double sigma) {
    // Grid-search the TV strength on a problem with the given noise level.
    Image noisy = add_awgn(truth, NoiseSpec{sigma, 41});
    double best_tau = 0.0, best_snr = -1e9;
    for (double tau : log_spaced_grid(0.5, 60.0, 18)) {
      Image denoised = tv_prox_denoise(noisy, tau, 400, 1e-9).image;
      double snr = snr_db(truth, denoised);
      if (snr > best_snr) {
        best_snr = snr;
        best_tau = tau;
      }
    }
    return best_tau;
  };

  auto run_mismatch = [&](double tau_tuned, double sigma_actual,
                          const std::string& label) {
    auto y = MeasurementVector::spatial(add_awgn(truth, NoiseSpec{sigma_actual, 42}));
    auto base = make_tv_prox_denoiser({tau_tuned, 400, 1e-9});

    SweepSpec spec;
    spec.parameter = SweepParameter::mu;
    spec.grid = log_spaced_grid(std::pow(10.0, -1.2), std::pow(10.0, 1.2), 25);
    spec.algorithm = Algorithm::fista;
    spec.config.gamma = 1.0;
    spec.config.max_iters = 200;
    spec.config.fp_tol = 1e-7;

    auto curve = sweep(model, y, truth, base, spec);
    check.require(curve.best.has_value(), label + " sweep produced a best point");
    if (!curve.best) return;

    SolverConfig unscaled = spec.config;
    unscaled.mu = 1.0;
    auto at_one = run_solver(Algorithm::fista, model, y, base, unscaled);
    double snr_unscaled = snr_db(truth, at_one.x_final);

    const auto& best = curve.points[*curve.best];
    std::ostringstream s;
    s << label << " best mu " << best.param << " gains "
      << best.snr_db - snr_unscaled << " dB";
    check.note(s.str());
    check.require(best.snr_db >= snr_unscaled + 0.5, label + " gain >= 0.5 dB");
    check.require(*curve.best > 0 && *curve.best + 1 < curve.points.size(),
                  label + " best mu strictly inside the grid");
  };

  double tau_for_10 = tune_tau(10.0);
  double tau_for_2 = tune_tau(2.0);
  run_mismatch(tau_for_10, 2.0, "tuned@10 used@2");
  run_mismatch(tau_for_2, 10.0, "tuned@2 used@10");
  return check;
}

// ---------------------------------------------------------------------------
// Criterion 6: infrastructure properties.
Check criterion6() {
  Check check;
  const int w = 32, h = 32;
  std::vector<std::pair<std::string, ForwardModel>> models;
  models.emplace_back("identity", ForwardModel::identity(w, h, 1));
  models.emplace_back("fourier",
                      ForwardModel::masked_fourier(make_radial_mask(w, h, 1.0 / 3.0)));
  models.emplace_back("blur",
                      ForwardModel::blur_downsample(w, h, gaussian_blur_kernel(7, 1.6), 2));

  // Adjoint identity, 10 random pairs per model.
  for (auto& [name, model] : models) {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Image x = testing::random_image(w, h, 1, seed * 7);
      Image u = testing::random_image(w, h, 1, seed * 13);
      MeasurementVector v = model.apply(u);
      double lhs = dot_real(model.apply(x), v);
      double rhs = dot(x, model.adjoint(v));
      worst = std::max(worst,
                       std::abs(lhs - rhs) / std::max(1.0, norm2(x) * norm2(v)));
    }
    check.require(worst <= 1e-10, name + " adjoint identity <= 1e-10");
  }

  // grad_g against finite differences. H is linear so the check is
  // scale-invariant; unit-scale probes keep the h=1e-6 central difference
  // clear of cancellation noise.
  for (auto& [name, model] : models) {
    Image x = testing::random_image(w, h, 1, 91, 0.0, 1.0);
    MeasurementVector y = model.apply(testing::random_image(w, h, 1, 92, 0.0, 1.0));
    Image direction = testing::random_image(w, h, 1, 93, -1.0, 1.0);
    double analytic = dot(model.grad_g(x, y), direction);
    double dev = oracles::fd_gradient_check(
        [&](const Image& p) { return model.data_fidelity(p, y); }, analytic, x,
        direction);
    check.require(dev <= 1e-6, name + " grad_g matches finite differences");
  }

  // prox_g optimality residuals: 1e-8 closed forms, 1e-6 CG.
  for (auto& [name, model] : models) {
    Image z = testing::random_image(w, h, 1, 94, 0.0, 255.0);
    auto y = model.apply(testing::phantom_shapes(w, h));
    const double gamma = 1.1;
    Image x = model.prox_g(z, gamma, y);
    double residual = norm2((x - z) + gamma * model.grad_g(x, y)) / (1.0 + norm2(z));
    double tol = model.kind() == ModelKind::blur_downsample ? 1e-6 : 1e-8;
    check.require(residual <= tol, name + " prox_g optimality residual");
  }

  // Masked-fourier closed form vs CG.
  {
    auto& model = models[1].second;
    Image z = testing::random_image(w, h, 1, 95, 0.0, 255.0);
    auto y = add_awgn(model.apply(testing::phantom_mixed(w, h)), NoiseSpec{2.0, 96});
    Image closed = model.prox_g(z, 0.9, y);
    Image cg = prox_g_via_cg(model, z, 0.9, y, 1e-12, 2000);
    check.require(norm2(closed - cg) <= 1e-8 * std::max(1.0, norm2(closed)),
                  "fourier prox closed form vs CG <= 1e-8");
  }

  // Momentum schedule values by direct evaluation of the recurrence.
  {
    double q1 = fista_next_q(1.0);
    double q2 = fista_next_q(q1);
    check.require(std::abs(q1 - 0.5 * (1.0 + std::sqrt(5.0))) <= 1e-12,
                  "q1 = (1+sqrt(5))/2");
    check.require(std::abs(q2 - 0.5 * (1.0 + std::sqrt(7.0 + 2.0 * std::sqrt(5.0)))) <=
                      1e-12,
                  "q2 = (1+sqrt(7+2sqrt(5)))/2 = 2.19352709...");
  }

  // File format round trips.
  {
    Image img = testing::random_image(9, 5, 2, 97, -1e6, 1e6);
    auto bytes = encode_imgf64(img);
    Image back = decode_imgf64(bytes.data(), bytes.size());
    check.require(std::memcmp(back.data.data(), img.data.data(), img.size() * 8) == 0,
                  "IMGF64 round trip bit-exact");

    Image quantized(2, 2, 1, {0.0, 127.0, 128.0, 255.0});
    auto tmp = std::filesystem::temp_directory_path() / "pnp_acceptance_rt.pgm";
    write_pgm(quantized, tmp.string());
    Image pgm_back = read_pgm(tmp.string());
    check.require(pgm_back.data == quantized.data, "PGM integer round trip exact");
  }

  // External identity denoiser round trip, bitwise.
  {
    Image z = testing::random_image(16, 16, 1, 98, 0.0, 255.0);
    Image out = external_denoise({"/bin/cat"}, z, 30.0);
    check.require(out.data == z.data, "external /bin/cat round trip bitwise");
  }
  return check;
}

// ---------------------------------------------------------------------------
// Criterion 7: desk-scale end-to-end reconstruction, 64x64 masked Fourier at
// rate ~1/3 and 30 dB input with a swept TV prior, beats the adjoint
// baseline by >= 3 dB.
Check criterion7() {
  Check check;
  const int w = 64, h = 64;
  auto model = ForwardModel::masked_fourier(make_radial_mask(w, h, 1.0 / 3.0));
  Image truth = testing::phantom_shapes(w, h);
  auto problem = simulate_problem(truth, model, 30.0, 29);

  double baseline = snr_db(truth, model.adjoint(problem.y));

  SweepSpec spec;
  spec.parameter = SweepParameter::mu;
  spec.grid = log_spaced_grid(std::pow(10.0, -1.5), std::pow(10.0, 0.5), 15);
  spec.algorithm = Algorithm::fista;
  spec.config.gamma = 1.0;
  spec.config.max_iters = 400;
  spec.config.fp_tol = 1e-6;

  auto base = make_tv_prox_denoiser({1.0, 250, 1e-9});
  auto curve = sweep(model, problem.y, truth, base, spec);
  check.require(curve.best.has_value(), "sweep produced a best point");
  if (curve.best) {
    const auto& best = curve.points[*curve.best];
    std::ostringstream s;
    s << "baseline " << baseline << " dB, best " << best.snr_db << " dB at mu "
      << best.param;
    check.note(s.str());
    check.require(best.snr_db >= baseline + 3.0, "gain over adjoint baseline >= 3 dB");
  }
  return check;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);
  }

  struct Criterion {
    int id;
    const char* description;
    std::function<Check()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "TV denoiser scaling equals direct regularization tuning", criterion1},
      {2, "scaled MMSE denoiser solves the transformed estimation problem", criterion2},
      {3, "consensus residuals vanish at converged fixed points", criterion3},
      {4, "ADMM / ISTA / FISTA share fixed points", criterion4},
      {5, "mu-sweep repairs mismatched denoisers by >= 0.5 dB", criterion5},
      {6, "infrastructure: adjoints, gradients, proxes, formats, momentum", criterion6},
      {7, "end-to-end Fourier reconstruction beats adjoint baseline by >= 3 dB",
       criterion7},
  };

  bool all_ok = true;
  for (const auto& criterion : criteria) {
    if (only != 0 && criterion.id != only) continue;
    auto start = std::chrono::steady_clock::now();
    Check check;
    try {
      check = criterion.run();
    } catch (const std::exception& e) {
      check.ok = false;
      check.note(std::string("exception: ") + e.what());
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (check.ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.id
              << ": " << criterion.description;
    std::string detail = check.detail.str();
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << " [" << seconds << " s]" << std::endl;
    all_ok = all_ok && check.ok;
  }
  return all_ok ? 0 : 1;
}
