#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qpt/reconstruct.hpp"
#include "qpt/report.hpp"

using namespace qpt;

namespace {

ExperimentDesign single_setting_design() {
  const QubitFixtures fx = qubit_fixtures();
  ExperimentDesign design;
  design.inputs = {fx.inputs[4]};  // up_z
  design.povms = {fx.povms[2]};    // z axis
  design.settings = {MeasurementSetting{0, 0}};
  return design;
}

// Unconstrained two-stage baseline solved entry by entry in complex
// arithmetic; independent route against the real-parameterized solver.
SuperoperatorG linear_inversion_complex_ls(const FrequencyTable& freqs,
                                           const ExperimentDesign& design) {
  const Index n = design.dim();
  const Matrix sigmas[3] = {pauli_x(), pauli_y(), pauli_z()};

  std::vector<Matrix> estimates;
  std::vector<const Matrix*> inputs;
  for (std::size_t i = 0; i < design.inputs.size(); ++i) {
    Matrix est = Matrix::Identity(2, 2) / 2.0;
    for (std::size_t s = 0; s < design.settings.size(); ++s) {
      if (design.settings[s].input_index != i) continue;
      const std::size_t axis = design.settings[s].povm_index;
      const double mass = freqs.f[s][0] + freqs.f[s][1];
      const double mean = (freqs.f[s][0] - freqs.f[s][1]) / mass;
      est += 0.5 * mean * sigmas[axis];
    }
    estimates.push_back(est);
    inputs.push_back(&design.inputs[i].mat);
  }

  Matrix a(static_cast<Index>(inputs.size()), n * n);
  for (Index r = 0; r < a.rows(); ++r)
    for (Index k = 0; k < n; ++k)
      for (Index l = 0; l < n; ++l)
        a(r, k * n + l) = (*inputs[static_cast<std::size_t>(r)])(k, l);

  SuperoperatorG g = SuperoperatorG::zero(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Vector y(a.rows());
      for (Index r = 0; r < a.rows(); ++r)
        y(r) = estimates[static_cast<std::size_t>(r)](i, j);
      const Vector row = a.colPivHouseholderQr().solve(y);
      for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < n; ++l) g.g(i, j, k, l) = row(k * n + l);
    }
  }
  return g;
}

}  // namespace

TEST_CASE("log likelihood") {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG damping = damping_channel({0.5, 0.75});

  // a single deterministic setting with all frequency on its outcome
  FrequencyTable one;
  one.f = {{1.0, 0.0}};
  CHECK(log_likelihood(identity_channel(2), one, single_setting_design()) == 0.0);

  // independent per-term resummation
  const FrequencyTable exact = exact_frequencies(damping, design);
  const double ll = log_likelihood(damping, exact, design);
  CHECK(ll < 0.0);
  CHECK(std::abs(ll - oracles::loglik_loops(damping, exact, design, 1e-12)) <
        1e-12);

  // the generating channel dominates any other model on its own exact data
  SplitMix64 rng{11};
  for (int t = 0; t < 20; ++t) {
    const SuperoperatorG other = oracles::random_channel(2, 4, rng);
    CHECK(log_likelihood(other, exact, design) <= ll + 1e-12);
  }

  // at the generating channel, f = p / #settings, so the value is the
  // negative entropy of the frequency table shifted by ln(#settings)
  long double neg_entropy = 0.0L;
  for (const auto& row : exact.f)
    for (double v : row)
      if (v > 0.0) neg_entropy += static_cast<long double>(v) * std::log(v);
  CHECK(ll == doctest::Approx(static_cast<double>(neg_entropy) + std::log(18.0))
                  .epsilon(1e-12));
}

TEST_CASE("lambda_update") {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG damping = damping_channel({0.5, 0.75});
  const FrequencyTable exact = exact_frequencies(damping, design);

  const LagrangeMatrix at_truth = lambda_update(damping, exact, design);
  CHECK(std::abs(at_truth.trace() - 1.0) < 1e-12);
  CHECK(hermiticity_defect(at_truth.lam) < 1e-14);
  CHECK(at_truth.hermiticity_defect < 1e-12);

  // symmetric damping data give a real, diagonally dominant multiplier
  CHECK(std::abs(at_truth.lam(0, 1).imag()) < 1e-14);
  CHECK(at_truth.lam(0, 0).real() > std::abs(at_truth.lam(0, 1)));
  CHECK(at_truth.lam(1, 1).real() > std::abs(at_truth.lam(1, 0)));

  // oracle loops, raw and hermitized
  SplitMix64 rng{303};
  for (int t = 0; t < 30; ++t) {
    const SuperoperatorG g = oracles::random_channel(2, 4, rng);
    const FrequencyTable f = oracles::random_frequencies(design, rng);
    const Matrix naive = oracles::lambda_loops(g, f, design, 1e-12);
    const LagrangeMatrix lam = lambda_update(g, f, design);
    CHECK(max_abs(lam.raw - naive) < 1e-12);
    CHECK(max_abs(lam.lam - hermitized(naive)) < 1e-12);
    CHECK(std::abs(lam.trace() - 1.0) < 1e-10);  // tr lambda = total frequency mass
  }

  // a single rank-one setting cannot determine the multiplier
  FrequencyTable one;
  one.f = {{1.0, 0.0}};
  CHECK_THROWS_AS(lambda_update(identity_channel(2), one, single_setting_design()),
                  DegenerateDataError);
}

TEST_CASE("g_update matches the nested-loop evaluation") {
  const ExperimentDesign design = qubit_fixture_design();
  SplitMix64 rng{404};
  for (int t = 0; t < 30; ++t) {
    const SuperoperatorG g = oracles::random_channel(2, 4, rng);
    const FrequencyTable f = oracles::random_frequencies(design, rng);
    const LagrangeMatrix lam = lambda_update(g, f, design);
    const SuperoperatorG stepped = g_update(g, lam, f, design);
    const SuperoperatorG naive = oracles::g_update_loops(
        g, oracles::lambda_loops(g, f, design, 1e-12).inverse(), f, design, 1e-12);
    CHECK(max_abs(stepped.mat - naive.mat) < 1e-12);
  }
}

TEST_CASE("g_update preserves trace preservation for any data") {
  const ExperimentDesign design = qubit_fixture_design();
  SplitMix64 rng{505};
  for (int t = 0; t < 50; ++t) {
    const SuperoperatorG g = oracles::random_channel(2, 4, rng);
    const FrequencyTable f = oracles::random_frequencies(design, rng);
    const SuperoperatorG stepped = g_update(g, lambda_update(g, f, design), f, design);
    CHECK(tp_residual(stepped) <= 1e-9);
    CHECK(hermiticity_defect(stepped.mat) < 1e-14);
  }
}

TEST_CASE("g_update fixed points") {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG truth = damping_channel({0.5, 0.75});
  const FrequencyTable exact = exact_frequencies(truth, design);

  // the generating channel is already extremal on its own exact data
  const SuperoperatorG stepped =
      g_update(truth, lambda_update(truth, exact, design), exact, design);
  CHECK(max_abs(stepped.mat - truth.mat) < 1e-9);

  // a converged estimate is idempotent under the update
  const ReconstructionResult r = maxlik_reconstruct(exact, design, {});
  const SuperoperatorG again =
      g_update(r.g_hat, lambda_update(r.g_hat, exact, design), exact, design);
  CHECK(max_abs(again.mat - r.g_hat.mat) < 1e-9);

  LagrangeMatrix singular;
  singular.lam = Matrix::Zero(2, 2);
  singular.raw = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(g_update(truth, singular, exact, design), NumericalError);
}

TEST_CASE("maxlik reconstructs exact damping frequencies") {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG truth = damping_channel({0.5, 0.75});
  const ReconstructionResult r =
      maxlik_reconstruct(exact_frequencies(truth, design), design, {});

  CHECK(r.converged);
  CHECK(max_abs(r.g_hat.mat - truth.mat) < 1e-6);
  CHECK(max_abs(r.chi_hat.mat - r.g_hat.mat) == 0.0);
  CHECK(r.diagnostics.tp_residual <= 1e-8);
  CHECK(r.diagnostics.psd_margin >= -1e-10);
  CHECK(std::abs(r.diagnostics.lambda_trace - 1.0) <= 1e-8);
  CHECK(r.diagnostics.lambda_min_eigenvalue > 0.0);
  CHECK(r.diagnostics.design_rank == 16);
  CHECK_FALSE(r.diagnostics.trace.empty());
}

TEST_CASE("maxlik reconstructs the identity channel") {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG id = identity_channel(2);
  const ReconstructionResult r =
      maxlik_reconstruct(exact_frequencies(id, design), design, {});
  CHECK(r.converged);
  CHECK(max_abs(r.g_hat.mat - id.mat) < 1e-6);
}

TEST_CASE("maxlik consistency on random full-rank channels") {
  const ExperimentDesign design = qubit_fixture_design();
  SplitMix64 rng{606};
  for (int t = 0; t < 10; ++t) {
    const SuperoperatorG truth = oracles::random_channel(2, 4, rng);
    const ReconstructionResult r =
        maxlik_reconstruct(exact_frequencies(truth, design), design, {});
    CHECK(max_abs(r.g_hat.mat - truth.mat) < 1e-6);
  }
}

TEST_CASE("maxlik on sampled counts stays physical and dominates") {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG truth = damping_channel({0.5, 0.75});
  for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
    const FrequencyTable freqs =
        frequencies(simulate_counts(truth, design, 20, seed));
    const ReconstructionResult r = maxlik_reconstruct(freqs, design, {});

    CHECK(r.diagnostics.psd_margin >= -1e-8);
    CHECK(r.diagnostics.tp_residual <= 1e-8);
    CHECK(std::abs(r.diagnostics.lambda_trace - 1.0) <= 1e-8);

    const double ll_truth = log_likelihood(truth, freqs, design);
    CHECK(r.log_likelihood >= ll_truth - 1e-9);

    const SuperoperatorG li = linear_inversion(freqs, design);
    const SuperoperatorG projected =
        chi_to_g(physicality_projection(g_to_chi(li)), standard_basis(2));
    CHECK(r.log_likelihood >=
          log_likelihood(projected, freqs, design) - 1e-9);
  }
}

TEST_CASE("maxlik is invariant under frequency rescaling") {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG truth = damping_channel({0.5, 0.75});
  const FrequencyTable freqs =
      frequencies(simulate_counts(truth, design, 20, 77));
  FrequencyTable scaled = freqs;
  for (auto& row : scaled.f)
    for (double& v : row) v *= 360.0;  // raw counts instead of frequencies

  const ReconstructionResult a = maxlik_reconstruct(freqs, design, {});
  const ReconstructionResult b = maxlik_reconstruct(scaled, design, {});
  CHECK(max_abs(a.g_hat.mat - b.g_hat.mat) < 1e-12);
}

TEST_CASE("closure residual") {
  const ExperimentDesign design = qubit_fixture_design();

  // Interior channel: every outcome has positive probability, so the
  // renormalized effects resolve the identity at the generating channel
  // and at the converged estimate.
  const SuperoperatorG depol = depolarizing_channel(0.3, 2);
  const FrequencyTable exact_depol = exact_frequencies(depol, design);
  CHECK(closure_residual(depol, exact_depol, design) < 1e-12);
  const ReconstructionResult r = maxlik_reconstruct(exact_depol, design, {});
  CHECK(r.diagnostics.closure_residual <= 1e-4);

  // The damping family pins the ground state, so the up_z outcome of the
  // down_z input never occurs; its effect is missing from the closure sum
  // and the residual equals its weight, 1/18, even at the exact optimum.
  const SuperoperatorG damping = damping_channel({0.5, 0.75});
  const FrequencyTable exact_damp = exact_frequencies(damping, design);
  CHECK(closure_residual(damping, exact_damp, design) ==
        doctest::Approx(1.0 / 18.0).epsilon(1e-12));

  // sampled data: reported, value depends on the draw
  const FrequencyTable sampled =
      frequencies(simulate_counts(damping, design, 20, 5));
  CHECK(closure_residual(damping, sampled, design) >= 0.0);
}

TEST_CASE("renormalized povm gap vanishes identically") {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG damping = damping_channel({0.5, 0.75});

  const FrequencyTable exact = exact_frequencies(damping, design);
  for (double gap : renormalized_povm_gap(identity_channel(2),
                                          exact_frequencies(identity_channel(2),
                                                            design),
                                          design)) {
    CHECK(std::abs(gap) <= 1e-12);
  }
  const FrequencyTable sampled =
      frequencies(simulate_counts(damping, design, 20, 21));
  const ReconstructionResult r = maxlik_reconstruct(sampled, design, {});
  for (double gap : renormalized_povm_gap(r.g_hat, sampled, design)) {
    CHECK(std::abs(gap) <= 1e-12);
  }
  SplitMix64 rng{707};
  const SuperoperatorG g = oracles::random_channel(2, 4, rng);
  for (double gap : renormalized_povm_gap(g, oracles::random_frequencies(design, rng),
                                          design)) {
    CHECK(std::abs(gap) <= 1e-12);
  }
}

TEST_CASE("physicality projection") {
  const OperatorBasis basis = standard_basis(2);

  // already physical: unchanged up to clipping noise
  const ChiMatrix good = g_to_chi(damping_channel({0.5, 0.75}));
  const ChiMatrix same = physicality_projection(good, 1e-8);
  CHECK(max_abs(same.mat - good.mat) < 1e-8);

  // sub-tolerance negative eigenvalue: clipped, trace preservation intact
  Eigen::SelfAdjointEigenSolver<Matrix> es(good.mat);
  RealVector eigs = es.eigenvalues();
  eigs(0) = -1e-13;
  const ChiMatrix nudged{2, hermitized(es.eigenvectors() * eigs.asDiagonal() *
                                       es.eigenvectors().adjoint())};
  const ChiMatrix clipped = physicality_projection(nudged, 1e-8);
  CHECK(psd_margin(clipped) >= -1e-15);
  CHECK(tp_residual(chi_to_g(clipped, basis)) <
        tp_residual(chi_to_g(nudged, basis)) + 1e-10);

  // inflated coherence breaks positivity; projection restores both
  // constraints
  ChiMatrix broken = g_to_chi(damping_channel({0.5, 0.75}));
  broken.mat(0, 3) = 0.9;
  broken.mat(3, 0) = 0.9;
  CHECK(psd_margin(broken) < -1e-3);
  const ChiMatrix repaired = physicality_projection(broken, 1e-8);
  CHECK(psd_margin(repaired) >= -1e-12);
  CHECK(max_abs(trace_map(repaired, basis) - Matrix::Identity(2, 2)) <= 1e-9);
  CHECK(tp_residual(chi_to_g(repaired, basis)) <= 1e-9);

  // a channel that annihilates part of the space cannot be renormalized
  Matrix dead = Matrix::Zero(4, 4);
  dead(0, 0) = 1.0;
  dead(3, 3) = -0.1;
  CHECK_THROWS_AS(physicality_projection(ChiMatrix{2, dead}, 1e-8),
                  NonInvertibleNormalizationError);
}

TEST_CASE("linear inversion recovers exact frequencies") {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG truth = damping_channel({0.5, 0.75});
  const SuperoperatorG li =
      linear_inversion(exact_frequencies(truth, design), design);
  CHECK(max_abs(li.mat - truth.mat) < 1e-10);

  SplitMix64 rng{808};
  for (int t = 0; t < 10; ++t) {
    const SuperoperatorG g = oracles::random_channel(2, 4, rng);
    const SuperoperatorG rec =
        linear_inversion(exact_frequencies(g, design), design);
    CHECK(max_abs(rec.mat - g.mat) < 1e-10);
  }
}

TEST_CASE("linear inversion on sampled data") {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG truth = damping_channel({0.5, 0.75});

  int unphysical = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const FrequencyTable freqs =
        frequencies(simulate_counts(truth, design, 20, seed));
    const SuperoperatorG li = linear_inversion(freqs, design);

    // trace preservation is built into the normal equations
    CHECK(tp_residual(li) <= 1e-10);
    CHECK(hermiticity_defect(li.mat) < 1e-12);

    // independent complex least-squares route
    const SuperoperatorG ref = linear_inversion_complex_ls(freqs, design);
    CHECK(max_abs(li.mat - ref.mat) < 1e-10);

    if (psd_margin(g_to_chi(li)) < -1e-6) ++unphysical;
  }
  // at 20 shots the unconstrained estimate routinely leaves the CP cone
  CHECK(unphysical >= 1);
}

TEST_CASE("linear inversion rejects rank-deficient designs") {
  const QubitFixtures fx = qubit_fixtures();
  ExperimentDesign design;
  design.inputs = {fx.inputs[4], fx.inputs[5]};
  design.povms = {fx.povms[2]};  // z axis only
  design.settings = {MeasurementSetting{0, 0}, MeasurementSetting{1, 0}};
  const FrequencyTable freqs =
      exact_frequencies(identity_channel(2), design);
  CHECK_THROWS_AS(linear_inversion(freqs, design), DegenerateDataError);
}

TEST_CASE("design rank of the fixtures is full") {
  CHECK(design_rank(qubit_fixture_design()) == 16);
}

TEST_CASE("figure study collects per-trial dominance data") {
  StudyConfig cfg;
  cfg.shots = 20;
  cfg.trials = 4;
  cfg.seed = 99;
  const FigureReport report = run_figure_study(cfg);
  REQUIRE(report.trials.size() == 4);
  for (const TrialResult& t : report.trials) {
    CHECK(t.converged);
    CHECK(t.maxlik_psd_margin >= -1e-8);
    CHECK(t.maxlik_tp_residual <= 1e-8);
    CHECK(t.maxlik_log_likelihood >= t.truth_log_likelihood - 1e-9);
    CHECK(t.maxlik_log_likelihood >= t.projected_linear_log_likelihood - 1e-9);
    CHECK(t.max_renormalized_gap <= 1e-12);
  }
  // deterministic across runs
  const FigureReport again = run_figure_study(cfg);
  CHECK(figure_report_to_json(report, cfg) == figure_report_to_json(again, cfg));
}
