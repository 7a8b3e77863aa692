// Acceptance suite: runs each release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qpt/report.hpp"
#include "qpt/serialize.hpp"

using namespace qpt;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("%s  criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::vector<double> truth_params() {
  return {1.0, 1.0 - std::exp(-0.5), 0, 0, 0, 0, 0, 0, std::exp(-0.75), 0, 0, 0};
}

void criterion1_noiseless_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG truth = damping_channel({0.5, 0.75});
  const ReconstructionResult r =
      maxlik_reconstruct(exact_frequencies(truth, design), design, {});
  const std::vector<double> expected = truth_params();
  const QubitParamVector pv = g_to_param_vector(r.g_hat);
  double err = 0.0;
  for (int p = 0; p < 12; ++p)
    err = std::max(err, std::abs(pv.values(p) - expected[static_cast<std::size_t>(p)]));
  const double secs = elapsed_s(t0);
  report(1, err <= 1e-5 && secs < 10.0, "noiseless consistency",
         "max param error " + fmt("%.2e", err) + " <= 1e-5, " +
             fmt("%.2f", secs) + " s");
}

void criterion2_linear_inversion_exactness() {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG truth = damping_channel({0.5, 0.75});
  const SuperoperatorG li =
      linear_inversion(exact_frequencies(truth, design), design);
  const double err = max_abs(li.mat - truth.mat);
  report(2, err <= 1e-10, "linear-inversion exactness",
         "max element error " + fmt("%.2e", err) + " <= 1e-10");
}

FigureReport study_200;

void criterion3_sampled_regime() {
  const auto t0 = std::chrono::steady_clock::now();
  StudyConfig cfg;
  cfg.shots = 20;
  cfg.trials = 200;
  cfg.seed = 20000;
  study_200 = run_figure_study(cfg);

  bool physical = true, dominant = true;
  double worst_psd = 0.0, worst_tp = 0.0, worst_gap_truth = 1e300,
         worst_gap_li = 1e300;
  for (const TrialResult& t : study_200.trials) {
    worst_psd = std::min(worst_psd, t.maxlik_psd_margin);
    worst_tp = std::max(worst_tp, t.maxlik_tp_residual);
    if (t.maxlik_psd_margin < -1e-8 || t.maxlik_tp_residual > 1e-8)
      physical = false;
    const double d_truth = t.maxlik_log_likelihood - t.truth_log_likelihood;
    const double d_li =
        t.maxlik_log_likelihood - t.projected_linear_log_likelihood;
    worst_gap_truth = std::min(worst_gap_truth, d_truth);
    worst_gap_li = std::min(worst_gap_li, d_li);
    if (d_truth < -1e-9 || d_li < -1e-9) dominant = false;
  }
  const double secs = elapsed_s(t0);
  report(3, physical && dominant && secs < 300.0,
         "sampled 20-shot regime over 200 trials",
         "min psd margin " + fmt("%.2e", worst_psd) + ", max tp " +
             fmt("%.2e", worst_tp) + ", min loglik lead over truth " +
             fmt("%.2e", worst_gap_truth) + ", over projected baseline " +
             fmt("%.2e", worst_gap_li) + ", raw baseline unphysical in " +
             fmt("%.0f", study_200.linear_unphysical_fraction * 100.0) +
             "% of trials [reported], " + fmt("%.1f", secs) + " s");
}

void criterion4_fixed_point_identities() {
  bool trace_ok = true, gap_ok = true;
  double worst_trace = 0.0, worst_closure = 0.0, worst_gap = 0.0;
  std::int64_t closure_ok_count = 0, converged = 0;
  for (const TrialResult& t : study_200.trials) {
    worst_gap = std::max(worst_gap, t.max_renormalized_gap);
    if (t.max_renormalized_gap > 1e-12) gap_ok = false;
    if (!t.converged) continue;
    ++converged;
    worst_trace = std::max(worst_trace, std::abs(t.lambda_trace - 1.0));
    worst_closure = std::max(worst_closure, t.closure_residual);
    if (std::abs(t.lambda_trace - 1.0) > 1e-8) trace_ok = false;
    if (t.closure_residual <= 1e-4) ++closure_ok_count;
  }
  const bool closure_ok = closure_ok_count == converged;
  report(4, trace_ok && closure_ok && gap_ok, "fixed-point identities",
         "converged " + std::to_string(converged) + "/200, max |tr lambda - 1| " +
             fmt("%.2e", worst_trace) + " <= 1e-8, max renormalized gap " +
             fmt("%.2e", worst_gap) + " <= 1e-12, closure residual <= 1e-4 in " +
             std::to_string(closure_ok_count) + "/" + std::to_string(converged) +
             " trials, max " + fmt("%.2e", worst_closure) +
             "; the 20-shot maximum sits on the CP boundary, where the "
             "closure relation holds only on the support of the estimate");
}

void criterion5_oracle_equivalence() {
  const ExperimentDesign design = qubit_fixture_design();
  SplitMix64 rng{31337};
  double worst_update = 0.0;
  for (int t = 0; t < 100; ++t) {
    const SuperoperatorG g = oracles::random_channel(2, 4, rng);
    const FrequencyTable f = oracles::random_frequencies(design, rng);
    const Matrix lam_naive = oracles::lambda_loops(g, f, design, 1e-12);
    const LagrangeMatrix lam = lambda_update(g, f, design);
    worst_update = std::max(worst_update, max_abs(lam.raw - lam_naive));
    const SuperoperatorG stepped = g_update(g, lam, f, design);
    const SuperoperatorG naive =
        oracles::g_update_loops(g, lam_naive.inverse(), f, design, 1e-12);
    worst_update = std::max(worst_update, max_abs(stepped.mat - naive.mat));
  }

  double worst_apply = 0.0;
  const OperatorBasis basis = standard_basis(2);
  for (int t = 0; t < 100; ++t) {
    const KrausSet kraus = oracles::random_kraus(2, 4, rng);
    const ChiMatrix chi = chi_from_kraus(kraus);
    const SuperoperatorG g = chi_to_g(chi, basis);
    const DensityMatrix rho = oracles::random_density(2, rng);
    const Matrix via_g = apply_channel(g, rho).mat;
    worst_apply = std::max(
        worst_apply, max_abs(via_g - apply_channel_chi(chi, basis, rho).mat));
    worst_apply =
        std::max(worst_apply, max_abs(via_g - apply_kraus(kraus, rho).mat));
  }
  report(5, worst_update <= 1e-12 && worst_apply <= 1e-10, "oracle equivalence",
         "update rules vs nested loops " + fmt("%.2e", worst_update) +
             " <= 1e-12 on 100 instances, channel application routes " +
             fmt("%.2e", worst_apply) + " <= 1e-10 on 100 channels");
}

void criterion6_statistical_convergence() {
  const ExperimentDesign design = qubit_fixture_design();
  const SuperoperatorG truth = damping_channel({0.5, 0.75});
  const Dataset data = simulate_counts(truth, design, 1000000, 99);
  const ReconstructionResult r =
      maxlik_reconstruct(frequencies(data), design, {});
  const double err = max_abs(r.g_hat.mat - truth.mat);
  report(6, err <= 0.01, "statistical convergence at 1e6 shots per setting",
         "max element error " + fmt("%.2e", err) + " <= 0.01");
}

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(QPT_CLI_PATH) + " " + args + " > /dev/null 2> /dev/null";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

void criterion7_determinism() {
  const fs::path dir = fs::path("acceptance_scratch");
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto p = [&](const std::string& name) { return (dir / name).string(); };

  bool ok = true;
  std::string detail;
  if (run_cli("demo --shots 20 --trials 3 --seed 7 --out " + p("a")) != 0 ||
      run_cli("demo --shots 20 --trials 3 --seed 7 --out " + p("b")) != 0) {
    ok = false;
    detail = "demo run failed";
  } else {
    for (const char* suffix : {"_report.json", "_comparison.csv", "_figure.svg"}) {
      if (read_text_file(p(std::string("a") + suffix)) !=
          read_text_file(p(std::string("b") + suffix))) {
        ok = false;
        detail = std::string("demo outputs differ: ") + suffix;
      }
    }
  }

  if (ok) {
    if (run_cli("simulate --channel damping --params 0.5,0.75 --shots 20 "
                "--seed 7 --out " + p("d1.json")) != 0) {
      ok = false;
      detail = "simulate failed";
    } else {
      const std::string original = read_text_file(p("d1.json"));
      const Dataset parsed = dataset_from_json(Json::parse(original));
      const std::string rewritten = dataset_to_json(parsed).dump(2) + "\n";
      if (rewritten != original) {
        ok = false;
        detail = "dataset write-read-write changed bytes";
      }
    }
  }
  if (ok) detail = "demo outputs byte-identical, dataset roundtrip byte-identical";
  report(7, ok, "determinism and interface", detail);
}

}  // namespace

int main() {
  criterion1_noiseless_consistency();
  criterion2_linear_inversion_exactness();
  criterion3_sampled_regime();
  criterion4_fixed_point_identities();
  criterion5_oracle_equivalence();
  criterion6_statistical_convergence();
  criterion7_determinism();
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
