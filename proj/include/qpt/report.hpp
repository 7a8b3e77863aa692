// Study pipelines and report artifacts: the damping-channel bar-figure
// study (maximum likelihood vs linear inversion vs truth), reconstruction
// reports with the baseline attached, and the SVG renderer.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpt/reconstruct.hpp"
#include "qpt/serialize.hpp"

namespace qpt {

struct ReconstructionReport {
  ReconstructionResult maxlik;
  SuperoperatorG linear;
  double linear_psd_margin = 0.0;
  double linear_tp_residual = 0.0;
  double linear_log_likelihood = 0.0;
};

// Maximum-likelihood reconstruction plus the unconstrained baseline on the
// same frequency table.
ReconstructionReport reconstruct_with_baseline(const FrequencyTable& freqs,
                                               const ExperimentDesign& design,
                                               const SolverConfig& cfg = {});

Json reconstruction_report_to_json(const ReconstructionReport& report);

struct StudyConfig {
  DampingParams channel{0.5, 0.75};
  std::int64_t shots = 20;
  std::int64_t trials = 1;
  std::uint64_t seed = 42;
  bool exact = false;  // use exact frequencies instead of sampling
  SolverConfig solver;
};

struct TrialResult {
  std::vector<double> maxlik_params;  // 12-parameter vectors
  std::vector<double> linear_params;
  double maxlik_log_likelihood = 0.0;
  double truth_log_likelihood = 0.0;
  double projected_linear_log_likelihood = 0.0;
  double maxlik_psd_margin = 0.0;
  double maxlik_tp_residual = 0.0;
  double linear_psd_margin = 0.0;
  double linear_tp_residual = 0.0;
  double lambda_trace = 0.0;
  double closure_residual = 0.0;
  double max_renormalized_gap = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
};

struct FigureReport {
  std::vector<std::string> param_names;
  std::vector<double> truth;
  std::vector<TrialResult> trials;
  std::vector<double> mean_abs_error_maxlik;  // per parameter, over trials
  std::vector<double> mean_abs_error_linear;
  double linear_unphysical_fraction = 0.0;  // psd margin < -1e-6
  std::int64_t converged_count = 0;
};

// Runs the damping-channel study on the qubit fixtures: per trial simulate
// counts (seed + trial index), reconstruct both ways, collect the
// 12-parameter comparison. Trials run concurrently; results are ordered by
// trial index.
FigureReport run_figure_study(const StudyConfig& cfg);

Json figure_report_to_json(const FigureReport& report, const StudyConfig& cfg);

// columns: param_name, maxlik, linear, truth (first trial)
std::string comparison_csv(const FigureReport& report);

// Grouped bar chart: filled black bars for the maximum-likelihood estimate,
// grey for linear inversion, hollow outline for the true values.
std::string figure_svg(const FigureReport& report);

}  // namespace qpt
