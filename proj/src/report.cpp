#include "qpt/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

namespace qpt {

namespace {

std::vector<double> param_vector_values(const SuperoperatorG& g) {
  const QubitParamVector pv = g_to_param_vector(g);
  return std::vector<double>(pv.values.data(), pv.values.data() + 12);
}

std::string fmt(double v, const char* format = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

}  // namespace

ReconstructionReport reconstruct_with_baseline(const FrequencyTable& freqs,
                                               const ExperimentDesign& design,
                                               const SolverConfig& cfg) {
  ReconstructionReport report;
  report.maxlik = maxlik_reconstruct(freqs, design, cfg);
  report.linear = linear_inversion(freqs, design);
  report.linear_psd_margin = psd_margin(g_to_chi(report.linear));
  report.linear_tp_residual = tp_residual(report.linear);
  report.linear_log_likelihood =
      log_likelihood(report.linear, freqs, design, cfg.prob_floor);
  return report;
}

Json reconstruction_report_to_json(const ReconstructionReport& report) {
  const ReconstructionResult& ml = report.maxlik;
  Json trace = Json::array();
  for (const TraceRow& row : ml.diagnostics.trace) {
    trace.push_back(Json::array({row.iteration, row.log_likelihood,
                                 row.tp_residual, row.psd_margin,
                                 row.closure_residual}));
  }
  Json maxlik{{"g", g_to_json(ml.g_hat)},
              {"chi", chi_to_json(ml.chi_hat)},
              {"lambda", matrix_to_json(ml.lambda.lam)},
              {"log_likelihood", ml.log_likelihood},
              {"iterations", ml.iterations},
              {"converged", ml.converged},
              {"diagnostics",
               Json{{"closure_residual", ml.diagnostics.closure_residual},
                    {"tp_residual", ml.diagnostics.tp_residual},
                    {"psd_margin", ml.diagnostics.psd_margin},
                    {"lambda_trace", ml.diagnostics.lambda_trace},
                    {"lambda_min_eigenvalue", ml.diagnostics.lambda_min_eigenvalue},
                    {"lambda_hermiticity_defect",
                     ml.diagnostics.lambda_hermiticity_defect},
                    {"projection_count", ml.diagnostics.projection_count},
                    {"design_rank", ml.diagnostics.design_rank},
                    {"trace", std::move(trace)}}}};
  Json linear{{"g", g_to_json(report.linear)},
              {"chi", chi_to_json(g_to_chi(report.linear))},
              {"psd_margin", report.linear_psd_margin},
              {"tp_residual", report.linear_tp_residual},
              {"log_likelihood", report.linear_log_likelihood}};
  if (ml.g_hat.dim == 2) {
    maxlik["param_vector"] = param_vector_values(ml.g_hat);
    linear["param_vector"] = param_vector_values(report.linear);
  }
  return Json{{"kind", "reconstruction_result"},
              {"maxlik", std::move(maxlik)},
              {"linear_inversion", std::move(linear)}};
}

namespace {

TrialResult run_trial(const StudyConfig& cfg, const SuperoperatorG& truth,
                      const ExperimentDesign& design, std::int64_t trial) {
  const FrequencyTable freqs =
      cfg.exact ? exact_frequencies(truth, design)
                : frequencies(simulate_counts(
                      truth, design, cfg.shots,
                      cfg.seed + static_cast<std::uint64_t>(trial)));

  TrialResult out;
  const ReconstructionResult ml = maxlik_reconstruct(freqs, design, cfg.solver);
  const SuperoperatorG li = linear_inversion(freqs, design);

  out.maxlik_params = param_vector_values(ml.g_hat);
  out.linear_params = param_vector_values(li);
  out.maxlik_log_likelihood = ml.log_likelihood;
  out.truth_log_likelihood =
      log_likelihood(truth, freqs, design, cfg.solver.prob_floor);
  const SuperoperatorG projected = chi_to_g(
      physicality_projection(g_to_chi(li)), standard_basis(design.dim()));
  out.projected_linear_log_likelihood =
      log_likelihood(projected, freqs, design, cfg.solver.prob_floor);
  out.maxlik_psd_margin = ml.diagnostics.psd_margin;
  out.maxlik_tp_residual = ml.diagnostics.tp_residual;
  out.linear_psd_margin = psd_margin(g_to_chi(li));
  out.linear_tp_residual = tp_residual(li);
  out.lambda_trace = ml.diagnostics.lambda_trace;
  out.closure_residual = ml.diagnostics.closure_residual;
  double gap = 0.0;
  for (double v : renormalized_povm_gap(ml.g_hat, freqs, design,
                                        cfg.solver.prob_floor)) {
    gap = std::max(gap, std::abs(v));
  }
  out.max_renormalized_gap = gap;
  out.iterations = ml.iterations;
  out.converged = ml.converged;
  return out;
}

}  // namespace

FigureReport run_figure_study(const StudyConfig& cfg) {
  if (cfg.shots < 1 || cfg.trials < 1) {
    throw InvalidArgumentError("study needs shots >= 1 and trials >= 1");
  }
  const SuperoperatorG truth = damping_channel(cfg.channel);
  const ExperimentDesign design = qubit_fixture_design();
  const std::int64_t trials = cfg.exact ? 1 : cfg.trials;

  FigureReport report;
  const auto& names = qubit_param_names();
  report.param_names.assign(names.begin(), names.end());
  report.truth = param_vector_values(truth);
  report.trials.resize(static_cast<std::size_t>(trials));

  std::atomic<std::int64_t> next{0};
  const unsigned workers = std::max(1u, std::min<unsigned>(
      std::thread::hardware_concurrency(), static_cast<unsigned>(trials)));
  auto work = [&] {
    for (std::int64_t t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
      report.trials[static_cast<std::size_t>(t)] = run_trial(cfg, truth, design, t);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }

  report.mean_abs_error_maxlik.assign(12, 0.0);
  report.mean_abs_error_linear.assign(12, 0.0);
  std::int64_t unphysical = 0;
  for (const TrialResult& trial : report.trials) {
    for (std::size_t p = 0; p < 12; ++p) {
      report.mean_abs_error_maxlik[p] +=
          std::abs(trial.maxlik_params[p] - report.truth[p]);
      report.mean_abs_error_linear[p] +=
          std::abs(trial.linear_params[p] - report.truth[p]);
    }
    if (trial.linear_psd_margin < -1e-6) ++unphysical;
    if (trial.converged) ++report.converged_count;
  }
  for (std::size_t p = 0; p < 12; ++p) {
    report.mean_abs_error_maxlik[p] /= static_cast<double>(trials);
    report.mean_abs_error_linear[p] /= static_cast<double>(trials);
  }
  report.linear_unphysical_fraction =
      static_cast<double>(unphysical) / static_cast<double>(trials);
  return report;
}

Json figure_report_to_json(const FigureReport& report, const StudyConfig& cfg) {
  Json trials = Json::array();
  for (const TrialResult& t : report.trials) {
    trials.push_back(
        Json{{"maxlik_params", t.maxlik_params},
             {"linear_params", t.linear_params},
             {"maxlik_log_likelihood", t.maxlik_log_likelihood},
             {"truth_log_likelihood", t.truth_log_likelihood},
             {"projected_linear_log_likelihood", t.projected_linear_log_likelihood},
             {"maxlik_psd_margin", t.maxlik_psd_margin},
             {"maxlik_tp_residual", t.maxlik_tp_residual},
             {"linear_psd_margin", t.linear_psd_margin},
             {"linear_tp_residual", t.linear_tp_residual},
             {"lambda_trace", t.lambda_trace},
             {"closure_residual", t.closure_residual},
             {"max_renormalized_gap", t.max_renormalized_gap},
             {"iterations", t.iterations},
             {"converged", t.converged}});
  }
  return Json{
      {"kind", "figure_report"},
      {"channel",
       Json{{"name", "damping"},
            {"params", Json::array({cfg.channel.gamma_par, cfg.channel.gamma_perp})}}},
      {"shots_per_setting", cfg.shots},
      {"trials", cfg.exact ? std::int64_t{1} : cfg.trials},
      {"seed", cfg.seed},
      {"exact", cfg.exact},
      {"param_names", report.param_names},
      {"truth", report.truth},
      {"first_trial",
       Json{{"maxlik", report.trials.front().maxlik_params},
            {"linear", report.trials.front().linear_params}}},
      {"aggregate",
       Json{{"mean_abs_error_maxlik", report.mean_abs_error_maxlik},
            {"mean_abs_error_linear", report.mean_abs_error_linear},
            {"linear_unphysical_fraction", report.linear_unphysical_fraction},
            {"converged_trials", report.converged_count}}},
      {"trial_details", std::move(trials)}};
}

std::string comparison_csv(const FigureReport& report) {
  std::ostringstream out;
  out << "param_name,maxlik,linear,truth\n";
  const TrialResult& first = report.trials.front();
  for (std::size_t p = 0; p < report.param_names.size(); ++p) {
    out << report.param_names[p] << ',' << format_double(first.maxlik_params[p])
        << ',' << format_double(first.linear_params[p]) << ','
        << format_double(report.truth[p]) << '\n';
  }
  return out.str();
}

std::string figure_svg(const FigureReport& report) {
  const TrialResult& first = report.trials.front();
  const std::size_t groups = report.param_names.size();

  const double bar_w = 14.0, bar_gap = 2.0, group_gap = 16.0;
  const double group_w = 3.0 * bar_w + 2.0 * bar_gap + group_gap;
  const double margin_l = 56.0, margin_r = 16.0, margin_t = 24.0, margin_b = 70.0;
  const double plot_h = 300.0;
  const double width = margin_l + static_cast<double>(groups) * group_w + margin_r;
  const double height = margin_t + plot_h + margin_b;

  double lo = 0.0, hi = 1.0;
  for (std::size_t p = 0; p < groups; ++p) {
    for (double v : {first.maxlik_params[p], first.linear_params[p],
                     report.truth[p]}) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const auto y_of = [&](double v) {
    return margin_t + (hi - v) / (hi - lo) * plot_h;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width)
      << " " << fmt(height) << "\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" fill=\"white\"/>\n";

  // y grid and tick labels every 0.25
  for (double tick = std::ceil(lo / 0.25) * 0.25; tick <= hi + 1e-12;
       tick += 0.25) {
    const double y = y_of(tick);
    svg << "  <line x1=\"" << fmt(margin_l - 4) << "\" y1=\"" << fmt(y)
        << "\" x2=\"" << fmt(width - margin_r) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "  <text x=\"" << fmt(margin_l - 8) << "\" y=\"" << fmt(y + 3)
        << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
        << fmt(tick) << "</text>\n";
  }

  const auto bar = [&](double x, double v, const char* style) {
    if (v == 0.0) return;  // zero values render as missing bars
    const double y0 = y_of(std::max(v, 0.0));
    const double h = std::abs(y_of(0.0) - y_of(v));
    svg << "  <rect x=\"" << fmt(x) << "\" y=\"" << fmt(y0) << "\" width=\""
        << fmt(bar_w) << "\" height=\"" << fmt(h) << "\" " << style << "/>\n";
  };

  for (std::size_t p = 0; p < groups; ++p) {
    const double x0 = margin_l + static_cast<double>(p) * group_w + group_gap / 2.0;
    bar(x0, first.maxlik_params[p], "fill=\"black\"");
    bar(x0 + bar_w + bar_gap, first.linear_params[p], "fill=\"#9a9a9a\"");
    bar(x0 + 2.0 * (bar_w + bar_gap), report.truth[p],
        "fill=\"none\" stroke=\"black\" stroke-width=\"1.2\"");
    const double cx = x0 + 1.5 * bar_w + bar_gap;
    svg << "  <text x=\"" << fmt(cx) << "\" y=\"" << fmt(margin_t + plot_h + 14)
        << "\" font-family=\"sans-serif\" font-size=\"9\" text-anchor=\"end\""
        << " transform=\"rotate(-45 " << fmt(cx) << " "
        << fmt(margin_t + plot_h + 14) << ")\">" << report.param_names[p]
        << "</text>\n";
  }

  // baseline
  svg << "  <line x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(y_of(0.0))
      << "\" x2=\"" << fmt(width - margin_r) << "\" y2=\"" << fmt(y_of(0.0))
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // legend
  const double lx = width - margin_r - 150.0;
  const char* entries[3] = {"max-lik", "linear inversion", "true values"};
  const char* styles[3] = {"fill=\"black\"", "fill=\"#9a9a9a\"",
                           "fill=\"none\" stroke=\"black\" stroke-width=\"1.2\""};
  for (int e = 0; e < 3; ++e) {
    const double ly = margin_t + 4.0 + 14.0 * e;
    svg << "  <rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly)
        << "\" width=\"10\" height=\"10\" " << styles[e] << "/>\n";
    svg << "  <text x=\"" << fmt(lx + 16) << "\" y=\"" << fmt(ly + 9)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << entries[e]
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace qpt
