// Command-line front end: simulate measurement data for known channels,
// reconstruct channels from data, reproduce the damping-channel bar-figure
// study, and convert between channel representations.
//
// Exit codes: 0 success, 2 usage/input error, 3 numerical or physicality
// failure. Errors are reported as JSON on stderr.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpt/report.hpp"

namespace {

using qpt::Json;

struct RunConfig {
  std::string channel = "damping";
  std::vector<double> params;  // empty picks the channel's defaults
  std::string design = "qubit-fixtures";
  std::int64_t shots = 20;
  std::uint64_t seed = 42;
  std::int64_t trials = 1;
  std::string in;
  std::string out;
  std::string csv;
  double tol = 1e-10;
  std::int64_t max_iters = 100000;
  bool exact = false;
};

// Config-file values fill in every option the user did not pass; flags win.
void merge_config(const CLI::App& cmd, const std::string& path, RunConfig& rc) {
  if (path.empty()) return;
  const Json cfg = qpt::read_json_file(path);
  const auto merge = [&](const char* flag, const char* key, auto& value) {
    using T = std::decay_t<decltype(value)>;
    if (cfg.contains(key) && cmd.count(flag) == 0) value = cfg.at(key).get<T>();
  };
  merge("--channel", "channel", rc.channel);
  merge("--params", "params", rc.params);
  merge("--design", "design", rc.design);
  merge("--shots", "shots", rc.shots);
  merge("--seed", "seed", rc.seed);
  merge("--trials", "trials", rc.trials);
  merge("--in", "in", rc.in);
  merge("--out", "out", rc.out);
  merge("--csv", "csv", rc.csv);
  merge("--tol", "tol", rc.tol);
  merge("--max-iters", "max_iters", rc.max_iters);
  merge("--exact", "exact", rc.exact);
}

qpt::ExperimentDesign design_by_name(const std::string& name) {
  if (name == "qubit-fixtures") return qpt::qubit_fixture_design();
  throw qpt::InvalidArgumentError("unknown design: " + name);
}

std::vector<double> params_or_default(const RunConfig& rc) {
  if (!rc.params.empty() || rc.channel != "damping") return rc.params;
  return {0.5, 0.75};
}

qpt::SuperoperatorG channel_from_config(const RunConfig& rc) {
  try {
    return qpt::make_channel(rc.channel, params_or_default(rc));
  } catch (const qpt::NumericalError& e) {
    // Bad channel parameters on the command line are a usage error.
    throw qpt::InvalidArgumentError(e.what());
  }
}

qpt::SolverConfig solver_from_config(const RunConfig& rc) {
  qpt::SolverConfig solver;
  solver.convergence_tol = rc.tol;
  solver.max_iterations = rc.max_iters;
  return solver;
}

int cmd_simulate(const RunConfig& rc) {
  const qpt::SuperoperatorG g = channel_from_config(rc);
  const qpt::ExperimentDesign design = design_by_name(rc.design);
  const std::string out = rc.out.empty() ? "dataset.json" : rc.out;
  if (rc.exact) {
    const qpt::FrequencyTable table = qpt::exact_frequencies(g, design);
    qpt::write_json_file(out, qpt::exact_table_to_json(design, table));
  } else {
    const qpt::Dataset data = qpt::simulate_counts(g, design, rc.shots, rc.seed);
    qpt::write_json_file(out, qpt::dataset_to_json(data));
    if (!rc.csv.empty()) {
      qpt::write_text_file(rc.csv, qpt::dataset_counts_csv(data));
    }
  }
  std::cout << out << "\n";
  return 0;
}

int cmd_reconstruct(const RunConfig& rc) {
  if (rc.in.empty()) {
    throw qpt::InvalidArgumentError("reconstruct needs --in <dataset.json>");
  }
  const qpt::MeasurementData data =
      qpt::measurement_from_json(qpt::read_json_file(rc.in));
  const qpt::ReconstructionReport report =
      qpt::reconstruct_with_baseline(data.freqs, data.design,
                                     solver_from_config(rc));
  const std::string out = rc.out.empty() ? "result.json" : rc.out;
  qpt::write_json_file(out, qpt::reconstruction_report_to_json(report));
  if (!rc.csv.empty()) {
    qpt::write_text_file(rc.csv, qpt::trace_csv(report.maxlik.diagnostics.trace));
  }
  std::cout << out << "\n";
  return 0;
}

int cmd_demo(const RunConfig& rc) {
  const std::vector<double> params = params_or_default(rc);
  if (rc.channel != "damping" || params.size() != 2) {
    throw qpt::InvalidArgumentError("demo runs the damping channel (2 params)");
  }
  qpt::StudyConfig cfg;
  cfg.channel = qpt::DampingParams{params[0], params[1]};
  cfg.shots = rc.shots;
  cfg.trials = rc.trials;
  cfg.seed = rc.seed;
  cfg.exact = rc.exact;
  cfg.solver = solver_from_config(rc);
  const qpt::FigureReport report = qpt::run_figure_study(cfg);

  const std::string prefix = rc.out.empty() ? "demo" : rc.out;
  qpt::write_json_file(prefix + "_report.json",
                       qpt::figure_report_to_json(report, cfg));
  qpt::write_text_file(prefix + "_comparison.csv", qpt::comparison_csv(report));
  qpt::write_text_file(prefix + "_figure.svg", qpt::figure_svg(report));
  std::cout << prefix << "_report.json " << prefix << "_comparison.csv "
            << prefix << "_figure.svg\n";
  return 0;
}

int cmd_convert(const RunConfig& rc, const std::string& to) {
  if (rc.in.empty()) {
    throw qpt::InvalidArgumentError("convert needs --in <file.json>");
  }
  const Json j = qpt::read_json_file(rc.in);
  const std::string kind = j.value("kind", "");

  qpt::ChiMatrix chi;
  if (kind == "superoperator_g") {
    chi = qpt::g_to_chi(qpt::g_from_json(j));
  } else if (kind == "chi_matrix") {
    chi = qpt::chi_from_json(j);
  } else if (kind == "kraus_set") {
    chi = qpt::chi_from_kraus(qpt::kraus_from_json(j));
  } else if (kind == "reconstruction_result") {
    chi = qpt::chi_from_json(j.at("maxlik").at("chi"));
  } else {
    throw qpt::InvalidArgumentError("unrecognized input kind: " + kind);
  }
  const qpt::OperatorBasis basis = qpt::standard_basis(chi.dim);

  const std::string out = rc.out.empty() ? ("converted_" + to + ".json") : rc.out;
  if (to == "g") {
    qpt::write_json_file(out, qpt::g_to_json(qpt::chi_to_g(chi, basis)));
  } else if (to == "chi") {
    qpt::write_json_file(out, qpt::chi_to_json(chi));
  } else if (to == "kraus") {
    qpt::write_json_file(out, qpt::kraus_to_json(qpt::kraus_from_chi(chi, basis)));
  } else if (to == "params") {
    const qpt::QubitParamVector pv =
        qpt::g_to_param_vector(qpt::chi_to_g(chi, basis));
    std::string csv = "param_name,value\n";
    for (int p = 0; p < 12; ++p) {
      csv += std::string(qpt::qubit_param_names()[static_cast<std::size_t>(p)]) +
             "," + qpt::format_double(pv.values(p)) + "\n";
    }
    qpt::write_text_file(out, csv);
  } else {
    throw qpt::InvalidArgumentError("unknown conversion target: " + to);
  }
  std::cout << out << "\n";
  return 0;
}

void print_error(const char* type, const std::string& message) {
  std::cerr << Json{{"error", Json{{"type", type}, {"message", message}}}}.dump()
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qpt - quantum process tomography toolkit"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string config_path;
  std::string convert_to = "chi";

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file; flags win");
    cmd->add_option("--seed", rc.seed, "RNG seed");
    cmd->add_option("--out", rc.out, "output path (demo: path prefix)");
    cmd->add_option("--tol", rc.tol, "solver convergence tolerance");
    cmd->add_option("--max-iters", rc.max_iters, "solver iteration cap");
    cmd->add_flag("--exact", rc.exact, "use exact frequencies instead of sampling");
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate measurement data for a known channel");
  simulate->add_option("--channel", rc.channel,
                       "channel name: damping|identity|unitary|depolarizing");
  simulate->add_option("--params", rc.params, "channel parameters")
      ->delimiter(',');
  simulate->add_option("--design", rc.design, "experiment design name");
  simulate->add_option("--shots", rc.shots, "shots per setting");
  simulate->add_option("--csv", rc.csv, "also write counts as CSV");
  add_common(simulate);

  CLI::App* reconstruct =
      app.add_subcommand("reconstruct", "estimate a channel from measurement data");
  reconstruct->add_option("--in", rc.in, "dataset JSON file");
  reconstruct->add_option("--csv", rc.csv, "write the iteration trace as CSV");
  add_common(reconstruct);

  CLI::App* demo = app.add_subcommand(
      "demo", "run the damping-channel study and emit report, CSV and SVG");
  demo->add_option("--params", rc.params, "damping parameters")->delimiter(',');
  demo->add_option("--shots", rc.shots, "shots per setting");
  demo->add_option("--trials", rc.trials, "independent repetitions");
  add_common(demo);

  CLI::App* convert =
      app.add_subcommand("convert", "convert between channel representations");
  convert->add_option("--in", rc.in, "input JSON file");
  convert->add_option("--to", convert_to, "target form: g|chi|kraus|params");
  add_common(convert);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help and friends
    }
    print_error("usage", e.what());
    return 2;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    merge_config(*cmd, config_path, rc);
    if (cmd == simulate) return cmd_simulate(rc);
    if (cmd == reconstruct) return cmd_reconstruct(rc);
    if (cmd == demo) return cmd_demo(rc);
    return cmd_convert(rc, convert_to);
  } catch (const qpt::InvalidArgumentError& e) {
    print_error("input", e.what());
    return 2;
  } catch (const Json::exception& e) {
    print_error("input", e.what());
    return 2;
  } catch (const qpt::NumericalError& e) {
    print_error("numerical", e.what());
    return 3;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 3;
  }
}
