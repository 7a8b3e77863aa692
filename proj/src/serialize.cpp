#include "qpt/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qpt {

namespace {

std::string label_or_index(const std::vector<std::string>& labels,
                           std::size_t index) {
  return index < labels.size() ? labels[index] : std::to_string(index);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw InvalidArgumentError("matrix json must be a non-empty array of rows");
  }
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Index>(row.size()) != cols) {
      throw InvalidArgumentError("matrix json rows have unequal lengths");
    }
    for (Index c = 0; c < cols; ++c) {
      const Json& entry = row.at(static_cast<std::size_t>(c));
      m(r, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  }
  return m;
}

Json g_to_json(const SuperoperatorG& g) {
  return Json{{"kind", "superoperator_g"},
              {"dim", g.dim},
              {"basis", "standard"},
              {"matrix", matrix_to_json(g.mat)}};
}

SuperoperatorG g_from_json(const Json& j) {
  if (j.value("kind", "") != "superoperator_g") {
    throw InvalidArgumentError("expected a superoperator_g document");
  }
  const Index dim = j.at("dim").get<Index>();
  Matrix m = matrix_from_json(j.at("matrix"));
  if (m.rows() != dim * dim || m.cols() != dim * dim) {
    throw InvalidArgumentError("superoperator matrix size does not match dim");
  }
  return SuperoperatorG{dim, std::move(m)};
}

Json chi_to_json(const ChiMatrix& chi) {
  return Json{{"kind", "chi_matrix"},
              {"dim", chi.dim},
              {"basis", "standard"},
              {"matrix", matrix_to_json(chi.mat)}};
}

ChiMatrix chi_from_json(const Json& j) {
  if (j.value("kind", "") != "chi_matrix") {
    throw InvalidArgumentError("expected a chi_matrix document");
  }
  const Index dim = j.at("dim").get<Index>();
  Matrix m = matrix_from_json(j.at("matrix"));
  if (m.rows() != dim * dim || m.cols() != dim * dim) {
    throw InvalidArgumentError("chi matrix size does not match dim");
  }
  return ChiMatrix{dim, std::move(m)};
}

Json kraus_to_json(const KrausSet& kraus) {
  Json ops = Json::array();
  for (const Matrix& a : kraus.ops) ops.push_back(matrix_to_json(a));
  const Index n = kraus.dim();
  Matrix sum = Matrix::Zero(n, n);
  for (const Matrix& a : kraus.ops) sum += a.adjoint() * a;
  return Json{{"kind", "kraus_set"},
              {"dim", n},
              {"ops", std::move(ops)},
              {"identity_residual", max_abs(sum - Matrix::Identity(n, n))}};
}

KrausSet kraus_from_json(const Json& j) {
  if (j.value("kind", "") != "kraus_set") {
    throw InvalidArgumentError("expected a kraus_set document");
  }
  KrausSet kraus;
  for (const Json& op : j.at("ops")) kraus.ops.push_back(matrix_from_json(op));
  return kraus;
}

Json design_to_json(const ExperimentDesign& design) {
  Json j;
  j["dim"] = design.dim();
  Json inputs = Json::array();
  for (const DensityMatrix& rho : design.inputs) {
    inputs.push_back(matrix_to_json(rho.mat));
  }
  j["inputs"] = std::move(inputs);
  Json povms = Json::array();
  for (std::size_t p = 0; p < design.povms.size(); ++p) {
    Json povm;
    Json effects = Json::array();
    for (const PovmElement& e : design.povms[p].elements) {
      effects.push_back(matrix_to_json(e.mat));
    }
    povm["effects"] = std::move(effects);
    if (p < design.povm_labels.size()) povm["label"] = design.povm_labels[p];
    if (p < design.outcome_labels.size()) {
      povm["outcome_labels"] = design.outcome_labels[p];
    }
    povms.push_back(std::move(povm));
  }
  j["povms"] = std::move(povms);
  if (!design.input_labels.empty()) j["input_labels"] = design.input_labels;
  Json settings = Json::array();
  for (const MeasurementSetting& s : design.settings) {
    settings.push_back(Json::array({s.input_index, s.povm_index}));
  }
  j["settings"] = std::move(settings);
  return j;
}

ExperimentDesign design_from_json(const Json& j) {
  ExperimentDesign design;
  for (const Json& input : j.at("inputs")) {
    design.inputs.push_back(DensityMatrix{matrix_from_json(input)});
  }
  for (const Json& povm_json : j.at("povms")) {
    Povm povm;
    for (const Json& effect : povm_json.at("effects")) {
      povm.elements.push_back(PovmElement{matrix_from_json(effect)});
    }
    design.povms.push_back(std::move(povm));
    if (povm_json.contains("label")) {
      design.povm_labels.resize(design.povms.size());
      design.povm_labels.back() = povm_json.at("label").get<std::string>();
    }
    if (povm_json.contains("outcome_labels")) {
      design.outcome_labels.resize(design.povms.size());
      design.outcome_labels.back() =
          povm_json.at("outcome_labels").get<std::vector<std::string>>();
    }
  }
  if (j.contains("input_labels")) {
    design.input_labels = j.at("input_labels").get<std::vector<std::string>>();
  }
  for (const Json& s : j.at("settings")) {
    design.settings.push_back(
        MeasurementSetting{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
  }
  check_design(design);
  return design;
}

Json dataset_to_json(const Dataset& data) {
  Json counts = Json::array();
  for (std::size_t s = 0; s < data.counts.size(); ++s) {
    for (std::size_t o = 0; o < data.counts[s].size(); ++o) {
      counts.push_back(Json::array({s, o, data.counts[s][o]}));
    }
  }
  return Json{{"design", design_to_json(data.design)},
              {"shots_per_setting", data.shots_per_setting},
              {"counts", std::move(counts)},
              {"seed", data.seed}};
}

Dataset dataset_from_json(const Json& j) {
  Dataset data;
  data.design = design_from_json(j.at("design"));
  data.shots_per_setting = j.at("shots_per_setting").get<std::int64_t>();
  data.seed = j.at("seed").get<std::uint64_t>();
  data.counts.resize(data.design.settings.size());
  for (std::size_t s = 0; s < data.counts.size(); ++s) {
    data.counts[s].assign(data.design.n_outcomes(s), 0);
  }
  for (const Json& entry : j.at("counts")) {
    const auto s = entry.at(0).get<std::size_t>();
    const auto o = entry.at(1).get<std::size_t>();
    if (s >= data.counts.size() || o >= data.counts[s].size()) {
      throw InvalidArgumentError("dataset count entry out of range");
    }
    data.counts[s][o] = entry.at(2).get<std::int64_t>();
  }
  for (std::size_t s = 0; s < data.counts.size(); ++s) {
    std::int64_t total = 0;
    for (std::int64_t c : data.counts[s]) {
      if (c < 0) throw InvalidArgumentError("dataset has a negative count");
      total += c;
    }
    if (total != data.shots_per_setting) {
      throw InvalidArgumentError(
          "dataset counts do not sum to shots_per_setting for setting " +
          std::to_string(s));
    }
  }
  return data;
}

Json exact_table_to_json(const ExperimentDesign& design,
                         const FrequencyTable& freqs) {
  Json entries = Json::array();
  for (std::size_t s = 0; s < freqs.f.size(); ++s) {
    for (std::size_t o = 0; o < freqs.f[s].size(); ++o) {
      entries.push_back(Json::array({s, o, freqs.f[s][o]}));
    }
  }
  return Json{{"design", design_to_json(design)},
              {"mode", "exact"},
              {"frequencies", std::move(entries)}};
}

MeasurementData measurement_from_json(const Json& j) {
  MeasurementData data;
  if (j.contains("counts")) {
    Dataset ds = dataset_from_json(j);
    data.design = ds.design;
    data.freqs = frequencies(ds);
    data.dataset = std::move(ds);
    return data;
  }
  if (!j.contains("frequencies")) {
    throw InvalidArgumentError(
        "measurement file needs either counts or frequencies");
  }
  data.design = design_from_json(j.at("design"));
  data.freqs.f.resize(data.design.settings.size());
  for (std::size_t s = 0; s < data.freqs.f.size(); ++s) {
    data.freqs.f[s].assign(data.design.n_outcomes(s), 0.0);
  }
  for (const Json& entry : j.at("frequencies")) {
    const auto s = entry.at(0).get<std::size_t>();
    const auto o = entry.at(1).get<std::size_t>();
    if (s >= data.freqs.f.size() || o >= data.freqs.f[s].size()) {
      throw InvalidArgumentError("frequency entry out of range");
    }
    data.freqs.f[s][o] = entry.at(2).get<double>();
  }
  return data;
}

std::string dataset_counts_csv(const Dataset& data) {
  std::ostringstream out;
  out << "input,axis,outcome,count\n";
  const ExperimentDesign& design = data.design;
  for (std::size_t s = 0; s < data.counts.size(); ++s) {
    const MeasurementSetting& setting = design.settings[s];
    const std::string input = label_or_index(design.input_labels,
                                             setting.input_index);
    const std::string axis = label_or_index(design.povm_labels,
                                            setting.povm_index);
    for (std::size_t o = 0; o < data.counts[s].size(); ++o) {
      std::string outcome = std::to_string(o);
      if (setting.povm_index < design.outcome_labels.size() &&
          o < design.outcome_labels[setting.povm_index].size()) {
        outcome = design.outcome_labels[setting.povm_index][o];
      }
      out << input << ',' << axis << ',' << outcome << ',' << data.counts[s][o]
          << '\n';
    }
  }
  return out.str();
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  out << "iteration,loglik,tp_residual,psd_margin,closure_residual\n";
  for (const TraceRow& row : rows) {
    out << row.iteration << ',' << format_double(row.log_likelihood) << ','
        << format_double(row.tp_residual) << ',' << format_double(row.psd_margin)
        << ',' << format_double(row.closure_residual) << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidArgumentError("cannot open file for writing: " + path);
  }
  out << content;
  if (!out) {
    throw InvalidArgumentError("failed writing file: " + path);
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgumentError("cannot open file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json_file(const std::string& path) {
  return Json::parse(read_text_file(path));
}

void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace qpt
