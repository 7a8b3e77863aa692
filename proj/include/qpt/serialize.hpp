// JSON and CSV encodings of the core types. Channel matrices are stored as
// nested arrays of [re, im] pairs with explicit "dim" and "basis" fields;
// datasets carry their full design so files stand alone.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "qpt/experiment.hpp"
#include "qpt/qops.hpp"
#include "qpt/reconstruct.hpp"

namespace qpt {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json g_to_json(const SuperoperatorG& g);
SuperoperatorG g_from_json(const Json& j);

Json chi_to_json(const ChiMatrix& chi);
ChiMatrix chi_from_json(const Json& j);

// Records the identity-resolution residual alongside the operators.
Json kraus_to_json(const KrausSet& kraus);
KrausSet kraus_from_json(const Json& j);

Json design_to_json(const ExperimentDesign& design);
ExperimentDesign design_from_json(const Json& j);

Json dataset_to_json(const Dataset& data);
Dataset dataset_from_json(const Json& j);

// Exact-frequency measurement file: the infinite-shot analogue of a dataset.
Json exact_table_to_json(const ExperimentDesign& design,
                         const FrequencyTable& freqs);

// A measurement file is either a sampled dataset ("counts") or an exact
// frequency table ("frequencies").
struct MeasurementData {
  ExperimentDesign design;
  FrequencyTable freqs;
  std::optional<Dataset> dataset;  // present for sampled files
};
MeasurementData measurement_from_json(const Json& j);

// columns: input, axis, outcome, count
std::string dataset_counts_csv(const Dataset& data);

// columns: iteration, loglik, tp_residual, psd_margin, closure_residual
std::string trace_csv(const std::vector<TraceRow>& rows);

std::string format_double(double v);  // %.17g

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

}  // namespace qpt
