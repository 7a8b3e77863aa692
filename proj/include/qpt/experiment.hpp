// Experiment designs (input-state / POVM pairings), Born-rule probabilities
// and seeded Monte Carlo generation of count data.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpt/channels.hpp"
#include "qpt/qops.hpp"

namespace qpt {

struct MeasurementSetting {
  std::size_t input_index = 0;
  std::size_t povm_index = 0;
};

struct ExperimentDesign {
  std::vector<DensityMatrix> inputs;
  std::vector<Povm> povms;
  std::vector<MeasurementSetting> settings;
  // Optional labels used by CSV export; empty means indices are used.
  std::vector<std::string> input_labels;
  std::vector<std::string> povm_labels;
  std::vector<std::vector<std::string>> outcome_labels;

  Index dim() const { return inputs.empty() ? 0 : inputs.front().dim(); }
  std::size_t n_outcomes(std::size_t setting) const {
    return povms[settings[setting].povm_index].size();
  }
  std::size_t total_outcome_slots() const;
};

void check_design(const ExperimentDesign& design);

// Full cross product of inputs and POVMs.
ExperimentDesign cross_product_design(std::vector<DensityMatrix> inputs,
                                      std::vector<Povm> povms);

// The six Pauli eigenstates measured along the three axes; 18 settings.
ExperimentDesign qubit_fixture_design();

struct Dataset {
  ExperimentDesign design;
  std::int64_t shots_per_setting = 0;
  std::vector<std::vector<std::int64_t>> counts;  // [setting][outcome]
  std::uint64_t seed = 0;
};

// Globally normalized relative frequencies: sums to 1 over all settings
// and outcomes.
struct FrequencyTable {
  std::vector<std::vector<double>> f;  // [setting][outcome]
  double total() const;
};

double born_probability(const SuperoperatorG& g, const DensityMatrix& input,
                        const PovmElement& effect);

// Draws shots_per_setting outcomes per setting from the Born distribution.
// Deterministic in (g, design, shots, seed); per-setting substreams make the
// result independent of evaluation order.
Dataset simulate_counts(const SuperoperatorG& g, const ExperimentDesign& design,
                        std::int64_t shots_per_setting, std::uint64_t seed);

// f_m = n_m / total counts.
FrequencyTable frequencies(const Dataset& data);

// Infinite-shot limit: f_m = p_m / number of settings.
FrequencyTable exact_frequencies(const SuperoperatorG& g,
                                 const ExperimentDesign& design);

}  // namespace qpt
