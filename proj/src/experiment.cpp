#include "qpt/experiment.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "qpt/rng.hpp"

namespace qpt {

std::size_t ExperimentDesign::total_outcome_slots() const {
  std::size_t total = 0;
  for (std::size_t s = 0; s < settings.size(); ++s) total += n_outcomes(s);
  return total;
}

void check_design(const ExperimentDesign& design) {
  if (design.inputs.empty() || design.povms.empty()) {
    throw InvalidArgumentError("design needs at least one input and one povm");
  }
  if (design.settings.empty()) {
    throw InvalidArgumentError("design has no measurement settings");
  }
  const Index n = design.dim();
  for (const DensityMatrix& rho : design.inputs) {
    if (rho.dim() != n) throw DimensionError("design inputs have mixed dimensions");
  }
  for (const Povm& povm : design.povms) {
    if (povm.dim() != n) throw DimensionError("design povms have mixed dimensions");
  }
  for (const MeasurementSetting& s : design.settings) {
    if (s.input_index >= design.inputs.size() ||
        s.povm_index >= design.povms.size()) {
      throw InvalidArgumentError("design setting indices out of range");
    }
  }
}

ExperimentDesign cross_product_design(std::vector<DensityMatrix> inputs,
                                      std::vector<Povm> povms) {
  ExperimentDesign design;
  design.inputs = std::move(inputs);
  design.povms = std::move(povms);
  for (std::size_t i = 0; i < design.inputs.size(); ++i)
    for (std::size_t p = 0; p < design.povms.size(); ++p)
      design.settings.push_back(MeasurementSetting{i, p});
  check_design(design);
  return design;
}

ExperimentDesign qubit_fixture_design() {
  QubitFixtures fx = qubit_fixtures();
  ExperimentDesign design = cross_product_design(std::move(fx.inputs),
                                                 std::move(fx.povms));
  design.input_labels = std::move(fx.input_labels);
  design.povm_labels = std::move(fx.povm_labels);
  design.outcome_labels = std::move(fx.outcome_labels);
  return design;
}

double FrequencyTable::total() const {
  double sum = 0.0;
  for (const auto& row : f) sum = std::accumulate(row.begin(), row.end(), sum);
  return sum;
}

double born_probability(const SuperoperatorG& g, const DensityMatrix& input,
                        const PovmElement& effect) {
  if (g.dim != input.dim() || g.dim != effect.dim()) {
    throw DimensionError("born_probability: dimension mismatch");
  }
  const DensityMatrix out = apply_channel(g, input);
  double p = (effect.mat * out.mat).trace().real();
  if (p < -1e-8 || p > 1.0 + 1e-8) {
    throw UnphysicalArgumentsError(
        "born_probability: probability " + std::to_string(p) +
        " outside [0, 1]");
  }
  if (p < 0.0 && p > -1e-10) p = 0.0;
  if (p > 1.0 && p < 1.0 + 1e-10) p = 1.0;
  return p;
}

Dataset simulate_counts(const SuperoperatorG& g, const ExperimentDesign& design,
                        std::int64_t shots_per_setting, std::uint64_t seed) {
  check_design(design);
  if (shots_per_setting < 1) {
    throw InvalidArgumentError("simulate_counts: shots_per_setting must be >= 1");
  }
  Dataset data;
  data.design = design;
  data.shots_per_setting = shots_per_setting;
  data.seed = seed;
  data.counts.resize(design.settings.size());

  for (std::size_t s = 0; s < design.settings.size(); ++s) {
    const MeasurementSetting& setting = design.settings[s];
    const DensityMatrix& input = design.inputs[setting.input_index];
    const Povm& povm = design.povms[setting.povm_index];

    std::vector<double> probs(povm.size());
    double total = 0.0;
    for (std::size_t o = 0; o < povm.size(); ++o) {
      probs[o] = born_probability(g, input, povm.elements[o]);
      total += probs[o];
    }
    if (std::abs(total - 1.0) > 1e-8) {
      throw UnphysicalArgumentsError(
          "simulate_counts: outcome probabilities sum to " +
          std::to_string(total));
    }

    std::vector<std::int64_t>& counts = data.counts[s];
    counts.assign(povm.size(), 0);
    SplitMix64 rng = substream(seed, s);
    for (std::int64_t shot = 0; shot < shots_per_setting; ++shot) {
      const double u = rng.next_double() * total;
      double cum = 0.0;
      std::size_t pick = povm.size() - 1;
      for (std::size_t o = 0; o < povm.size(); ++o) {
        cum += probs[o];
        if (u < cum) {
          pick = o;
          break;
        }
      }
      ++counts[pick];
    }
  }
  return data;
}

FrequencyTable frequencies(const Dataset& data) {
  std::int64_t total = 0;
  for (const auto& row : data.counts)
    total = std::accumulate(row.begin(), row.end(), total);
  if (total <= 0) {
    throw InvalidArgumentError("frequencies: dataset has no counts");
  }
  FrequencyTable table;
  table.f.resize(data.counts.size());
  for (std::size_t s = 0; s < data.counts.size(); ++s) {
    table.f[s].resize(data.counts[s].size());
    for (std::size_t o = 0; o < data.counts[s].size(); ++o) {
      table.f[s][o] = static_cast<double>(data.counts[s][o]) /
                      static_cast<double>(total);
    }
  }
  return table;
}

FrequencyTable exact_frequencies(const SuperoperatorG& g,
                                 const ExperimentDesign& design) {
  check_design(design);
  const double settings = static_cast<double>(design.settings.size());
  FrequencyTable table;
  table.f.resize(design.settings.size());
  for (std::size_t s = 0; s < design.settings.size(); ++s) {
    const MeasurementSetting& setting = design.settings[s];
    const Povm& povm = design.povms[setting.povm_index];
    table.f[s].resize(povm.size());
    for (std::size_t o = 0; o < povm.size(); ++o) {
      table.f[s][o] = born_probability(g, design.inputs[setting.input_index],
                                       povm.elements[o]) /
                      settings;
    }
  }
  return table;
}

}  // namespace qpt
