// Factories of known channels (ground truths for simulation) and the fixed
// qubit experimental fixtures: six Pauli eigenstate inputs and the three
// Stern-Gerlach measurement axes.
//
// Qubit basis convention: |0> is the spin-down and |1> the spin-up state
// along z, and |up_y> = (|0> + i|1>)/sqrt(2).
#pragma once

#include <string>
#include <vector>

#include "qpt/qops.hpp"

namespace qpt {

// Dimensionless decay exponents; completely positive iff
// 2*gamma_perp >= gamma_par >= 0.
struct DampingParams {
  double gamma_par = 0.0;   // longitudinal
  double gamma_perp = 0.0;  // transversal
};

// rho00 -> 1 - rho11 e^-gpar, rho11 -> rho11 e^-gpar, rho01 -> rho01 e^-gperp
SuperoperatorG damping_channel(const DampingParams& params);

SuperoperatorG identity_channel(Index dim);

// G_ij^kl = u_ik conj(u_jl); chi is rank one.
SuperoperatorG unitary_channel(const Matrix& u);

// rho -> (1 - p) rho + p I/dim
SuperoperatorG depolarizing_channel(double p, Index dim);

struct QubitFixtures {
  std::vector<DensityMatrix> inputs;  // up_x, down_x, up_y, down_y, up_z, down_z
  std::vector<Povm> povms;            // x, y, z axes, outcomes (up, down)
  std::vector<std::string> input_labels;
  std::vector<std::string> povm_labels;
  std::vector<std::vector<std::string>> outcome_labels;
};

QubitFixtures qubit_fixtures();

// Pauli matrices in the fixture basis convention (|0> = |down_z>).
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

// Construct a channel by name ("damping", "identity", "unitary",
// "depolarizing") with a numeric parameter list; used by the CLI config.
SuperoperatorG make_channel(const std::string& name,
                            const std::vector<double>& params);

}  // namespace qpt
