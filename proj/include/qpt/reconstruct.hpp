// Maximum-likelihood channel estimation via the Lagrange-multiplier
// fixed-point iteration, the linear-inversion baseline, and the fixed-point
// diagnostics (closure relation, renormalized POVM, multiplier trace).
#pragma once

#include <cstdint>
#include <vector>

#include "qpt/experiment.hpp"
#include "qpt/qops.hpp"

namespace qpt {

// Lagrange multiplier matrix enforcing trace preservation.
//
// `raw` is the literal extremal-equation contraction
//     lam_ij = sum_m (f_m/p_m) sum_akp Pi_ka G_ak^pi rho_pj
// and `lam` its hermitization (lam + lam^dag)/2. The trace-preservation
// identity of the fixed-point update holds exactly only against the raw
// matrix, so the update inverts `raw`; `lam` is the reported multiplier
// (hermitian, and equal to `raw` at any fixed point).
struct LagrangeMatrix {
  Matrix lam;
  Matrix raw;
  double hermiticity_defect = 0.0;
  double trace() const { return lam.trace().real(); }
};

struct SolverConfig {
  std::int64_t max_iterations = 100000;
  double convergence_tol = 1e-10;  // max-abs change in G per iteration
  double prob_floor = 1e-12;
  double psd_repair_tol = 1e-10;
  std::int64_t log_every = 100;  // stride of the recorded iteration trace
};

struct TraceRow {
  std::int64_t iteration = 0;
  double log_likelihood = 0.0;
  double tp_residual = 0.0;
  double psd_margin = 0.0;
  double closure_residual = 0.0;
};

struct Diagnostics {
  double closure_residual = 0.0;
  double tp_residual = 0.0;
  double psd_margin = 0.0;
  double lambda_trace = 0.0;
  double lambda_min_eigenvalue = 0.0;
  double lambda_hermiticity_defect = 0.0;
  std::int64_t projection_count = 0;  // physicality repairs applied
  Index design_rank = 0;              // rank of the linear design operator
  std::vector<TraceRow> trace;
};

struct ReconstructionResult {
  SuperoperatorG g_hat;
  ChiMatrix chi_hat;
  LagrangeMatrix lambda;
  double log_likelihood = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
  Diagnostics diagnostics;
};

struct SolverError : NumericalError {
  SolverError(const std::string& msg, std::vector<TraceRow> trace_rows)
      : NumericalError(msg), trace(std::move(trace_rows)) {}
  std::vector<TraceRow> trace;
};

// sum_m f_m ln p_m; terms with f_m = 0 contribute nothing and p_m is
// floored at `floor`.
double log_likelihood(const SuperoperatorG& g, const FrequencyTable& freqs,
                      const ExperimentDesign& design, double floor = 1e-12);

LagrangeMatrix lambda_update(const SuperoperatorG& g, const FrequencyTable& freqs,
                             const ExperimentDesign& design, double floor = 1e-12);

// One fixed-point step:
//   G'_bc^np = sum_m (f_m/p_m) sum_akl Pi_ba rho_kl (lam^-1)_ln G_ac^kp
// with p_m evaluated at the input g, followed by hermiticity pairing.
// Preserves trace preservation exactly when lambda comes from
// lambda_update on the same g and frequencies.
SuperoperatorG g_update(const SuperoperatorG& g, const LagrangeMatrix& lambda,
                        const FrequencyTable& freqs,
                        const ExperimentDesign& design, double floor = 1e-12);

// Iterates lambda_update / g_update from the fully depolarizing channel
// until the max-abs change in G drops below cfg.convergence_tol.
ReconstructionResult maxlik_reconstruct(const FrequencyTable& freqs,
                                        const ExperimentDesign& design,
                                        const SolverConfig& cfg = {});

// Clips negative chi eigenvalues and, when the defect exceeded tol,
// restores trace preservation by the S^(-1/2) congruence. Standard basis.
ChiMatrix physicality_projection(const ChiMatrix& chi,
                                 double tol = kPhysicalityTol);

// max-abs element of sum_m (f_m/p_m) Pi^(m) - I.
double closure_residual(const SuperoperatorG& g, const FrequencyTable& freqs,
                        const ExperimentDesign& design, double floor = 1e-12);

// p'_m - f_m with p'_m = tr[G(rho_m) (f_m/p_m) Pi_m]; zero identically up
// to roundoff, a self-consistency check of the plumbing.
std::vector<double> renormalized_povm_gap(const SuperoperatorG& g,
                                          const FrequencyTable& freqs,
                                          const ExperimentDesign& design,
                                          double floor = 1e-12);

// Two-stage baseline: per-input output-state estimates from outcome
// frequencies, then a least-squares solve for G over the (input, estimate)
// pairs on the real parameterization. No physicality constraint.
SuperoperatorG linear_inversion(const FrequencyTable& freqs,
                                const ExperimentDesign& design);

// Rank of the linear map G -> {tr[Pi_m G(rho_m)]}_m; N^4 when the design
// identifies every parameter.
Index design_rank(const ExperimentDesign& design);

}  // namespace qpt
