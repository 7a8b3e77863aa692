#include "qpt/reconstruct.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace qpt {

namespace {

// One flattened (setting, outcome) measurement term.
struct Term {
  const Matrix* effect;
  const Matrix* rho;
  double f;      // relative frequency
  double p_raw;  // born probability at the current iterate
  double p;      // floored
};

void check_frequency_shape(const FrequencyTable& freqs,
                           const ExperimentDesign& design) {
  if (freqs.f.size() != design.settings.size()) {
    throw InvalidArgumentError("frequency table does not match design settings");
  }
  for (std::size_t s = 0; s < freqs.f.size(); ++s) {
    if (freqs.f[s].size() != design.n_outcomes(s)) {
      throw InvalidArgumentError("frequency table outcome count mismatch");
    }
  }
}

std::vector<Term> build_terms(const SuperoperatorG& g, const FrequencyTable& freqs,
                              const ExperimentDesign& design, double floor) {
  std::vector<Term> terms;
  terms.reserve(design.total_outcome_slots());
  for (std::size_t s = 0; s < design.settings.size(); ++s) {
    const MeasurementSetting& setting = design.settings[s];
    const DensityMatrix& rho = design.inputs[setting.input_index];
    const Povm& povm = design.povms[setting.povm_index];
    const DensityMatrix out = apply_channel(g, rho);
    for (std::size_t o = 0; o < povm.size(); ++o) {
      const double p_raw = (povm.elements[o].mat * out.mat).trace().real();
      terms.push_back(Term{&povm.elements[o].mat, &rho.mat, freqs.f[s][o], p_raw,
                           std::max(p_raw, floor)});
    }
  }
  return terms;
}

LagrangeMatrix lambda_from_terms(const SuperoperatorG& g,
                                 const std::vector<Term>& terms) {
  const Index n = g.dim;
  Matrix raw = Matrix::Zero(n, n);
  for (const Term& t : terms) {
    if (t.f == 0.0) continue;
    raw.noalias() += (t.f / t.p) * (heisenberg_apply(g, *t.effect) * (*t.rho));
  }
  LagrangeMatrix lambda;
  lambda.lam = hermitized(raw);
  lambda.raw = std::move(raw);
  lambda.hermiticity_defect = max_abs(lambda.lam - lambda.raw);

  const RealVector eigs =
      Eigen::SelfAdjointEigenSolver<Matrix>(lambda.lam, Eigen::EigenvaluesOnly)
          .eigenvalues();
  const double lo = eigs.cwiseAbs().minCoeff();
  const double hi = eigs.cwiseAbs().maxCoeff();
  if (lo <= 0.0 || hi / lo > 1e12) {
    throw DegenerateDataError(
        "lambda_update: multiplier matrix is numerically singular");
  }
  return lambda;
}

SuperoperatorG g_step(const SuperoperatorG& g, const LagrangeMatrix& lambda,
                      const std::vector<Term>& terms) {
  const Index n = g.dim;
  const Matrix& lam_src = lambda.raw.size() > 0 ? lambda.raw : lambda.lam;
  Eigen::PartialPivLU<Matrix> lu(lam_src);
  if (lu.rcond() < 1e-14) {
    throw NumericalError("g_update: lambda is not invertible");
  }
  const Matrix lam_inv = lu.inverse();

  // G'_bc^np = sum_m w_m sum_ak Pi_ba (rho lam^-1)_kn G_ac^kp, which in the
  // storage layout is (sum_m w_m Pi_m kron (rho_m lam^-1)^T) * mat.
  Matrix k_sum = Matrix::Zero(n * n, n * n);
  for (const Term& t : terms) {
    if (t.f == 0.0) continue;
    const double w = t.f / t.p;
    const Matrix r_t = ((*t.rho) * lam_inv).transpose();
    for (Index b = 0; b < n; ++b)
      for (Index a = 0; a < n; ++a)
        k_sum.block(b * n, a * n, n, n) += (w * (*t.effect)(b, a)) * r_t;
  }
  return SuperoperatorG{n, hermitized(k_sum * g.mat)};
}

double log_likelihood_terms(const std::vector<Term>& terms) {
  double ll = 0.0;
  for (const Term& t : terms) {
    if (t.f > 0.0) ll += t.f * std::log(t.p);
  }
  return ll;
}

double closure_residual_terms(const std::vector<Term>& terms, Index n) {
  Matrix sum = Matrix::Zero(n, n);
  for (const Term& t : terms) {
    if (t.f == 0.0) continue;
    sum.noalias() += (t.f / t.p) * (*t.effect);
  }
  return max_abs(sum - Matrix::Identity(n, n));
}

double min_chi_eigenvalue(const Matrix& storage) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(hermitized(storage),
                                               Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

FrequencyTable normalized(const FrequencyTable& freqs) {
  const double total = freqs.total();
  if (!(total > 0.0)) {
    throw InvalidArgumentError("frequency table has no mass");
  }
  FrequencyTable out = freqs;
  for (auto& row : out.f)
    for (double& v : row) v /= total;
  return out;
}

// Basis of traceless hermitian n x n matrices, n^2 - 1 elements.
std::vector<Matrix> traceless_hermitian_basis(Index n) {
  std::vector<Matrix> basis;
  for (Index k = 1; k < n; ++k) {
    Matrix d = Matrix::Zero(n, n);
    d(0, 0) = 1.0;
    d(k, k) = -1.0;
    basis.push_back(std::move(d));
  }
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      Matrix re = Matrix::Zero(n, n);
      re(a, b) = 1.0;
      re(b, a) = 1.0;
      basis.push_back(std::move(re));
      Matrix im = Matrix::Zero(n, n);
      im(a, b) = Complex(0, 1);
      im(b, a) = Complex(0, -1);
      basis.push_back(std::move(im));
    }
  }
  return basis;
}

// Basis of hermitian m x m matrices, m^2 elements.
std::vector<Matrix> hermitian_basis(Index m) {
  std::vector<Matrix> basis;
  for (Index r = 0; r < m; ++r) {
    Matrix d = Matrix::Zero(m, m);
    d(r, r) = 1.0;
    basis.push_back(std::move(d));
  }
  for (Index r = 0; r < m; ++r) {
    for (Index c = r + 1; c < m; ++c) {
      Matrix re = Matrix::Zero(m, m);
      re(r, c) = 1.0;
      re(c, r) = 1.0;
      basis.push_back(std::move(re));
      Matrix im = Matrix::Zero(m, m);
      im(r, c) = Complex(0, 1);
      im(c, r) = Complex(0, -1);
      basis.push_back(std::move(im));
    }
  }
  return basis;
}

// Real components of a hermitian matrix with Frobenius weighting:
// diagonal entries, then sqrt(2) * (re, im) of the upper triangle.
RealVector hermitian_components(const Matrix& h) {
  const Index n = h.rows();
  RealVector v(n * n);
  Index at = 0;
  for (Index a = 0; a < n; ++a) v(at++) = h(a, a).real();
  const double w = std::sqrt(2.0);
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      v(at++) = w * h(a, b).real();
      v(at++) = w * h(a, b).imag();
    }
  }
  return v;
}

}  // namespace

double log_likelihood(const SuperoperatorG& g, const FrequencyTable& freqs,
                      const ExperimentDesign& design, double floor) {
  check_design(design);
  check_frequency_shape(freqs, design);
  return log_likelihood_terms(build_terms(g, freqs, design, floor));
}

LagrangeMatrix lambda_update(const SuperoperatorG& g, const FrequencyTable& freqs,
                             const ExperimentDesign& design, double floor) {
  check_design(design);
  check_frequency_shape(freqs, design);
  return lambda_from_terms(g, build_terms(g, freqs, design, floor));
}

SuperoperatorG g_update(const SuperoperatorG& g, const LagrangeMatrix& lambda,
                        const FrequencyTable& freqs,
                        const ExperimentDesign& design, double floor) {
  check_design(design);
  check_frequency_shape(freqs, design);
  return g_step(g, lambda, build_terms(g, freqs, design, floor));
}

double closure_residual(const SuperoperatorG& g, const FrequencyTable& freqs,
                        const ExperimentDesign& design, double floor) {
  check_design(design);
  check_frequency_shape(freqs, design);
  return closure_residual_terms(build_terms(g, freqs, design, floor), g.dim);
}

std::vector<double> renormalized_povm_gap(const SuperoperatorG& g,
                                          const FrequencyTable& freqs,
                                          const ExperimentDesign& design,
                                          double floor) {
  check_design(design);
  check_frequency_shape(freqs, design);
  const std::vector<Term> terms = build_terms(g, freqs, design, floor);
  std::vector<double> gaps;
  gaps.reserve(terms.size());
  for (const Term& t : terms) {
    gaps.push_back((t.f / t.p) * t.p_raw - t.f);
  }
  return gaps;
}

ChiMatrix physicality_projection(const ChiMatrix& chi, double tol) {
  if (!is_hermitian(chi.mat, 1e-9)) {
    throw InvalidArgumentError("physicality_projection: chi is not hermitian");
  }
  const Index n = chi.dim;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitized(chi.mat));
  const RealVector eigs = es.eigenvalues();
  Matrix clipped = es.eigenvectors() *
                   eigs.cwiseMax(0.0).asDiagonal() *
                   es.eigenvectors().adjoint();
  clipped = hermitized(clipped);
  if (eigs.minCoeff() >= -tol) {
    return ChiMatrix{n, std::move(clipped)};
  }

  // Clipping moved mass; renormalize A_i -> A_i S^(-1/2) to restore trace
  // preservation, realized as the congruence chi -> W chi W^dag with
  // W = I kron conj(S^(-1/2)).
  const Matrix s = trace_map(ChiMatrix{n, clipped}, standard_basis(n));
  Eigen::SelfAdjointEigenSolver<Matrix> ses(hermitized(s));
  if (ses.eigenvalues().minCoeff() < 1e-12) {
    throw NonInvertibleNormalizationError(
        "physicality_projection: trace normalization is singular");
  }
  const Matrix s_inv_sqrt = ses.eigenvectors() *
                            ses.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                            ses.eigenvectors().adjoint();
  const Matrix x = s_inv_sqrt.conjugate();
  Matrix out(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      out.block(i * n, j * n, n, n) = x * clipped.block(i * n, j * n, n, n) * x;
  return ChiMatrix{n, hermitized(out)};
}

Index design_rank(const ExperimentDesign& design) {
  check_design(design);
  const Index n = design.dim();
  const Index n4 = n * n * n * n;
  Matrix rows(static_cast<Index>(design.total_outcome_slots()), n4);
  Index r = 0;
  for (std::size_t s = 0; s < design.settings.size(); ++s) {
    const MeasurementSetting& setting = design.settings[s];
    const Matrix& rho = design.inputs[setting.input_index].mat;
    const Povm& povm = design.povms[setting.povm_index];
    for (std::size_t o = 0; o < povm.size(); ++o) {
      const Matrix& effect = povm.elements[o].mat;
      // p_m = sum_ijkl Pi_ij G_ji^kl rho_kl: coefficient of storage(j*n+k, i*n+l).
      for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
          for (Index k = 0; k < n; ++k)
            for (Index l = 0; l < n; ++l)
              rows(r, (j * n + k) * n * n + (i * n + l)) = effect(i, j) * rho(k, l);
      ++r;
    }
  }
  return Eigen::ColPivHouseholderQR<Matrix>(rows).rank();
}

SuperoperatorG linear_inversion(const FrequencyTable& freqs,
                                const ExperimentDesign& design) {
  check_design(design);
  check_frequency_shape(freqs, design);
  const Index n = design.dim();
  const Index n2 = n * n;

  // Stage one: estimate the output state of every input that appears in the
  // design, from per-setting conditional outcome frequencies.
  const std::vector<Matrix> state_basis = traceless_hermitian_basis(n);
  std::vector<std::pair<std::size_t, Matrix>> pairs;  // (input index, estimate)
  for (std::size_t i = 0; i < design.inputs.size(); ++i) {
    std::vector<double> rhs;
    std::vector<const Matrix*> effects;
    for (std::size_t s = 0; s < design.settings.size(); ++s) {
      if (design.settings[s].input_index != i) continue;
      const Povm& povm = design.povms[design.settings[s].povm_index];
      double setting_mass = 0.0;
      for (double v : freqs.f[s]) setting_mass += v;
      if (setting_mass <= 0.0) continue;
      for (std::size_t o = 0; o < povm.size(); ++o) {
        effects.push_back(&povm.elements[o].mat);
        rhs.push_back(freqs.f[s][o] / setting_mass);
      }
    }
    if (effects.empty()) continue;

    RealMatrix a(static_cast<Index>(effects.size()), n2 - 1);
    RealVector y(static_cast<Index>(effects.size()));
    for (Index e = 0; e < a.rows(); ++e) {
      const Matrix& effect = *effects[static_cast<std::size_t>(e)];
      for (Index t = 0; t < n2 - 1; ++t) {
        a(e, t) = (effect * state_basis[static_cast<std::size_t>(t)])
                      .trace()
                      .real();
      }
      y(e) = rhs[static_cast<std::size_t>(e)] -
             effect.trace().real() / static_cast<double>(n);
    }
    Eigen::ColPivHouseholderQR<RealMatrix> qr(a);
    if (qr.rank() < n2 - 1) {
      throw DegenerateDataError(
          "linear_inversion: measurements do not determine the output state");
    }
    const RealVector theta = qr.solve(y);
    Matrix estimate = Matrix::Identity(n, n) / static_cast<double>(n);
    for (Index t = 0; t < n2 - 1; ++t) {
      estimate += theta(t) * state_basis[static_cast<std::size_t>(t)];
    }
    pairs.emplace_back(i, std::move(estimate));
  }
  if (pairs.empty()) {
    throw DegenerateDataError("linear_inversion: no usable settings");
  }

  // Stage two: least-squares solve for G over the (input, estimate) pairs
  // on the real parameterization of hermiticity-paired superoperators.
  const std::vector<Matrix> storage_basis = hermitian_basis(n2);
  const Index params = n2 * n2;
  RealMatrix m(static_cast<Index>(pairs.size()) * n2, params);
  RealVector b(m.rows());
  for (Index r = 0; r < params; ++r) {
    const SuperoperatorG g_r{n, storage_basis[static_cast<std::size_t>(r)]};
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const DensityMatrix& rho = design.inputs[pairs[q].first];
      m.block(static_cast<Index>(q) * n2, r, n2, 1) =
          hermitian_components(apply_channel(g_r, rho).mat);
    }
  }
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    b.segment(static_cast<Index>(q) * n2, n2) = hermitian_components(pairs[q].second);
  }
  Eigen::ColPivHouseholderQR<RealMatrix> qr(m);
  if (qr.rank() < params) {
    throw DegenerateDataError("linear_inversion: rank-deficient design");
  }
  const RealVector x = qr.solve(b);
  Matrix storage = Matrix::Zero(n2, n2);
  for (Index r = 0; r < params; ++r) {
    storage += x(r) * storage_basis[static_cast<std::size_t>(r)];
  }
  return SuperoperatorG{n, std::move(storage)};
}

ReconstructionResult maxlik_reconstruct(const FrequencyTable& freqs_in,
                                        const ExperimentDesign& design,
                                        const SolverConfig& cfg) {
  check_design(design);
  check_frequency_shape(freqs_in, design);
  const FrequencyTable freqs = normalized(freqs_in);
  const Index n = design.dim();
  const Index n2 = n * n;

  // chi0 = I/N: the fully depolarizing channel, strictly positive and TP.
  SuperoperatorG g{n, Matrix::Identity(n2, n2) / static_cast<double>(n)};

  Diagnostics diag;
  diag.design_rank = design_rank(design);

  const std::int64_t stride = std::max<std::int64_t>(1, cfg.log_every);
  LagrangeMatrix lambda;
  bool converged = false;
  std::int64_t iter = 0;

  while (iter < cfg.max_iterations) {
    ++iter;
    const std::vector<Term> terms = build_terms(g, freqs, design, cfg.prob_floor);
    lambda = lambda_from_terms(g, terms);
    SuperoperatorG g_next = g_step(g, lambda, terms);

    double margin = min_chi_eigenvalue(g_next.mat);
    if (margin < -cfg.psd_repair_tol) {
      g_next = chi_to_g(physicality_projection(g_to_chi(g_next), cfg.psd_repair_tol),
                        standard_basis(n));
      ++diag.projection_count;
      margin = min_chi_eigenvalue(g_next.mat);
    }

    const double delta = max_abs(g_next.mat - g.mat);
    if (!std::isfinite(delta) || !g_next.mat.allFinite()) {
      throw SolverError("maxlik_reconstruct: iteration diverged", diag.trace);
    }
    g = std::move(g_next);

    converged = delta < cfg.convergence_tol;
    if (converged || iter % stride == 0 || iter == cfg.max_iterations) {
      const std::vector<Term> now = build_terms(g, freqs, design, cfg.prob_floor);
      diag.trace.push_back(TraceRow{iter, log_likelihood_terms(now),
                                    tp_residual(g), margin,
                                    closure_residual_terms(now, n)});
    }
    if (converged) break;
  }

  ReconstructionResult result;
  result.g_hat = g;
  result.chi_hat = g_to_chi(g);
  result.iterations = iter;
  result.converged = converged;
  const std::vector<Term> final_terms = build_terms(g, freqs, design, cfg.prob_floor);
  result.lambda = lambda_from_terms(g, final_terms);
  result.log_likelihood = log_likelihood_terms(final_terms);

  diag.closure_residual = closure_residual_terms(final_terms, n);
  diag.tp_residual = tp_residual(g);
  diag.psd_margin = min_chi_eigenvalue(g.mat);
  diag.lambda_trace = result.lambda.trace();
  diag.lambda_min_eigenvalue =
      Eigen::SelfAdjointEigenSolver<Matrix>(result.lambda.lam,
                                            Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  diag.lambda_hermiticity_defect = result.lambda.hermiticity_defect;
  result.diagnostics = std::move(diag);
  return result;
}

}  // namespace qpt
