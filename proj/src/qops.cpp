#include "qpt/qops.hpp"

#include <cmath>
#include <string>

namespace qpt {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square");
  }
}

void require_same_dim(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Column m holds the row-major vectorization of basis op m, so the storage
// form of chi_to_g is B chi B^dag.
Matrix basis_vectorization(const OperatorBasis& basis) {
  const Index n2 = basis.dim * basis.dim;
  Matrix b(n2, n2);
  for (Index m = 0; m < n2; ++m) {
    const Matrix& op = basis.ops[static_cast<std::size_t>(m)];
    for (Index i = 0; i < basis.dim; ++i)
      for (Index k = 0; k < basis.dim; ++k) b(i * basis.dim + k, m) = op(i, k);
  }
  return b;
}

// Swap the inner index pair: out(i*N+j, k*N+l) = in(i*N+k, j*N+l).
// Involution that converts the chi-like storage into the transfer matrix
// acting on row-major vectorized states, and back.
Matrix reshuffle(const Matrix& m, Index n) {
  Matrix out(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < n; ++l)
          out(i * n + j, k * n + l) = m(i * n + k, j * n + l);
  return out;
}

}  // namespace

const std::array<const char*, 12>& qubit_param_names() {
  static const std::array<const char*, 12> names = {
      "G00_00",   "G00_11",   "ReG00_01", "ImG00_01", "ReG01_00", "ImG01_00",
      "ReG01_10", "ImG01_10", "ReG01_01", "ImG01_01", "ReG01_11", "ImG01_11"};
  return names;
}

void check_density_matrix(const DensityMatrix& rho, double tol, double eig_tol) {
  require_square(rho.mat, "density matrix");
  if (!is_hermitian(rho.mat, tol)) {
    throw UnphysicalArgumentsError("density matrix is not hermitian");
  }
  if (std::abs(rho.mat.trace().real() - 1.0) > tol ||
      std::abs(rho.mat.trace().imag()) > tol) {
    throw UnphysicalArgumentsError("density matrix trace is not 1");
  }
  if (hermitian_eigenvalues(rho.mat).minCoeff() < -eig_tol) {
    throw UnphysicalArgumentsError("density matrix has a negative eigenvalue");
  }
}

void check_povm_element(const PovmElement& e, double tol, double eig_tol) {
  require_square(e.mat, "povm element");
  if (!is_hermitian(e.mat, tol)) {
    throw UnphysicalArgumentsError("povm element is not hermitian");
  }
  const RealVector eigs = hermitian_eigenvalues(e.mat);
  if (eigs.minCoeff() < -eig_tol || eigs.maxCoeff() > 1.0 + eig_tol) {
    throw UnphysicalArgumentsError("povm element eigenvalues outside [0, 1]");
  }
}

void check_povm(const Povm& povm, double tol) {
  if (povm.elements.empty()) {
    throw InvalidArgumentError("povm has no elements");
  }
  const Index n = povm.dim();
  Matrix sum = Matrix::Zero(n, n);
  for (const PovmElement& e : povm.elements) {
    require_same_dim(e.dim(), n, "povm");
    sum += e.mat;
  }
  if (max_abs(sum - Matrix::Identity(n, n)) > tol) {
    throw UnphysicalArgumentsError("povm elements do not sum to the identity");
  }
}

void check_kraus_set(const KrausSet& kraus, double tol) {
  if (kraus.ops.empty()) {
    throw InvalidArgumentError("kraus set is empty");
  }
  const Index n = kraus.dim();
  Matrix sum = Matrix::Zero(n, n);
  for (const Matrix& a : kraus.ops) {
    require_same_dim(a.rows(), n, "kraus set");
    sum += a.adjoint() * a;
  }
  if (max_abs(sum - Matrix::Identity(n, n)) > tol) {
    throw UnphysicalArgumentsError("kraus operators do not resolve the identity");
  }
}

OperatorBasis standard_basis(Index dim) {
  if (dim < 2) {
    throw DimensionError("standard_basis: dimension must be at least 2");
  }
  OperatorBasis basis;
  basis.dim = dim;
  basis.standard = true;
  basis.ops.reserve(static_cast<std::size_t>(dim * dim));
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) {
      Matrix op = Matrix::Zero(dim, dim);
      op(i, j) = 1.0;
      basis.ops.push_back(std::move(op));
    }
  }
  return basis;
}

SuperoperatorG chi_to_g(const ChiMatrix& chi, const OperatorBasis& basis) {
  require_same_dim(chi.dim, basis.dim, "chi_to_g");
  if (basis.standard) {
    return SuperoperatorG{chi.dim, chi.mat};
  }
  const Matrix b = basis_vectorization(basis);
  return SuperoperatorG{chi.dim, b * chi.mat * b.adjoint()};
}

ChiMatrix g_to_chi(const SuperoperatorG& g) { return ChiMatrix{g.dim, g.mat}; }

DensityMatrix apply_channel(const SuperoperatorG& g, const DensityMatrix& rho) {
  require_same_dim(g.dim, rho.dim(), "apply_channel");
  const Index n = g.dim;
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      out(i, j) = (g.mat.block(i * n, j * n, n, n).array() * rho.mat.array()).sum();
  return DensityMatrix{std::move(out)};
}

DensityMatrix apply_channel_chi(const ChiMatrix& chi, const OperatorBasis& basis,
                                const DensityMatrix& rho) {
  require_same_dim(chi.dim, basis.dim, "apply_channel_chi");
  require_same_dim(chi.dim, rho.dim(), "apply_channel_chi");
  const Index n2 = chi.dim * chi.dim;
  Matrix out = Matrix::Zero(chi.dim, chi.dim);
  for (Index j = 0; j < n2; ++j) {
    const Matrix& aj = basis.ops[static_cast<std::size_t>(j)];
    for (Index k = 0; k < n2; ++k) {
      const Matrix& ak = basis.ops[static_cast<std::size_t>(k)];
      out.noalias() += chi.mat(j, k) * (aj * rho.mat * ak.adjoint());
    }
  }
  return DensityMatrix{std::move(out)};
}

DensityMatrix apply_kraus(const KrausSet& kraus, const DensityMatrix& rho) {
  const Index n = kraus.dim();
  require_same_dim(n, rho.dim(), "apply_kraus");
  Matrix out = Matrix::Zero(n, n);
  for (const Matrix& a : kraus.ops) out.noalias() += a * rho.mat * a.adjoint();
  return DensityMatrix{std::move(out)};
}

double tp_residual(const SuperoperatorG& g) {
  const Index n = g.dim;
  double residual = 0.0;
  for (Index k = 0; k < n; ++k) {
    for (Index l = 0; l < n; ++l) {
      Complex sum = 0.0;
      for (Index i = 0; i < n; ++i) sum += g.mat(i * n + k, i * n + l);
      if (k == l) sum -= 1.0;
      residual = std::max(residual, std::abs(sum));
    }
  }
  return residual;
}

double psd_margin(const ChiMatrix& chi) {
  if (!is_hermitian(chi.mat, 1e-9)) {
    throw InvalidArgumentError("psd_margin: chi is not hermitian");
  }
  return hermitian_eigenvalues(hermitized(chi.mat)).minCoeff();
}

QubitParamVector g_to_param_vector(const SuperoperatorG& g) {
  if (g.dim != 2) {
    throw InvalidArgumentError("g_to_param_vector: only dim = 2 is supported");
  }
  QubitParamVector out;
  out.tp_warning = tp_residual(g) > 1e-8;
  const Complex g00_01 = g.g(0, 0, 0, 1);
  const Complex g01_00 = g.g(0, 1, 0, 0);
  const Complex g01_10 = g.g(0, 1, 1, 0);
  const Complex g01_01 = g.g(0, 1, 0, 1);
  const Complex g01_11 = g.g(0, 1, 1, 1);
  out.values << g.g(0, 0, 0, 0).real(), g.g(0, 0, 1, 1).real(), g00_01.real(),
      g00_01.imag(), g01_00.real(), g01_00.imag(), g01_10.real(), g01_10.imag(),
      g01_01.real(), g01_01.imag(), g01_11.real(), g01_11.imag();
  return out;
}

KrausSet kraus_from_chi(const ChiMatrix& chi, const OperatorBasis& basis,
                        double tol) {
  require_same_dim(chi.dim, basis.dim, "kraus_from_chi");
  if (!is_hermitian(chi.mat, 1e-9)) {
    throw InvalidArgumentError("kraus_from_chi: chi is not hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitized(chi.mat));
  const RealVector eigs = es.eigenvalues();
  if (eigs.minCoeff() < -tol) {
    throw NotCompletelyPositiveError(
        "kraus_from_chi: chi has eigenvalue " + std::to_string(eigs.minCoeff()) +
        ", map is not completely positive");
  }
  KrausSet kraus;
  const Index n = chi.dim;
  for (Index r = 0; r < eigs.size(); ++r) {
    if (eigs(r) < tol) continue;  // clip small eigenvalues to zero
    const double scale = std::sqrt(eigs(r));
    Matrix a = Matrix::Zero(n, n);
    for (Index m = 0; m < n * n; ++m) {
      a += scale * es.eigenvectors()(m, r) * basis.ops[static_cast<std::size_t>(m)];
    }
    kraus.ops.push_back(std::move(a));
  }
  return kraus;
}

ChiMatrix chi_from_kraus(const KrausSet& kraus) {
  const Index n = kraus.dim();
  if (n == 0) {
    throw InvalidArgumentError("chi_from_kraus: kraus set is empty");
  }
  Matrix chi = Matrix::Zero(n * n, n * n);
  Vector c(n * n);
  for (const Matrix& a : kraus.ops) {
    require_same_dim(a.rows(), n, "chi_from_kraus");
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) c(i * n + j) = a(i, j);
    chi.noalias() += c * c.adjoint();
  }
  return ChiMatrix{n, std::move(chi)};
}

SuperoperatorG compose(const SuperoperatorG& second, const SuperoperatorG& first) {
  require_same_dim(second.dim, first.dim, "compose");
  const Index n = second.dim;
  const Matrix transfer = reshuffle(second.mat, n) * reshuffle(first.mat, n);
  return SuperoperatorG{n, reshuffle(transfer, n)};
}

Matrix heisenberg_apply(const SuperoperatorG& g, const Matrix& x) {
  require_same_dim(g.dim, x.rows(), "heisenberg_apply");
  const Index n = g.dim;
  Matrix out(n, n);
  for (Index l = 0; l < n; ++l) {
    for (Index k = 0; k < n; ++k) {
      Complex acc = 0.0;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) acc += x(j, i) * g.mat(i * n + k, j * n + l);
      out(l, k) = acc;
    }
  }
  return out;
}

Matrix trace_map(const ChiMatrix& chi, const OperatorBasis& basis) {
  require_same_dim(chi.dim, basis.dim, "trace_map");
  const Index n = chi.dim;
  if (basis.standard) {
    // <m|E_k^dag E_j|n> contracts to S_mn = sum_a chi(a*n + n', a*n + m').
    Matrix s(n, n);
    for (Index m = 0; m < n; ++m) {
      for (Index p = 0; p < n; ++p) {
        Complex acc = 0.0;
        for (Index a = 0; a < n; ++a) acc += chi.mat(a * n + p, a * n + m);
        s(m, p) = acc;
      }
    }
    return s;
  }
  Matrix s = Matrix::Zero(n, n);
  for (Index j = 0; j < n * n; ++j)
    for (Index k = 0; k < n * n; ++k)
      s.noalias() += chi.mat(j, k) *
                     (basis.ops[static_cast<std::size_t>(k)].adjoint() *
                      basis.ops[static_cast<std::size_t>(j)]);
  return s;
}

}  // namespace qpt
