// Quantum objects (states, POVMs, channel representations) and conversions
// between the three channel forms: superoperator tensor, process matrix and
// Kraus operators.
//
// Storage convention used throughout: the four-index tensor G_ij^kl
// (output indices i,j / input indices k,l, so that
// rho_out(i,j) = sum_kl G_ij^kl rho_in(k,l)) is kept as an N^2 x N^2
// dense matrix with
//
//     mat(i*N + k, j*N + l) = G_ij^kl.
//
// Against the standard operator basis E_(N*i+j) = |i><j| this layout *is*
// the process matrix chi, so the two representations convert by relabeling
// and the hermiticity pairing G_ij^kl = conj(G_ji^lk) is plain matrix
// hermiticity of the storage.
#pragma once

#include <array>
#include <vector>

#include "qpt/types.hpp"

namespace qpt {

struct DensityMatrix {
  Matrix mat;
  Index dim() const { return mat.rows(); }
};

struct PovmElement {
  Matrix mat;
  Index dim() const { return mat.rows(); }
};

struct Povm {
  std::vector<PovmElement> elements;
  Index dim() const { return elements.empty() ? 0 : elements.front().dim(); }
  std::size_t size() const { return elements.size(); }
};

struct OperatorBasis {
  Index dim = 0;
  std::vector<Matrix> ops;  // N^2 linearly independent N x N matrices
  bool standard = false;    // true when built by standard_basis()
};

struct ChiMatrix {
  Index dim = 0;
  Matrix mat;  // N^2 x N^2, indexed against a stated operator basis
};

struct SuperoperatorG {
  Index dim = 0;
  Matrix mat;  // N^2 x N^2 in the layout documented above

  Complex g(Index i, Index j, Index k, Index l) const {
    return mat(i * dim + k, j * dim + l);
  }
  Complex& g(Index i, Index j, Index k, Index l) {
    return mat(i * dim + k, j * dim + l);
  }
  static SuperoperatorG zero(Index dim) {
    return SuperoperatorG{dim, Matrix::Zero(dim * dim, dim * dim)};
  }
};

struct KrausSet {
  std::vector<Matrix> ops;
  Index dim() const { return ops.empty() ? 0 : ops.front().rows(); }
};

// 12-parameter form of a qubit superoperator:
// (G00^00, G00^11, Re/Im G00^01, Re/Im G01^00, Re/Im G01^10,
//  Re/Im G01^01, Re/Im G01^11); the remaining row follows from
// G11^kl = delta_kl - G00^kl.
struct QubitParamVector {
  Eigen::Matrix<double, 12, 1> values;
  bool tp_warning = false;  // set when the map was not TP within 1e-8
};

const std::array<const char*, 12>& qubit_param_names();

// Validation of type invariants; throw on violation.
void check_density_matrix(const DensityMatrix& rho, double tol = 1e-12,
                          double eig_tol = 1e-10);
void check_povm_element(const PovmElement& e, double tol = 1e-12,
                        double eig_tol = 1e-10);
void check_povm(const Povm& povm, double tol = 1e-10);
void check_kraus_set(const KrausSet& kraus, double tol = 1e-10);

// Standard operator basis E_(N*i+j) = |i><j|, row-major in (i, j).
OperatorBasis standard_basis(Index dim);

// G_ij^kl = sum_mn <i|A_m|k> <l|A_n^dag|j> chi_mn. Relabeling when the
// basis is standard.
SuperoperatorG chi_to_g(const ChiMatrix& chi, const OperatorBasis& basis);

// Inverse relabeling against the standard basis; exact roundtrip.
ChiMatrix g_to_chi(const SuperoperatorG& g);

DensityMatrix apply_channel(const SuperoperatorG& g, const DensityMatrix& rho);

// rho_out = sum_jk chi_jk A_j rho A_k^dag, evaluated literally; kept as an
// independent cross-check path against apply_channel.
DensityMatrix apply_channel_chi(const ChiMatrix& chi, const OperatorBasis& basis,
                                const DensityMatrix& rho);

DensityMatrix apply_kraus(const KrausSet& kraus, const DensityMatrix& rho);

// max_kl | sum_i G_ii^kl - delta_kl |
double tp_residual(const SuperoperatorG& g);

// Minimum eigenvalue of chi; negative values quantify how unphysical the
// map is. Throws if chi is not hermitian within 1e-9.
double psd_margin(const ChiMatrix& chi);

QubitParamVector g_to_param_vector(const SuperoperatorG& g);

// Eigendecompose chi, clip eigenvalues below tol to zero and assemble
// A_i = sqrt(mu_i) sum_j (v_i)_j A~_j. Throws when chi has an eigenvalue
// below -tol.
KrausSet kraus_from_chi(const ChiMatrix& chi, const OperatorBasis& basis,
                        double tol = kPhysicalityTol);

// chi = sum_i vec(A_i) vec(A_i)^dag against the standard basis.
ChiMatrix chi_from_kraus(const KrausSet& kraus);

// Composition (second after first) as superoperator product.
SuperoperatorG compose(const SuperoperatorG& second, const SuperoperatorG& first);

// Adjoint (Heisenberg-picture) action: returns X' with
// X'(l,k) = sum_ij X(j,i) G_ij^kl, so that tr[X G(rho)] = tr[X' rho].
Matrix heisenberg_apply(const SuperoperatorG& g, const Matrix& x);

// S_mn = sum_jk chi_jk <m|A_k^dag A_j|n>; equals the identity exactly for
// trace-preserving maps.
Matrix trace_map(const ChiMatrix& chi, const OperatorBasis& basis);

}  // namespace qpt
