#include "qpt/channels.hpp"

#include <cmath>
#include <string>

namespace qpt {

namespace {

DensityMatrix pure_state(const Vector& amplitudes) {
  Matrix m = amplitudes * amplitudes.adjoint();
  return DensityMatrix{std::move(m)};
}

}  // namespace

SuperoperatorG damping_channel(const DampingParams& params) {
  if (params.gamma_par < 0.0 || params.gamma_perp < 0.0 ||
      2.0 * params.gamma_perp < params.gamma_par) {
    throw NotCompletelyPositiveError(
        "damping_channel: requires 2*gamma_perp >= gamma_par >= 0");
  }
  const double epar = std::exp(-params.gamma_par);
  const double eperp = std::exp(-params.gamma_perp);
  SuperoperatorG g = SuperoperatorG::zero(2);
  g.g(0, 0, 0, 0) = 1.0;
  g.g(0, 0, 1, 1) = 1.0 - epar;
  g.g(1, 1, 1, 1) = epar;
  g.g(0, 1, 0, 1) = eperp;
  g.g(1, 0, 1, 0) = eperp;
  return g;
}

SuperoperatorG identity_channel(Index dim) {
  if (dim < 2) {
    throw DimensionError("identity_channel: dimension must be at least 2");
  }
  SuperoperatorG g = SuperoperatorG::zero(dim);
  for (Index i = 0; i < dim; ++i)
    for (Index j = 0; j < dim; ++j) g.g(i, j, i, j) = 1.0;
  return g;
}

SuperoperatorG unitary_channel(const Matrix& u) {
  if (u.rows() != u.cols() || u.rows() < 2) {
    throw DimensionError("unitary_channel: matrix must be square, dim >= 2");
  }
  const Index n = u.rows();
  if (max_abs(u.adjoint() * u - Matrix::Identity(n, n)) > 1e-10) {
    throw UnphysicalArgumentsError("unitary_channel: matrix is not unitary");
  }
  // Rank-one chi: storage = w w^dag with w(i*n + k) = u(i, k).
  Vector w(n * n);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k) w(i * n + k) = u(i, k);
  return SuperoperatorG{n, w * w.adjoint()};
}

SuperoperatorG depolarizing_channel(double p, Index dim) {
  if (p < 0.0 || p > 1.0) {
    throw InvalidArgumentError("depolarizing_channel: p must lie in [0, 1]");
  }
  if (dim < 2) {
    throw DimensionError("depolarizing_channel: dimension must be at least 2");
  }
  SuperoperatorG g = identity_channel(dim);
  g.mat *= (1.0 - p);
  const double fill = p / static_cast<double>(dim);
  for (Index i = 0; i < dim; ++i)
    for (Index k = 0; k < dim; ++k) g.g(i, i, k, k) += fill;
  return g;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Matrix pauli_z() {
  // |0> = |down_z>, so the spin-up eigenvalue sits on the |1> entry.
  Matrix m(2, 2);
  m << -1, 0, 0, 1;
  return m;
}

QubitFixtures qubit_fixtures() {
  const double s = 1.0 / std::sqrt(2.0);
  Vector up_x(2), down_x(2), up_y(2), down_y(2), up_z(2), down_z(2);
  up_x << s, s;
  down_x << s, -s;
  up_y << s, Complex(0, s);
  down_y << s, Complex(0, -s);
  up_z << 0, 1;
  down_z << 1, 0;

  QubitFixtures fx;
  fx.inputs = {pure_state(up_x), pure_state(down_x), pure_state(up_y),
               pure_state(down_y), pure_state(up_z), pure_state(down_z)};
  fx.input_labels = {"up_x", "down_x", "up_y", "down_y", "up_z", "down_z"};

  for (const auto& [up, down] : {std::pair{up_x, down_x}, {up_y, down_y},
                                 {up_z, down_z}}) {
    Povm povm;
    povm.elements.push_back(PovmElement{pure_state(up).mat});
    povm.elements.push_back(PovmElement{pure_state(down).mat});
    fx.povms.push_back(std::move(povm));
  }
  fx.povm_labels = {"x", "y", "z"};
  fx.outcome_labels = {{"up", "down"}, {"up", "down"}, {"up", "down"}};
  return fx;
}

SuperoperatorG make_channel(const std::string& name,
                            const std::vector<double>& params) {
  if (name == "damping") {
    if (params.size() != 2) {
      throw InvalidArgumentError("damping channel takes 2 parameters");
    }
    return damping_channel(DampingParams{params[0], params[1]});
  }
  if (name == "identity") {
    if (params.size() > 1) {
      throw InvalidArgumentError("identity channel takes at most 1 parameter");
    }
    const Index dim = params.empty() ? 2 : static_cast<Index>(params[0]);
    return identity_channel(dim);
  }
  if (name == "depolarizing") {
    if (params.empty() || params.size() > 2) {
      throw InvalidArgumentError("depolarizing channel takes 1 or 2 parameters");
    }
    const Index dim = params.size() == 2 ? static_cast<Index>(params[1]) : 2;
    return depolarizing_channel(params[0], dim);
  }
  if (name == "unitary") {
    // Parameters are the row-major interleaved re/im entries of the matrix.
    const auto count = params.size();
    Index dim = 0;
    while (static_cast<std::size_t>(2 * dim * dim) < count) ++dim;
    if (dim < 2 || static_cast<std::size_t>(2 * dim * dim) != count) {
      throw InvalidArgumentError(
          "unitary channel takes 2*dim^2 parameters (row-major re, im pairs)");
    }
    Matrix u(dim, dim);
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j) {
        const std::size_t base = 2 * static_cast<std::size_t>(i * dim + j);
        u(i, j) = Complex(params[base], params[base + 1]);
      }
    return unitary_channel(u);
  }
  throw InvalidArgumentError("unknown channel name: " + name);
}

}  // namespace qpt
