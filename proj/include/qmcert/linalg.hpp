#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmcert/tolerances.hpp"

namespace qmcert {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Which tensor factor of a bipartite operator an operation acts on.
// Ordering is row-major with the left factor most significant: the basis
// vector |i>|j> of H_X (x) H_Y has index i*dY + j.
enum class Subsystem { First, Second };

struct BipartiteDims {
  int dX;
  int dY;

  BipartiteDims(int dx, int dy) : dX(dx), dY(dy) {
    if (dx < 1 || dy < 1) throw std::invalid_argument("BipartiteDims: dimensions must be positive");
  }
  int total() const { return dX * dY; }
};

inline void check_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

inline double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double tolerance = tol::hermiticity) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tolerance;
}

inline void require_hermitian(const Matrix& m, const char* what) {
  check_finite(m, what);
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(what) + ": matrix not square");
  double defect = hermiticity_defect(m);
  if (defect > tol::hermiticity)
    throw std::invalid_argument(std::string(what) + ": hermiticity defect " + std::to_string(defect));
}

inline Matrix identity(int d) { return Matrix::Identity(d, d); }

// Kronecker product, left factor most significant.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline void check_bipartite(const Matrix& m, const BipartiteDims& dims, const char* what) {
  if (m.rows() != m.cols() || m.rows() != dims.total())
    throw std::invalid_argument(std::string(what) + ": matrix size " + std::to_string(m.rows()) +
                                "x" + std::to_string(m.cols()) + " does not match dims " +
                                std::to_string(dims.dX) + "*" + std::to_string(dims.dY));
}

inline Matrix partial_trace(const Matrix& m, const BipartiteDims& dims, Subsystem keep) {
  check_bipartite(m, dims, "partial_trace");
  const int dX = dims.dX, dY = dims.dY;
  if (keep == Subsystem::First) {
    Matrix out = Matrix::Zero(dX, dX);
    for (int i = 0; i < dX; ++i)
      for (int j = 0; j < dX; ++j)
        for (int k = 0; k < dY; ++k) out(i, j) += m(i * dY + k, j * dY + k);
    return out;
  }
  Matrix out = Matrix::Zero(dY, dY);
  for (int i = 0; i < dY; ++i)
    for (int j = 0; j < dY; ++j)
      for (int k = 0; k < dX; ++k) out(i, j) += m(k * dY + i, k * dY + j);
  return out;
}

inline Matrix partial_transpose(const Matrix& m, const BipartiteDims& dims, Subsystem on) {
  check_bipartite(m, dims, "partial_transpose");
  const int dX = dims.dX, dY = dims.dY;
  Matrix out(m.rows(), m.cols());
  for (int i = 0; i < dX; ++i)
    for (int j = 0; j < dX; ++j)
      for (int k = 0; k < dY; ++k)
        for (int l = 0; l < dY; ++l) {
          if (on == Subsystem::Second)
            out(i * dY + l, j * dY + k) = m(i * dY + k, j * dY + l);
          else
            out(j * dY + k, i * dY + l) = m(i * dY + k, j * dY + l);
        }
  return out;
}

struct EigResult {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // orthonormal columns, vectors.col(k) <-> values(k)
};

inline EigResult eig_hermitian(const Matrix& h) {
  require_hermitian(h, "eig_hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const Matrix& h) { return eig_hermitian(h).values(0); }

inline Complex frobenius_inner(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("frobenius_inner: shape mismatch");
  return (a.adjoint() * b).trace();
}

// Unit-trace PSD matrix. Validates on construction.
struct DensityMatrix {
  Matrix rho;

  explicit DensityMatrix(Matrix m) : rho(std::move(m)) {
    require_hermitian(rho, "DensityMatrix");
    double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > tol::trace)
      throw std::invalid_argument("DensityMatrix: trace residual " + std::to_string(tr - 1.0));
    double lmin = min_eigenvalue(rho);
    if (lmin < -tol::psd)
      throw std::invalid_argument("DensityMatrix: min eigenvalue " + std::to_string(lmin));
  }

  int dim() const { return static_cast<int>(rho.rows()); }
};

inline DensityMatrix pure_state(const Vector& psi) {
  Vector n = psi / psi.norm();
  return DensityMatrix(n * n.adjoint());
}

// Phi+ = (1/d) sum_ij |ii><jj|
inline DensityMatrix max_entangled(int d) {
  if (d < 1) throw std::invalid_argument("max_entangled: d must be positive");
  Vector psi = Vector::Zero(d * d);
  for (int i = 0; i < d; ++i) psi(i * d + i) = 1.0 / std::sqrt(double(d));
  return pure_state(psi);
}

inline Matrix pauli_x() { return (Matrix(2, 2) << 0, 1, 1, 0).finished(); }
inline Matrix pauli_y() {
  return (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
}
inline Matrix pauli_z() { return (Matrix(2, 2) << 1, 0, 0, -1).finished(); }

}  // namespace qmcert
