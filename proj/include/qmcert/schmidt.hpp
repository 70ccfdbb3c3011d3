#pragma once

#include <vector>

#include "qmcert/linalg.hpp"

namespace qmcert {

// Orthonormal Hermitian operator basis for dimension d (identity plus
// generalized Gell-Mann matrices, all scaled to unit Frobenius norm).
// Ordering: identity first, then for each pair j<k (lexicographic) the
// symmetric and antisymmetric element, then the diagonal elements. For
// d=2 this is {1, sigma_x, sigma_y, sigma_z}/sqrt(2).
inline std::vector<Matrix> hermitian_basis(int d) {
  std::vector<Matrix> basis;
  basis.reserve(d * d);
  basis.push_back(Matrix::Identity(d, d) / std::sqrt(double(d)));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Matrix sym = Matrix::Zero(d, d);
      sym(j, k) = inv_sqrt2;
      sym(k, j) = inv_sqrt2;
      basis.push_back(sym);
      Matrix asym = Matrix::Zero(d, d);
      asym(j, k) = Complex(0, -inv_sqrt2);
      asym(k, j) = Complex(0, inv_sqrt2);
      basis.push_back(asym);
    }
  for (int l = 1; l < d; ++l) {
    Matrix diag = Matrix::Zero(d, d);
    double norm = 1.0 / std::sqrt(double(l) * (l + 1));
    for (int m = 0; m < l; ++m) diag(m, m) = norm;
    diag(l, l) = -l * norm;
    basis.push_back(diag);
  }
  return basis;
}

// Real coordinates of a Hermitian operator in hermitian_basis(d).
inline Eigen::VectorXd hermitian_coords(const Matrix& h, const std::vector<Matrix>& basis) {
  Eigen::VectorXd coords(basis.size());
  for (size_t i = 0; i < basis.size(); ++i)
    coords(static_cast<Eigen::Index>(i)) = frobenius_inner(basis[i], h).real();
  return coords;
}

inline Matrix from_hermitian_coords(const Eigen::VectorXd& coords,
                                    const std::vector<Matrix>& basis) {
  Matrix out = Matrix::Zero(basis[0].rows(), basis[0].cols());
  for (size_t i = 0; i < basis.size(); ++i)
    out += coords(static_cast<Eigen::Index>(i)) * basis[i];
  return out;
}

struct OperatorSchmidtDecomposition {
  Eigen::VectorXd coefficients;      // descending, nonnegative
  std::vector<Matrix> left_factors;  // Hermitian, orthonormal under Tr(A_i A_j)
  std::vector<Matrix> right_factors;

  Matrix reconstruct() const {
    Matrix out = kron(left_factors[0], right_factors[0]) * coefficients(0);
    for (Eigen::Index i = 1; i < coefficients.size(); ++i)
      out += coefficients(i) * kron(left_factors[i], right_factors[i]);
    return out;
  }
};

// Operator-Schmidt decomposition of a Hermitian bipartite operator. The
// realignment is taken in a real Hermitian basis on each side, so both
// factor families come out Hermitian.
inline OperatorSchmidtDecomposition operator_schmidt(const Matrix& w, const BipartiteDims& dims) {
  require_hermitian(w, "operator_schmidt");
  check_bipartite(w, dims, "operator_schmidt");
  auto basis_x = hermitian_basis(dims.dX);
  auto basis_y = hermitian_basis(dims.dY);
  const int nx = dims.dX * dims.dX, ny = dims.dY * dims.dY;
  Eigen::MatrixXd realigned(nx, ny);
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b)
      realigned(a, b) = frobenius_inner(kron(basis_x[a], basis_y[b]), w).real();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(realigned, Eigen::ComputeThinU | Eigen::ComputeThinV);
  OperatorSchmidtDecomposition dec;
  const auto& sigma = svd.singularValues();
  int rank = 0;
  while (rank < sigma.size() && sigma(rank) >= tol::rank_cutoff) ++rank;
  dec.coefficients = sigma.head(rank);
  for (int i = 0; i < rank; ++i) {
    dec.left_factors.push_back(from_hermitian_coords(svd.matrixU().col(i), basis_x));
    dec.right_factors.push_back(from_hermitian_coords(svd.matrixV().col(i), basis_y));
  }
  return dec;
}

}  // namespace qmcert
