#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qmcert/channels.hpp"
#include "qmcert/schmidt.hpp"

namespace qmcert {

enum class PptVerdict { QuantumDomainCertified, EBCompatible };

// Outcome of the partial-transpose test on a Choi operator. Note: for
// dA*dB > 6 a PPT Choi is "not certified", not "certified EB".
struct PptReport {
  double min_eigenvalue;
  std::optional<Vector> negative_eigenvector;
  PptVerdict verdict;
};

inline PptReport ppt_check(const ChoiOperator& j) {
  Matrix jtb = partial_transpose(j.matrix, j.dims, Subsystem::Second);
  EigResult eig = eig_hermitian(jtb);
  PptReport report;
  report.min_eigenvalue = eig.values(0);
  if (report.min_eigenvalue < -tol::certification_margin) {
    report.negative_eigenvector = eig.vectors.col(0);
    report.verdict = PptVerdict::QuantumDomainCertified;
  } else {
    report.verdict = PptVerdict::EBCompatible;
  }
  return report;
}

// Hermitian block operator with Tr[W rho_sep] <= 0 for separable rho.
struct Witness {
  Matrix w;
  BipartiteDims dims;

  Witness(Matrix m, BipartiteDims d) : w(std::move(m)), dims(d) {
    require_hermitian(w, "Witness");
    check_bipartite(w, dims, "Witness");
  }
};

// Partial-transpose eigenvector witness W = -(|eta><eta|)^{T_B} built from the
// negative eigenvector eta of J^{T_B}. Then Tr[W J] = -lambda_min > 0 and
// Tr[W (rho (x) sigma)] = -<eta| (rho (x) sigma)^{T_B} |eta> <= 0.
inline Witness build_witness(const ChoiOperator& j) {
  PptReport report = ppt_check(j);
  if (report.verdict != PptVerdict::QuantumDomainCertified)
    throw std::invalid_argument(
        "build_witness: Choi operator is PPT-compatible, no witness from this construction");
  const Vector& eta = *report.negative_eigenvector;
  Matrix w = -partial_transpose(eta * eta.adjoint(), j.dims, Subsystem::Second);
  return Witness(std::move(w), j.dims);
}

// Product-state expansion W = sum_xy omega_xy (xi_x^T (x) psi_y^T).
struct SparseDecomposition {
  std::vector<DensityMatrix> states_x;
  std::vector<DensityMatrix> states_y;
  std::map<std::pair<int, int>, double> omega;

  Matrix reconstruct() const {
    Matrix out;
    bool first = true;
    for (const auto& [xy, value] : omega) {
      Matrix term = value * kron(states_x[xy.first].rho.transpose(),
                                 states_y[xy.second].rho.transpose());
      if (first) {
        out = std::move(term);
        first = false;
      } else {
        out += term;
      }
    }
    return out;
  }

  int nonzero_count() const {
    int count = 0;
    for (const auto& [xy, value] : omega)
      if (std::abs(value) > tol::rank_cutoff) ++count;
    return count;
  }
};

namespace detail {

// Coordinate rows (in the Hermitian basis) of the transposed input states.
inline Eigen::MatrixXd frame_matrix(const std::vector<DensityMatrix>& states,
                                    const std::vector<Matrix>& basis) {
  Eigen::MatrixXd frame(states.size(), basis.size());
  for (size_t x = 0; x < states.size(); ++x)
    frame.row(static_cast<Eigen::Index>(x)) =
        hermitian_coords(states[x].rho.transpose(), basis).transpose();
  return frame;
}

inline int frame_rank(const Eigen::MatrixXd& frame) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(frame);
  qr.setThreshold(1e-8);
  return static_cast<int>(qr.rank());
}

}  // namespace detail

// Exact linear-inversion coefficients over tomographically complete families.
inline SparseDecomposition tomographic_decompose(const Witness& w,
                                                 const std::vector<DensityMatrix>& states_x,
                                                 const std::vector<DensityMatrix>& states_y) {
  auto basis_x = hermitian_basis(w.dims.dX);
  auto basis_y = hermitian_basis(w.dims.dY);
  Eigen::MatrixXd frame_x = detail::frame_matrix(states_x, basis_x);
  Eigen::MatrixXd frame_y = detail::frame_matrix(states_y, basis_y);
  if (detail::frame_rank(frame_x) < w.dims.dX * w.dims.dX)
    throw std::invalid_argument("tomographic_decompose: first input family is not tomographically complete");
  if (detail::frame_rank(frame_y) < w.dims.dY * w.dims.dY)
    throw std::invalid_argument("tomographic_decompose: second input family is not tomographically complete");

  // W coords C satisfy frame_x^T * Omega * frame_y = C with Omega the
  // coefficient matrix; solve both sides by least squares.
  const int nx = w.dims.dX * w.dims.dX, ny = w.dims.dY * w.dims.dY;
  Eigen::MatrixXd c(nx, ny);
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b)
      c(a, b) = frobenius_inner(kron(basis_x[a], basis_y[b]), w.w).real();
  Eigen::MatrixXd left = frame_x.transpose()
                             .jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                             .solve(c);  // |X| x ny
  Eigen::MatrixXd omega = frame_y.transpose()
                              .jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                              .solve(left.transpose())
                              .transpose();  // |X| x |Y|

  SparseDecomposition dec;
  dec.states_x = states_x;
  dec.states_y = states_y;
  for (int x = 0; x < omega.rows(); ++x)
    for (int y = 0; y < omega.cols(); ++y)
      if (std::abs(omega(x, y)) > tol::rank_cutoff) dec.omega[{x, y}] = omega(x, y);

  double residual = (dec.reconstruct() - w.w).norm();
  if (residual > tol::reconstruction)
    throw std::runtime_error("tomographic_decompose: reconstruction residual " +
                             std::to_string(residual));
  return dec;
}

namespace detail {

// Sign that minimizes the PSD shift for a traceless-ish Hermitian factor:
// prefer the orientation whose negative part is smaller. Ties (symmetric
// spectrum) fall back to making the first significant Hermitian-basis
// coordinate positive, which keeps the output deterministic.
inline int shift_minimizing_sign(const Matrix& f, const std::vector<Matrix>& basis) {
  EigResult eig = eig_hermitian(f);
  double lo = -eig.values(0);
  double hi = eig.values(eig.values.size() - 1);
  if (std::abs(lo - hi) > 1e-12) return lo <= hi ? 1 : -1;
  Eigen::VectorXd coords = hermitian_coords(f, basis);
  for (Eigen::Index i = 0; i < coords.size(); ++i)
    if (std::abs(coords(i)) > 1e-9) return coords(i) > 0 ? 1 : -1;
  return 1;
}

struct ShiftedState {
  Matrix unnormalized;  // PSD
  double shift;         // minimal a >= 0 with sign*F + a*1 PSD
  int sign;
};

inline ShiftedState psd_shift(const Matrix& f, const std::vector<Matrix>& basis) {
  int sign = shift_minimizing_sign(f, basis);
  Matrix oriented = sign > 0 ? f : Matrix(-f);
  double shift = std::max(0.0, -min_eigenvalue(oriented));
  return {oriented + shift * Matrix::Identity(f.rows(), f.cols()), shift, sign};
}

}  // namespace detail

// Sparse product-state decomposition with at most d^2 + 3 nonzero
// coefficients, d = min(dX, dY). Works on W^T: each operator-Schmidt factor
// is shifted by a minimal multiple of the identity to become PSD, the
// identity remainders are aggregated into one extra state per side, and
// everything is rescaled to unit-trace states at the end. States equal up to
// normalization are merged, so factors proportional to the identity collapse
// into index 0.
inline SparseDecomposition sparse_decompose(const Witness& w) {
  const int dX = w.dims.dX, dY = w.dims.dY;
  auto basis_x = hermitian_basis(dX);
  auto basis_y = hermitian_basis(dY);
  Matrix wt = w.w.transpose();
  OperatorSchmidtDecomposition schmidt = operator_schmidt(wt, w.dims);
  const int n = static_cast<int>(schmidt.coefficients.size());

  // Deterministic term order: stable-sort equal coefficients by the index of
  // the first significant left-factor coordinate.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  auto first_coord = [&](int i) {
    Eigen::VectorXd c = hermitian_coords(schmidt.left_factors[i], basis_x);
    for (Eigen::Index a = 0; a < c.size(); ++a)
      if (std::abs(c(a)) > 1e-9) return static_cast<int>(a);
    return static_cast<int>(c.size());
  };
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    if (std::abs(schmidt.coefficients(i) - schmidt.coefficients(j)) > 1e-12)
      return schmidt.coefficients(i) > schmidt.coefficients(j);
    return first_coord(i) < first_coord(j);
  });

  // Unnormalized states: index 0 is the identity on each side, indices
  // 1..n the shifted Schmidt factors, index n+1 the aggregate remainder.
  std::vector<Matrix> xi{Matrix::Identity(dX, dX)};
  std::vector<Matrix> psi{Matrix::Identity(dY, dY)};
  std::vector<double> coeff(1, 0.0);  // signed coefficient per term index
  std::vector<double> a_shift(1, 0.0), b_shift(1, 0.0);

  Matrix agg_a = Matrix::Zero(dX, dX);
  Matrix agg_b = Matrix::Zero(dY, dY);
  double mu = 0.0;

  struct Term {
    int x, y;
    double value;
  };
  std::vector<Term> terms;

  for (int idx : order) {
    detail::ShiftedState left = detail::psd_shift(schmidt.left_factors[idx], basis_x);
    detail::ShiftedState right = detail::psd_shift(schmidt.right_factors[idx], basis_y);
    double c = schmidt.coefficients(idx) * left.sign * right.sign;
    xi.push_back(left.unnormalized);
    psi.push_back(right.unnormalized);
    int term_index = static_cast<int>(xi.size()) - 1;
    terms.push_back({term_index, term_index, c});
    mu += c * left.shift * right.shift;
    agg_a -= c * right.shift * left.unnormalized;
    agg_b -= c * left.shift * right.unnormalized;
  }

  double a_last = 0.0, b_last = 0.0;
  int sign_a = 1, sign_b = 1;
  if (agg_a.cwiseAbs().maxCoeff() > tol::rank_cutoff) {
    detail::ShiftedState shifted = detail::psd_shift(agg_a, basis_x);
    xi.push_back(shifted.unnormalized);
    a_last = shifted.shift;
    sign_a = shifted.sign;
    terms.push_back({static_cast<int>(xi.size()) - 1, 0, double(sign_a)});
  }
  if (agg_b.cwiseAbs().maxCoeff() > tol::rank_cutoff) {
    detail::ShiftedState shifted = detail::psd_shift(agg_b, basis_y);
    psi.push_back(shifted.unnormalized);
    b_last = shifted.shift;
    sign_b = shifted.sign;
    terms.push_back({0, static_cast<int>(psi.size()) - 1, double(sign_b)});
  }
  terms.push_back({0, 0, mu - sign_a * a_last - sign_b * b_last});

  // Merge states that coincide up to normalization, normalize, and rescale
  // the coefficients by the dropped traces.
  auto canonicalize = [](std::vector<Matrix>& states, std::vector<int>& remap,
                         std::vector<double>& traces) {
    std::vector<Matrix> unique;
    for (size_t s = 0; s < states.size(); ++s) {
      double tr = states[s].trace().real();
      traces.push_back(tr);
      if (tr <= tol::rank_cutoff) {  // zero state, coefficient will vanish
        remap.push_back(-1);
        continue;
      }
      Matrix normalized = states[s] / tr;
      int found = -1;
      for (size_t u = 0; u < unique.size(); ++u)
        if ((unique[u] - normalized).cwiseAbs().maxCoeff() < 1e-9) {
          found = static_cast<int>(u);
          break;
        }
      if (found < 0) {
        unique.push_back(std::move(normalized));
        found = static_cast<int>(unique.size()) - 1;
      }
      remap.push_back(found);
    }
    states = std::move(unique);
  };

  std::vector<int> remap_x, remap_y;
  std::vector<double> trace_x, trace_y;
  canonicalize(xi, remap_x, trace_x);
  canonicalize(psi, remap_y, trace_y);

  SparseDecomposition dec;
  for (const auto& m : xi) dec.states_x.emplace_back(m);
  for (const auto& m : psi) dec.states_y.emplace_back(m);
  for (const auto& term : terms) {
    if (remap_x[term.x] < 0 || remap_y[term.y] < 0) continue;
    double value = term.value * trace_x[term.x] * trace_y[term.y];
    if (std::abs(value) <= tol::rank_cutoff) continue;
    dec.omega[{remap_x[term.x], remap_y[term.y]}] += value;
  }
  for (auto it = dec.omega.begin(); it != dec.omega.end();)
    it = std::abs(it->second) <= tol::rank_cutoff ? dec.omega.erase(it) : std::next(it);

  double residual = (dec.reconstruct() - w.w).norm();
  if (residual > tol::reconstruction)
    throw std::runtime_error("sparse_decompose: reconstruction residual " +
                             std::to_string(residual));
  return dec;
}

}  // namespace qmcert
