#pragma once

#include <vector>

#include "qmcert/linalg.hpp"

namespace qmcert {

// CPTP map dA -> dB stored as a Kraus list.
struct QuantumChannel {
  int dA;
  int dB;
  std::vector<Matrix> kraus;

  QuantumChannel(int da, int db, std::vector<Matrix> ks)
      : dA(da), dB(db), kraus(std::move(ks)) {
    if (kraus.empty()) throw std::invalid_argument("QuantumChannel: empty Kraus list");
    Matrix sum = Matrix::Zero(dA, dA);
    for (const auto& k : kraus) {
      check_finite(k, "QuantumChannel");
      if (k.rows() != dB || k.cols() != dA)
        throw std::invalid_argument("QuantumChannel: Kraus operator shape mismatch");
      sum += k.adjoint() * k;
    }
    double residual = (sum - Matrix::Identity(dA, dA)).cwiseAbs().maxCoeff();
    if (residual > tol::trace_preserving)
      throw std::invalid_argument("QuantumChannel: trace preservation residual " +
                                  std::to_string(residual));
  }
};

inline QuantumChannel identity_channel(int d) {
  return QuantumChannel(d, d, {Matrix::Identity(d, d)});
}

// Linear action sum_k K rho K^dag; accepts subnormalized input.
inline Matrix apply_kraus(const std::vector<Matrix>& kraus, const Matrix& rho) {
  Matrix out = kraus[0] * rho * kraus[0].adjoint();
  for (size_t k = 1; k < kraus.size(); ++k) out += kraus[k] * rho * kraus[k].adjoint();
  return out;
}

inline DensityMatrix apply_channel(const QuantumChannel& n, const DensityMatrix& rho) {
  if (rho.dim() != n.dA) throw std::invalid_argument("apply_channel: dimension mismatch");
  return DensityMatrix(apply_kraus(n.kraus, rho.rho));
}

// Heisenberg-picture action sum_k K^dag H K (adjoint map, for POVM pullback).
inline Matrix apply_heisenberg(const QuantumChannel& n, const Matrix& h) {
  if (h.rows() != n.dB || h.cols() != n.dB)
    throw std::invalid_argument("apply_heisenberg: dimension mismatch");
  Matrix out = n.kraus[0].adjoint() * h * n.kraus[0];
  for (size_t k = 1; k < n.kraus.size(); ++k) out += n.kraus[k].adjoint() * h * n.kraus[k];
  return out;
}

// Choi state (1 (x) N)(Phi+), trace-1 convention; dims = (dA, dB).
struct ChoiOperator {
  Matrix matrix;
  BipartiteDims dims;

  ChoiOperator(Matrix m, BipartiteDims d) : matrix(std::move(m)), dims(d) {
    require_hermitian(matrix, "ChoiOperator");
    check_bipartite(matrix, dims, "ChoiOperator");
    double lmin = min_eigenvalue(matrix);
    if (lmin < -tol::psd)
      throw std::invalid_argument("ChoiOperator: min eigenvalue " + std::to_string(lmin));
    Matrix marginal = partial_trace(matrix, dims, Subsystem::First);
    double residual =
        (marginal - Matrix::Identity(dims.dX, dims.dX) / dims.dX).cwiseAbs().maxCoeff();
    if (residual > tol::trace_preserving)
      throw std::invalid_argument("ChoiOperator: Tr_B residual " + std::to_string(residual));
  }
};

inline ChoiOperator kraus_to_choi(const QuantumChannel& n) {
  const int dA = n.dA, dB = n.dB;
  Matrix j = Matrix::Zero(dA * dB, dA * dB);
  for (const auto& k : n.kraus)
    for (int i = 0; i < dA; ++i)
      for (int jj = 0; jj < dA; ++jj)
        // (1 (x) N)(|i><j| / dA) block
        for (int a = 0; a < dB; ++a)
          for (int b = 0; b < dB; ++b)
            j(i * dB + a, jj * dB + b) += k(a, i) * std::conj(k(b, jj)) / double(dA);
  return ChoiOperator(std::move(j), BipartiteDims(dA, dB));
}

inline QuantumChannel choi_to_kraus(const ChoiOperator& j) {
  const int dA = j.dims.dX, dB = j.dims.dY;
  EigResult eig = eig_hermitian(j.matrix);
  std::vector<Matrix> kraus;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    double lambda = eig.values(k);
    if (lambda < tol::rank_cutoff) continue;
    Matrix op(dB, dA);
    for (int i = 0; i < dA; ++i)
      for (int a = 0; a < dB; ++a) op(a, i) = eig.vectors(i * dB + a, k);
    kraus.push_back(std::sqrt(lambda * dA) * op);
  }
  if (kraus.empty()) throw std::invalid_argument("choi_to_kraus: zero Choi operator");
  return QuantumChannel(dA, dB, std::move(kraus));
}

// d * Tr[J (A^T (x) B)]; equals Tr[N(A) B] for the channel of J.
inline double duality_pairing(const ChoiOperator& j, const Matrix& a, const Matrix& b) {
  if (a.rows() != j.dims.dX || b.rows() != j.dims.dY)
    throw std::invalid_argument("duality_pairing: dimension mismatch");
  return j.dims.dX * frobenius_inner(j.matrix, kron(a.transpose(), b)).real();
}

// N_nu(rho) = nu rho + (1 - nu) 1/2 on a qubit.
inline QuantumChannel depolarizing_channel(double nu) {
  if (nu < 0.0 || nu > 1.0) throw std::invalid_argument("depolarizing_channel: nu out of [0,1]");
  // Pauli-twirl Kraus form: p_1 = (1+3nu)/4 on identity, (1-nu)/4 on each Pauli.
  double p_id = (1.0 + 3.0 * nu) / 4.0;
  double p_pauli = (1.0 - nu) / 4.0;
  std::vector<Matrix> kraus;
  if (p_id > 0) kraus.push_back(std::sqrt(p_id) * Matrix::Identity(2, 2));
  if (p_pauli > 0) {
    kraus.push_back(std::sqrt(p_pauli) * pauli_x());
    kraus.push_back(std::sqrt(p_pauli) * pauli_y());
    kraus.push_back(std::sqrt(p_pauli) * pauli_z());
  }
  return QuantumChannel(2, 2, std::move(kraus));
}

// E_eta(rho) = eta rho + (1 - eta)|0><0| with the erasure flag realized as an
// extra output dimension (index d), guaranteed outside the range of any
// channel into the first d dimensions.
inline QuantumChannel erasure_channel(double eta, int d) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("erasure_channel: eta out of [0,1]");
  if (d < 1) throw std::invalid_argument("erasure_channel: d must be positive");
  std::vector<Matrix> kraus;
  Matrix embed = Matrix::Zero(d + 1, d);
  embed.topRows(d) = Matrix::Identity(d, d);
  if (eta > 0) kraus.push_back(std::sqrt(eta) * embed);
  for (int i = 0; i < d; ++i) {
    Matrix flag = Matrix::Zero(d + 1, d);
    flag(d, i) = std::sqrt(1.0 - eta);
    if (eta < 1.0) kraus.push_back(flag);
  }
  return QuantumChannel(d, d + 1, std::move(kraus));
}

// POVM: PSD elements summing to identity.
struct POVM {
  std::vector<Matrix> elements;

  explicit POVM(std::vector<Matrix> elems) : elements(std::move(elems)) {
    if (elements.empty()) throw std::invalid_argument("POVM: no elements");
    Matrix sum = Matrix::Zero(elements[0].rows(), elements[0].cols());
    for (const auto& e : elements) {
      require_hermitian(e, "POVM element");
      if (e.rows() != sum.rows()) throw std::invalid_argument("POVM: element dimension mismatch");
      double lmin = min_eigenvalue(e);
      if (lmin < -tol::psd)
        throw std::invalid_argument("POVM element: min eigenvalue " + std::to_string(lmin));
      sum += e;
    }
    double residual = (sum - Matrix::Identity(sum.rows(), sum.cols())).cwiseAbs().maxCoeff();
    if (residual > tol::trace_preserving)
      throw std::invalid_argument("POVM: completeness residual " + std::to_string(residual));
  }

  int dim() const { return static_cast<int>(elements[0].rows()); }
  int size() const { return static_cast<int>(elements.size()); }
};

// N(rho) = sum_i rho'_i Tr[Pi_i rho]. Entanglement-breaking by construction.
inline QuantumChannel measure_and_prepare(const POVM& povm,
                                          const std::vector<DensityMatrix>& preparations) {
  if (preparations.empty() || povm.size() != static_cast<int>(preparations.size()))
    throw std::invalid_argument("measure_and_prepare: POVM/preparation count mismatch");
  const int dA = povm.dim();
  const int dB = preparations[0].dim();
  std::vector<Matrix> kraus;
  for (int i = 0; i < povm.size(); ++i) {
    if (preparations[i].dim() != dB)
      throw std::invalid_argument("measure_and_prepare: preparation dimension mismatch");
    // Kraus factorization: sqrt(rho'_i) |m> <n| sqrt(Pi_i) over eigenbases.
    EigResult pe = eig_hermitian(povm.elements[i]);
    EigResult re = eig_hermitian(preparations[i].rho);
    for (Eigen::Index n = 0; n < pe.values.size(); ++n) {
      if (pe.values(n) < tol::rank_cutoff) continue;
      for (Eigen::Index m = 0; m < re.values.size(); ++m) {
        if (re.values(m) < tol::rank_cutoff) continue;
        Matrix k = std::sqrt(re.values(m) * pe.values(n)) * re.vectors.col(m) *
                   pe.vectors.col(n).adjoint();
        kraus.push_back(std::move(k));
      }
    }
  }
  return QuantumChannel(dA, dB, std::move(kraus));
}

inline QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
  if (first.dB != second.dA) throw std::invalid_argument("compose: dimension mismatch");
  std::vector<Matrix> kraus;
  kraus.reserve(first.kraus.size() * second.kraus.size());
  for (const auto& l : second.kraus)
    for (const auto& k : first.kraus) kraus.push_back(l * k);
  return QuantumChannel(first.dA, second.dB, std::move(kraus));
}

// Instrument: CP branches dIn -> dOut whose sum is trace preserving.
struct Instrument {
  int dIn;
  int dOut;
  std::vector<std::vector<Matrix>> branches;  // branches[i] = Kraus list of I_i

  Instrument(int din, int dout, std::vector<std::vector<Matrix>> brs)
      : dIn(din), dOut(dout), branches(std::move(brs)) {
    if (branches.empty()) throw std::invalid_argument("Instrument: no branches");
    Matrix sum = Matrix::Zero(dIn, dIn);
    for (const auto& branch : branches)
      for (const auto& k : branch) {
        if (k.rows() != dOut || k.cols() != dIn)
          throw std::invalid_argument("Instrument: Kraus shape mismatch");
        sum += k.adjoint() * k;
      }
    double residual = (sum - Matrix::Identity(dIn, dIn)).cwiseAbs().maxCoeff();
    if (residual > tol::trace_preserving)
      throw std::invalid_argument("Instrument: trace preservation residual " +
                                  std::to_string(residual));
  }

  int size() const { return static_cast<int>(branches.size()); }
};

// Classically correlated supermap: pre-processing instrument plus one decoder
// channel per branch. Preexisting randomness is kept implicit via the
// flattened branch index.
struct Supermap {
  Instrument instrument;            // A' -> A
  std::vector<QuantumChannel> decoders;  // B -> B'

  Supermap(Instrument instr, std::vector<QuantumChannel> decs)
      : instrument(std::move(instr)), decoders(std::move(decs)) {
    if (instrument.size() != static_cast<int>(decoders.size()))
      throw std::invalid_argument("Supermap: branch/decoder count mismatch");
  }
};

// N' = sum_i D_i o N o I_i
inline QuantumChannel apply_supermap(const Supermap& sm, const QuantumChannel& n) {
  if (sm.instrument.dOut != n.dA)
    throw std::invalid_argument("apply_supermap: instrument output dimension mismatch");
  std::vector<Matrix> kraus;
  for (int i = 0; i < sm.instrument.size(); ++i) {
    const auto& decoder = sm.decoders[i];
    if (decoder.dA != n.dB)
      throw std::invalid_argument("apply_supermap: decoder input dimension mismatch");
    for (const auto& d : decoder.kraus)
      for (const auto& m : n.kraus)
        for (const auto& k : sm.instrument.branches[i]) kraus.push_back(d * m * k);
  }
  return QuantumChannel(sm.instrument.dIn, sm.decoders[0].dB, std::move(kraus));
}

}  // namespace qmcert
