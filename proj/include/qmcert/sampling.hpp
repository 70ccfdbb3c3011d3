#pragma once

#include <random>

#include "qmcert/channels.hpp"
#include "qmcert/games.hpp"

// Seeded generators for random states, channels, measurements and
// strategies. All draws go through a caller-owned engine so runs are
// reproducible.
namespace qmcert::sample {

using Rng = std::mt19937_64;

inline Matrix ginibre(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
  return g;
}

inline Matrix unitary(Rng& rng, int d) {
  Matrix g = ginibre(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    Complex phase = r(i, i) / std::abs(r(i, i));
    q.col(i) *= phase;
  }
  return q;
}

inline DensityMatrix density_matrix(Rng& rng, int d) {
  Matrix g = ginibre(rng, d, d);
  Matrix rho = g * g.adjoint();
  return DensityMatrix(rho / rho.trace().real());
}

inline DensityMatrix pure(Rng& rng, int d) {
  return pure_state(ginibre(rng, d, 1).col(0));
}

inline Matrix inverse_sqrt_psd(const Matrix& s) {
  EigResult eig = eig_hermitian(s);
  Matrix out = Matrix::Zero(s.rows(), s.cols());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    double lambda = std::max(eig.values(k), 1e-14);
    out += (1.0 / std::sqrt(lambda)) * eig.vectors.col(k) * eig.vectors.col(k).adjoint();
  }
  return out;
}

inline QuantumChannel channel(Rng& rng, int dA, int dB, int kraus_count = 0) {
  if (kraus_count <= 0) kraus_count = dA * dB;
  std::vector<Matrix> raw;
  Matrix sum = Matrix::Zero(dA, dA);
  for (int k = 0; k < kraus_count; ++k) {
    raw.push_back(ginibre(rng, dB, dA));
    sum += raw.back().adjoint() * raw.back();
  }
  Matrix fix = inverse_sqrt_psd(sum);
  for (auto& k : raw) k = k * fix;
  return QuantumChannel(dA, dB, std::move(raw));
}

inline POVM povm(Rng& rng, int d, int elements) {
  std::vector<Matrix> raw;
  Matrix sum = Matrix::Zero(d, d);
  for (int i = 0; i < elements; ++i) {
    Matrix g = ginibre(rng, d, d);
    raw.push_back(g * g.adjoint());
    sum += raw.back();
  }
  Matrix fix = inverse_sqrt_psd(sum);
  for (auto& e : raw) e = fix * e * fix;
  // Symmetrize away the last floating-point dust.
  for (auto& e : raw) e = (e + e.adjoint()) / 2.0;
  return POVM(std::move(raw));
}

inline Instrument instrument(Rng& rng, int dIn, int dOut, int branches, int kraus_per_branch = 2) {
  std::vector<std::vector<Matrix>> raw(branches);
  Matrix sum = Matrix::Zero(dIn, dIn);
  for (int i = 0; i < branches; ++i)
    for (int k = 0; k < kraus_per_branch; ++k) {
      raw[i].push_back(ginibre(rng, dOut, dIn));
      sum += raw[i].back().adjoint() * raw[i].back();
    }
  Matrix fix = inverse_sqrt_psd(sum);
  for (auto& branch : raw)
    for (auto& k : branch) k = k * fix;
  return Instrument(dIn, dOut, std::move(raw));
}

inline QuantumChannel eb_channel(Rng& rng, int dA, int dB, int outcomes = 0) {
  if (outcomes <= 0) outcomes = dA * dA;
  POVM measurement = povm(rng, dA, outcomes);
  std::vector<DensityMatrix> preparations;
  for (int i = 0; i < outcomes; ++i) preparations.push_back(density_matrix(rng, dB));
  return measure_and_prepare(measurement, preparations);
}

inline Supermap supermap(Rng& rng, int dInPrime, int dA, int dB, int dOutPrime, int branches = 2) {
  Instrument instr = instrument(rng, dInPrime, dA, branches);
  std::vector<QuantumChannel> decoders;
  for (int i = 0; i < branches; ++i) decoders.push_back(channel(rng, dB, dOutPrime));
  return Supermap(std::move(instr), std::move(decoders));
}

// Random classical-memory strategy for a scenario: a POVM on the first
// input plus one response POVM per outcome of it.
inline std::pair<POVM, std::vector<POVM>> eb_strategy(Rng& rng, const Scenario& s,
                                                      int memory_outcomes = 3) {
  POVM first = povm(rng, s.dX(), memory_outcomes);
  std::vector<POVM> responses;
  for (int i = 0; i < memory_outcomes; ++i)
    responses.push_back(povm(rng, s.dY(), s.outcome_count));
  return {std::move(first), std::move(responses)};
}

}  // namespace qmcert::sample
