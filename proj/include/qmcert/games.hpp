#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qmcert/certification.hpp"
#include "qmcert/channels.hpp"

namespace qmcert {

// Trusted input-state families plus the size of the answer alphabet.
struct Scenario {
  std::vector<DensityMatrix> inputs_x;
  std::vector<DensityMatrix> inputs_y;
  int outcome_count;

  Scenario(std::vector<DensityMatrix> xs, std::vector<DensityMatrix> ys, int outcomes)
      : inputs_x(std::move(xs)), inputs_y(std::move(ys)), outcome_count(outcomes) {
    if (inputs_x.empty() || inputs_y.empty())
      throw std::invalid_argument("Scenario: empty input family");
    if (outcome_count < 1) throw std::invalid_argument("Scenario: outcome count must be >= 1");
    for (const auto& s : inputs_x)
      if (s.dim() != inputs_x[0].dim())
        throw std::invalid_argument("Scenario: inconsistent first-input dimensions");
    for (const auto& s : inputs_y)
      if (s.dim() != inputs_y[0].dim())
        throw std::invalid_argument("Scenario: inconsistent second-input dimensions");
  }

  int dX() const { return inputs_x[0].dim(); }
  int dY() const { return inputs_y[0].dim(); }
};

// Nonnegative tensor p(b|x,y), normalized over b. Outcome labels start at
// first_label (1 in the lossless convention, 0 once a loss outcome exists).
struct Correlation {
  int first_label = 1;
  std::vector<Eigen::MatrixXd> p;  // p[k](x, y) is the entry for label first_label + k

  int outcomes() const { return static_cast<int>(p.size()); }

  void validate() const {
    for (const auto& m : p)
      if (m.minCoeff() < -1e-12)
        throw std::runtime_error("Correlation: negative probability " +
                                 std::to_string(m.minCoeff()));
    Eigen::MatrixXd sum = p[0];
    for (size_t k = 1; k < p.size(); ++k) sum += p[k];
    double residual = (sum.array() - 1.0).abs().maxCoeff();
    if (residual > tol::trace_preserving)
      throw std::runtime_error("Correlation: normalization residual " + std::to_string(residual));
  }
};

// Payoff tensor wp(b, x, y); same labeling convention as Correlation.
struct Payoff {
  int first_label = 1;
  std::vector<Eigen::MatrixXd> wp;
};

struct Game {
  Scenario scenario;
  Payoff payoff;
  double eb_threshold = 0.0;
};

// Generalized Bell measurement: d^2 rank-1 projectors obtained by acting with
// Weyl shift/clock operators on Phi+; element (a,b) = (0,0), i.e. the first
// one, is the Phi+ projector itself. Lexicographic (a,b) ordering.
inline POVM bell_povm(int d) {
  Matrix shift = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) shift((i + 1) % d, i) = 1.0;
  Matrix clock = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    clock(i, i) = std::exp(Complex(0, 2.0 * M_PI * i / d));
  Matrix phi = max_entangled(d).rho;
  std::vector<Matrix> elements;
  Matrix xa = Matrix::Identity(d, d);
  for (int a = 0; a < d; ++a) {
    Matrix weyl = xa;
    for (int b = 0; b < d; ++b) {
      Matrix u = kron(Matrix::Identity(d, d), weyl);
      elements.push_back(u * phi * u.adjoint());
      weyl = weyl * clock;
    }
    xa = shift * xa;
  }
  return POVM(std::move(elements));
}

inline POVM partial_bell_povm(int d) {
  Matrix phi = max_entangled(d).rho;
  return POVM({phi, Matrix::Identity(d * d, d * d) - phi});
}

// Tomographically complete pure-state family for dimension d: the basis
// states |j>, plus (|j>+|k>)/sqrt(2) and (|j>+i|k>)/sqrt(2) for j<k.
inline std::vector<DensityMatrix> standard_family(int d) {
  std::vector<DensityMatrix> states;
  for (int j = 0; j < d; ++j) {
    Vector e = Vector::Zero(d);
    e(j) = 1.0;
    states.push_back(pure_state(e));
  }
  for (int j = 0; j < d; ++j)
    for (int k = j + 1; k < d; ++k) {
      Vector plus = Vector::Zero(d);
      plus(j) = 1.0;
      plus(k) = 1.0;
      states.push_back(pure_state(plus));
      Vector imag = Vector::Zero(d);
      imag(j) = 1.0;
      imag(k) = Complex(0, 1);
      states.push_back(pure_state(imag));
    }
  return states;
}

// The qubit tetrahedral family xi_x = U_x tau U_x^dag with U in
// {1, sigma_x, sigma_y, sigma_z} and tau = 1/2 + (sx + sy + sz)/sqrt(12).
inline std::vector<DensityMatrix> tetrahedral_family() {
  Matrix tau = Matrix::Identity(2, 2) / 2.0 +
               (pauli_x() + pauli_y() + pauli_z()) / std::sqrt(12.0);
  std::vector<Matrix> us{Matrix::Identity(2, 2), pauli_x(), pauli_y(), pauli_z()};
  std::vector<DensityMatrix> states;
  for (const auto& u : us) states.emplace_back(u * tau * u.adjoint());
  return states;
}

enum class InputFamily { Standard, Tetrahedral };

// Scenario with tomographically complete inputs and a full Bell measurement
// whose first element is Phi+. The correlation it produces determines the
// channel completely.
struct SignatureScenario : Scenario {
  POVM bell;

  SignatureScenario(std::vector<DensityMatrix> xs, std::vector<DensityMatrix> ys, POVM b)
      : Scenario(std::move(xs), std::move(ys), b.size()), bell(std::move(b)) {
    if (static_cast<int>(inputs_x.size()) != dX() * dX() ||
        static_cast<int>(inputs_y.size()) != dY() * dY())
      throw std::invalid_argument("SignatureScenario: input family size must be d^2");
    if (bell.dim() != dY() * dY())
      throw std::invalid_argument("SignatureScenario: Bell measurement dimension mismatch");
  }
};

inline SignatureScenario signature_scenario(int dA, int dB,
                                            InputFamily family = InputFamily::Standard) {
  auto make = [&](int d) {
    if (family == InputFamily::Tetrahedral) {
      if (d != 2)
        throw std::invalid_argument("signature_scenario: tetrahedral family is qubit-only");
      return tetrahedral_family();
    }
    return standard_family(d);
  };
  return SignatureScenario(make(dA), make(dB), bell_povm(dB));
}

// sigma_N(b|x,y) = Tr[(N(xi_x) (x) psi_y) B_b]
inline Correlation signature_correlation(const QuantumChannel& n, const SignatureScenario& s) {
  if (n.dA != s.dX() || n.dB != s.dY())
    throw std::invalid_argument("signature_correlation: channel/scenario dimension mismatch");
  Correlation corr;
  corr.first_label = 1;
  const int nx = static_cast<int>(s.inputs_x.size());
  const int ny = static_cast<int>(s.inputs_y.size());
  std::vector<Matrix> outputs;
  for (const auto& xi : s.inputs_x) outputs.push_back(apply_kraus(n.kraus, xi.rho));
  for (int b = 0; b < s.bell.size(); ++b) {
    Eigen::MatrixXd grid(nx, ny);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y)
        grid(x, y) =
            frobenius_inner(s.bell.elements[b], kron(outputs[x], s.inputs_y[y].rho)).real();
    corr.p.push_back(std::move(grid));
  }
  corr.validate();
  return corr;
}

// Classical-memory adversary: p(b|x,y) = sum_i Tr[xi_x Pi_i] Tr[psi_y B_{b|i}]
inline Correlation eb_strategy_correlation(const Scenario& s, const POVM& first_measurement,
                                           const std::vector<POVM>& responses) {
  if (first_measurement.size() != static_cast<int>(responses.size()))
    throw std::invalid_argument("eb_strategy_correlation: measurement/response count mismatch");
  if (first_measurement.dim() != s.dX())
    throw std::invalid_argument("eb_strategy_correlation: first measurement dimension mismatch");
  Correlation corr;
  corr.first_label = 1;
  const int nx = static_cast<int>(s.inputs_x.size());
  const int ny = static_cast<int>(s.inputs_y.size());
  for (int b = 0; b < s.outcome_count; ++b) corr.p.emplace_back(Eigen::MatrixXd::Zero(nx, ny));
  for (int i = 0; i < first_measurement.size(); ++i) {
    const POVM& response = responses[i];
    if (response.dim() != s.dY() || response.size() != s.outcome_count)
      throw std::invalid_argument("eb_strategy_correlation: response POVM mismatch");
    Eigen::VectorXd px(nx), py(ny);
    for (int x = 0; x < nx; ++x)
      px(x) = frobenius_inner(first_measurement.elements[i], s.inputs_x[x].rho).real();
    for (int b = 0; b < s.outcome_count; ++b) {
      for (int y = 0; y < ny; ++y)
        py(y) = frobenius_inner(response.elements[b], s.inputs_y[y].rho).real();
      corr.p[b] += px * py.transpose();
    }
  }
  corr.validate();
  return corr;
}

// Admissible strategy of Definition-2 form: pre-processing instrument plus a
// joint measurement on (channel output, second input) per branch.
inline Correlation admissible_correlation(const QuantumChannel& n, const Scenario& s,
                                          const Instrument& instrument,
                                          const std::vector<POVM>& responses) {
  if (instrument.size() != static_cast<int>(responses.size()))
    throw std::invalid_argument("admissible_correlation: branch/response count mismatch");
  if (instrument.dIn != s.dX() || instrument.dOut != n.dA)
    throw std::invalid_argument("admissible_correlation: instrument dimension mismatch");
  Correlation corr;
  corr.first_label = 1;
  const int nx = static_cast<int>(s.inputs_x.size());
  const int ny = static_cast<int>(s.inputs_y.size());
  for (int b = 0; b < s.outcome_count; ++b) corr.p.emplace_back(Eigen::MatrixXd::Zero(nx, ny));
  for (int i = 0; i < instrument.size(); ++i) {
    const POVM& response = responses[i];
    if (response.dim() != n.dB * s.dY() || response.size() != s.outcome_count)
      throw std::invalid_argument("admissible_correlation: response POVM mismatch");
    for (int x = 0; x < nx; ++x) {
      Matrix out = apply_kraus(n.kraus, apply_kraus(instrument.branches[i], s.inputs_x[x].rho));
      for (int y = 0; y < ny; ++y) {
        Matrix joint = kron(out, s.inputs_y[y].rho);
        for (int b = 0; b < s.outcome_count; ++b)
          corr.p[b](x, y) += frobenius_inner(response.elements[b], joint).real();
      }
    }
  }
  corr.validate();
  return corr;
}

// sum_{b,x,y} wp(b,x,y) p(b|x,y), pairing entries by outcome label.
inline double expected_payoff(const Game& g, const Correlation& p) {
  double total = 0.0;
  for (int k = 0; k < static_cast<int>(g.payoff.wp.size()); ++k) {
    int label = g.payoff.first_label + k;
    int idx = label - p.first_label;
    if (idx < 0 || idx >= p.outcomes()) continue;  // zero-payoff labels may be absent
    const Eigen::MatrixXd& w = g.payoff.wp[k];
    if (w.rows() != p.p[idx].rows() || w.cols() != p.p[idx].cols())
      throw std::invalid_argument("expected_payoff: shape mismatch");
    total += (w.array() * p.p[idx].array()).sum();
  }
  return total;
}

// Witness-compiled game: wp(1,x,y) = (dY/dX) omega_xy, all other outcomes
// score zero; the EB threshold is exactly zero for these games. The dY/dX
// factor makes the expected payoff against sigma_N equal Tr[W J_N] (the Bell
// projector contributes 1/dY, the channel-state duality contributes dX), so
// a PT-eigenvector witness scores exactly -lambda_min.
inline Game game_from_witness(const SparseDecomposition& dec, int outcome_count) {
  const int nx = static_cast<int>(dec.states_x.size());
  const int ny = static_cast<int>(dec.states_y.size());
  const double scale =
      static_cast<double>(dec.states_y[0].dim()) / dec.states_x[0].dim();
  Eigen::MatrixXd w1 = Eigen::MatrixXd::Zero(nx, ny);
  for (const auto& [xy, value] : dec.omega) w1(xy.first, xy.second) = scale * value;
  Payoff payoff;
  payoff.first_label = 1;
  payoff.wp.push_back(std::move(w1));
  for (int b = 1; b < outcome_count; ++b)
    payoff.wp.emplace_back(Eigen::MatrixXd::Zero(nx, ny));
  return Game{Scenario(dec.states_x, dec.states_y, outcome_count), std::move(payoff), 0.0};
}

// Loss extension: a new outcome b=0 with zero payoff absorbs erasures;
// p'(0|x,y) = 1 - eta and p'(b|x,y) = eta p(b|x,y) for the original labels,
// so the expected payoff scales exactly by eta.
inline std::pair<Game, Correlation> loss_extend(const Game& g, const Correlation& p, double eta) {
  if (eta <= 0.0 || eta > 1.0) throw std::invalid_argument("loss_extend: eta out of (0,1]");
  if (g.payoff.first_label < 1 || p.first_label < 1)
    throw std::invalid_argument("loss_extend: game already has a loss outcome");
  const int nx = static_cast<int>(g.scenario.inputs_x.size());
  const int ny = static_cast<int>(g.scenario.inputs_y.size());
  Game extended{Scenario(g.scenario.inputs_x, g.scenario.inputs_y, g.scenario.outcome_count + 1),
                Payoff{}, g.eb_threshold};
  extended.payoff.first_label = 0;
  extended.payoff.wp.emplace_back(Eigen::MatrixXd::Zero(nx, ny));
  for (int k = g.payoff.first_label; k > 1; --k)
    extended.payoff.wp.emplace_back(Eigen::MatrixXd::Zero(nx, ny));
  for (const auto& w : g.payoff.wp) extended.payoff.wp.push_back(w);
  Correlation scaled;
  scaled.first_label = 0;
  scaled.p.emplace_back(Eigen::MatrixXd::Constant(p.p[0].rows(), p.p[0].cols(), 1.0 - eta));
  for (int k = p.first_label; k > 1; --k)
    scaled.p.emplace_back(Eigen::MatrixXd::Zero(p.p[0].rows(), p.p[0].cols()));
  for (const auto& m : p.p) scaled.p.push_back(eta * m);
  scaled.validate();
  return {std::move(extended), std::move(scaled)};
}

// Linear inversion of sigma(1|x,y) = Tr[J (xi_x^T (x) psi_y^T)] over the
// product frame of a signature scenario.
inline ChoiOperator reconstruct_choi(const Correlation& sigma, const SignatureScenario& s) {
  const int dA = s.dX(), dB = s.dY();
  auto basis_x = hermitian_basis(dA);
  auto basis_y = hermitian_basis(dB);
  Eigen::MatrixXd frame_x = detail::frame_matrix(s.inputs_x, basis_x);
  Eigen::MatrixXd frame_y = detail::frame_matrix(s.inputs_y, basis_y);
  if (detail::frame_rank(frame_x) < dA * dA || detail::frame_rank(frame_y) < dB * dB)
    throw std::invalid_argument("reconstruct_choi: rank-deficient input frame");
  int idx = 1 - sigma.first_label;
  if (idx < 0 || idx >= sigma.outcomes())
    throw std::invalid_argument("reconstruct_choi: correlation lacks outcome 1");
  // sigma(1|x,y) = (dA/dB) Tr[J (xi^T (x) psi^T)], so rescale before inverting.
  Eigen::MatrixXd data = (static_cast<double>(dB) / dA) * sigma.p[idx];
  if (data.rows() != frame_x.rows() || data.cols() != frame_y.rows())
    throw std::invalid_argument("reconstruct_choi: correlation/scenario shape mismatch");
  // data = frame_x * C * frame_y^T with C the Choi coordinate matrix.
  Eigen::MatrixXd left =
      frame_x.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(data);
  Eigen::MatrixXd c = frame_y.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                          .solve(left.transpose())
                          .transpose();
  double residual = (frame_x * c * frame_y.transpose() - data).cwiseAbs().maxCoeff();
  if (residual > tol::reconstruction)
    throw std::runtime_error("reconstruct_choi: inconsistent data, residual " +
                             std::to_string(residual));
  Matrix j = Matrix::Zero(dA * dB, dA * dB);
  for (int a = 0; a < dA * dA; ++a)
    for (int b = 0; b < dB * dB; ++b) j += c(a, b) * kron(basis_x[a], basis_y[b]);
  j = (j + j.adjoint()) / 2.0;
  return ChoiOperator(std::move(j), BipartiteDims(dA, dB));
}

enum class CertVerdict { Certified, NotCertified };

struct CertificationOptions {
  InputFamily family = InputFamily::Standard;
  bool sparse = false;  // decompose the witness sparsely instead of over the frame
  std::optional<Witness> witness;  // user-supplied witness overrides the default
};

struct CertificationResult {
  PptReport ppt;
  CertVerdict verdict;
  std::optional<Witness> witness;
  std::optional<Game> game;
  std::optional<Correlation> correlation;
  double payoff = 0.0;
  std::string note;
};

// Full pipeline: Choi -> PPT check -> witness -> product decomposition ->
// game -> signature payoff.
inline CertificationResult certify(const QuantumChannel& n, const CertificationOptions& options = {}) {
  CertificationResult result;
  ChoiOperator j = kraus_to_choi(n);
  result.ppt = ppt_check(j);
  bool have_witness = options.witness.has_value();
  if (result.ppt.verdict == PptVerdict::EBCompatible && !have_witness) {
    result.verdict = CertVerdict::NotCertified;
    result.note = n.dA * n.dB <= 6
                      ? "PPT Choi operator: channel is entanglement-breaking-compatible"
                      : "PPT Choi operator: not certified (PPT-entangled non-EB channels are "
                        "outside this construction)";
    return result;
  }
  Witness witness = have_witness ? *options.witness : build_witness(j);
  SignatureScenario scenario = signature_scenario(n.dA, n.dB, options.family);
  SparseDecomposition dec =
      options.sparse ? sparse_decompose(witness)
                     : tomographic_decompose(witness, scenario.inputs_x, scenario.inputs_y);
  int outcome_count = n.dB * n.dB;
  Game game = game_from_witness(dec, outcome_count);
  Correlation corr;
  if (options.sparse) {
    // The sparse states need not form a complete frame; evaluate the game
    // correlation directly over its own inputs with the full Bell POVM.
    POVM bell = bell_povm(n.dB);
    Correlation c;
    c.first_label = 1;
    const int nx = static_cast<int>(game.scenario.inputs_x.size());
    const int ny = static_cast<int>(game.scenario.inputs_y.size());
    for (int b = 0; b < bell.size(); ++b) {
      Eigen::MatrixXd grid(nx, ny);
      for (int x = 0; x < nx; ++x) {
        Matrix out = apply_kraus(n.kraus, game.scenario.inputs_x[x].rho);
        for (int y = 0; y < ny; ++y)
          grid(x, y) =
              frobenius_inner(bell.elements[b], kron(out, game.scenario.inputs_y[y].rho)).real();
      }
      c.p.push_back(std::move(grid));
    }
    c.validate();
    corr = std::move(c);
  } else {
    corr = signature_correlation(n, scenario);
  }
  result.payoff = expected_payoff(game, corr);
  result.witness = std::move(witness);
  result.game = std::move(game);
  result.correlation = std::move(corr);
  result.verdict = result.payoff > tol::certification_margin ? CertVerdict::Certified
                                                             : CertVerdict::NotCertified;
  if (result.verdict == CertVerdict::NotCertified)
    result.note = "witness payoff below certification margin";
  return result;
}

}  // namespace qmcert
