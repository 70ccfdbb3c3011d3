#include <catch2/catch_amalgamated.hpp>

#include "qmcert/certification.hpp"
#include "qmcert/channels.hpp"
#include "qmcert/sampling.hpp"

using namespace qmcert;

TEST_CASE("apply channel") {
  sample::Rng rng(31);
  DensityMatrix rho = sample::density_matrix(rng, 2);
  CHECK((apply_channel(identity_channel(2), rho).rho - rho.rho).cwiseAbs().maxCoeff() < 1e-14);

  DensityMatrix fully_mixed = apply_channel(depolarizing_channel(0.0), rho);
  CHECK((fully_mixed.rho - identity(2) / 2.0).cwiseAbs().maxCoeff() < 1e-12);

  Vector e0 = Vector::Zero(2);
  e0(0) = 1.0;
  DensityMatrix out = apply_channel(depolarizing_channel(0.5), pure_state(e0));
  CHECK(out.rho(0, 0).real() == Catch::Approx(0.75).margin(1e-12));
  CHECK(out.rho(1, 1).real() == Catch::Approx(0.25).margin(1e-12));

  CHECK_THROWS_AS(apply_channel(identity_channel(3), rho), std::invalid_argument);
}

TEST_CASE("kraus to choi") {
  ChoiOperator id = kraus_to_choi(identity_channel(2));
  CHECK((id.matrix - max_entangled(2).rho).cwiseAbs().maxCoeff() < 1e-12);

  for (double nu : {0.0, 0.3, 0.7, 1.0}) {
    ChoiOperator j = kraus_to_choi(depolarizing_channel(nu));
    Matrix expected = nu * max_entangled(2).rho + (1 - nu) * identity(4) / 4.0;
    CHECK((j.matrix - expected).cwiseAbs().maxCoeff() < 1e-12);
  }

  sample::Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    QuantumChannel eb = sample::eb_channel(rng, 2, 2);
    PptReport report = ppt_check(kraus_to_choi(eb));
    CHECK(report.min_eigenvalue >= -1e-9);
  }
}

TEST_CASE("choi to kraus round trip") {
  QuantumChannel from_phi = choi_to_kraus(kraus_to_choi(identity_channel(2)));
  REQUIRE(from_phi.kraus.size() == 1);
  Matrix k = from_phi.kraus[0];
  Complex phase = k(0, 0) / std::abs(k(0, 0));
  CHECK((k / phase - identity(2)).cwiseAbs().maxCoeff() < 1e-10);

  QuantumChannel scrambler =
      choi_to_kraus(ChoiOperator(identity(4) / 4.0, BipartiteDims(2, 2)));
  sample::Rng rng(13);
  DensityMatrix rho = sample::density_matrix(rng, 2);
  CHECK((apply_channel(scrambler, rho).rho - identity(2) / 2.0).cwiseAbs().maxCoeff() < 1e-10);

  for (int trial = 0; trial < 100; ++trial) {
    int dA = 2 + (trial % 2), dB = 2 + ((trial / 2) % 2);
    QuantumChannel n = sample::channel(rng, dA, dB);
    ChoiOperator j = kraus_to_choi(n);
    ChoiOperator j2 = kraus_to_choi(choi_to_kraus(j));
    CHECK((j.matrix - j2.matrix).norm() < 1e-9);
    Matrix marginal = partial_trace(j.matrix, j.dims, Subsystem::First);
    CHECK((marginal - identity(dA) / dA).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("duality pairing") {
  Matrix e00 = Matrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  CHECK(duality_pairing(kraus_to_choi(identity_channel(2)), e00, e00) ==
        Catch::Approx(1.0).margin(1e-12));

  for (double nu : {0.2, 0.5, 0.9}) {
    CHECK(duality_pairing(kraus_to_choi(depolarizing_channel(nu)), e00, e00) ==
          Catch::Approx((1 + nu) / 2).margin(1e-12));
  }

  sample::Rng rng(23);
  QuantumChannel n = sample::channel(rng, 3, 2);
  ChoiOperator j = kraus_to_choi(n);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix a = sample::ginibre(rng, 3, 3);
    a = (a + a.adjoint()) / 2.0;
    Matrix b = sample::ginibre(rng, 2, 2);
    b = (b + b.adjoint()) / 2.0;
    double direct = (apply_kraus(n.kraus, a) * b).trace().real();
    CHECK(std::abs(direct - duality_pairing(j, a, b)) < 1e-9);
  }
}

TEST_CASE("depolarizing channel endpoints") {
  sample::Rng rng(41);
  DensityMatrix rho = sample::density_matrix(rng, 2);
  CHECK((apply_channel(depolarizing_channel(1.0), rho).rho - rho.rho).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(min_eigenvalue(partial_transpose(kraus_to_choi(depolarizing_channel(1.0 / 3.0)).matrix,
                                         BipartiteDims(2, 2), Subsystem::Second)) ==
        Catch::Approx(0.0).margin(1e-12));
  CHECK_THROWS_AS(depolarizing_channel(1.5), std::invalid_argument);
}

TEST_CASE("erasure channel") {
  sample::Rng rng(43);
  DensityMatrix rho = sample::density_matrix(rng, 2);

  DensityMatrix kept = apply_channel(erasure_channel(1.0, 2), rho);
  CHECK((kept.rho.topLeftCorner(2, 2) - rho.rho).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(kept.rho(2, 2)) < 1e-12);

  DensityMatrix lost = apply_channel(erasure_channel(0.0, 2), rho);
  CHECK(lost.rho(2, 2).real() == Catch::Approx(1.0).margin(1e-12));

  // Choi of E_eta o N matches eta J_emb + (1-eta) 1/d (x) flag
  double eta = 0.5;
  QuantumChannel n = depolarizing_channel(0.8);
  ChoiOperator composed = kraus_to_choi(compose(erasure_channel(eta, 2), n));
  ChoiOperator jn = kraus_to_choi(n);
  Matrix expected = Matrix::Zero(6, 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          expected(i * 3 + a, j * 3 + b) = eta * jn.matrix(i * 2 + a, j * 2 + b).real();
  for (int i = 0; i < 2; ++i) expected(i * 3 + 2, i * 3 + 2) += (1 - eta) / 2.0;
  CHECK((composed.matrix - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("measure and prepare") {
  Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  Matrix p0 = e0 * e0.adjoint(), p1 = e1 * e1.adjoint();
  QuantumChannel dephasing =
      measure_and_prepare(POVM({p0, p1}), {pure_state(e0), pure_state(e1)});
  sample::Rng rng(47);
  DensityMatrix rho = sample::density_matrix(rng, 2);
  DensityMatrix out = apply_channel(dephasing, rho);
  CHECK(out.rho(0, 0).real() == Catch::Approx(rho.rho(0, 0).real()).margin(1e-12));
  CHECK(std::abs(out.rho(0, 1)) < 1e-12);

  DensityMatrix sigma = sample::density_matrix(rng, 3);
  QuantumChannel constant = measure_and_prepare(POVM({identity(2)}), {sigma});
  CHECK((apply_channel(constant, rho).rho - sigma.rho).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(measure_and_prepare(POVM({p0, p1}), {pure_state(e0)}), std::invalid_argument);
}

TEST_CASE("compose") {
  QuantumChannel n = depolarizing_channel(0.6);
  ChoiOperator direct = kraus_to_choi(n);
  ChoiOperator composed = kraus_to_choi(compose(identity_channel(2), n));
  CHECK((direct.matrix - composed.matrix).cwiseAbs().maxCoeff() < 1e-12);

  // Erasure channels compose multiplicatively off the flag subspace.
  // E_a on d=3 after E_b on d=2 keeps the original block with weight a*b.
  ChoiOperator nested = kraus_to_choi(compose(erasure_channel(0.5, 3), erasure_channel(0.8, 2)));
  ChoiOperator single = kraus_to_choi(erasure_channel(0.4, 2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          CHECK(std::abs(nested.matrix(i * 4 + a, j * 4 + b) -
                         single.matrix(i * 3 + a, j * 3 + b)) < 1e-12);

  CHECK_THROWS_AS(compose(identity_channel(3), identity_channel(2)), std::invalid_argument);
}

TEST_CASE("supermaps") {
  QuantumChannel n = depolarizing_channel(0.7);

  Supermap trivial(Instrument(2, 2, {{identity(2)}}), {identity_channel(2)});
  ChoiOperator direct = kraus_to_choi(n);
  ChoiOperator mapped = kraus_to_choi(apply_supermap(trivial, n));
  CHECK((direct.matrix - mapped.matrix).cwiseAbs().maxCoeff() < 1e-12);

  // Lambda[id] with decoder D = N reproduces N.
  Supermap post(Instrument(2, 2, {{identity(2)}}), {n});
  ChoiOperator simulated = kraus_to_choi(apply_supermap(post, identity_channel(2)));
  CHECK((direct.matrix - simulated.matrix).cwiseAbs().maxCoeff() < 1e-12);

  // Free transformations preserve the EB set.
  sample::Rng rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    QuantumChannel eb = sample::eb_channel(rng, 2, 2);
    Supermap sm = sample::supermap(rng, 2, 2, 2, 2);
    PptReport report = ppt_check(kraus_to_choi(apply_supermap(sm, eb)));
    CHECK(report.min_eigenvalue >= -1e-9);
  }
}

TEST_CASE("channel validation errors name the residual") {
  std::vector<Matrix> bad{identity(2) * 0.5};
  try {
    QuantumChannel c(2, 2, bad);
    FAIL("expected validation failure");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("trace preservation") != std::string::npos);
  }
}
