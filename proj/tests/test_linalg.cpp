#include <catch2/catch_amalgamated.hpp>

#include "qmcert/linalg.hpp"
#include "qmcert/sampling.hpp"

using namespace qmcert;

namespace {
Matrix random_hermitian(sample::Rng& rng, int d) {
  Matrix g = sample::ginibre(rng, d, d);
  return (g + g.adjoint()) / 2.0;
}
}  // namespace

TEST_CASE("kron basics") {
  Matrix id2 = identity(2);
  CHECK((kron(id2, id2) - identity(4)).cwiseAbs().maxCoeff() == 0.0);

  Matrix zz = kron(pauli_z(), pauli_z());
  Eigen::Vector4d diag(1, -1, -1, 1);
  for (int i = 0; i < 4; ++i) CHECK(zz(i, i).real() == Catch::Approx(diag(i)));

  // sigma_x (x) sigma_x maps |00> to |11>
  Vector v00 = Vector::Zero(4);
  v00(0) = 1.0;
  Vector out = kron(pauli_x(), pauli_x()) * v00;
  CHECK(std::abs(out(3) - 1.0) < 1e-15);
  CHECK(out.head(3).norm() < 1e-15);
}

TEST_CASE("partial trace") {
  BipartiteDims dims(2, 2);
  Matrix phi = max_entangled(2).rho;
  Matrix marginal = partial_trace(phi, dims, Subsystem::First);
  CHECK((marginal - identity(2) / 2.0).cwiseAbs().maxCoeff() < 1e-15);

  sample::Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    int dx = 2 + (trial % 2), dy = 2 + (trial % 3);
    DensityMatrix rho = sample::density_matrix(rng, dx);
    DensityMatrix sigma = sample::density_matrix(rng, dy);
    Matrix joint = kron(rho.rho, sigma.rho);
    CHECK((partial_trace(joint, BipartiteDims(dx, dy), Subsystem::First) - rho.rho)
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK((partial_trace(joint, BipartiteDims(dx, dy), Subsystem::Second) - sigma.rho)
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }

  CHECK_THROWS_AS(partial_trace(identity(3), BipartiteDims(2, 2), Subsystem::First),
                  std::invalid_argument);
}

TEST_CASE("partial transpose") {
  BipartiteDims dims(2, 2);
  sample::Rng rng(11);
  DensityMatrix rho = sample::density_matrix(rng, 2);
  DensityMatrix sigma = sample::density_matrix(rng, 2);
  Matrix product = kron(rho.rho, sigma.rho);
  CHECK((partial_transpose(product, dims, Subsystem::Second) -
         kron(rho.rho, sigma.rho.transpose()))
            .cwiseAbs()
            .maxCoeff() < 1e-14);

  Matrix phi = max_entangled(2).rho;
  CHECK(min_eigenvalue(partial_transpose(phi, dims, Subsystem::Second)) ==
        Catch::Approx(-0.5).margin(1e-12));

  // involution on random Hermitian inputs
  for (int trial = 0; trial < 50; ++trial) {
    Matrix h = random_hermitian(rng, 6);
    for (Subsystem s : {Subsystem::First, Subsystem::Second}) {
      BipartiteDims d23(2, 3);
      Matrix twice = partial_transpose(partial_transpose(h, d23, s), d23, s);
      CHECK((twice - h).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("hermitian eigendecomposition") {
  EigResult id = eig_hermitian(identity(2));
  CHECK(id.values(0) == Catch::Approx(1.0));
  CHECK(id.values(1) == Catch::Approx(1.0));

  EigResult z = eig_hermitian(pauli_z());
  CHECK(z.values(0) == Catch::Approx(-1.0));
  CHECK(z.values(1) == Catch::Approx(1.0));

  Matrix shifted = max_entangled(2).rho - identity(4) / 2.0;
  EigResult e = eig_hermitian(shifted);
  Eigen::Vector4d expected(-0.5, -0.5, -0.5, 0.5);
  for (int i = 0; i < 4; ++i) CHECK(e.values(i) == Catch::Approx(expected(i)).margin(1e-12));

  sample::Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix h = random_hermitian(rng, 5);
    EigResult res = eig_hermitian(h);
    Matrix rebuilt = res.vectors * res.values.asDiagonal().toDenseMatrix().cast<Complex>() *
                     res.vectors.adjoint();
    CHECK((rebuilt - h).norm() < 1e-9);
    CHECK((res.vectors.adjoint() * res.vectors - identity(5)).cwiseAbs().maxCoeff() < 1e-9);
  }

  CHECK_THROWS_AS(eig_hermitian(sample::ginibre(rng, 3, 3)), std::invalid_argument);
}

TEST_CASE("max entangled state") {
  CHECK(max_entangled(1).rho(0, 0).real() == Catch::Approx(1.0));
  Matrix phi = max_entangled(2).rho;
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  CHECK((phi - bell * bell.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  Matrix marginal = partial_trace(max_entangled(3).rho, BipartiteDims(3, 3), Subsystem::First);
  CHECK((marginal - identity(3) / 3.0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("frobenius inner product") {
  CHECK(frobenius_inner(identity(2), identity(2)).real() == Catch::Approx(2.0));
  CHECK(std::abs(frobenius_inner(pauli_x(), pauli_y())) < 1e-15);
  Matrix phi = max_entangled(2).rho;
  CHECK(frobenius_inner(phi, phi).real() == Catch::Approx(1.0));
  CHECK_THROWS_AS(frobenius_inner(identity(2), identity(3)), std::invalid_argument);
}

TEST_CASE("density matrix validation") {
  sample::Rng rng(1);
  CHECK_THROWS_AS(DensityMatrix(identity(2)), std::invalid_argument);           // trace 2
  CHECK_THROWS_AS(DensityMatrix(pauli_z()), std::invalid_argument);             // not PSD
  CHECK_THROWS_AS(DensityMatrix(sample::ginibre(rng, 2, 2)), std::invalid_argument);
  CHECK_NOTHROW(DensityMatrix(identity(3) / 3.0));
}
