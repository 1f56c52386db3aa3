#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstring>
#include <limits>

#include "dax/errors.hpp"
#include "dax/linalg.hpp"
#include "dax/rng.hpp"

using dax::pinv;
using dax::spd_sqrt_pair;
using dax::sym_eig_desc;

namespace {

Eigen::MatrixXd random_symmetric(int p, dax::RngStream& rng) {
  const Eigen::MatrixXd a = rng.normal_matrix(p, p);
  return 0.5 * (a + a.transpose());
}

// Independent check of the four defining pseudoinverse identities.
void check_penrose(const Eigen::MatrixXd& m, const Eigen::MatrixXd& mp, double tol) {
  CHECK((m * mp * m - m).norm() <= tol);
  CHECK((mp * m * mp - mp).norm() <= tol);
  CHECK((m * mp - (m * mp).transpose()).norm() <= tol);
  CHECK((mp * m - (mp * m).transpose()).norm() <= tol);
}

bool bitwise_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

}  // namespace

TEST_CASE("sym_eig_desc on the identity") {
  const auto eig = sym_eig_desc(Eigen::MatrixXd::Identity(3, 3));
  for (int i = 0; i < 3; ++i) CHECK(eig.values[i] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((eig.vectors.transpose() * eig.vectors - Eigen::MatrixXd::Identity(3, 3)).norm() <=
        1e-10);
}

TEST_CASE("sym_eig_desc on a diagonal matrix sorts and picks axis vectors") {
  const Eigen::MatrixXd m = Eigen::Vector3d(1.0, 3.0, 2.0).asDiagonal();
  const auto eig = sym_eig_desc(m);
  CHECK(eig.values[0] == doctest::Approx(3.0));
  CHECK(eig.values[1] == doctest::Approx(2.0));
  CHECK(eig.values[2] == doctest::Approx(1.0));
  CHECK((eig.vectors.col(0) - Eigen::Vector3d::Unit(1)).norm() <= 1e-12);
  CHECK((eig.vectors.col(1) - Eigen::Vector3d::Unit(2)).norm() <= 1e-12);
  CHECK((eig.vectors.col(2) - Eigen::Vector3d::Unit(0)).norm() <= 1e-12);
}

TEST_CASE("sym_eig_desc reconstruction and orthonormality on random inputs") {
  dax::RngStream rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd m = random_symmetric(8, rng);
    const auto eig = sym_eig_desc(m);
    const Eigen::MatrixXd rebuilt =
        eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    CHECK((rebuilt - m).norm() / m.norm() <= 1e-8);
    CHECK((eig.vectors.transpose() * eig.vectors - Eigen::MatrixXd::Identity(8, 8)).norm() <=
          1e-10);
    for (int i = 1; i < 8; ++i) CHECK(eig.values[i] <= eig.values[i - 1]);
    for (int i = 0; i < 8; ++i) {
      int lead = 0;
      for (int r = 1; r < 8; ++r)
        if (std::abs(eig.vectors(r, i)) > std::abs(eig.vectors(lead, i))) lead = r;
      CHECK(eig.vectors(lead, i) > 0.0);
    }
  }
}

TEST_CASE("sym_eig_desc is deterministic bit for bit") {
  dax::RngStream rng(12);
  const Eigen::MatrixXd m = random_symmetric(6, rng);
  const auto a = sym_eig_desc(m);
  const auto b = sym_eig_desc(m);
  CHECK(bitwise_equal(a.vectors, b.vectors));
  CHECK(std::memcmp(a.values.data(), b.values.data(), sizeof(double) * 6) == 0);
}

TEST_CASE("sym_eig_desc rejects bad input") {
  Eigen::MatrixXd m(2, 2);
  m << 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0;
  CHECK_THROWS_AS(sym_eig_desc(m), dax::InvalidInputError);
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 2.0, 0.0, 1.0;
  CHECK_THROWS_AS(sym_eig_desc(asym), dax::InvalidInputError);
}

TEST_CASE("pinv of a rank-deficient diagonal matrix") {
  const Eigen::MatrixXd m = Eigen::Vector2d(2.0, 0.0).asDiagonal();
  const Eigen::MatrixXd mp = pinv(m);
  CHECK(mp(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mp(1, 1) == 0.0);
  CHECK(mp(0, 1) == 0.0);
  CHECK(mp(1, 0) == 0.0);
}

TEST_CASE("pinv of an invertible matrix equals the inverse") {
  Eigen::MatrixXd m(3, 3);
  m << 4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 5.0;
  CHECK((pinv(m) - m.inverse()).norm() <= 1e-10);
}

TEST_CASE("pinv of a rank-one outer product has the closed form") {
  dax::RngStream rng(13);
  const Eigen::VectorXd a = rng.normal_vector(5);
  const Eigen::VectorXd b = rng.normal_vector(3);
  const Eigen::MatrixXd m = a * b.transpose();
  const Eigen::MatrixXd expected = b * a.transpose() / (a.squaredNorm() * b.squaredNorm());
  const Eigen::MatrixXd mp = pinv(m);
  CHECK((mp - expected).norm() <= 1e-10);
  check_penrose(m, mp, 1e-8);
}

TEST_CASE("pinv satisfies the Penrose conditions across ranks") {
  dax::RngStream rng(14);
  const int p = 5, q = 3;
  for (int rank = 0; rank <= q; ++rank) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, q);
    for (int r = 0; r < rank; ++r)
      m += rng.normal_vector(p) * rng.normal_vector(q).transpose();
    const Eigen::MatrixXd mp = pinv(m);
    check_penrose(m, mp, 1e-8);
    if (rank == 0) CHECK(mp.norm() == 0.0);
  }
}

TEST_CASE("pinv respects a caller-supplied tolerance") {
  const Eigen::MatrixXd m = Eigen::Vector2d(1.0, 1e-6).asDiagonal();
  CHECK(pinv(m, 1e-3)(1, 1) == 0.0);
  CHECK(pinv(m, 1e-9)(1, 1) == doctest::Approx(1e6));
}

TEST_CASE("spd_sqrt_pair on sigma^2 I is exact") {
  const double sigma = 1.5;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  const auto pair = spd_sqrt_pair(sigma * sigma * id);
  CHECK((pair.sqrt - sigma * id).norm() == 0.0);
  CHECK((pair.inv_sqrt - (1.0 / sigma) * id).norm() == 0.0);
}

TEST_CASE("spd_sqrt_pair on the identity") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  const auto pair = spd_sqrt_pair(id);
  CHECK((pair.sqrt - id).norm() == 0.0);
  CHECK((pair.inv_sqrt - id).norm() == 0.0);
}

TEST_CASE("spd_sqrt_pair reconstructs a random SPD matrix") {
  dax::RngStream rng(15);
  const Eigen::MatrixXd a = rng.normal_matrix(6, 6);
  const Eigen::MatrixXd m = a.transpose() * a + Eigen::MatrixXd::Identity(6, 6);
  const auto pair = spd_sqrt_pair(m);
  CHECK((pair.sqrt * pair.sqrt - m).norm() <= 1e-8);
  CHECK((pair.sqrt * pair.inv_sqrt - Eigen::MatrixXd::Identity(6, 6)).norm() <= 1e-8);
  CHECK((pair.sqrt - pair.sqrt.transpose()).norm() == 0.0);
  CHECK((pair.inv_sqrt - pair.inv_sqrt.transpose()).norm() == 0.0);
}

TEST_CASE("spd_sqrt_pair rejects non-SPD input") {
  const Eigen::MatrixXd neg = Eigen::Vector2d(1.0, -0.1).asDiagonal();
  CHECK_THROWS_AS(spd_sqrt_pair(neg), dax::NotSpdError);
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(spd_sqrt_pair(indefinite), dax::NotSpdError);
}

TEST_CASE("pinv and spd_sqrt_pair are deterministic bit for bit") {
  dax::RngStream rng(16);
  const Eigen::MatrixXd m = rng.normal_matrix(5, 4);
  CHECK(bitwise_equal(pinv(m), pinv(m)));
  const Eigen::MatrixXd spd = m.transpose() * m + Eigen::MatrixXd::Identity(4, 4);
  CHECK(bitwise_equal(spd_sqrt_pair(spd).sqrt, spd_sqrt_pair(spd).sqrt));
}
