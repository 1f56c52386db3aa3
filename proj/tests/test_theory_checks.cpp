#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "dax/ensemble.hpp"
#include "dax/errors.hpp"
#include "dax/linalg.hpp"
#include "dax/rng.hpp"
#include "dax/theory_checks.hpp"

using dax::cov_unbiasedness_check;
using dax::eigen_perturbation_check;
using dax::enkf_perturbation_variance_check;
using dax::GaussianResidualModel;
using dax::sample_mean_fourth_moment_check;
using dax::wishart_frobenius_check;
using dax::wishart_frobenius_exact;

TEST_CASE("sample covariance is unbiased for the identity target") {
  const auto model =
      GaussianResidualModel::make(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3), 1);
  dax::RngStream rng(101);
  const auto report = cov_unbiasedness_check(model, 5, 10000, rng);
  CHECK(report.passed);
}

TEST_CASE("sample covariance is unbiased for an anisotropic diagonal target") {
  const auto model = GaussianResidualModel::make(
      Eigen::VectorXd::Zero(2), Eigen::Vector2d(4.0, 1.0).asDiagonal(), 1);
  dax::RngStream rng(102);
  CHECK(cov_unbiasedness_check(model, 10, 10000, rng).passed);
}

TEST_CASE("unbiasedness survives the smallest ensemble and a nonzero mean") {
  const auto model = GaussianResidualModel::make(
      Eigen::Vector2d(3.0, -1.0), Eigen::Vector2d(2.0, 0.5).asDiagonal(), 1);
  dax::RngStream rng(103);
  CHECK(cov_unbiasedness_check(model, 2, 20000, rng).passed);
}

TEST_CASE("wishart identity evaluates to the hand values") {
  CHECK(wishart_frobenius_exact(Eigen::MatrixXd::Identity(2, 2), 5) ==
        doctest::Approx(1.5).epsilon(1e-14));
  CHECK(wishart_frobenius_exact(Eigen::Vector2d(2.0, 1.0).asDiagonal(), 10) ==
        doctest::Approx(14.0 / 9.0).epsilon(1e-14));
  // halving N - 1 doubles the deviation
  const Eigen::MatrixXd sigma = Eigen::Vector3d(3.0, 2.0, 1.0).asDiagonal();
  CHECK(wishart_frobenius_exact(sigma, 5) ==
        doctest::Approx(2.0 * wishart_frobenius_exact(sigma, 9)).epsilon(1e-14));
}

TEST_CASE("monte carlo deviation matches the wishart identity") {
  const auto model =
      GaussianResidualModel::make(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), 1);
  dax::RngStream rng(104);
  CHECK(wishart_frobenius_check(model, 5, 20000, rng).passed);

  const auto skewed = GaussianResidualModel::with_spectrum({2.0, 1.0}, 1, 7);
  dax::RngStream rng2(105);
  CHECK(wishart_frobenius_check(skewed, 10, 20000, rng2).passed);
}

TEST_CASE("monte carlo error shrinks like one over sqrt reps") {
  const auto model = GaussianResidualModel::with_spectrum({2.0, 1.0, 0.5}, 1, 8);
  const double exact = wishart_frobenius_exact(model.sigma, 6);
  auto rms_error = [&](int reps, std::uint64_t seed_base) {
    double acc = 0.0;
    const int outer = 8;
    for (int i = 0; i < outer; ++i) {
      dax::RngStream rng(seed_base + i);
      double sum = 0.0;
      for (int rep = 0; rep < reps; ++rep)
        sum += (dax::stats(model.sample(6, rng)).covariance - model.sigma).squaredNorm();
      const double err = sum / reps - exact;
      acc += err * err;
    }
    return std::sqrt(acc / outer);
  };
  const double coarse = rms_error(500, 900);
  const double fine = rms_error(8000, 950);
  const double ratio = coarse / fine;  // reps grew 16x, errors should shrink ~4x
  CHECK(ratio >= 2.0);
  CHECK(ratio <= 8.0);
}

TEST_CASE("forced equality makes both perturbation bounds zero") {
  const Eigen::MatrixXd sigma = Eigen::Vector2d(3.0, 1.0).asDiagonal();
  const Eigen::MatrixXd c = Eigen::Vector2d(3.5, 0.8).asDiagonal();
  // hand case: eigenvalue shifts 0.5 and 0.2 against a spectral deviation 0.5
  const double norm2 = dax::sym_spectral_norm(c - sigma);
  CHECK(norm2 == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(3.5 - 3.0) <= norm2 + 1e-12);
  CHECK(std::abs(0.8 - 1.0) <= norm2 + 1e-12);
  CHECK(dax::sym_spectral_norm(sigma - sigma) == 0.0);
}

TEST_CASE("eigenvalue and projector bounds hold over many replications") {
  const auto model = GaussianResidualModel::with_spectrum({8.0, 6.0, 3.0, 2.0, 1.0, 0.5}, 2, 9);
  CHECK(model.cutoff_gap() == doctest::Approx(3.0).epsilon(1e-9));
  dax::RngStream rng(106);
  const auto report = eigen_perturbation_check(model, 24, 500, rng);
  CHECK(report.passed);
}

TEST_CASE("eigen perturbation check requires a positive gap") {
  const auto model = GaussianResidualModel::with_spectrum({2.0, 2.0, 1.0}, 1, 10);
  dax::RngStream rng(107);
  CHECK_THROWS_AS(eigen_perturbation_check(model, 8, 10, rng), dax::InvalidInputError);
}

TEST_CASE("zero gain has zero perturbation variance") {
  dax::RngStream rng(108);
  const auto report = enkf_perturbation_variance_check(
      Eigen::MatrixXd::Zero(3, 4), Eigen::MatrixXd::Identity(4, 4), 10, 1000, rng);
  CHECK(report.passed);
}

TEST_CASE("scalar perturbation variance matches sigma^2 over N") {
  dax::RngStream rng(109);
  const Eigen::MatrixXd gain = Eigen::MatrixXd::Identity(1, 1);
  const Eigen::MatrixXd r = 2.25 * Eigen::MatrixXd::Identity(1, 1);
  const auto report = enkf_perturbation_variance_check(gain, r, 10, 20000, rng);
  CHECK(report.passed);
  // exact value is sigma^2 / N = 0.225
  CHECK((gain * r * gain.transpose()).trace() / 10 == doctest::Approx(0.225));
}

TEST_CASE("random gain perturbation variance matches the trace formula") {
  dax::RngStream gain_rng(110);
  const Eigen::MatrixXd gain = gain_rng.normal_matrix(4, 6);
  const Eigen::MatrixXd r = 2.25 * Eigen::MatrixXd::Identity(6, 6);
  dax::RngStream rng(111);
  CHECK(enkf_perturbation_variance_check(gain, r, 10, 20000, rng).passed);
}

TEST_CASE("sample-mean fourth moment scales as one over N squared") {
  const auto model = GaussianResidualModel::with_spectrum({2.0, 1.5, 1.0, 0.5}, 1, 11);
  dax::RngStream rng(112);
  const auto report = sample_mean_fourth_moment_check(model, 8, 20000, rng);
  CHECK(report.passed);
}

TEST_CASE("sign-matched empirical eigenvectors converge to the population ones") {
  const auto model = GaussianResidualModel::with_spectrum({8.0, 4.0, 2.0, 1.0}, 1, 13);
  auto mean_distance = [&](int members, std::uint64_t seed) {
    dax::RngStream rng(seed);
    double acc = 0.0;
    const int reps = 400;
    for (int rep = 0; rep < reps; ++rep) {
      const auto ec = dax::sym_eig_desc(dax::stats(model.sample(members, rng)).covariance);
      Eigen::VectorXd v_hat = ec.vectors.col(0);
      // sign fixed by a nonnegative inner product with the population vector
      if (v_hat.dot(model.eig.vectors.col(0)) < 0.0) v_hat = -v_hat;
      acc += (v_hat - model.eig.vectors.col(0)).norm();
    }
    return acc / reps;
  };
  const double coarse = mean_distance(10, 113);
  const double fine = mean_distance(160, 114);
  CHECK(fine < 0.5 * coarse);  // roughly 1/sqrt(N) decay
  CHECK(fine < 0.2);
}

TEST_CASE("population model exposes consistent spectral data") {
  const auto model = GaussianResidualModel::with_spectrum({5.0, 3.0, 1.0}, 2, 12);
  CHECK(model.cutoff_gap() == doctest::Approx(2.0).epsilon(1e-9));
  const Eigen::MatrixXd p = model.population_projector();
  CHECK((p * p - p).norm() <= 1e-10);
  CHECK(p.trace() == doctest::Approx(2.0).epsilon(1e-10));
  // sampling covariance factor reproduces sigma
  CHECK((model.sigma_sqrt * model.sigma_sqrt - model.sigma).norm() <= 1e-8);
}
