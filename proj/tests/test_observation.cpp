#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "dax/errors.hpp"
#include "dax/observation.hpp"
#include "dax/rng.hpp"

using dax::ObservationWindow;
using dax::ObsOperator;
using dax::observe;
using dax::stack_window;
using dax::synthesize_obs;
using dax::unwhiten;
using dax::whiten;

TEST_CASE("every-second operator selects the even indices") {
  const ObsOperator h = ObsOperator::every_second(40);
  CHECK(h.m() == 20);
  Eigen::VectorXd x(40);
  for (int i = 0; i < 40; ++i) x[i] = static_cast<double>(i);
  const Eigen::VectorXd z = observe(h, x);
  for (int j = 0; j < 20; ++j) CHECK(z[j] == 2.0 * j);
  CHECK(observe(h, Eigen::VectorXd::Zero(40)).norm() == 0.0);
}

TEST_CASE("observe is exactly linear and matches the index map") {
  const ObsOperator h = ObsOperator::every_second(16);
  dax::RngStream rng(31);
  const Eigen::VectorXd x = rng.normal_vector(16);
  const Eigen::VectorXd y = rng.normal_vector(16);
  const Eigen::VectorXd z = observe(h, x);
  for (int j = 0; j < h.m(); ++j) CHECK(z[j] == x[2 * j]);
  const Eigen::VectorXd combo = observe(h, 2.5 * x + 0.75 * y);
  const Eigen::VectorXd split = 2.5 * observe(h, x) + 0.75 * observe(h, y);
  CHECK((combo - split).norm() == 0.0);
}

TEST_CASE("noise-free synthesis reduces to observe") {
  const ObsOperator h = ObsOperator::every_second(10);
  dax::RngStream rng(32);
  const Eigen::VectorXd x = rng.normal_vector(10);
  const Eigen::VectorXd z = synthesize_obs(h, x, 0.0, rng);
  CHECK((z - observe(h, x)).norm() == 0.0);
}

TEST_CASE("synthesized noise has the right first two moments") {
  const ObsOperator h = ObsOperator::every_second(8);
  const double sigma = 1.5;
  dax::RngStream rng(33);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(8);
  const int draws = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(h.m());
  Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(h.m());
  for (int s = 0; s < draws; ++s) {
    const Eigen::VectorXd noise = synthesize_obs(h, x, sigma, rng) - observe(h, x);
    sum += noise;
    sum_sq += noise.cwiseProduct(noise);
  }
  const Eigen::VectorXd mean = sum / draws;
  const Eigen::VectorXd var = sum_sq / draws - mean.cwiseProduct(mean);
  const double mean_limit = 3.0 * sigma / std::sqrt(static_cast<double>(draws));
  for (int j = 0; j < h.m(); ++j) {
    CHECK(std::abs(mean[j]) <= mean_limit);
    CHECK(var[j] == doctest::Approx(sigma * sigma).epsilon(0.05));
  }
}

TEST_CASE("stacking concatenates in time order") {
  const Eigen::Vector2d z1(1.0, 2.0), z2(3.0, 4.0);
  const ObservationWindow single = stack_window({z1}, 1.5);
  CHECK((single.stacked - z1).norm() == 0.0);
  const ObservationWindow pair = stack_window({z1, z2}, 1.5);
  Eigen::VectorXd expected(4);
  expected << 1.0, 2.0, 3.0, 4.0;
  CHECK((pair.stacked - expected).norm() == 0.0);

  dax::RngStream rng(34);
  std::vector<Eigen::VectorXd> obs;
  for (int ell = 0; ell < 4; ++ell) obs.push_back(rng.normal_vector(3));
  const ObservationWindow w = stack_window(obs, 2.0);
  for (int ell = 0; ell < 4; ++ell)
    for (int j = 0; j < 3; ++j) CHECK(w.stacked[ell * 3 + j] == obs[ell][j]);
}

TEST_CASE("baseline window dimensions and stacked covariance") {
  std::vector<Eigen::VectorXd> obs(5, Eigen::VectorXd::Zero(20));
  const ObservationWindow w = stack_window(obs, 1.5);
  CHECK(w.dim() == 100);
  const Eigen::MatrixXd r = w.r_stacked();
  CHECK((r - 2.25 * Eigen::MatrixXd::Identity(100, 100)).norm() == 0.0);
}

TEST_CASE("stacking rejects mismatched lengths") {
  std::vector<Eigen::VectorXd> obs{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(4)};
  CHECK_THROWS_AS(stack_window(obs, 1.0), dax::InvalidInputError);
}

TEST_CASE("scalar whitening divides by sigma and round-trips") {
  std::vector<Eigen::VectorXd> obs(2, Eigen::VectorXd::Zero(3));
  const ObservationWindow w = stack_window(obs, 1.5);
  const Eigen::MatrixXd d = Eigen::MatrixXd::Constant(6, 4, 3.0);
  const Eigen::MatrixXd e = whiten(w, d);
  CHECK((e - Eigen::MatrixXd::Constant(6, 4, 2.0)).norm() == 0.0);

  dax::RngStream rng(35);
  const Eigen::MatrixXd random = rng.normal_matrix(6, 5);
  CHECK((unwhiten(w, whiten(w, random)) - random).norm() <= 1e-10);
}

TEST_CASE("general SPD whitening round-trips and unit-covariances samples") {
  Eigen::MatrixXd r(2, 2);
  r << 2.0, 0.6, 0.6, 1.0;
  std::vector<Eigen::VectorXd> obs(1, Eigen::VectorXd::Zero(2));
  const ObservationWindow w = stack_window(obs, r);

  dax::RngStream rng(36);
  const Eigen::MatrixXd random = rng.normal_matrix(2, 7);
  CHECK((unwhiten(w, whiten(w, random)) - random).norm() <= 1e-10);

  // columns drawn from N(0, R) become unit-covariance after whitening
  const Eigen::LLT<Eigen::MatrixXd> llt(r);
  const Eigen::MatrixXd chol = llt.matrixL();
  const int draws = 10000;
  const Eigen::MatrixXd samples = chol * rng.normal_matrix(2, draws);
  const Eigen::MatrixXd white = whiten(w, samples);
  const Eigen::MatrixXd cov = white * white.transpose() / draws;
  CHECK((cov - Eigen::MatrixXd::Identity(2, 2)).norm() <=
        0.05 * Eigen::MatrixXd::Identity(2, 2).norm());
}

TEST_CASE("whitening a zero-noise window is rejected") {
  std::vector<Eigen::VectorXd> obs(1, Eigen::VectorXd::Zero(2));
  const ObservationWindow w = stack_window(obs, 0.0);
  CHECK_THROWS_AS(whiten(w, Eigen::MatrixXd::Zero(2, 2)), dax::NotSpdError);
}

TEST_CASE("stacked tangent-linear operator has the block layout") {
  dax::ModelParams p;
  p.n = 8;
  const ObsOperator h = ObsOperator::every_second(8);
  dax::RngStream rng(37);
  const Eigen::VectorXd x0 = rng.normal_vector(8);
  std::vector<Eigen::VectorXd> reference{x0};
  for (int ell = 1; ell <= 2; ++ell)
    reference.push_back(dax::propagate(reference.back(), p.steps_per_obs(), p));
  const auto tlm = dax::tlm_propagate(reference, 2, p);
  const Eigen::MatrixXd stacked = dax::stacked_operator(h, tlm);
  CHECK(stacked.rows() == 8);
  CHECK(stacked.cols() == 8);
  const Eigen::MatrixXd hd = dax::obs_matrix(h);
  CHECK((stacked.topRows(4) - hd * tlm.matrices[0]).norm() == 0.0);
  CHECK((stacked.bottomRows(4) - hd * tlm.matrices[1]).norm() == 0.0);
}
