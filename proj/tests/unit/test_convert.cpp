#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <string>
#include <vector>

#include "rismp/convert.hpp"
#include "rismp/rng.hpp"
#include "rismp/warnings.hpp"

using rismp::Complex;

namespace {

Eigen::MatrixXcd random_well_conditioned(rismp::RngStream& draw,
                                         Eigen::Index n) {
  // Diagonally dominant => comfortably invertible after the +/- R*I shifts.
  Eigen::MatrixXcd z(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      z(i, j) = Complex(draw(-1.0, 1.0), draw(-1.0, 1.0)) * 10.0;
    }
    z(i, i) += Complex(draw(20.0, 120.0), 0.0);
  }
  return z;
}

}  // namespace

TEST_CASE("matched load reflects nothing", "[convert]") {
  for (Eigen::Index n : {1, 3, 7}) {
    const Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(n, n) * 50.0;
    const Eigen::MatrixXcd s = rismp::z_to_s(z, 50.0);
    REQUIRE(s.norm() == Catch::Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("short circuit reflects with sign flip", "[convert]") {
  Eigen::MatrixXcd z(1, 1);
  z(0, 0) = 0.0;
  const Eigen::MatrixXcd s = rismp::z_to_s(z, 50.0);
  REQUIRE(s(0, 0).real() == Catch::Approx(-1.0));
  REQUIRE(s(0, 0).imag() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("pure reactance from unit reflection", "[convert]") {
  Eigen::MatrixXcd s(1, 1);
  s(0, 0) = Complex(0.0, 1.0);
  const Eigen::MatrixXcd z = rismp::s_to_z(s, 50.0);
  // 50 (1+j)/(1-j) = 50 j
  REQUIRE(z(0, 0).real() == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(z(0, 0).imag() == Catch::Approx(50.0));
}

TEST_CASE("conversion roundtrips on random well-conditioned matrices",
          "[convert]") {
  rismp::RngStream draw(2024, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + Eigen::Index(draw() * 10.0);
    const double r = 50.0;
    const Eigen::MatrixXcd z = random_well_conditioned(draw, n);
    const Eigen::MatrixXcd z_back = rismp::s_to_z(rismp::z_to_s(z, r), r);
    REQUIRE((z_back - z).norm() / z.norm() < 1e-12);

    const Eigen::MatrixXcd s = rismp::z_to_s(z, r);
    const Eigen::MatrixXcd s_back = rismp::z_to_s(rismp::s_to_z(s, r), r);
    REQUIRE((s_back - s).norm() / (1.0 + s.norm()) < 1e-12);
  }
}

TEST_CASE("reciprocity is preserved by the conversion", "[convert]") {
  rismp::RngStream draw(7, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + Eigen::Index(draw() * 6.0);
    Eigen::MatrixXcd z = random_well_conditioned(draw, n);
    z = ((z + z.transpose()) / 2.0).eval();  // symmetric = reciprocal
    const Eigen::MatrixXcd s = rismp::z_to_s(z, 50.0);
    REQUIRE((s - s.transpose()).norm() / (1.0 + s.norm()) < 1e-12);
  }
}

TEST_CASE("singular conversions identify the offending pivot", "[convert]") {
  // Z = -R*I makes Z + R*I exactly singular.
  const Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(3, 3) * -50.0;
  REQUIRE_THROWS_AS(rismp::z_to_s(z, 50.0), rismp::SingularMatrixError);
  try {
    rismp::z_to_s(z, 50.0);
  } catch (const rismp::SingularMatrixError& e) {
    REQUIRE(e.pivot == 0);
    REQUIRE(std::string(e.what()).find("pivot") != std::string::npos);
  }

  // S = I makes I - S singular.
  const Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(2, 2);
  REQUIRE_THROWS_AS(rismp::s_to_z(s, 50.0), rismp::SingularMatrixError);
}

TEST_CASE("ill-conditioned conversions emit a warning", "[convert]") {
  std::vector<std::string> warnings;
  auto previous = rismp::set_warning_handler(
      [&](const std::string& message) { warnings.push_back(message); });

  Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(2, 2);
  s(0, 0) = Complex(1.0 - 1e-14, 0.0);  // I - S nearly singular
  s(1, 1) = Complex(0.0, 0.0);
  rismp::s_to_z(s, 50.0);
  rismp::set_warning_handler(previous);

  REQUIRE_FALSE(warnings.empty());
  REQUIRE(warnings.front().find("condition") != std::string::npos);
}

TEST_CASE("multiport conversion keeps the partition", "[convert]") {
  const rismp::BlockPartition partition{2, 3, 1};
  auto z = rismp::MultiportImpedance::Zero(partition);
  z.dense().diagonal().setConstant(50.0);
  const auto s = rismp::z_to_s(z, 50.0);
  REQUIRE(s.partition() == partition);
  REQUIRE(s.dense().norm() == Catch::Approx(0.0).margin(1e-15));
}
