#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "rismp/convert.hpp"
#include "rismp/radiator.hpp"
#include "rismp/rng.hpp"
#include "rismp/warnings.hpp"

using rismp::Complex;
using rismp::kPi;
using rismp::kTwoPi;

TEST_CASE("mutual impedance at one wavelength", "[radiator]") {
  // d = lambda: e^{-j 2 pi} = 1, so z = j R / (2 pi)
  const Complex z = rismp::mutual_impedance(1.0, 1.0, 50.0);
  REQUIRE(z.real() == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(z.imag() == Catch::Approx(50.0 / kTwoPi).epsilon(1e-15));
  REQUIRE(std::abs(z) == Catch::Approx(7.9577471545947667).epsilon(1e-12));
}

TEST_CASE("mutual impedance magnitude and phase law", "[radiator]") {
  const double r = 73.0, lambda = 0.3;
  // |z| = R lambda / (2 pi d); phase pi/2 - 2 pi d/lambda (mod 2 pi)
  const Complex z100 = rismp::mutual_impedance(100.0 * lambda, lambda, r);
  REQUIRE(std::abs(z100) == Catch::Approx(r / (kTwoPi * 100.0)).epsilon(1e-13));
  REQUIRE(std::arg(z100) == Catch::Approx(kPi / 2).margin(1e-12));

  // doubling the distance halves the magnitude
  rismp::RngStream draw(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const double d = draw(0.5, 500.0);
    const double m1 = std::abs(rismp::mutual_impedance(d, lambda, r));
    const double m2 = std::abs(rismp::mutual_impedance(2.0 * d, lambda, r));
    REQUIRE(m1 == Catch::Approx(2.0 * m2).epsilon(1e-12));
  }
}

TEST_CASE("mutual impedance rejects non-positive distance", "[radiator]") {
  REQUIRE_THROWS_AS(rismp::mutual_impedance(0.0, 1.0, 50.0),
                    rismp::GeometryError);
  REQUIRE_THROWS_AS(rismp::mutual_impedance(-2.0, 1.0, 50.0),
                    rismp::GeometryError);
}

TEST_CASE("unilateral multiport has matched diagonals and zero uppers",
          "[radiator]") {
  const auto scenario = rismp::two_element_link(0.37);
  const auto z = rismp::build_unilateral_multiport(scenario);
  const double r = scenario.config.port_resistance;

  REQUIRE(z.tx_self()(0, 0) == Complex(r, 0.0));
  REQUIRE((z.ris_self() - Eigen::MatrixXcd::Identity(2, 2) * r).norm() == 0.0);
  REQUIRE(z.rx_self()(0, 0) == Complex(r, 0.0));
  REQUIRE(z.tx_from_ris().norm() == 0.0);
  REQUIRE(z.tx_from_rx().norm() == 0.0);
  REQUIRE(z.ris_from_rx().norm() == 0.0);
  REQUIRE(z.rx_from_tx().norm() == 0.0);  // blocked direct link
}

TEST_CASE("single-element scenario matches the closed-form hop impedances",
          "[radiator]") {
  const auto scenario = rismp::single_element_link();
  const auto z = rismp::build_unilateral_multiport(scenario);
  const double r = scenario.config.port_resistance;
  // d_rs = 100 lambda, d_dr = 1000 lambda, integer cycles -> purely imaginary
  REQUIRE(z.ris_from_tx()(0, 0).imag() ==
          Catch::Approx(r / (kTwoPi * 100.0)).epsilon(1e-15));
  REQUIRE(z.ris_from_tx()(0, 0).real() == 0.0);
  REQUIRE(z.rx_from_ris()(0, 0).imag() ==
          Catch::Approx(r / (kTwoPi * 1000.0)).epsilon(1e-15));
  REQUIRE(z.rx_from_tx().norm() == 0.0);
}

TEST_CASE("two-element scenario accrues exactly the spacing phase",
          "[radiator]") {
  rismp::RngStream draw(17, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const double spacing = draw(0.0, 1.0);
    const auto z =
        rismp::build_unilateral_multiport(rismp::two_element_link(spacing));
    const Complex path1 = z.rx_from_ris()(0, 0) * z.ris_from_tx()(0, 0);
    const Complex path2 = z.rx_from_ris()(0, 1) * z.ris_from_tx()(1, 0);
    // equal amplitudes, phase difference -2 pi d / lambda
    REQUIRE(std::abs(path2) == Catch::Approx(std::abs(path1)).epsilon(1e-13));
    const double phase_diff =
        std::remainder(std::arg(path2) - std::arg(path1) + kTwoPi * spacing,
                       kTwoPi);
    REQUIRE(phase_diff == Catch::Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("impedance blocks are invariant under geometric rescaling",
          "[radiator]") {
  rismp::RngStream draw(23, 0);
  Eigen::MatrixXd d_rs(2, 1), d_dr(1, 2);
  d_rs << draw(10.0, 500.0), draw(10.0, 500.0);
  d_dr << draw(10.0, 500.0), draw(10.0, 500.0);

  rismp::LinkConfig cfg;
  cfg.ris_elements = 2;
  for (double scale : {3.0, 0.25, 117.0}) {
    cfg.wavelength = 1.0;
    const auto z1 = rismp::build_unilateral_multiport(
        cfg, rismp::LinkGeometry::from_path_lengths(d_rs, d_dr));
    cfg.wavelength = scale;
    const auto z2 = rismp::build_unilateral_multiport(
        cfg, rismp::LinkGeometry::from_path_lengths(d_rs * scale, d_dr * scale));
    REQUIRE((z1.dense() - z2.dense()).norm() < 1e-12 * z1.dense().norm());
  }
}

TEST_CASE("general conversion of the assembled multiport zeroes the uppers",
          "[radiator]") {
  const auto scenario = rismp::two_element_link(0.61);
  const auto z = rismp::build_unilateral_multiport(scenario);
  const auto s = rismp::z_to_s(z, scenario.config.port_resistance);
  REQUIRE(s.tx_from_ris().cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE(s.tx_from_rx().cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE(s.ris_from_rx().cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE(s.tx_self().cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE(s.ris_self().cwiseAbs().maxCoeff() < 1e-14);
  REQUIRE(s.rx_self().cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("entrywise magnitude of the Tx->RIS block follows the path table",
          "[radiator]") {
  rismp::RngStream draw(29, 0);
  rismp::LinkConfig cfg;
  cfg.tx_antennas = 2;
  cfg.ris_elements = 3;
  Eigen::MatrixXd d_rs(3, 2), d_dr(1, 3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) d_rs(i, j) = draw(2.0, 300.0);
    d_dr(0, i) = draw(2.0, 300.0);
  }
  const auto z = rismp::build_unilateral_multiport(
      cfg, rismp::LinkGeometry::from_path_lengths(d_rs, d_dr));
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      REQUIRE(std::abs(z.ris_from_tx()(i, j)) ==
              Catch::Approx(cfg.port_resistance * cfg.wavelength /
                            (kTwoPi * d_rs(i, j)))
                  .epsilon(1e-13));
    }
  }
}

TEST_CASE("sub-wavelength distances only warn", "[radiator]") {
  std::vector<std::string> warnings;
  auto previous = rismp::set_warning_handler(
      [&](const std::string& message) { warnings.push_back(message); });

  Eigen::MatrixXd d_rs(1, 1), d_dr(1, 1);
  d_rs << 0.4;  // < lambda
  d_dr << 900.0;
  rismp::LinkConfig cfg;
  const auto z = rismp::build_unilateral_multiport(
      cfg, rismp::LinkGeometry::from_path_lengths(d_rs, d_dr));
  rismp::set_warning_handler(previous);

  REQUIRE(z.ris_from_tx()(0, 0) != Complex(0.0, 0.0));
  REQUIRE_FALSE(warnings.empty());
  REQUIRE(warnings.front().find("sub-wavelength") != std::string::npos);
}

TEST_CASE("positions mode computes euclidean hop distances", "[radiator]") {
  std::vector<std::string> warnings;
  auto previous = rismp::set_warning_handler(
      [&](const std::string& message) { warnings.push_back(message); });

  rismp::LinkConfig cfg;
  cfg.ris_elements = 2;
  const auto geom = rismp::LinkGeometry::from_positions(
      {{0.0, 0.0, 0.0}},                       // tx
      {{30.0, 40.0, 0.0}, {30.0, 40.0, 0.2}},  // ris, 0.2 m apart (< lambda/2)
      {{30.0, 140.0, 0.0}},                    // rx
      /*blocked_direct=*/true);
  geom.validate(cfg);
  rismp::set_warning_handler(previous);

  REQUIRE(geom.path_ris_from_tx()(0, 0) == Catch::Approx(50.0));
  REQUIRE(geom.path_rx_from_ris()(0, 0) == Catch::Approx(100.0));
  REQUIRE(geom.blocked_direct());
  REQUIRE_FALSE(warnings.empty());  // dense RIS spacing warning
}
