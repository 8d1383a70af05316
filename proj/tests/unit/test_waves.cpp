#include <catch2/catch_amalgamated.hpp>

#include "rismp/rng.hpp"
#include "rismp/waves.hpp"

using rismp::Complex;

TEST_CASE("wave and voltage descriptions are mutually consistent", "[waves]") {
  const rismp::BlockPartition partition{2, 3, 1};
  rismp::RngStream draw(11, 0);
  const double r = 50.0;

  Eigen::VectorXcd v(partition.total()), i(partition.total());
  for (Eigen::Index k = 0; k < partition.total(); ++k) {
    v[k] = Complex(draw(-1.0, 1.0), draw(-1.0, 1.0));
    i[k] = Complex(draw(-1.0, 1.0), draw(-1.0, 1.0)) / r;
  }

  const auto from_vi = rismp::PortState::from_voltage_current(partition, r, v, i);
  const auto back = rismp::PortState::from_waves(partition, r, from_vi.a, from_vi.b);
  // v = a + b and i = (a - b)/R must reproduce the inputs to rounding.
  REQUIRE((back.v - v).norm() < 1e-15);
  REQUIRE((back.i - i).norm() < 1e-15 / r);

  // and both hold simultaneously on the constructed state
  REQUIRE((from_vi.v - (from_vi.a + from_vi.b)).norm() < 1e-15);
  REQUIRE((from_vi.i - (from_vi.a - from_vi.b) / r).norm() < 1e-18);
}

TEST_CASE("port state segments follow the partition", "[waves]") {
  const rismp::BlockPartition partition{1, 2, 1};
  Eigen::VectorXcd a = Eigen::VectorXcd::LinSpaced(4, 1.0, 4.0);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(4);
  const auto state = rismp::PortState::from_waves(partition, 50.0, a, b);
  REQUIRE(state.segment(state.a, rismp::PortGroup::tx).size() == 1);
  REQUIRE(state.segment(state.a, rismp::PortGroup::ris).size() == 2);
  REQUIRE(state.segment(state.a, rismp::PortGroup::ris)(0) == Complex(2.0, 0.0));
  REQUIRE(state.segment(state.a, rismp::PortGroup::rx)(0) == Complex(4.0, 0.0));
}

TEST_CASE("mismatched vector lengths are rejected", "[waves]") {
  const rismp::BlockPartition partition{1, 1, 1};
  Eigen::VectorXcd good = Eigen::VectorXcd::Zero(3), bad = Eigen::VectorXcd::Zero(2);
  REQUIRE_THROWS_AS(
      rismp::PortState::from_voltage_current(partition, 50.0, good, bad),
      rismp::StructureError);
}
