#pragma once

// Shared generators for randomized unilateral multiports. Two flavors:
//  - synthetic: forward blocks drawn entrywise from the seeded counter RNG
//  - geometric: path-length scenarios through the radiator synthesis
// Both keep diagonal blocks matched (R*I) and reverse blocks zero.

#include <Eigen/Dense>
#include <cstdint>

#include "rismp/blocks.hpp"
#include "rismp/radiator.hpp"
#include "rismp/rng.hpp"
#include "rismp/termination.hpp"

namespace testsupport {

struct RandomLink {
  rismp::MultiportImpedance z;
  double r;
};

inline rismp::BlockPartition random_partition(rismp::RngStream& draw,
                                              Eigen::Index max_size = 4) {
  auto pick = [&] {
    return 1 + Eigen::Index(draw() * double(max_size));  // uniform 1..max
  };
  return rismp::BlockPartition{pick(), pick(), pick()};
}

/// Unilateral multiport with random complex forward blocks (entry magnitudes
/// a few percent of R, as befits a high-attenuation link).
inline RandomLink synthetic_unilateral(rismp::RngStream& draw, double r,
                                       bool blocked_direct,
                                       Eigen::Index max_size = 4) {
  const rismp::BlockPartition partition = random_partition(draw, max_size);
  auto z = rismp::MultiportImpedance::Zero(partition);
  z.dense().diagonal().setConstant(r);
  auto fill = [&](auto block) {
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      for (Eigen::Index j = 0; j < block.cols(); ++j) {
        block(i, j) = rismp::Complex(draw(-1.0, 1.0), draw(-1.0, 1.0)) * 0.05 * r;
      }
    }
  };
  fill(z.ris_from_tx());
  fill(z.rx_from_ris());
  if (!blocked_direct) fill(z.rx_from_tx());
  return RandomLink{std::move(z), r};
}

/// Path-length scenario with random far-field distances (1..2000 lambda).
inline rismp::Scenario geometric_scenario(rismp::RngStream& draw, double r,
                                          bool blocked_direct,
                                          Eigen::Index max_size = 4) {
  const rismp::BlockPartition partition = random_partition(draw, max_size);
  rismp::LinkConfig cfg;
  cfg.tx_antennas = partition.tx;
  cfg.ris_elements = partition.ris;
  cfg.rx_antennas = partition.rx;
  cfg.port_resistance = r;
  cfg.wavelength = 1.0;
  auto distances = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd d(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) d(i, j) = draw(1.0, 2000.0);
    }
    return d;
  };
  auto geom = rismp::LinkGeometry::from_path_lengths(
      distances(partition.ris, partition.tx),
      distances(partition.rx, partition.ris),
      blocked_direct
          ? std::optional<Eigen::MatrixXd>()
          : std::optional<Eigen::MatrixXd>(distances(partition.rx, partition.tx)));
  return rismp::Scenario{cfg, geom};
}

/// Random reactive termination with X uniform in [-10R, 10R].
inline rismp::RisTermination random_termination(rismp::RngStream& draw,
                                                Eigen::Index n, double r) {
  Eigen::VectorXd x(n);
  for (Eigen::Index k = 0; k < n; ++k) x[k] = draw(-10.0 * r, 10.0 * r);
  return rismp::RisTermination::from_reactances(x, r);
}

}  // namespace testsupport
