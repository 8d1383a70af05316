#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "rismp/blocks.hpp"
#include "rismp/errors.hpp"

namespace rismp {

/// Voltages, currents and the equivalent incident/reflected waves at all
/// ports of the link, referenced to one common port resistance R. The two
/// descriptions are linearly related:
///
///   v = a + b,            i = (a - b) / R
///   a = (v + R i) / 2,    b = (v - R i) / 2
struct PortState {
  BlockPartition partition;
  double port_resistance = 50.0;
  Eigen::VectorXcd v;  // port voltages [V]
  Eigen::VectorXcd i;  // port currents [A]
  Eigen::VectorXcd a;  // incident waves [V]
  Eigen::VectorXcd b;  // reflected waves [V]

  static PortState from_voltage_current(BlockPartition partition, double r,
                                        Eigen::VectorXcd v,
                                        Eigen::VectorXcd i) {
    check_inputs(partition, r, v, i, "v/i");
    PortState state;
    state.partition = partition;
    state.port_resistance = r;
    state.a = 0.5 * (v + r * i);
    state.b = 0.5 * (v - r * i);
    state.v = std::move(v);
    state.i = std::move(i);
    return state;
  }

  static PortState from_waves(BlockPartition partition, double r,
                              Eigen::VectorXcd a, Eigen::VectorXcd b) {
    check_inputs(partition, r, a, b, "a/b");
    PortState state;
    state.partition = partition;
    state.port_resistance = r;
    state.v = a + b;
    state.i = (a - b) / r;
    state.a = std::move(a);
    state.b = std::move(b);
    return state;
  }

  auto segment(const Eigen::VectorXcd& full, PortGroup g) const {
    return full.segment(partition.offset(g), partition.size(g));
  }

 private:
  static void check_inputs(const BlockPartition& partition, double r,
                           const Eigen::VectorXcd& first,
                           const Eigen::VectorXcd& second, const char* what) {
    if (!(r > 0.0)) throw GeometryError("port resistance must be positive");
    if (first.size() != partition.total() ||
        second.size() != partition.total()) {
      throw StructureError(std::string(what) + " vectors must have " +
                           std::to_string(partition.total()) + " entries");
    }
  }
};

}  // namespace rismp
