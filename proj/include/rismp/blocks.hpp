#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "rismp/errors.hpp"

namespace rismp {

using Complex = std::complex<double>;

/// The three port groups of the link: transmit array, RIS, receive array.
enum class PortGroup { tx = 0, ris = 1, rx = 2 };

inline const char* to_string(PortGroup g) {
  switch (g) {
    case PortGroup::tx: return "tx";
    case PortGroup::ris: return "ris";
    default: return "rx";
  }
}

/// Port counts of the three groups. Rows/columns of every multiport matrix
/// are laid out as [tx | ris | rx], so the partition fixes the block layout.
struct BlockPartition {
  Eigen::Index tx = 0;
  Eigen::Index ris = 0;
  Eigen::Index rx = 0;

  Eigen::Index size(PortGroup g) const {
    switch (g) {
      case PortGroup::tx: return tx;
      case PortGroup::ris: return ris;
      default: return rx;
    }
  }

  Eigen::Index offset(PortGroup g) const {
    switch (g) {
      case PortGroup::tx: return 0;
      case PortGroup::ris: return tx;
      default: return tx + ris;
    }
  }

  Eigen::Index total() const { return tx + ris + rx; }

  bool operator==(const BlockPartition&) const = default;
};

/// Dense complex multiport matrix carrying its block partition. All block
/// accessors are index-range views over the single dense storage, so a block
/// can never disagree with the assembled matrix.
///
/// The DomainTag distinguishes impedance-domain matrices (entries in ohms)
/// from dimensionless scattering matrices at the type level.
template <class DomainTag>
class MultiportMatrix {
 public:
  MultiportMatrix(BlockPartition partition, Eigen::MatrixXcd dense)
      : partition_(partition), dense_(std::move(dense)) {
    if (dense_.rows() != partition_.total() ||
        dense_.cols() != partition_.total()) {
      throw StructureError(
          "multiport matrix is " + std::to_string(dense_.rows()) + "x" +
          std::to_string(dense_.cols()) + " but the partition needs " +
          std::to_string(partition_.total()) + " ports");
    }
    if (!dense_.allFinite()) {
      throw NonFiniteError("multiport matrix contains NaN or Inf entries");
    }
  }

  static MultiportMatrix Zero(BlockPartition partition) {
    return MultiportMatrix(
        partition,
        Eigen::MatrixXcd::Zero(partition.total(), partition.total()));
  }

  const BlockPartition& partition() const { return partition_; }
  const Eigen::MatrixXcd& dense() const { return dense_; }
  Eigen::MatrixXcd& dense() { return dense_; }

  /// View of the block whose rows belong to `row` and columns to `col`.
  auto at(PortGroup row, PortGroup col) const {
    return dense_.block(partition_.offset(row), partition_.offset(col),
                        partition_.size(row), partition_.size(col));
  }
  auto at(PortGroup row, PortGroup col) {
    return dense_.block(partition_.offset(row), partition_.offset(col),
                        partition_.size(row), partition_.size(col));
  }

  // Named views; "a_from_b" maps an excitation at group b to group a.
  auto tx_self() const { return at(PortGroup::tx, PortGroup::tx); }
  auto ris_self() const { return at(PortGroup::ris, PortGroup::ris); }
  auto rx_self() const { return at(PortGroup::rx, PortGroup::rx); }
  auto ris_from_tx() const { return at(PortGroup::ris, PortGroup::tx); }
  auto rx_from_tx() const { return at(PortGroup::rx, PortGroup::tx); }
  auto rx_from_ris() const { return at(PortGroup::rx, PortGroup::ris); }
  auto tx_from_ris() const { return at(PortGroup::tx, PortGroup::ris); }
  auto tx_from_rx() const { return at(PortGroup::tx, PortGroup::rx); }
  auto ris_from_rx() const { return at(PortGroup::ris, PortGroup::rx); }

  auto tx_self() { return at(PortGroup::tx, PortGroup::tx); }
  auto ris_self() { return at(PortGroup::ris, PortGroup::ris); }
  auto rx_self() { return at(PortGroup::rx, PortGroup::rx); }
  auto ris_from_tx() { return at(PortGroup::ris, PortGroup::tx); }
  auto rx_from_tx() { return at(PortGroup::rx, PortGroup::tx); }
  auto rx_from_ris() { return at(PortGroup::rx, PortGroup::ris); }
  auto tx_from_ris() { return at(PortGroup::tx, PortGroup::ris); }
  auto tx_from_rx() { return at(PortGroup::tx, PortGroup::rx); }
  auto ris_from_rx() { return at(PortGroup::ris, PortGroup::rx); }

 private:
  BlockPartition partition_;
  Eigen::MatrixXcd dense_;
};

namespace detail {
inline void ensure_finite(const Eigen::MatrixXcd& m, const char* context) {
  if (!m.allFinite()) {
    throw NonFiniteError(std::string(context) +
                         " produced non-finite entries");
  }
}
}  // namespace detail

struct ImpedanceDomain {};
struct ScatteringDomain {};

using MultiportImpedance = MultiportMatrix<ImpedanceDomain>;   // ohms
using MultiportScattering = MultiportMatrix<ScatteringDomain>; // dimensionless

inline bool is_reciprocal(const Eigen::MatrixXcd& m, double tol = 1e-12) {
  return (m - m.transpose()).norm() <= tol * (1.0 + m.norm());
}

/// Reads the common port resistance off the diagonal blocks of a matched
/// multiport (all three diagonal blocks equal to R*I). Throws StructureError
/// when the diagonal blocks are not of that form.
inline double matched_port_resistance(const MultiportImpedance& z,
                                      double rel_tol = 1e-9) {
  const double r = z.dense()(0, 0).real();
  if (!(r > 0.0)) {
    throw StructureError("multiport is not matched: Z(0,0) must be a positive "
                         "real port resistance");
  }
  for (PortGroup g : {PortGroup::tx, PortGroup::ris, PortGroup::rx}) {
    const auto block = z.at(g, g);
    const auto eye = Eigen::MatrixXcd::Identity(block.rows(), block.cols());
    if ((block - eye * r).norm() > rel_tol * r * std::sqrt(double(block.rows()))) {
      throw StructureError(std::string("diagonal block ") + to_string(g) +
                           " is not I*R; intra-array coupling is unsupported");
    }
  }
  return r;
}

/// Validates the unilateral matched-impedance structure: diagonal blocks R*I,
/// reverse blocks zero. Returns the port resistance.
inline double require_unilateral(const MultiportImpedance& z) {
  const double r = matched_port_resistance(z);
  const double tol = 1e-12 * r;
  auto check_zero = [&](const auto& block, const char* name) {
    if (block.size() > 0 && block.cwiseAbs().maxCoeff() > tol) {
      throw StructureError(std::string("block ") + name +
                           " must be zero in a unilateral multiport");
    }
  };
  check_zero(z.tx_from_ris(), "tx_from_ris");
  check_zero(z.tx_from_rx(), "tx_from_rx");
  check_zero(z.ris_from_rx(), "ris_from_rx");
  return r;
}

/// Scattering-domain counterpart: diagonal and reverse blocks all zero.
inline void require_unilateral(const MultiportScattering& s,
                               double abs_tol = 1e-12) {
  auto check_zero = [&](const auto& block, const char* name) {
    if (block.size() > 0 && block.cwiseAbs().maxCoeff() > abs_tol) {
      throw StructureError(std::string("block ") + name +
                           " must be zero in a unilateral scattering matrix");
    }
  };
  check_zero(s.tx_self(), "tx_self");
  check_zero(s.ris_self(), "ris_self");
  check_zero(s.rx_self(), "rx_self");
  check_zero(s.tx_from_ris(), "tx_from_ris");
  check_zero(s.tx_from_rx(), "tx_from_rx");
  check_zero(s.ris_from_rx(), "ris_from_rx");
}

}  // namespace rismp
