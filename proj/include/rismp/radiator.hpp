#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rismp/blocks.hpp"
#include "rismp/errors.hpp"
#include "rismp/warnings.hpp"

namespace rismp {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Global parameters of the Tx -> RIS -> Rx link.
struct LinkConfig {
  Eigen::Index tx_antennas = 1;   // M
  Eigen::Index ris_elements = 1;  // N
  Eigen::Index rx_antennas = 1;   // K
  double port_resistance = 50.0;  // ohms, common to all ports
  double wavelength = 1.0;        // meters

  BlockPartition partition() const {
    return BlockPartition{tx_antennas, ris_elements, rx_antennas};
  }

  void validate() const {
    if (tx_antennas < 1 || ris_elements < 1 || rx_antennas < 1) {
      throw GeometryError("antenna/element counts must be >= 1");
    }
    if (!(port_resistance > 0.0)) {
      throw GeometryError("port resistance must be positive");
    }
    if (!(wavelength > 0.0)) {
      throw GeometryError("wavelength must be positive");
    }
  }
};

/// Mutual impedance between two isotropic radiators a distance d apart:
///
///   z21 = -R / (j k d) * e^{-j k d},   k = 2 pi / lambda
///
/// i.e. magnitude R lambda / (2 pi d) and phase pi/2 - k d. The propagation
/// phase is reduced modulo one wavelength before evaluating e^{-j k d}, so
/// integer-wavelength path lengths carry exactly zero residual phase.
inline Complex mutual_impedance(double distance, double wavelength,
                                double port_resistance) {
  if (!(distance > 0.0)) {
    throw GeometryError("mutual impedance requires a positive distance, got " +
                        std::to_string(distance));
  }
  if (!(wavelength > 0.0) || !(port_resistance > 0.0)) {
    throw GeometryError("wavelength and port resistance must be positive");
  }
  const double cycles = distance / wavelength;
  const double magnitude = port_resistance / (kTwoPi * cycles);
  const double fraction = cycles - std::floor(cycles);
  return Complex(0.0, magnitude) * std::polar(1.0, -kTwoPi * fraction);
}

/// Far-field variant with separate amplitude and phase references: the 1/d
/// amplitude is taken at `amplitude_distance` while the propagation phase
/// accrues over `phase_distance`. With both equal this is mutual_impedance.
inline Complex mutual_impedance_far_field(double phase_distance,
                                          double amplitude_distance,
                                          double wavelength,
                                          double port_resistance) {
  if (!(phase_distance > 0.0) || !(amplitude_distance > 0.0)) {
    throw GeometryError("mutual impedance requires positive distances");
  }
  if (!(wavelength > 0.0) || !(port_resistance > 0.0)) {
    throw GeometryError("wavelength and port resistance must be positive");
  }
  const double cycles = phase_distance / wavelength;
  const double magnitude =
      port_resistance * wavelength / (kTwoPi * amplitude_distance);
  const double fraction = cycles - std::floor(cycles);
  return Complex(0.0, magnitude) * std::polar(1.0, -kTwoPi * fraction);
}

/// Link geometry as per-pair path lengths (meters) for the three forward
/// hops. Either constructed directly from path-length tables or derived from
/// explicit 3D element positions. Optional amplitude tables decouple the 1/d
/// amplitude reference from the phase path (far-field equal-gain modelling);
/// when absent the phase paths are used for both.
class LinkGeometry {
 public:
  static LinkGeometry from_path_lengths(
      Eigen::MatrixXd ris_from_tx, Eigen::MatrixXd rx_from_ris,
      std::optional<Eigen::MatrixXd> rx_from_tx = std::nullopt) {
    LinkGeometry g;
    g.path_ris_from_tx_ = std::move(ris_from_tx);
    g.path_rx_from_ris_ = std::move(rx_from_ris);
    if (rx_from_tx.has_value()) {
      g.path_rx_from_tx_ = std::move(*rx_from_tx);
      g.blocked_direct_ = false;
    } else {
      g.blocked_direct_ = true;
    }
    return g;
  }

  static LinkGeometry from_positions(std::vector<Eigen::Vector3d> tx,
                                     std::vector<Eigen::Vector3d> ris,
                                     std::vector<Eigen::Vector3d> rx,
                                     bool blocked_direct = false) {
    LinkGeometry g;
    g.path_ris_from_tx_ = pairwise_distances(ris, tx);
    g.path_rx_from_ris_ = pairwise_distances(rx, ris);
    if (!blocked_direct) {
      g.path_rx_from_tx_ = pairwise_distances(rx, tx);
    }
    g.blocked_direct_ = blocked_direct;
    g.tx_positions_ = std::move(tx);
    g.ris_positions_ = std::move(ris);
    g.rx_positions_ = std::move(rx);
    return g;
  }

  /// Returns a copy using the given tables as amplitude references. An empty
  /// matrix keeps the corresponding phase table as the amplitude reference.
  LinkGeometry with_amplitude_reference(
      Eigen::MatrixXd amp_ris_from_tx, Eigen::MatrixXd amp_rx_from_ris,
      Eigen::MatrixXd amp_rx_from_tx = {}) const {
    LinkGeometry g = *this;
    g.amp_ris_from_tx_ = std::move(amp_ris_from_tx);
    g.amp_rx_from_ris_ = std::move(amp_rx_from_ris);
    g.amp_rx_from_tx_ = std::move(amp_rx_from_tx);
    return g;
  }

  const Eigen::MatrixXd& path_ris_from_tx() const { return path_ris_from_tx_; }
  const Eigen::MatrixXd& path_rx_from_ris() const { return path_rx_from_ris_; }
  const Eigen::MatrixXd& path_rx_from_tx() const { return path_rx_from_tx_; }

  const Eigen::MatrixXd& amp_ris_from_tx() const {
    return amp_ris_from_tx_.size() ? amp_ris_from_tx_ : path_ris_from_tx_;
  }
  const Eigen::MatrixXd& amp_rx_from_ris() const {
    return amp_rx_from_ris_.size() ? amp_rx_from_ris_ : path_rx_from_ris_;
  }
  const Eigen::MatrixXd& amp_rx_from_tx() const {
    return amp_rx_from_tx_.size() ? amp_rx_from_tx_ : path_rx_from_tx_;
  }

  bool blocked_direct() const { return blocked_direct_; }

  const std::optional<std::vector<Eigen::Vector3d>>& ris_positions() const {
    return ris_positions_;
  }

  void validate(const LinkConfig& cfg) const {
    cfg.validate();
    check_table(path_ris_from_tx(), amp_ris_from_tx(), cfg.ris_elements,
                cfg.tx_antennas, cfg.wavelength, "ris_from_tx");
    check_table(path_rx_from_ris(), amp_rx_from_ris(), cfg.rx_antennas,
                cfg.ris_elements, cfg.wavelength, "rx_from_ris");
    if (!blocked_direct_) {
      check_table(path_rx_from_tx(), amp_rx_from_tx(), cfg.rx_antennas,
                  cfg.tx_antennas, cfg.wavelength, "rx_from_tx");
    }
    if (ris_positions_.has_value()) {
      warn_on_dense_spacing(*ris_positions_, cfg.wavelength);
    }
  }

 private:
  static Eigen::MatrixXd pairwise_distances(
      const std::vector<Eigen::Vector3d>& rows,
      const std::vector<Eigen::Vector3d>& cols) {
    Eigen::MatrixXd d(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t j = 0; j < cols.size(); ++j) {
        d(Eigen::Index(i), Eigen::Index(j)) = (rows[i] - cols[j]).norm();
      }
    }
    return d;
  }

  static void check_table(const Eigen::MatrixXd& phase,
                          const Eigen::MatrixXd& amplitude, Eigen::Index rows,
                          Eigen::Index cols, double wavelength,
                          const char* name) {
    if (phase.rows() != rows || phase.cols() != cols) {
      throw GeometryError(std::string("path table ") + name + " must be " +
                          std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (amplitude.rows() != rows || amplitude.cols() != cols) {
      throw GeometryError(std::string("amplitude table ") + name +
                          " has the wrong shape");
    }
    for (const auto* table : {&phase, &amplitude}) {
      if (table->size() && table->minCoeff() <= 0.0) {
        throw GeometryError(std::string("path table ") + name +
                            " contains a non-positive distance");
      }
    }
    if (phase.size() && phase.minCoeff() < wavelength) {
      emit_warning(std::string("path table ") + name +
                   " contains sub-wavelength distances; the far-field mutual "
                   "impedance is questionable there");
    }
  }

  static void warn_on_dense_spacing(const std::vector<Eigen::Vector3d>& ris,
                                    double wavelength) {
    for (std::size_t i = 0; i < ris.size(); ++i) {
      for (std::size_t j = i + 1; j < ris.size(); ++j) {
        if ((ris[i] - ris[j]).norm() < 0.5 * wavelength) {
          emit_warning("RIS elements closer than lambda/2; intra-array "
                       "coupling is neglected regardless");
          return;
        }
      }
    }
  }

  Eigen::MatrixXd path_ris_from_tx_;  // N x M
  Eigen::MatrixXd path_rx_from_ris_;  // K x N
  Eigen::MatrixXd path_rx_from_tx_;   // K x M, empty when blocked
  Eigen::MatrixXd amp_ris_from_tx_;
  Eigen::MatrixXd amp_rx_from_ris_;
  Eigen::MatrixXd amp_rx_from_tx_;
  bool blocked_direct_ = false;
  std::optional<std::vector<Eigen::Vector3d>> tx_positions_;
  std::optional<std::vector<Eigen::Vector3d>> ris_positions_;
  std::optional<std::vector<Eigen::Vector3d>> rx_positions_;
};

struct Scenario {
  LinkConfig config;
  LinkGeometry geometry;
};

/// Assembles the unilateral matched multiport impedance matrix from the link
/// geometry: diagonal blocks R*I, forward blocks synthesized entrywise from
/// the isotropic-radiator mutual impedance, reverse blocks zero. A blocked
/// direct link leaves the rx_from_tx block at exactly zero ohms.
inline MultiportImpedance build_unilateral_multiport(const LinkConfig& cfg,
                                                     const LinkGeometry& geom) {
  geom.validate(cfg);
  const BlockPartition partition = cfg.partition();
  MultiportImpedance z = MultiportImpedance::Zero(partition);
  z.dense().diagonal().setConstant(cfg.port_resistance);

  auto fill = [&](auto block, const Eigen::MatrixXd& phase,
                  const Eigen::MatrixXd& amplitude) {
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      for (Eigen::Index j = 0; j < block.cols(); ++j) {
        block(i, j) = mutual_impedance_far_field(
            phase(i, j), amplitude(i, j), cfg.wavelength, cfg.port_resistance);
      }
    }
  };
  fill(z.ris_from_tx(), geom.path_ris_from_tx(), geom.amp_ris_from_tx());
  fill(z.rx_from_ris(), geom.path_rx_from_ris(), geom.amp_rx_from_ris());
  if (!geom.blocked_direct()) {
    fill(z.rx_from_tx(), geom.path_rx_from_tx(), geom.amp_rx_from_tx());
  }
  return z;
}

inline MultiportImpedance build_unilateral_multiport(const Scenario& scenario) {
  return build_unilateral_multiport(scenario.config, scenario.geometry);
}

/// Hop impedances of the normalization reference: RIS element 1 seen from
/// Tx antenna 1, and Rx antenna 1 seen from RIS element 1.
inline std::pair<Complex, Complex> reference_hop_impedances(
    const Scenario& scenario) {
  const LinkConfig& cfg = scenario.config;
  const LinkGeometry& geom = scenario.geometry;
  const Complex z_ris_tx = mutual_impedance_far_field(
      geom.path_ris_from_tx()(0, 0), geom.amp_ris_from_tx()(0, 0),
      cfg.wavelength, cfg.port_resistance);
  const Complex z_rx_ris = mutual_impedance_far_field(
      geom.path_rx_from_ris()(0, 0), geom.amp_rx_from_ris()(0, 0),
      cfg.wavelength, cfg.port_resistance);
  return {z_ris_tx, z_rx_ris};
}

/// SISO link via one RIS element with a blocked direct path; Tx->RIS spans
/// `d_rs_wavelengths` and RIS->Rx `d_dr_wavelengths` (both integer by
/// default so the reference path carries no residual propagation phase).
inline Scenario single_element_link(double port_resistance = 50.0,
                                    double wavelength = 1.0,
                                    double d_rs_wavelengths = 100.0,
                                    double d_dr_wavelengths = 1000.0) {
  LinkConfig cfg;
  cfg.tx_antennas = 1;
  cfg.ris_elements = 1;
  cfg.rx_antennas = 1;
  cfg.port_resistance = port_resistance;
  cfg.wavelength = wavelength;
  Eigen::MatrixXd d_rs(1, 1), d_dr(1, 1);
  d_rs << d_rs_wavelengths * wavelength;
  d_dr << d_dr_wavelengths * wavelength;
  return Scenario{cfg, LinkGeometry::from_path_lengths(d_rs, d_dr)};
}

/// SISO link via two RIS elements spaced `spacing_over_lambda` apart, with a
/// blocked direct path. The full extra path length of element 2 accrues on
/// its Tx->RIS hop while per-hop amplitudes stay equal to element 1's; only
/// the total extra propagation phase 2 pi d / lambda is observable.
inline Scenario two_element_link(double spacing_over_lambda,
                                 double port_resistance = 50.0,
                                 double wavelength = 1.0,
                                 double d_rs_wavelengths = 100.0,
                                 double d_dr_wavelengths = 1000.0) {
  if (spacing_over_lambda < 0.0) {
    throw GeometryError("element spacing must be non-negative");
  }
  LinkConfig cfg;
  cfg.tx_antennas = 1;
  cfg.ris_elements = 2;
  cfg.rx_antennas = 1;
  cfg.port_resistance = port_resistance;
  cfg.wavelength = wavelength;
  Eigen::MatrixXd d_rs(2, 1), d_dr(1, 2), amp_rs(2, 1), amp_dr(1, 2);
  const double base_rs = d_rs_wavelengths * wavelength;
  const double base_dr = d_dr_wavelengths * wavelength;
  d_rs << base_rs, base_rs + spacing_over_lambda * wavelength;
  amp_rs << base_rs, base_rs;
  d_dr << base_dr, base_dr;
  amp_dr << base_dr, base_dr;
  LinkGeometry geom = LinkGeometry::from_path_lengths(d_rs, d_dr)
                          .with_amplitude_reference(amp_rs, amp_dr);
  return Scenario{cfg, geom};
}

}  // namespace rismp
