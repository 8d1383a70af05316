#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>

#include "rismp/blocks.hpp"
#include "rismp/errors.hpp"
#include "rismp/radiator.hpp"
#include "rismp/termination.hpp"

namespace rismp {

/// Which transfer computation produced a result. The three physical routes
/// agree on identical inputs; the conventional route deliberately drops the
/// reflective contribution folded into the direct scattering block.
enum class ModelTag {
  physical_z,        // impedance-domain transfer
  physical_s,        // scattering-domain transfer
  physical_blocked,  // impedance-domain transfer with a zero direct block
  conventional,      // phase-only reflection model (direct block assumed 0)
  theta_form,        // impedance-domain transfer parameterized by theta
};

inline const char* to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::physical_z: return "physical-z";
    case ModelTag::physical_s: return "physical-s";
    case ModelTag::physical_blocked: return "physical-blocked";
    case ModelTag::conventional: return "conventional";
    default: return "theta-form";
  }
}

/// End-to-end K x M voltage transfer v_L = D v_G, optionally with the
/// path-loss-normalized form attached by normalize_transfer().
struct TransferResult {
  Eigen::MatrixXcd matrix;
  ModelTag model = ModelTag::physical_z;
  std::optional<Eigen::MatrixXcd> normalized;

  bool is_normalized() const { return normalized.has_value(); }

  /// Per-entry power gain 10 log10 |normalized|^2 in dB.
  Eigen::MatrixXd power_gain_db() const {
    if (!normalized) {
      throw NormalizationError(
          "transfer result has no normalized form; call normalize_transfer");
    }
    return decibels(*normalized);
  }

  /// Per-entry gain of the raw (un-normalized) transfer matrix in dB.
  Eigen::MatrixXd raw_gain_db() const { return decibels(matrix); }

 private:
  static Eigen::MatrixXd decibels(const Eigen::MatrixXcd& m) {
    Eigen::MatrixXd db(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        db(i, j) = 10.0 * std::log10(std::norm(m(i, j)));
      }
    }
    return db;
  }
};

namespace detail {

inline void require_term_size(const RisTermination& term, Eigen::Index n) {
  if (term.size() != n) {
    throw StructureError("termination has " + std::to_string(term.size()) +
                         " elements but the RIS has " + std::to_string(n));
  }
}

inline void require_matching_r(const RisTermination& term, double r) {
  const double tr = term.reference_resistance();
  if (std::abs(tr - r) > 1e-9 * r) {
    throw StructureError(
        "termination reference resistance " + std::to_string(tr) +
        " does not match the multiport port resistance " + std::to_string(r));
  }
}

}  // namespace detail

/// Closed-form Z -> S conversion exploiting the unilateral structure:
///
///   S_ris_tx = Z_ris_tx / (2R)
///   S_rx_ris = Z_rx_ris / (2R)
///   S_rx_tx  = (Z_rx_tx - Z_rx_ris Z_ris_tx / (2R)) / (2R)
///
/// with every other block zero. Agrees with the general conversion on any
/// unilateral matched multiport; the cascade correction in the direct block
/// is what the phase-only model loses.
inline MultiportScattering blockwise_z_to_s(const MultiportImpedance& z,
                                            double r) {
  const double matched_r = require_unilateral(z);
  if (std::abs(matched_r - r) > 1e-9 * r) {
    throw StructureError("requested reference resistance " + std::to_string(r) +
                         " does not match the multiport's " +
                         std::to_string(matched_r));
  }
  MultiportScattering s = MultiportScattering::Zero(z.partition());
  const double inv_2r = 1.0 / (2.0 * r);
  s.ris_from_tx() = z.ris_from_tx() * inv_2r;
  s.rx_from_ris() = z.rx_from_ris() * inv_2r;
  s.rx_from_tx() =
      (z.rx_from_tx() - z.rx_from_ris() * z.ris_from_tx() * inv_2r) * inv_2r;
  detail::ensure_finite(s.dense(), "blockwise_z_to_s");
  return s;
}

/// Impedance-domain end-to-end transfer (v_L = D v_G):
///
///   D = (Z_rx_tx - Z_rx_ris (Z_N + I R)^{-1} Z_ris_tx) / (4R)
///
/// Z_N = diag(j X_n), so the inverted factor is diagonal and never singular
/// for real reactances.
inline TransferResult transfer_impedance(const MultiportImpedance& z,
                                         const RisTermination& term) {
  const double r = require_unilateral(z);
  detail::require_term_size(term, z.partition().ris);
  detail::require_matching_r(term, r);
  const Eigen::VectorXd x = term.reactances();

  Eigen::VectorXcd series_admittance(x.size());  // 1 / (j X_n + R)
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    series_admittance[n] = 1.0 / Complex(r, x[n]);
  }
  TransferResult result;
  result.matrix = (z.rx_from_tx() -
                   z.rx_from_ris() * series_admittance.asDiagonal() *
                       z.ris_from_tx()) /
                  (4.0 * r);
  const bool blocked = z.rx_from_tx().size() == 0 ||
                       z.rx_from_tx().cwiseAbs().maxCoeff() == 0.0;
  result.model = blocked ? ModelTag::physical_blocked : ModelTag::physical_z;
  detail::ensure_finite(result.matrix, "transfer_impedance");
  return result;
}

/// Scattering-domain end-to-end transfer (b_D = H 2 a_S):
///
///   H = (S_rx_tx + S_rx_ris Theta S_ris_tx) / 2
///
/// Identical to the impedance-domain transfer when S describes the same
/// physical multiport as Z (i.e. includes the cascade term in S_rx_tx).
inline TransferResult transfer_scattering(const MultiportScattering& s,
                                          const RisTermination& term) {
  require_unilateral(s);
  detail::require_term_size(term, s.partition().ris);
  const Eigen::VectorXcd theta = term.reflection();

  TransferResult result;
  result.matrix =
      0.5 * (s.rx_from_tx() +
             s.rx_from_ris() * theta.asDiagonal() * s.ris_from_tx());
  result.model = ModelTag::physical_s;
  detail::ensure_finite(result.matrix, "transfer_scattering");
  return result;
}

/// The conventional phase-only model: each RIS element re-emits its incident
/// wave scaled by theta_n, and with `zero_direct` the direct scattering
/// block is assumed to vanish entirely:
///
///   H_conv = S_rx_ris Theta S_ris_tx / 2
///
/// This ignores that a blocked physical direct path still leaves
/// S_rx_tx = -S_rx_ris S_ris_tx, so H_conv differs from the physical model.
inline TransferResult transfer_conventional(const MultiportScattering& s,
                                            const RisTermination& term,
                                            bool zero_direct = true) {
  require_unilateral(s);
  detail::require_term_size(term, s.partition().ris);
  const Eigen::VectorXcd theta = term.reflection();

  TransferResult result;
  result.matrix =
      0.5 * s.rx_from_ris() * theta.asDiagonal() * s.ris_from_tx();
  if (!zero_direct) {
    result.matrix += 0.5 * s.rx_from_tx();
  }
  result.model = ModelTag::conventional;
  detail::ensure_finite(result.matrix, "transfer_conventional");
  return result;
}

/// Impedance-domain transfer parameterized directly by Theta:
///
///   D = (Z_rx_tx - Z_rx_ris Z_ris_tx/(2R) + Z_rx_ris Theta Z_ris_tx/(2R)) / (4R)
///
/// Algebraically identical to transfer_impedance, but total in Theta: the
/// open circuit theta = 1 is a regular point (the element becomes invisible)
/// instead of an infinite reactance.
inline TransferResult transfer_theta_form(const MultiportImpedance& z,
                                          const RisTermination& term) {
  const double r = require_unilateral(z);
  detail::require_term_size(term, z.partition().ris);
  detail::require_matching_r(term, r);
  const Eigen::VectorXcd theta = term.reflection();

  const double inv_2r = 1.0 / (2.0 * r);
  Eigen::VectorXcd theta_minus_one = theta.array() - 1.0;
  TransferResult result;
  result.matrix = (z.rx_from_tx() +
                   z.rx_from_ris() * theta_minus_one.asDiagonal() *
                       z.ris_from_tx() * inv_2r) /
                  (4.0 * r);
  result.model = ModelTag::theta_form;
  detail::ensure_finite(result.matrix, "transfer_theta_form");
  return result;
}

/// Scale that removes the reference element's path loss and propagation
/// phase: c = -4 R^2 / (z_rx_ris_ref * z_ris_tx_ref). For the single-element
/// link this turns D into exactly 1/(1 + j X/R).
inline Complex normalization_constant(Complex z_ris_tx_ref,
                                      Complex z_rx_ris_ref, double r) {
  const Complex product = z_rx_ris_ref * z_ris_tx_ref;
  if (std::abs(product) == 0.0) {
    throw NormalizationError(
        "reference hop impedances are zero; cannot normalize");
  }
  return -4.0 * r * r / product;
}

inline Complex normalization_constant(const Scenario& scenario) {
  const auto [z_ris_tx, z_rx_ris] = reference_hop_impedances(scenario);
  return normalization_constant(z_ris_tx, z_rx_ris,
                                scenario.config.port_resistance);
}

inline TransferResult normalize_transfer(TransferResult result,
                                         Complex z_ris_tx_ref,
                                         Complex z_rx_ris_ref, double r) {
  const Complex c = normalization_constant(z_ris_tx_ref, z_rx_ris_ref, r);
  result.normalized = c * result.matrix;
  detail::ensure_finite(*result.normalized, "normalize_transfer");
  return result;
}

inline TransferResult normalize_transfer(TransferResult result,
                                         const Scenario& scenario) {
  const auto [z_ris_tx, z_rx_ris] = reference_hop_impedances(scenario);
  return normalize_transfer(std::move(result), z_ris_tx, z_rx_ris,
                            scenario.config.port_resistance);
}

}  // namespace rismp
