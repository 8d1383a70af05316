#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "rismp/blocks.hpp"
#include "rismp/errors.hpp"
#include "rismp/warnings.hpp"

namespace rismp {

/// |theta| must sit within this of 1 to count as a lossless reflection.
inline constexpr double kUnitModulusTol = 1e-8;

/// Default surrogate for an open circuit: X = kOpenCircuitSurrogateFactor * R.
/// The replaced element then still contributes with relative magnitude
/// ~1/factor instead of exactly vanishing.
inline constexpr double kOpenCircuitSurrogateFactor = 1e9;

/// Reflection coefficient of a purely reactive load jX on a port with
/// resistance R: theta = (jX - R) / (jX + R). Unit modulus for any real X.
inline Complex reflection_from_reactance(double reactance_ohms, double r) {
  const Complex numerator(-r, reactance_ohms);
  const Complex denominator(r, reactance_ohms);
  Complex theta = numerator / denominator;
  // |num| == |den| analytically; strip the last-bit rounding so downstream
  // unit-modulus checks can use a tight tolerance.
  const double modulus = std::abs(theta);
  if (modulus > 0.0) theta /= modulus;
  return theta;
}

/// Inverse of reflection_from_reactance: X = R * Im[(1 + theta)/(1 - theta)],
/// equivalently X = R * cot(arg(theta)/2). Undefined at theta = 1, which is
/// the open-circuit limit |X| -> inf.
inline double reactance_from_reflection(Complex theta, double r) {
  if (std::abs(std::abs(theta) - 1.0) > kUnitModulusTol) {
    throw StructureError("reflection coefficient must have unit modulus, got |theta| = " +
                         std::to_string(std::abs(theta)));
  }
  const Complex denominator = Complex(1.0, 0.0) - theta;
  if (std::abs(denominator) < 1e-15) {
    throw OpenCircuitError(
        "theta = 1 corresponds to an open circuit with infinite reactance");
  }
  return r * ((Complex(1.0, 0.0) + theta) / denominator).imag();
}

enum class TerminationMode { reactance, reflection, phase };

/// The N reactive one-ports terminating the RIS, in one of three equivalent
/// representations: reactances X_n (ohms), unit-modulus reflection
/// coefficients theta_n, or reflection phases phi_n = arg(theta_n).
class RisTermination {
 public:
  static RisTermination from_reactances(Eigen::VectorXd reactances_ohms,
                                        double r) {
    check_r(r);
    RisTermination t;
    t.mode_ = TerminationMode::reactance;
    t.r_ = r;
    t.reactances_ = std::move(reactances_ohms);
    return t;
  }

  static RisTermination from_reflection(Eigen::VectorXcd theta, double r) {
    check_r(r);
    for (Eigen::Index n = 0; n < theta.size(); ++n) {
      if (std::abs(std::abs(theta[n]) - 1.0) > kUnitModulusTol) {
        throw StructureError(
            "reflection coefficient " + std::to_string(n) +
            " must have unit modulus (lossless termination), got |theta| = " +
            std::to_string(std::abs(theta[n])));
      }
    }
    RisTermination t;
    t.mode_ = TerminationMode::reflection;
    t.r_ = r;
    t.theta_ = std::move(theta);
    return t;
  }

  static RisTermination from_phases(const Eigen::VectorXd& phases_rad,
                                    double r) {
    check_r(r);
    RisTermination t;
    t.mode_ = TerminationMode::phase;
    t.r_ = r;
    t.theta_.resize(phases_rad.size());
    for (Eigen::Index n = 0; n < phases_rad.size(); ++n) {
      t.theta_[n] = std::polar(1.0, phases_rad[n]);
    }
    return t;
  }

  TerminationMode mode() const { return mode_; }
  double reference_resistance() const { return r_; }
  Eigen::Index size() const {
    return mode_ == TerminationMode::reactance ? reactances_.size()
                                               : theta_.size();
  }

  /// Reactances X_n in ohms. Converts from the reflection representation
  /// when needed; throws OpenCircuitError at theta = 1.
  Eigen::VectorXd reactances() const {
    if (mode_ == TerminationMode::reactance) return reactances_;
    Eigen::VectorXd x(theta_.size());
    for (Eigen::Index n = 0; n < theta_.size(); ++n) {
      x[n] = reactance_from_reflection(theta_[n], r_);
    }
    return x;
  }

  /// Like reactances(), but an (effective) open circuit is replaced by the
  /// large finite surrogate X = surrogate_factor * R, with a warning.
  Eigen::VectorXd reactances_or_surrogate(
      double surrogate_factor = kOpenCircuitSurrogateFactor) const {
    if (mode_ == TerminationMode::reactance) return reactances_;
    Eigen::VectorXd x(theta_.size());
    for (Eigen::Index n = 0; n < theta_.size(); ++n) {
      double value;
      try {
        value = reactance_from_reflection(theta_[n], r_);
      } catch (const OpenCircuitError&) {
        value = surrogate_factor * r_;
        emit_warning("termination " + std::to_string(n) +
                     " is an open circuit; using surrogate reactance " +
                     std::to_string(value) + " ohm");
      }
      if (std::abs(value) > surrogate_factor * r_) {
        value = std::copysign(surrogate_factor * r_, value);
      }
      x[n] = value;
    }
    return x;
  }

  /// Unit-modulus reflection coefficients theta_n (any mode).
  Eigen::VectorXcd reflection() const {
    if (mode_ != TerminationMode::reactance) return theta_;
    Eigen::VectorXcd theta(reactances_.size());
    for (Eigen::Index n = 0; n < reactances_.size(); ++n) {
      theta[n] = reflection_from_reactance(reactances_[n], r_);
    }
    return theta;
  }

  /// Reflection phases arg(theta_n) in radians.
  Eigen::VectorXd phases() const {
    const Eigen::VectorXcd theta = reflection();
    Eigen::VectorXd phi(theta.size());
    for (Eigen::Index n = 0; n < theta.size(); ++n) {
      phi[n] = std::arg(theta[n]);
    }
    return phi;
  }

  /// The diagonal termination impedance matrix Z_N = diag(j X_n).
  Eigen::MatrixXcd impedance_matrix() const {
    const Eigen::VectorXd x = reactances();
    Eigen::MatrixXcd zn = Eigen::MatrixXcd::Zero(x.size(), x.size());
    for (Eigen::Index n = 0; n < x.size(); ++n) zn(n, n) = Complex(0.0, x[n]);
    return zn;
  }

 private:
  static void check_r(double r) {
    if (!(r > 0.0)) throw GeometryError("reference resistance must be positive");
  }

  TerminationMode mode_ = TerminationMode::reactance;
  double r_ = 50.0;
  Eigen::VectorXd reactances_;
  Eigen::VectorXcd theta_;
};

/// Reactance -> reflection representation (no-op if already there).
inline RisTermination to_reflection_mode(const RisTermination& term) {
  if (term.mode() == TerminationMode::reflection) return term;
  return RisTermination::from_reflection(term.reflection(),
                                         term.reference_resistance());
}

/// Reflection -> reactance representation; throws OpenCircuitError on
/// theta = 1 (use reactances_or_surrogate for the clamped variant).
inline RisTermination to_reactance_mode(const RisTermination& term) {
  if (term.mode() == TerminationMode::reactance) return term;
  return RisTermination::from_reactances(term.reactances(),
                                         term.reference_resistance());
}

}  // namespace rismp
