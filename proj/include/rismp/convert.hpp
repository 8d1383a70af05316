#pragma once

#include <Eigen/Dense>
#include <string>

#include "rismp/blocks.hpp"
#include "rismp/errors.hpp"
#include "rismp/warnings.hpp"

namespace rismp {

struct ConversionOptions {
  /// A warning is emitted when the 1-norm condition estimate of the inverted
  /// factor exceeds this; the conversion result is then suspect.
  double condition_warn_threshold = 1e12;
};

namespace detail {

inline Eigen::MatrixXcd invert_or_throw(const Eigen::MatrixXcd& m,
                                        const char* context,
                                        double condition_warn_threshold) {
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
  if (!lu.isInvertible()) {
    const std::ptrdiff_t pivot = lu.rank();  // first failing elimination step
    throw SingularMatrixError(
        std::string(context) + " is singular: pivot " + std::to_string(pivot) +
            " of " + std::to_string(m.rows()) + " vanished",
        pivot);
  }
  Eigen::MatrixXcd inverse = lu.inverse();
  const double cond = m.cwiseAbs().colwise().sum().maxCoeff() *
                      inverse.cwiseAbs().colwise().sum().maxCoeff();
  if (cond > condition_warn_threshold) {
    emit_warning(std::string(context) + " has condition estimate " +
                 std::to_string(cond) + "; conversion may lose precision");
  }
  return inverse;
}

}  // namespace detail

/// S = (Z - I R)(Z + I R)^{-1}, the wave description of the same multiport.
inline Eigen::MatrixXcd z_to_s(const Eigen::MatrixXcd& z, double r,
                               const ConversionOptions& options = {}) {
  if (!(r > 0.0)) throw GeometryError("port resistance must be positive");
  if (z.rows() != z.cols()) throw StructureError("Z matrix must be square");
  const Eigen::MatrixXcd identity =
      Eigen::MatrixXcd::Identity(z.rows(), z.cols());
  const Eigen::MatrixXcd inverse = detail::invert_or_throw(
      z + identity * r, "(Z + I*R)", options.condition_warn_threshold);
  Eigen::MatrixXcd s = (z - identity * r) * inverse;
  detail::ensure_finite(s, "z_to_s");
  return s;
}

/// Z = R (I + S)(I - S)^{-1}, the voltage/current description.
inline Eigen::MatrixXcd s_to_z(const Eigen::MatrixXcd& s, double r,
                               const ConversionOptions& options = {}) {
  if (!(r > 0.0)) throw GeometryError("port resistance must be positive");
  if (s.rows() != s.cols()) throw StructureError("S matrix must be square");
  const Eigen::MatrixXcd identity =
      Eigen::MatrixXcd::Identity(s.rows(), s.cols());
  const Eigen::MatrixXcd inverse = detail::invert_or_throw(
      identity - s, "(I - S)", options.condition_warn_threshold);
  Eigen::MatrixXcd z = r * (identity + s) * inverse;
  detail::ensure_finite(z, "s_to_z");
  return z;
}

inline MultiportScattering z_to_s(const MultiportImpedance& z, double r,
                                  const ConversionOptions& options = {}) {
  return MultiportScattering(z.partition(), z_to_s(z.dense(), r, options));
}

inline MultiportImpedance s_to_z(const MultiportScattering& s, double r,
                                 const ConversionOptions& options = {}) {
  return MultiportImpedance(s.partition(), s_to_z(s.dense(), r, options));
}

}  // namespace rismp
