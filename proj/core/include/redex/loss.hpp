#pragma once

#include <memory>
#include <string>

#include "redex/linalg.hpp"

namespace redex {

/// Loss selection as it appears in configs: a name plus the parameters the
/// named loss needs. Names: "square" (default), "huber".
struct LossSpec {
  std::string name = "square";
  double huber_delta = 1.0;
};

/// A convex, coordinate-separable loss ℓ(ŷ, y) = Σ_c φ(ŷ_c, y_c) with a
/// per-coordinate derivative. Separability lets reports break the loss down
/// by output coordinate.
class Loss {
 public:
  virtual ~Loss() = default;
  virtual std::string name() const = 0;
  virtual double coord_value(double prediction, double target) const = 0;
  virtual double coord_derivative(double prediction, double target) const = 0;
  /// Upper bound on φ'' (used to size gradient steps).
  virtual double curvature_bound() const = 0;
  /// True for φ = (ŷ - y)², which the solvers handle in closed form.
  virtual bool is_square() const { return false; }

  double value(const Vector& prediction, const Vector& target) const;
  Vector gradient(const Vector& prediction, const Vector& target) const;
};

/// Throws ConfigError for unknown names or bad parameters.
std::shared_ptr<const Loss> make_loss(const LossSpec& spec);

}  // namespace redex
