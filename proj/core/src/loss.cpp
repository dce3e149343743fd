#include "redex/loss.hpp"

#include <cmath>

#include "redex/errors.hpp"

namespace redex {

double Loss::value(const Vector& prediction, const Vector& target) const {
  if (prediction.size() != target.size()) throw DimError("loss: prediction/target size mismatch");
  double total = 0.0;
  for (Eigen::Index c = 0; c < prediction.size(); ++c) total += coord_value(prediction(c), target(c));
  return total;
}

Vector Loss::gradient(const Vector& prediction, const Vector& target) const {
  if (prediction.size() != target.size()) throw DimError("loss: prediction/target size mismatch");
  Vector g(prediction.size());
  for (Eigen::Index c = 0; c < prediction.size(); ++c) g(c) = coord_derivative(prediction(c), target(c));
  return g;
}

namespace {

class SquareLoss final : public Loss {
 public:
  std::string name() const override { return "square"; }
  double coord_value(double p, double y) const override { return (p - y) * (p - y); }
  double coord_derivative(double p, double y) const override { return 2.0 * (p - y); }
  double curvature_bound() const override { return 2.0; }
  bool is_square() const override { return true; }
};

// Huber with threshold δ, scaled to agree with the square loss near zero.
class HuberLoss final : public Loss {
 public:
  explicit HuberLoss(double delta) : delta_(delta) {}
  std::string name() const override { return "huber"; }
  double coord_value(double p, double y) const override {
    const double r = std::abs(p - y);
    return r <= delta_ ? r * r : delta_ * (2.0 * r - delta_);
  }
  double coord_derivative(double p, double y) const override {
    const double r = p - y;
    if (std::abs(r) <= delta_) return 2.0 * r;
    return r > 0 ? 2.0 * delta_ : -2.0 * delta_;
  }
  double curvature_bound() const override { return 2.0; }

 private:
  double delta_;
};

}  // namespace

std::shared_ptr<const Loss> make_loss(const LossSpec& spec) {
  if (spec.name == "square") return std::make_shared<SquareLoss>();
  if (spec.name == "huber") {
    if (!(spec.huber_delta > 0)) throw ConfigError("huber loss needs delta > 0");
    return std::make_shared<HuberLoss>(spec.huber_delta);
  }
  throw ConfigError("unknown loss '" + spec.name + "'");
}

}  // namespace redex
