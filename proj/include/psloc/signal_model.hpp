#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "psloc/geometry.hpp"

namespace psloc {

/// Onset shape a * s^kappa for s > 0, zero for s <= 0.
class PowerLaw {
 public:
  PowerLaw(double a, double kappa);

  double a() const { return a_; }
  double kappa() const { return kappa_; }

  double value(double s) const {
    if (s <= 0.0) return 0.0;
    switch (form_) {
      case Form::Zero: return 0.0;
      case Form::Constant: return a_;
      case Form::Linear: return a_ * s;
      case Form::Square: return a_ * s * s;
      case Form::Sqrt: return a_ * std::sqrt(s);
      case Form::General: break;
    }
    return a_ * std::pow(s, kappa_);
  }

  double derivative(double s) const {
    if (s <= 0.0) return 0.0;
    switch (form_) {
      case Form::Zero:
      case Form::Constant: return 0.0;
      case Form::Linear: return a_;
      case Form::Square: return 2.0 * a_ * s;
      case Form::Sqrt: return 0.5 * a_ / std::sqrt(s);
      case Form::General: break;
    }
    return a_ * kappa_ * std::pow(s, kappa_ - 1.0);
  }

  /// int_0^len value(s) ds
  double integral(double len) const;
  /// int_0^len derivative(s)^2 / (value(s) + lambda0) ds
  double information(double len, double lambda0) const;
  /// sup of value over (lo, hi]; +inf when the shape explodes at 0.
  double supremum(double lo, double hi) const;
  bool smooth() const { return a_ == 0.0 || kappa_ > 0.5; }

 private:
  enum class Form { Zero, Constant, Linear, Square, Sqrt, General };

  double a_;
  double kappa_;
  Form form_;
};

/// User-supplied onset shape. Both the shape and its derivative are required;
/// the library never differentiates numerically.
class Tabulated {
 public:
  Tabulated(std::function<double(double)> shape, std::function<double(double)> derivative);

  double value(double s) const { return s <= 0.0 ? 0.0 : shape_(s); }
  double derivative(double s) const { return s <= 0.0 ? 0.0 : derivative_(s); }
  double integral(double len) const;
  double information(double len, double lambda0) const;
  double supremum(double lo, double hi) const;
  bool smooth() const { return true; }

 private:
  std::function<double(double)> shape_;
  std::function<double(double)> derivative_;
};

/// Signal onset lambda_j(s) of one detector.
class SignalShape {
 public:
  SignalShape(PowerLaw p) : impl_(std::move(p)) {}
  SignalShape(Tabulated t) : impl_(std::move(t)) {}

  double value(double s) const {
    return std::visit([s](const auto& m) { return m.value(s); }, impl_);
  }
  double derivative(double s) const;
  double integral(double len) const {
    return std::visit([len](const auto& m) { return m.integral(len); }, impl_);
  }
  double information(double len, double lambda0) const {
    return std::visit([&](const auto& m) { return m.information(len, lambda0); }, impl_);
  }
  double supremum(double lo, double hi) const {
    return std::visit([&](const auto& m) { return m.supremum(lo, hi); }, impl_);
  }
  bool smooth() const {
    return std::visit([](const auto& m) { return m.smooth(); }, impl_);
  }

  const PowerLaw* power_law() const { return std::get_if<PowerLaw>(&impl_); }

  /// Calls f with the concrete shape so hot loops inline the evaluation.
  template <class F>
  decltype(auto) visit(F&& f) const {
    return std::visit(std::forward<F>(f), impl_);
  }

 private:
  std::variant<PowerLaw, Tabulated> impl_;
};

/// Per-detector onset shapes; a single entry is shared by every detector.
class IntensityModel {
 public:
  explicit IntensityModel(SignalShape shared) : shapes_{std::move(shared)} {}
  explicit IntensityModel(std::vector<SignalShape> per_detector);

  const SignalShape& shape(std::size_t j) const {
    return shapes_.size() == 1 ? shapes_.front() : shapes_.at(j);
  }
  std::size_t size() const { return shapes_.size(); }
  bool shared() const { return shapes_.size() == 1; }
  bool smooth() const;

 private:
  std::vector<SignalShape> shapes_;
};

struct FisherInfo {
  Eigen::Matrix2d matrix = Eigen::Matrix2d::Zero();
  std::optional<double> truncated_at;  ///< empty for the full horizon

  double min_eigenvalue() const;
  double determinant() const { return matrix.determinant(); }
};

struct ArrivalFisher {
  Eigen::VectorXd diag;

  Eigen::VectorXd sigma2() const { return diag.cwiseInverse(); }
};

/// lambda_j(t - tau) + lambda0, per unit scale.
double intensity_at(const IntensityModel& model, std::size_t j, double tau, double t,
                    double lambda0);

/// d lambda_j(s) / ds at s = t - tau; zero before arrival. Throws
/// NonSmoothModel for shapes with kappa <= 1/2 past the arrival.
double intensity_derivative_at(const IntensityModel& model, std::size_t j, double tau, double t);

/// J_{j,t}(theta): information integral over [tau_j(theta), t_end] divided by
/// nu^2 |theta_j - theta|^2. Zero when t_end <= tau_j(theta).
double fisher_weight(const SensorNetwork& net, const IntensityModel& model, std::size_t j,
                     const Point2& theta, double t_end);

/// I_t(theta) = sum_j grad tau_j grad tau_j^T * int_{tau_j}^{t} lambda'^2/(lambda+lambda0).
/// t_end >= T gives the full matrix.
FisherInfo fisher_matrix(const SensorNetwork& net, const IntensityModel& model,
                         const Point2& theta, double t_end);
FisherInfo fisher_matrix(const SensorNetwork& net, const IntensityModel& model,
                         const Point2& theta);

/// Diagonal Fisher information of the arrival-time vector. Throws
/// ZeroInformation when some detector carries none.
ArrivalFisher arrival_fisher(const SensorNetwork& net, const IntensityModel& model,
                             const Point2& theta);

/// int_{tau}^{T} lambda'^2/(lambda+lambda0) for one detector.
double arrival_information(const SignalShape& shape, double lambda0, double T, double tau);

}  // namespace psloc
