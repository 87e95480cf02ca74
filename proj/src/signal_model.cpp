#include "psloc/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "psloc/errors.hpp"
#include "psloc/quadrature.hpp"

namespace psloc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-9;

}  // namespace

PowerLaw::PowerLaw(double a, double kappa) : a_(a), kappa_(kappa) {
  if (!(a >= 0.0) || !std::isfinite(a) || !std::isfinite(kappa)) {
    throw Error(ErrorCode::InvalidArgument, "power-law amplitude must be finite and >= 0");
  }
  if (a == 0.0) {
    form_ = Form::Zero;
  } else if (kappa == 0.0) {
    form_ = Form::Constant;
  } else if (kappa == 1.0) {
    form_ = Form::Linear;
  } else if (kappa == 2.0) {
    form_ = Form::Square;
  } else if (kappa == 0.5) {
    form_ = Form::Sqrt;
  } else {
    form_ = Form::General;
  }
}

double PowerLaw::integral(double len) const {
  if (len <= 0.0 || a_ == 0.0) return 0.0;
  if (kappa_ <= -1.0) return kInf;
  return a_ * std::pow(len, kappa_ + 1.0) / (kappa_ + 1.0);
}

double PowerLaw::information(double len, double lambda0) const {
  if (len <= 0.0 || a_ == 0.0) return 0.0;
  if (kappa_ <= 0.5) return kInf;
  const double ak = a_ * kappa_;
  if (kappa_ >= 1.0) {
    return adaptive_simpson(
               [&](double s) {
                 const double d = derivative(s);
                 return d * d / (value(s) + lambda0);
               },
               0.0, len, kQuadTol)
        .value;
  }
  // s = w^q with q = 1/(2 kappa - 1) removes the integrable singularity of
  // lambda'(s)^2 at s = 0.
  const double q = 1.0 / (2.0 * kappa_ - 1.0);
  return adaptive_simpson(
             [&](double w) { return ak * ak * q / (a_ * std::pow(w, q * kappa_) + lambda0); },
             0.0, std::pow(len, 1.0 / q), kQuadTol)
      .value;
}

double PowerLaw::supremum(double lo, double hi) const {
  if (hi <= 0.0 || a_ == 0.0) return 0.0;
  if (kappa_ >= 0.0) return value(hi);
  if (lo <= 0.0) return kInf;
  return value(lo);
}

Tabulated::Tabulated(std::function<double(double)> shape, std::function<double(double)> derivative)
    : shape_(std::move(shape)), derivative_(std::move(derivative)) {
  if (!shape_ || !derivative_) {
    throw Error(ErrorCode::InvalidArgument, "tabulated shape needs both shape and derivative");
  }
}

double Tabulated::integral(double len) const {
  if (len <= 0.0) return 0.0;
  return adaptive_simpson([this](double s) { return value(s); }, 0.0, len, kQuadTol).value;
}

double Tabulated::information(double len, double lambda0) const {
  if (len <= 0.0) return 0.0;
  return adaptive_simpson(
             [&](double s) {
               const double d = derivative(s);
               return d * d / (value(s) + lambda0);
             },
             0.0, len, kQuadTol)
      .value;
}

double Tabulated::supremum(double lo, double hi) const {
  if (hi <= 0.0) return 0.0;
  lo = std::max(lo, 0.0);
  // Grid, then golden-section around the best node; a 0.1% margin covers the
  // refinement error so the result stays a bound.
  constexpr int kGrid = 32;
  const double h = (hi - lo) / kGrid;
  double best = 0.0;
  int best_i = 0;
  for (int i = 0; i <= kGrid; ++i) {
    const double s = (i == 0) ? std::nextafter(lo, hi) : lo + h * i;
    const double v = value(s);
    if (!std::isfinite(v)) return kInf;
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  double a = lo + h * std::max(best_i - 1, 0);
  double b = lo + h * std::min(best_i + 1, kGrid);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60 && b - a > 1e-12 * (hi - lo); ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (value(c) > value(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  best = std::max(best, value(0.5 * (a + b)));
  return best * (1.0 + 1e-3);
}

double SignalShape::derivative(double s) const {
  return std::visit([s](const auto& m) { return m.derivative(s); }, impl_);
}

IntensityModel::IntensityModel(std::vector<SignalShape> per_detector)
    : shapes_(std::move(per_detector)) {
  if (shapes_.empty()) throw Error(ErrorCode::InvalidArgument, "intensity model has no shapes");
}

bool IntensityModel::smooth() const {
  return std::all_of(shapes_.begin(), shapes_.end(),
                     [](const SignalShape& s) { return s.smooth(); });
}

double FisherInfo::min_eigenvalue() const {
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(matrix, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

double intensity_at(const IntensityModel& model, std::size_t j, double tau, double t,
                    double lambda0) {
  return model.shape(j).value(t - tau) + lambda0;
}

double intensity_derivative_at(const IntensityModel& model, std::size_t j, double tau, double t) {
  if (t <= tau) return 0.0;
  const SignalShape& shape = model.shape(j);
  if (!shape.smooth()) {
    throw Error(ErrorCode::NonSmoothModel, "derivative requested for an onset with kappa <= 1/2");
  }
  return shape.derivative(t - tau);
}

double arrival_information(const SignalShape& shape, double lambda0, double T, double tau) {
  return shape.information(T - tau, lambda0);
}

double fisher_weight(const SensorNetwork& net, const IntensityModel& model, std::size_t j,
                     const Point2& theta, double t_end) {
  const double d = (net.sensors[j] - theta).norm();
  if (d == 0.0) {
    throw Error(ErrorCode::DegenerateGeometry, "source coincides with a detector");
  }
  const double tau = d / net.nu;
  const double end = std::min(t_end, net.T);
  if (end <= tau) return 0.0;
  return model.shape(j).information(end - tau, net.lambda0) / (net.nu * net.nu * d * d);
}

FisherInfo fisher_matrix(const SensorNetwork& net, const IntensityModel& model,
                         const Point2& theta, double t_end) {
  FisherInfo info;
  if (t_end < net.T) info.truncated_at = t_end;
  for (std::size_t j = 0; j < net.size(); ++j) {
    const double w = fisher_weight(net, model, j, theta, t_end);
    if (w == 0.0) continue;
    const Eigen::Vector2d r = net.sensors[j] - theta;
    info.matrix(0, 0) += w * r.x() * r.x();
    info.matrix(0, 1) += w * r.x() * r.y();
    info.matrix(1, 1) += w * r.y() * r.y();
  }
  info.matrix(1, 0) = info.matrix(0, 1);
  return info;
}

FisherInfo fisher_matrix(const SensorNetwork& net, const IntensityModel& model,
                         const Point2& theta) {
  return fisher_matrix(net, model, theta, net.T);
}

ArrivalFisher arrival_fisher(const SensorNetwork& net, const IntensityModel& model,
                             const Point2& theta) {
  ArrivalFisher out;
  out.diag.resize(static_cast<Eigen::Index>(net.size()));
  for (std::size_t j = 0; j < net.size(); ++j) {
    const double v =
        arrival_information(model.shape(j), net.lambda0, net.T, travel_time(net, j, theta));
    if (!(v > 0.0)) {
      throw Error(ErrorCode::ZeroInformation,
                  "detector " + std::to_string(j) + " carries no arrival information");
    }
    out.diag[static_cast<Eigen::Index>(j)] = v;
  }
  return out;
}

}  // namespace psloc
