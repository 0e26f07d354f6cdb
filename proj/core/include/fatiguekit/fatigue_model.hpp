#pragma once

#include <vector>

#include "fatiguekit/errors.hpp"
#include "fatiguekit/units.hpp"

namespace fatiguekit {

/// A subject's fatigue dynamics: the rate at which strength decays per unit
/// relative load, and the unfatigued capacity it decays from.
struct FatigueParameters {
  double k;             // fatigue rate, min^-1
  double capacity_max;  // unfatigued maximum capacity (N or Nm per `unit`)
  CapacityUnit unit;

  FatigueParameters(double k_per_min, double capacity, CapacityUnit u)
      : k(k_per_min), capacity_max(capacity), unit(u) {
    if (!(k > 0.0)) throw ValidationError("fatigue rate k must be positive");
    if (!(capacity_max > 0.0))
      throw ValidationError("capacity_max must be positive");
  }
};

/// External load as a fraction of unfatigued capacity, in (0, 1].
class RelativeLoad {
 public:
  explicit RelativeLoad(double fraction) : f_(fraction) {
    if (!(f_ > 0.0) || !(f_ <= 1.0))
      throw ValidationError("relative load must lie in (0, 1]");
  }

  double value() const { return f_; }

 private:
  double f_;
};

/// External load over time, either constant or sampled. Sampled profiles
/// interpolate linearly between samples and hold the end values outside the
/// sampled range.
class LoadProfile {
 public:
  static LoadProfile constant(double load, CapacityUnit unit);
  static LoadProfile sampled(std::vector<double> times_min,
                             std::vector<double> loads, CapacityUnit unit);

  double at(double t_min) const;
  CapacityUnit unit() const { return unit_; }
  bool is_constant() const { return times_min_.empty(); }

 private:
  LoadProfile(std::vector<double> times_min, std::vector<double> loads,
              CapacityUnit unit);

  std::vector<double> times_min_;  // empty for constant profiles
  std::vector<double> loads_;
  CapacityUnit unit_;
};

/// Remaining-capacity trajectory from a numeric integration.
struct CapacitySeries {
  std::vector<double> time_min;
  std::vector<double> remaining;
};

constexpr double default_integration_step_min = 1e-3;

/// Remaining capacity fraction after holding a constant relative load for
/// `t_min` minutes: exp(-k * f * t). Dimensionless, in (0, 1].
double remaining_capacity_static(const FatigueParameters& params,
                                 RelativeLoad f_mvc, double t_min);

/// Integrates d(remaining)/dt = -k * (remaining / capacity_max) * load(t)
/// from remaining(0) = capacity_max with a fixed-step classical 4th-order
/// scheme. The final sample always lands exactly on t_end.
CapacitySeries integrate_capacity(const FatigueParameters& params,
                                  const LoadProfile& load, double t_end_min,
                                  double step_min = default_integration_step_min);

/// Longest time a constant relative load f can be sustained before remaining
/// capacity falls to the load itself: t* = -ln(f) / (k * f). Returns 0 when
/// the load already equals capacity (f = 1).
double endurance_time(const FatigueParameters& params, RelativeLoad f_mvc);

}  // namespace fatiguekit
