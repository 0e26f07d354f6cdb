#include "fatiguekit/fatigue_model.hpp"

#include <algorithm>
#include <cmath>

namespace fatiguekit {

LoadProfile LoadProfile::constant(double load, CapacityUnit unit) {
  if (!std::isfinite(load) || load < 0.0)
    throw ValidationError("constant load must be finite and nonnegative");
  return LoadProfile({}, {load}, unit);
}

LoadProfile LoadProfile::sampled(std::vector<double> times_min,
                                 std::vector<double> loads,
                                 CapacityUnit unit) {
  if (times_min.empty() || times_min.size() != loads.size())
    throw ValidationError("sampled load profile needs matching, non-empty time and load vectors");
  for (std::size_t i = 0; i < times_min.size(); ++i) {
    if (!std::isfinite(times_min[i]))
      throw ValidationError("sampled load profile has non-finite time");
    if (!std::isfinite(loads[i]) || loads[i] < 0.0)
      throw ValidationError("sampled load profile loads must be finite and nonnegative");
    if (i > 0 && !(times_min[i] > times_min[i - 1]))
      throw ValidationError("sampled load profile times must be strictly increasing");
  }
  return LoadProfile(std::move(times_min), std::move(loads), unit);
}

LoadProfile::LoadProfile(std::vector<double> times_min,
                         std::vector<double> loads, CapacityUnit unit)
    : times_min_(std::move(times_min)), loads_(std::move(loads)), unit_(unit) {}

double LoadProfile::at(double t_min) const {
  if (is_constant()) return loads_.front();
  if (t_min <= times_min_.front()) return loads_.front();
  if (t_min >= times_min_.back()) return loads_.back();
  const auto it =
      std::upper_bound(times_min_.begin(), times_min_.end(), t_min);
  const std::size_t hi = static_cast<std::size_t>(it - times_min_.begin());
  const std::size_t lo = hi - 1;
  const double w =
      (t_min - times_min_[lo]) / (times_min_[hi] - times_min_[lo]);
  return loads_[lo] + w * (loads_[hi] - loads_[lo]);
}

double remaining_capacity_static(const FatigueParameters& params,
                                 RelativeLoad f_mvc, double t_min) {
  if (!(t_min >= 0.0)) throw ValidationError("time must be nonnegative");
  return std::exp(-params.k * f_mvc.value() * t_min);
}

CapacitySeries integrate_capacity(const FatigueParameters& params,
                                  const LoadProfile& load, double t_end_min,
                                  double step_min) {
  if (load.unit() != params.unit)
    throw ValidationError("load profile unit does not match capacity unit");
  if (!(t_end_min > 0.0)) throw ValidationError("t_end must be positive");
  if (!(step_min > 0.0)) throw ValidationError("step must be positive");
  if (!(step_min <= t_end_min))
    throw ValidationError("step must not exceed t_end");

  const double k_over_cap = params.k / params.capacity_max;
  const auto derivative = [&](double t, double f_rem) {
    return -k_over_cap * f_rem * load.at(t);
  };

  CapacitySeries series;
  const auto n_steps = static_cast<std::size_t>(t_end_min / step_min);
  series.time_min.reserve(n_steps + 2);
  series.remaining.reserve(n_steps + 2);

  double t = 0.0;
  double f = params.capacity_max;
  series.time_min.push_back(t);
  series.remaining.push_back(f);

  // Grid points are i * step (not an accumulated sum, which drifts); the
  // final point is forced onto t_end.
  for (std::size_t i = 1; t < t_end_min; ++i) {
    double t_next = std::min(static_cast<double>(i) * step_min, t_end_min);
    if (!(t_next > t)) t_next = t_end_min;
    const double h = t_next - t;
    const double k1 = derivative(t, f);
    const double k2 = derivative(t + 0.5 * h, f + 0.5 * h * k1);
    const double k3 = derivative(t + 0.5 * h, f + 0.5 * h * k2);
    const double k4 = derivative(t + h, f + h * k3);
    f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t_next;
    series.time_min.push_back(t);
    series.remaining.push_back(f);
  }
  return series;
}

double endurance_time(const FatigueParameters& params, RelativeLoad f_mvc) {
  const double f = f_mvc.value();
  if (f >= 1.0) return 0.0;  // load already equals capacity
  return -std::log(f) / (params.k * f);
}

}  // namespace fatiguekit
