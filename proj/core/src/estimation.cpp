#include "fatiguekit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fatiguekit/subject.hpp"

namespace fatiguekit {

FitQuality classify_fit(const std::optional<double>& r_squared,
                        const QualityBands& bands) {
  if (!r_squared) return FitQuality::poor;
  if (*r_squared > bands.good) return FitQuality::good;
  if (*r_squared > bands.fair) return FitQuality::fair;
  return FitQuality::poor;
}

std::vector<LinearizedPoint> linearize(
    std::span<const SessionMeasurement> measurements, double mvc,
    RelativeLoad f_mvc) {
  if (!(mvc > 0.0)) throw ValidationError("MVC must be positive");

  std::vector<LinearizedPoint> points;
  points.reserve(measurements.size());
  for (const auto& m : measurements) {
    if (!(m.value > 0.0) || !std::isfinite(m.value))
      throw ValidationError("non-positive strength measurement in session at t = " +
                            std::to_string(seconds_from_minutes(m.time_min)) + " s");
    if (!(m.time_min >= 0.0))
      throw ValidationError("negative session time");
    LinearizedPoint p;
    p.time_min = m.time_min;
    p.y = std::log(m.value / mvc) / f_mvc.value();
    p.exceeds_mvc = m.value > mvc;
    points.push_back(p);
  }
  return points;
}

FitResult fit_fatigue_rate(std::span<const LinearizedPoint> points) {
  if (points.size() < 2)
    throw ValidationError("fit needs at least two points");

  double sum_ty = 0.0;
  double sum_tt = 0.0;
  double sum_yy = 0.0;
  std::size_t above = 0;
  for (const auto& p : points) {
    sum_ty += p.time_min * p.y;
    sum_tt += p.time_min * p.time_min;
    sum_yy += p.y * p.y;
    if (p.exceeds_mvc) ++above;
  }
  if (!(sum_tt > 0.0))
    throw DegeneracyError("all session times are zero; fatigue rate is unidentifiable");

  FitResult result;
  result.n_points = points.size();
  result.n_above_mvc = above;
  result.k_hat = -sum_ty / sum_tt;

  result.residuals.reserve(points.size());
  double ss_res = 0.0;
  for (const auto& p : points) {
    const double r = p.y + result.k_hat * p.time_min;
    result.residuals.push_back(r);
    ss_res += r * r;
  }

  if (sum_yy > 0.0) {
    result.r_squared = 1.0 - ss_res / sum_yy;
  } else {
    // No decline anywhere: the flat line k = 0 fits but explains nothing.
    result.k_hat = 0.0;
    result.r_squared = std::nullopt;
  }
  result.quality = classify_fit(result.r_squared);
  return result;
}

FitResult fit_subject(const SubjectRecord& record, const FitOptions& options) {
  if (record.mvc_trials.empty())
    throw ValidationError("subject '" + record.id + "' has no MVC trial");
  if (record.sessions.size() < 2)
    throw ValidationError("subject '" + record.id +
                          "' needs at least two fatiguing sessions");
  if (!(options.external_load > 0.0))
    throw ConfigError("external_load must be positive");

  const double mvc = record.mvc();
  const double f = options.external_load / mvc;
  if (!(f > 0.0) || !(f <= 1.0))
    throw ValidationError("subject '" + record.id + "': relative load " +
                          std::to_string(f) + " outside (0, 1]");
  const RelativeLoad rel(f);

  // The MVC itself enters as the t = 0 point (y = 0 by construction).
  std::vector<SessionMeasurement> all;
  all.reserve(record.sessions.size() + 1);
  all.push_back({0.0, mvc, record.unit});
  all.insert(all.end(), record.sessions.begin(), record.sessions.end());

  const auto points = linearize(all, mvc, rel);
  FitResult result = fit_fatigue_rate(points);
  result.f_mvc_used = f;
  result.mvc_used = mvc;
  result.unit = record.unit;
  result.quality = classify_fit(result.r_squared, options.bands);
  return result;
}

double SubjectRecord::mvc() const {
  if (mvc_trials.empty())
    throw ValidationError("subject '" + id + "' has no MVC trial");
  return *std::max_element(mvc_trials.begin(), mvc_trials.end());
}

Anthropometry SubjectRecord::anthropometry(
    const SegmentCoefficients& coefficients) const {
  Anthropometry a;
  a.body_mass_kg = body_mass_kg;
  a.stature_m = stature_m;
  a.upper_arm_length_m = upper_limb_cm / 100.0;
  a.forearm_length_m = lower_limb_cm / 100.0;
  a.coefficients = coefficients;
  a.validate();
  return a;
}

void SubjectRecord::validate() const {
  if (id.empty()) throw ValidationError("subject id must not be empty");
  if (!(age_yr > 0.0)) throw ValidationError("subject '" + id + "': age must be positive");
  if (!(stature_m > 0.0))
    throw ValidationError("subject '" + id + "': stature must be positive");
  if (!(body_mass_kg > 0.0))
    throw ValidationError("subject '" + id + "': body mass must be positive");
  if (!(upper_limb_cm > 0.0) || !(lower_limb_cm > 0.0))
    throw ValidationError("subject '" + id + "': limb lengths must be positive");
  if (bmi > 0.0) {
    const double expected = computed_bmi();
    if (std::abs(bmi - expected) > 0.005 * expected)
      throw ValidationError("subject '" + id + "': stored BMI " +
                            std::to_string(bmi) + " disagrees with mass/stature^2 = " +
                            std::to_string(expected));
  }
  for (const auto& m : mvc_trials)
    if (!(m > 0.0))
      throw ValidationError("subject '" + id + "': MVC trial must be positive");
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    if (!(sessions[i].time_min > 0.0))
      throw ValidationError("subject '" + id + "': fatiguing session time must be positive");
    if (!(sessions[i].value > 0.0))
      throw ValidationError("subject '" + id + "': session value must be positive");
    if (sessions[i].unit != unit)
      throw ValidationError("subject '" + id + "': mixed capacity units in sessions");
    for (std::size_t j = i + 1; j < sessions.size(); ++j)
      if (sessions[i].time_min == sessions[j].time_min)
        throw ValidationError("subject '" + id + "': duplicate session time " +
                              std::to_string(seconds_from_minutes(sessions[i].time_min)) +
                              " s");
  }
}

}  // namespace fatiguekit
