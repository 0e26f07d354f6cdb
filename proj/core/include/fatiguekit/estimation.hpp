#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fatiguekit/fatigue_model.hpp"
#include "fatiguekit/units.hpp"

namespace fatiguekit {

struct SubjectRecord;

/// One fatiguing session: how long the load was held and the maximal strength
/// measured immediately afterwards. Time is stored in minutes; protocol files
/// carry seconds and are converted on ingestion.
struct SessionMeasurement {
  double time_min = 0.0;
  double value = 0.0;  // measured remaining strength, N or Nm per `unit`
  CapacityUnit unit = CapacityUnit::force;
};

/// One point of the linearized fit: y = ln(value / mvc) / f_mvc, which the
/// static model maps onto the line y = -k t.
struct LinearizedPoint {
  double time_min = 0.0;
  double y = 0.0;
  bool exceeds_mvc = false;  // measurement noise above the MVC reference
};

enum class FitQuality { good, fair, poor };

constexpr const char* to_string(FitQuality q) {
  switch (q) {
    case FitQuality::good: return "good";
    case FitQuality::fair: return "fair";
    default: return "poor";
  }
}

/// R-squared bands used to label fit quality.
struct QualityBands {
  double good = 0.80;
  double fair = 0.63;
};

FitQuality classify_fit(const std::optional<double>& r_squared,
                        const QualityBands& bands = {});

struct FitResult {
  double k_hat = 0.0;                 // min^-1
  std::optional<double> r_squared;    // empty when the data shows no decline at all
  std::size_t n_points = 0;
  std::vector<double> residuals;      // y_i - (-k_hat * t_i), per point
  double f_mvc_used = 0.0;
  double mvc_used = 0.0;
  CapacityUnit unit = CapacityUnit::force;
  std::size_t n_above_mvc = 0;        // measurements that exceeded the MVC reference
  FitQuality quality = FitQuality::poor;

  /// The same rate expressed per second; minutes are the internal unit.
  double k_hat_per_second() const { return k_hat / seconds_per_minute; }
};

/// Maps measurements onto (t, y) pairs via y = ln(value / mvc) / f_mvc.
/// Values above mvc are kept (clamping would bias the rate downward) and
/// flagged. Non-positive values are rejected, naming the session.
std::vector<LinearizedPoint> linearize(std::span<const SessionMeasurement> measurements,
                                       double mvc, RelativeLoad f_mvc);

/// Least squares through the origin on y = -k t:
///   k_hat = -sum(t y) / sum(t^2)
///   r_squared = 1 - sum((y + k_hat t)^2) / sum(y^2)   (uncentered total SS)
/// Requires at least two points with at least one t > 0. When sum(y^2) = 0
/// (no strength decline anywhere) k_hat is 0 and r_squared is left empty.
FitResult fit_fatigue_rate(std::span<const LinearizedPoint> points);

struct FitOptions {
  double external_load = 0.0;  // same unit as the record's measurements
  QualityBands bands;
};

/// Full per-subject pipeline: MVC from the t = 0 trials (maximum over
/// trials), f_mvc = external_load / MVC, linearize, fit, classify. The t = 0
/// point is included in the regression for residual reporting; it carries no
/// weight in the through-origin estimate.
FitResult fit_subject(const SubjectRecord& record, const FitOptions& options);

}  // namespace fatiguekit
