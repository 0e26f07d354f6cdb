#pragma once

#include <string>
#include <vector>

#include "fatiguekit/biomech.hpp"
#include "fatiguekit/estimation.hpp"
#include "fatiguekit/units.hpp"

namespace fatiguekit {

/// One subject: anthropometry plus the measured protocol data.
struct SubjectRecord {
  std::string id;
  double age_yr = 0.0;
  double stature_m = 0.0;
  double body_mass_kg = 0.0;
  double upper_limb_cm = 0.0;
  double lower_limb_cm = 0.0;
  double bmi = 0.0;  // recomputed from mass and stature on load

  std::vector<double> mvc_trials;            // t = 0 strength measurements
  std::vector<SessionMeasurement> sessions;  // t > 0 fatiguing sessions
  CapacityUnit unit = CapacityUnit::force;

  double computed_bmi() const { return body_mass_kg / (stature_m * stature_m); }

  /// Initial maximum strength: the greatest value over the MVC trials.
  double mvc() const;

  Anthropometry anthropometry(const SegmentCoefficients& coefficients =
                                  SegmentCoefficients::defaults()) const;

  /// Checks id, anthropometry ranges, BMI consistency (0.5% tolerance when a
  /// BMI was stored), session time uniqueness and value positivity.
  void validate() const;
};

}  // namespace fatiguekit
