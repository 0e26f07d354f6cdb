#pragma once

#include <string_view>

#include "fatiguekit/errors.hpp"

namespace fatiguekit {

/// Tags whether a capacity or load lives in force space (N) or joint-moment
/// space (Nm). The fatigue dynamics are identical in both; the tag exists so
/// the two are never mixed by accident.
enum class CapacityUnit { force, moment };

constexpr const char* to_string(CapacityUnit u) {
  return u == CapacityUnit::force ? "force" : "moment";
}

inline CapacityUnit capacity_unit_from_string(std::string_view s) {
  if (s == "force") return CapacityUnit::force;
  if (s == "moment") return CapacityUnit::moment;
  throw ValidationError("unknown capacity unit '" + std::string(s) +
                        "' (expected 'force' or 'moment')");
}

// Fatigue rates are per minute; session times arrive in seconds.
constexpr double seconds_per_minute = 60.0;

constexpr double minutes_from_seconds(double s) { return s / seconds_per_minute; }
constexpr double seconds_from_minutes(double m) { return m * seconds_per_minute; }

// Pinned so moment outputs are bit-reproducible.
constexpr double gravity_m_s2 = 9.81;

}  // namespace fatiguekit
