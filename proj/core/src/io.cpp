#include "fatiguekit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

namespace fatiguekit {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, delimiter)) fields.push_back(field);
  if (!line.empty() && line.back() == delimiter) fields.push_back("");
  return fields;
}

double parse_number(const std::string& text, const std::string& file,
                    std::size_t line, const std::string& what) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto result = std::from_chars(t.data(), t.data() + t.size(), value);
  if (result.ec != std::errc{} || result.ptr != t.data() + t.size())
    throw ParseError(file, line, "cannot parse " + what + " from '" + t + "'");
  return value;
}

std::uint64_t parse_u64(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto result = std::from_chars(t.data(), t.data() + t.size(), value);
  if (result.ec != std::errc{} || result.ptr != t.data() + t.size())
    throw ConfigError(context + ": cannot parse integer from '" + t + "'");
  return value;
}

void expect_header(const std::string& got, const std::string& want,
                   const std::string& file) {
  if (trim(got) != want)
    throw ParseError(file, 1, "expected header '" + want + "', got '" + trim(got) + "'");
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // \n only, byte-stable output
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

Vec3 RunConfig::default_drill_direction() {
  constexpr double incline_rad = 14.5 * std::numbers::pi / 180.0;
  return {std::sin(incline_rad), 0.0, -std::cos(incline_rad)};
}

void RunConfig::validate() const {
  if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
  if (!(bands.good > 0.0) || !(bands.good < 1.0))
    throw ConfigError("r2_good must lie in (0, 1)");
  if (!(bands.fair > 0.0) || !(bands.fair < 1.0))
    throw ConfigError("r2_fair must lie in (0, 1)");
  if (!(bands.fair <= bands.good))
    throw ConfigError("r2_fair must not exceed r2_good");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be nonnegative");
  if (!(quantize_step >= 0.0)) throw ConfigError("quantize_step must be nonnegative");
  if (!(coupling >= -1.0) || !(coupling <= 1.0))
    throw ConfigError("coupling must lie in [-1, 1]");
  if (!(load_moment_nm > 0.0)) throw ConfigError("load_moment_nm must be positive");
  if (!(load_force_n > 0.0)) throw ConfigError("load_force_n must be positive");
  if (!(machine_mass_kg >= 0.0)) throw ConfigError("machine_mass_kg must be nonnegative");
  if (!(drill_direction.norm() > 0.0))
    throw ConfigError("drill direction must be nonzero");
  if (!(hand_offset_m > 0.0)) throw ConfigError("hand_offset_m must be positive");
  if (!(marker_rate_hz > 0.0)) throw ConfigError("marker_rate_hz must be positive");
  if (group_size == 0) throw ConfigError("group_size must be positive");
  if (!(hist_r2_bin_width > 0.0) || !(hist_r2_bin_width <= 1.0))
    throw ConfigError("hist_r2_bin_width must lie in (0, 1]");
  if (!(hist_k_bin_width > 0.0)) throw ConfigError("hist_k_bin_width must be positive");
  if (!(hist_k_max > 0.0)) throw ConfigError("hist_k_max must be positive");
  coefficients.validate();
  schedule.validate();
}

std::string RunConfig::serialize() const {
  std::vector<std::pair<std::string, std::string>> entries;
  const auto add = [&](const char* key, const std::string& value) {
    entries.emplace_back(key, value);
  };
  // out_dir is where results land, not what they are; leaving it out keeps
  // the hash identical for reruns into different directories.
  add("unit", to_string(unit));
  add("seed", std::to_string(seed));
  add("cohort_size", std::to_string(cohort_size));
  add("k_mean", format_double(k_mean));
  add("k_sd", format_double(k_sd));
  add("strength_mean", format_double(strength_mean));
  add("strength_sd", format_double(strength_sd));
  add("mvc_mean_n", format_double(mvc_mean_n));
  add("mvc_sd_n", format_double(mvc_sd_n));
  add("coupling", format_double(coupling));
  add("noise_sigma", format_double(noise_sigma));
  add("quantize_step", format_double(quantize_step));
  {
    std::string s;
    for (double t : schedule.times_s) {
      if (!s.empty()) s += ',';
      s += format_double(t);
    }
    add("schedule_s", s);
  }
  add("write_markers", write_markers ? "true" : "false");
  add("load_moment_nm", format_double(load_moment_nm));
  add("load_force_n", format_double(load_force_n));
  add("machine_mass_kg", format_double(machine_mass_kg));
  add("drill_dir_x", format_double(drill_direction.x));
  add("drill_dir_y", format_double(drill_direction.y));
  add("drill_dir_z", format_double(drill_direction.z));
  add("mass_fraction_upper_arm", format_double(coefficients.mass_fraction_upper_arm));
  add("mass_fraction_forearm_hand",
      format_double(coefficients.mass_fraction_forearm_hand));
  add("com_fraction_upper_arm", format_double(coefficients.com_fraction_upper_arm));
  add("com_fraction_forearm", format_double(coefficients.com_fraction_forearm));
  add("arm_model",
      arm_model == MomentArmModel::segment_midpoints ? "midpoints" : "com");
  add("hand_offset_m", format_double(hand_offset_m));
  add("marker_rate_hz", format_double(marker_rate_hz));
  add("r2_good", format_double(bands.good));
  add("r2_fair", format_double(bands.fair));
  add("ttest", to_string(ttest));
  add("group_size", std::to_string(group_size));
  add("hist_r2_bin_width", format_double(hist_r2_bin_width));
  add("hist_k_bin_width", format_double(hist_k_bin_width));
  add("hist_k_max", format_double(hist_k_max));

  std::sort(entries.begin(), entries.end());
  std::string out;
  for (const auto& [key, value] : entries) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

std::uint64_t RunConfig::config_hash() const {
  // FNV-1a, 64 bit
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value, const std::string& context) {
  const auto number = [&] {
    double v = 0.0;
    const std::string t = trim(value);
    const auto result = std::from_chars(t.data(), t.data() + t.size(), v);
    if (result.ec != std::errc{} || result.ptr != t.data() + t.size())
      throw ConfigError(context + ": cannot parse number from '" + t + "' for key '" +
                        key + "'");
    return v;
  };

  if (key == "unit") {
    config.unit = capacity_unit_from_string(trim(value));
  } else if (key == "seed") {
    config.seed = parse_u64(value, context);
  } else if (key == "out_dir") {
    config.out_dir = trim(value);
  } else if (key == "cohort_size") {
    config.cohort_size = static_cast<std::size_t>(parse_u64(value, context));
  } else if (key == "k_mean") {
    config.k_mean = number();
  } else if (key == "k_sd") {
    config.k_sd = number();
  } else if (key == "strength_mean") {
    config.strength_mean = number();
  } else if (key == "strength_sd") {
    config.strength_sd = number();
  } else if (key == "mvc_mean_n") {
    config.mvc_mean_n = number();
  } else if (key == "mvc_sd_n") {
    config.mvc_sd_n = number();
  } else if (key == "coupling") {
    config.coupling = number();
  } else if (key == "noise_sigma") {
    config.noise_sigma = number();
  } else if (key == "quantize_step") {
    config.quantize_step = number();
  } else if (key == "schedule_s") {
    ProtocolSchedule schedule;
    for (const auto& field : split(trim(value), ',')) {
      const std::string t = trim(field);
      double v = 0.0;
      const auto result = std::from_chars(t.data(), t.data() + t.size(), v);
      if (result.ec != std::errc{} || result.ptr != t.data() + t.size())
        throw ConfigError(context + ": bad schedule entry '" + t + "'");
      schedule.times_s.push_back(v);
    }
    if (schedule.times_s.empty() || schedule.times_s.front() != 0.0)
      schedule.times_s.insert(schedule.times_s.begin(), 0.0);
    schedule.validate();
    config.schedule = schedule;
  } else if (key == "write_markers") {
    const std::string t = trim(value);
    if (t == "true" || t == "1")
      config.write_markers = true;
    else if (t == "false" || t == "0")
      config.write_markers = false;
    else
      throw ConfigError(context + ": write_markers must be true or false");
  } else if (key == "load_moment_nm") {
    config.load_moment_nm = number();
  } else if (key == "load_force_n") {
    config.load_force_n = number();
  } else if (key == "machine_mass_kg") {
    config.machine_mass_kg = number();
  } else if (key == "drill_dir_x") {
    config.drill_direction.x = number();
  } else if (key == "drill_dir_y") {
    config.drill_direction.y = number();
  } else if (key == "drill_dir_z") {
    config.drill_direction.z = number();
  } else if (key == "mass_fraction_upper_arm") {
    config.coefficients.mass_fraction_upper_arm = number();
  } else if (key == "mass_fraction_forearm_hand") {
    config.coefficients.mass_fraction_forearm_hand = number();
  } else if (key == "com_fraction_upper_arm") {
    config.coefficients.com_fraction_upper_arm = number();
  } else if (key == "com_fraction_forearm") {
    config.coefficients.com_fraction_forearm = number();
  } else if (key == "arm_model") {
    const std::string t = trim(value);
    if (t == "midpoints")
      config.arm_model = MomentArmModel::segment_midpoints;
    else if (t == "com")
      config.arm_model = MomentArmModel::com_fractions;
    else
      throw ConfigError(context + ": arm_model must be 'midpoints' or 'com'");
  } else if (key == "hand_offset_m") {
    config.hand_offset_m = number();
  } else if (key == "marker_rate_hz") {
    config.marker_rate_hz = number();
  } else if (key == "r2_good") {
    config.bands.good = number();
  } else if (key == "r2_fair") {
    config.bands.fair = number();
  } else if (key == "ttest") {
    const std::string t = trim(value);
    if (t == "welch")
      config.ttest = TTestVariant::welch;
    else if (t == "pooled")
      config.ttest = TTestVariant::pooled;
    else
      throw ConfigError(context + ": ttest must be 'welch' or 'pooled'");
  } else if (key == "group_size") {
    config.group_size = static_cast<std::size_t>(parse_u64(value, context));
  } else if (key == "hist_r2_bin_width") {
    config.hist_r2_bin_width = number();
  } else if (key == "hist_k_bin_width") {
    config.hist_k_bin_width = number();
  } else if (key == "hist_k_max") {
    config.hist_k_max = number();
  } else {
    throw ConfigError(context + ": unknown config key '" + key + "'");
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string entry = trim(line);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string(), line_no, "expected 'key = value'");
    std::string key = trim(entry.substr(0, eq));
    std::string value = trim(entry.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    apply_config_entry(config, key, value,
                       path.string() + ":" + std::to_string(line_no));
  }
}

std::vector<SubjectRecord> parse_subjects(const std::filesystem::path& path) {
  auto in = open_input(path);
  const std::string file = path.string();

  std::string line;
  if (!std::getline(in, line)) {
    std::cerr << "warning: " << file << " is empty; no subjects loaded\n";
    return {};
  }
  expect_header(line, "id,age_yr,stature_m,mass_kg,upper_limb_cm,lower_limb_cm", file);

  std::vector<SubjectRecord> subjects;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 6)
      throw ParseError(file, line_no,
                       "expected 6 fields, got " + std::to_string(fields.size()));

    SubjectRecord rec;
    rec.id = trim(fields[0]);
    rec.age_yr = parse_number(fields[1], file, line_no, "age_yr");
    rec.stature_m = parse_number(fields[2], file, line_no, "stature_m");
    rec.body_mass_kg = parse_number(fields[3], file, line_no, "mass_kg");
    rec.upper_limb_cm = parse_number(fields[4], file, line_no, "upper_limb_cm");
    rec.lower_limb_cm = parse_number(fields[5], file, line_no, "lower_limb_cm");
    rec.bmi = rec.computed_bmi();

    for (const auto& existing : subjects)
      if (existing.id == rec.id)
        throw ParseError(file, line_no, "duplicate subject id '" + rec.id + "'");
    try {
      rec.validate();
    } catch (const ValidationError& e) {
      throw ParseError(file, line_no, e.what());
    }
    subjects.push_back(std::move(rec));
  }
  if (subjects.empty())
    std::cerr << "warning: " << file << " contains no subject rows\n";
  return subjects;
}

void attach_sessions(std::vector<SubjectRecord>& subjects,
                     const std::filesystem::path& path, CapacityUnit unit) {
  auto in = open_input(path);
  const std::string file = path.string();

  std::string line;
  if (!std::getline(in, line)) {
    std::cerr << "warning: " << file << " is empty; no sessions loaded\n";
    return;
  }
  expect_header(line, "subject_id,session_time_s,measured_force_N", file);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 3)
      throw ParseError(file, line_no,
                       "expected 3 fields, got " + std::to_string(fields.size()));

    const std::string id = trim(fields[0]);
    const double time_s = parse_number(fields[1], file, line_no, "session_time_s");
    const double value = parse_number(fields[2], file, line_no, "measured_force_N");
    if (!(time_s >= 0.0))
      throw ParseError(file, line_no, "session time must be nonnegative");
    if (!(value > 0.0))
      throw ParseError(file, line_no, "measured value must be positive");

    auto subject = std::find_if(subjects.begin(), subjects.end(),
                                [&](const SubjectRecord& s) { return s.id == id; });
    if (subject == subjects.end())
      throw ParseError(file, line_no, "unknown subject id '" + id + "'");

    subject->unit = unit;
    if (time_s == 0.0) {
      subject->mvc_trials.push_back(value);
    } else {
      const double time_min = minutes_from_seconds(time_s);
      for (const auto& s : subject->sessions)
        if (s.time_min == time_min)
          throw ParseError(file, line_no,
                           "duplicate session time " + format_double(time_s) +
                               " s for subject '" + id + "'");
      subject->sessions.push_back({time_min, value, unit});
    }
  }
  for (auto& subject : subjects)
    std::sort(subject.sessions.begin(), subject.sessions.end(),
              [](const SessionMeasurement& a, const SessionMeasurement& b) {
                return a.time_min < b.time_min;
              });
}

const std::vector<MarkerFrame>* MarkerSet::find(const std::string& subject_id,
                                                double session_time_s) const {
  const auto it = frames.find({subject_id, session_time_s});
  return it == frames.end() ? nullptr : &it->second;
}

MarkerFrame MarkerSet::mean_frame(std::span<const MarkerFrame> frames) {
  if (frames.empty()) throw ValidationError("cannot average an empty frame set");
  MarkerFrame mean;
  for (const auto& f : frames) {
    mean.shoulder += f.shoulder;
    mean.elbow += f.elbow;
    mean.wrist += f.wrist;
    mean.drill += f.drill;
    mean.time_s += f.time_s;
  }
  const double n = static_cast<double>(frames.size());
  mean.shoulder = mean.shoulder / n;
  mean.elbow = mean.elbow / n;
  mean.wrist = mean.wrist / n;
  mean.drill = mean.drill / n;
  mean.time_s /= n;
  return mean;
}

MarkerSet parse_markers(const std::filesystem::path& path) {
  auto in = open_input(path);
  const std::string file = path.string();

  std::string line;
  if (!std::getline(in, line)) {
    std::cerr << "warning: " << file << " is empty; no markers loaded\n";
    return {};
  }
  expect_header(line,
                "subject_id,session_time_s,frame_time_s,sx,sy,sz,ex,ey,ez,wx,wy,wz,dx,dy,dz",
                file);

  MarkerSet markers;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != 15)
      throw ParseError(file, line_no,
                       "expected 15 fields, got " + std::to_string(fields.size()));

    const std::string id = trim(fields[0]);
    const double session_s = parse_number(fields[1], file, line_no, "session_time_s");
    MarkerFrame frame;
    frame.time_s = parse_number(fields[2], file, line_no, "frame_time_s");
    const auto vec = [&](std::size_t base, const char* what) {
      return Vec3{parse_number(fields[base], file, line_no, what),
                  parse_number(fields[base + 1], file, line_no, what),
                  parse_number(fields[base + 2], file, line_no, what)};
    };
    frame.shoulder = vec(3, "shoulder marker");
    frame.elbow = vec(6, "elbow marker");
    frame.wrist = vec(9, "wrist marker");
    frame.drill = vec(12, "drill marker");
    if (!frame.shoulder.finite() || !frame.elbow.finite() ||
        !frame.wrist.finite() || !frame.drill.finite())
      throw ParseError(file, line_no, "non-finite marker coordinates");
    markers.frames[{id, session_s}].push_back(frame);
  }
  return markers;
}

void write_subjects(const std::filesystem::path& path,
                    std::span<const SubjectRecord> subjects) {
  auto out = open_output(path);
  out << "id,age_yr,stature_m,mass_kg,upper_limb_cm,lower_limb_cm\n";
  for (const auto& s : subjects)
    out << s.id << ',' << format_double(s.age_yr) << ',' << format_double(s.stature_m)
        << ',' << format_double(s.body_mass_kg) << ',' << format_double(s.upper_limb_cm)
        << ',' << format_double(s.lower_limb_cm) << '\n';
}

void write_sessions(const std::filesystem::path& path,
                    std::span<const SubjectRecord> subjects) {
  auto out = open_output(path);
  out << "subject_id,session_time_s,measured_force_N\n";
  for (const auto& s : subjects) {
    for (double trial : s.mvc_trials)
      out << s.id << ",0," << format_double(trial) << '\n';
    for (const auto& session : s.sessions)
      out << s.id << ',' << format_double(seconds_from_minutes(session.time_min))
          << ',' << format_double(session.value) << '\n';
  }
}

void write_markers(const std::filesystem::path& path, const MarkerSet& markers) {
  auto out = open_output(path);
  out << "subject_id,session_time_s,frame_time_s,sx,sy,sz,ex,ey,ez,wx,wy,wz,dx,dy,dz\n";
  for (const auto& [key, frames] : markers.frames) {
    for (const auto& f : frames) {
      out << key.first << ',' << format_double(key.second) << ','
          << format_double(f.time_s);
      for (const Vec3* v : {&f.shoulder, &f.elbow, &f.wrist, &f.drill})
        out << ',' << format_double(v->x) << ',' << format_double(v->y) << ','
            << format_double(v->z);
      out << '\n';
    }
  }
}

}  // namespace fatiguekit
