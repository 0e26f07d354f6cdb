#include "fatiguekit/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace fatiguekit {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

std::ofstream open_report(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config.config_hash()));
  out << "# config_hash " << hash << '\n';
  return out;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : "nan";
}

void write_summary_row(std::ofstream& out, const std::string& scope,
                       const std::string& item, const Summary& s) {
  out << scope << ',' << item << ',' << format_double(s.mean) << ','
      << format_double(s.sd) << ',' << format_double(s.min) << ','
      << format_double(s.max) << ',' << s.n << '\n';
}

}  // namespace

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

SimulatedDataset simulate_dataset(const RunConfig& config) {
  config.validate();
  if (config.cohort_size == 0)
    throw ValidationError("cannot simulate an empty dataset (cohort_size = 0)");

  CohortSpec spec;
  spec.n = config.cohort_size;
  spec.coupling = config.coupling;
  spec.noise_sigma = config.noise_sigma;
  spec.quantize_step = config.quantize_step;
  spec.unit = config.unit;
  spec.seed = config.seed;
  spec.schedule = config.schedule;
  spec.k_mean = config.k_mean;
  spec.k_sd = config.k_sd;
  if (config.unit == CapacityUnit::moment) {
    spec.strength_mean = config.strength_mean;
    spec.strength_sd = config.strength_sd;
    spec.external_load = config.load_moment_nm;
  } else {
    spec.strength_mean = config.mvc_mean_n;
    spec.strength_sd = config.mvc_sd_n;
    spec.external_load = config.load_force_n;
  }

  SimulatedDataset dataset;
  dataset.truth = generate_cohort(spec);
  dataset.subjects.reserve(dataset.truth.size());
  for (const auto& t : dataset.truth) dataset.subjects.push_back(t.record);

  if (config.write_markers) {
    const auto drift = reference_posture_drift();
    for (const auto& subject : dataset.subjects) {
      const auto anthro = subject.anthropometry(config.coefficients);
      // One short trace per protocol session, posture following the
      // reference drift row for that session index.
      for (std::size_t s = 0; s < config.schedule.times_s.size(); ++s) {
        const auto& posture = drift[std::min(s, drift.size() - 1)];
        const std::vector<PostureAngles> constant_posture(3, posture);
        auto frames = generate_marker_trace(anthro, constant_posture,
                                            config.marker_rate_hz,
                                            config.hand_offset_m);
        dataset.markers.frames[{subject.id, config.schedule.times_s[s]}] =
            std::move(frames);
      }
    }
  }
  return dataset;
}

void write_dataset(const std::filesystem::path& dir, const SimulatedDataset& dataset,
                   const RunConfig& config) {
  std::filesystem::create_directories(dir);
  write_subjects(dir / "subjects.csv", dataset.subjects);
  write_sessions(dir / "sessions.csv", dataset.subjects);
  if (!dataset.markers.frames.empty())
    write_markers(dir / "markers.csv", dataset.markers);

  auto truth = open_report(dir / "truth.csv", config);
  truth << "subject_id,true_k_per_min,true_capacity,f_mvc,unit\n";
  for (const auto& t : dataset.truth)
    truth << t.record.id << ',' << format_double(t.true_k) << ','
          << format_double(t.true_capacity) << ',' << format_double(t.f_mvc) << ','
          << to_string(t.record.unit) << '\n';
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

SubjectRecord to_moment_space(const SubjectRecord& record, const MarkerSet& markers,
                              const RunConfig& config) {
  if (record.unit == CapacityUnit::moment) return record;

  const auto anthro = record.anthropometry(config.coefficients);
  const auto gravity = segment_forces_from_anthropometry(
      anthro, config.machine_mass_kg, 0.0, config.drill_direction);
  const Vec3 drill_dir = config.drill_direction.normalized();

  const auto session_frame = [&](double session_time_s) {
    const auto* frames = markers.find(record.id, session_time_s);
    if (frames == nullptr || frames->empty())
      throw ValidationError("subject '" + record.id + "': no marker frames for session at " +
                            format_double(session_time_s) + " s");
    return MarkerSet::mean_frame(*frames);
  };

  SubjectRecord converted = record;
  converted.unit = CapacityUnit::moment;
  converted.mvc_trials.clear();
  converted.sessions.clear();

  const MarkerFrame mvc_frame = session_frame(0.0);
  for (double trial : record.mvc_trials)
    converted.mvc_trials.push_back(
        joint_moment_from_measured_force(mvc_frame, trial, drill_dir, gravity,
                                         config.arm_model, config.coefficients)
            .flexion_nm);

  for (const auto& session : record.sessions) {
    const MarkerFrame frame = session_frame(seconds_from_minutes(session.time_min));
    const double moment =
        joint_moment_from_measured_force(frame, session.value, drill_dir, gravity,
                                         config.arm_model, config.coefficients)
            .flexion_nm;
    if (!(moment > 0.0))
      throw DegeneracyError("subject '" + record.id +
                            "': non-positive joint moment at session " +
                            format_double(seconds_from_minutes(session.time_min)) + " s");
    converted.sessions.push_back({session.time_min, moment, CapacityUnit::moment});
  }
  return converted;
}

namespace {

/// Task moment demand at the MVC posture: gravity terms plus the configured
/// drilling force.
double task_moment_load(const SubjectRecord& record, const MarkerSet& markers,
                        const RunConfig& config) {
  const auto* frames = markers.find(record.id, 0.0);
  if (frames == nullptr || frames->empty())
    throw ValidationError("subject '" + record.id + "': no marker frames for the MVC session");
  const auto anthro = record.anthropometry(config.coefficients);
  const auto forces = segment_forces_from_anthropometry(
      anthro, config.machine_mass_kg, config.load_force_n,
      config.drill_direction.normalized());
  return moment_load(MarkerSet::mean_frame(*frames), forces, config.arm_model,
                     config.coefficients)
      .flexion_nm;
}

}  // namespace

FitReport run_fit(const std::vector<SubjectRecord>& subjects, const RunConfig& config,
                  const MarkerSet* markers) {
  config.validate();

  FitReport report;
  report.rows.reserve(subjects.size());
  for (const auto& subject : subjects) {
    SubjectFitRow row;
    row.id = subject.id;
    try {
      FitOptions options;
      options.bands = config.bands;
      if (markers != nullptr && subject.unit == CapacityUnit::force) {
        const SubjectRecord converted = to_moment_space(subject, *markers, config);
        options.external_load = task_moment_load(subject, *markers, config);
        row.fit = fit_subject(converted, options);
      } else {
        options.external_load = config.external_load();
        row.fit = fit_subject(subject, options);
      }
      row.ok = true;
      ++report.n_fitted;
    } catch (const std::runtime_error& e) {
      row.error = e.what();
      ++report.n_skipped;
    }
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const SubjectFitRow& a, const SubjectFitRow& b) { return a.id < b.id; });
  return report;
}

void write_fit_report(const std::filesystem::path& dir, const FitReport& report,
                      const RunConfig& config) {
  std::filesystem::create_directories(dir);

  auto fit = open_report(dir / "fit.csv", config);
  fit << "subject_id,k_per_min,r_squared,n_points,f_mvc,mvc,unit,n_above_mvc,quality\n";
  for (const auto& row : report.rows) {
    if (!row.ok) continue;
    const auto& f = row.fit;
    fit << row.id << ',' << format_double(f.k_hat) << ','
        << format_optional(f.r_squared) << ',' << f.n_points << ','
        << format_double(f.f_mvc_used) << ',' << format_double(f.mvc_used) << ','
        << to_string(f.unit) << ',' << f.n_above_mvc << ',' << to_string(f.quality)
        << '\n';
  }

  // Cohort summary over the fitted subjects, all and good-only.
  std::vector<double> ks, strengths, r2s, ks_good;
  for (const auto& row : report.rows) {
    if (!row.ok) continue;
    ks.push_back(row.fit.k_hat);
    strengths.push_back(row.fit.mvc_used);
    if (row.fit.r_squared) r2s.push_back(*row.fit.r_squared);
    if (row.fit.quality == FitQuality::good) ks_good.push_back(row.fit.k_hat);
  }
  auto summary = open_report(dir / "fit_summary.csv", config);
  summary << "scope,item,mean,sd,min,max,n\n";
  if (!ks.empty()) {
    write_summary_row(summary, "all", "joint_moment_strength", summarize(strengths));
    write_summary_row(summary, "all", "k", summarize(ks));
    if (!r2s.empty()) write_summary_row(summary, "all", "r_squared", summarize(r2s));
    if (!ks_good.empty())
      write_summary_row(summary, "good_fits", "k", summarize(ks_good));
  }

  if (report.n_skipped > 0) {
    auto skipped = open_report(dir / "skipped.csv", config);
    skipped << "subject_id,reason\n";
    for (const auto& row : report.rows) {
      if (row.ok) continue;
      std::string reason = row.error;
      std::replace(reason.begin(), reason.end(), ',', ';');
      skipped << row.id << ',' << reason << '\n';
    }
  }
}

std::vector<SubjectFitRow> parse_fit_output(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "' for reading");
  const std::string file = path.string();

  std::vector<SubjectFitRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "subject_id,k_per_min,r_squared,n_points,f_mvc,mvc,unit,n_above_mvc,quality")
        throw ParseError(file, line_no, "unexpected fit.csv header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (fields.size() != 9)
      throw ParseError(file, line_no,
                       "expected 9 fields, got " + std::to_string(fields.size()));

    const auto number = [&](const std::string& text, const char* what) {
      double v = 0.0;
      const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
      if (r.ec != std::errc{} || r.ptr != text.data() + text.size())
        throw ParseError(file, line_no,
                         std::string("cannot parse ") + what + " from '" + text + "'");
      return v;
    };

    SubjectFitRow row;
    row.id = fields[0];
    row.ok = true;
    row.fit.k_hat = number(fields[1], "k_per_min");
    const double r2 = number(fields[2], "r_squared");
    if (!std::isnan(r2)) row.fit.r_squared = r2;
    row.fit.n_points = static_cast<std::size_t>(number(fields[3], "n_points"));
    row.fit.f_mvc_used = number(fields[4], "f_mvc");
    row.fit.mvc_used = number(fields[5], "mvc");
    row.fit.unit = capacity_unit_from_string(fields[6]);
    row.fit.n_above_mvc = static_cast<std::size_t>(number(fields[7], "n_above_mvc"));
    if (fields[8] == "good")
      row.fit.quality = FitQuality::good;
    else if (fields[8] == "fair")
      row.fit.quality = FitQuality::fair;
    else if (fields[8] == "poor")
      row.fit.quality = FitQuality::poor;
    else
      throw ParseError(file, line_no, "unknown quality '" + fields[8] + "'");
    rows.push_back(std::move(row));
  }
  if (!header_seen)
    throw ValidationError("fit output '" + file + "' is empty");
  return rows;
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

Histogram histogram(std::span<const double> values, double lo, double hi,
                    double bin_width) {
  if (!(bin_width > 0.0) || !(hi > lo))
    throw ValidationError("histogram needs hi > lo and a positive bin width");
  Histogram h;
  h.lo = lo;
  h.bin_width = bin_width;
  const auto n_bins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width));
  h.counts.assign(n_bins, 0);
  for (double v : values) {
    if (std::isnan(v)) continue;
    if (v < lo) {
      ++h.underflow;
    } else if (v >= lo + static_cast<double>(n_bins) * bin_width) {
      ++h.overflow;
    } else {
      auto bin = static_cast<std::size_t>((v - lo) / bin_width);
      if (bin >= n_bins) bin = n_bins - 1;  // guards the hi boundary rounding
      ++h.counts[bin];
    }
  }
  return h;
}

CohortTable build_cohort_table(const std::vector<SubjectFitRow>& rows,
                               const std::vector<SubjectRecord>& subjects) {
  std::vector<std::string> ids;
  std::vector<double> k, strength, age, bmi, r2;
  for (const auto& row : rows) {
    if (!row.ok) continue;
    ids.push_back(row.id);
    k.push_back(row.fit.k_hat);
    strength.push_back(row.fit.mvc_used);
    r2.push_back(row.fit.r_squared ? *row.fit.r_squared : nan_value);
    const auto subject =
        std::find_if(subjects.begin(), subjects.end(),
                     [&](const SubjectRecord& s) { return s.id == row.id; });
    if (subject != subjects.end()) {
      age.push_back(subject->age_yr);
      bmi.push_back(subject->bmi > 0.0 ? subject->bmi : subject->computed_bmi());
    } else {
      age.push_back(nan_value);
      bmi.push_back(nan_value);
    }
  }

  CohortTable table;
  table.set_ids(std::move(ids));
  table.add_column("fatigue_rate", std::move(k));
  table.add_column("joint_moment_strength", std::move(strength));
  table.add_column("age", std::move(age));
  table.add_column("bmi", std::move(bmi));
  table.add_column("r_squared", std::move(r2));
  return table;
}

StatsReport run_stats(const CohortTable& table, const RunConfig& config) {
  config.validate();
  if (table.n_rows() == 0)
    throw DegeneracyError("no fitted subjects; nothing to analyse");

  StatsReport report;
  const auto& k = table.column("fatigue_rate");
  const auto& strength = table.column("joint_moment_strength");
  const auto& r2 = table.column("r_squared");

  report.k_all = summarize(k);
  report.strength_all = summarize(strength);
  std::vector<double> r2_present;
  for (double v : r2)
    if (!std::isnan(v)) r2_present.push_back(v);
  report.r2_all = r2_present.empty() ? Summary{} : summarize(r2_present);

  std::vector<double> k_good;
  for (std::size_t i = 0; i < k.size(); ++i)
    if (!std::isnan(r2[i]) && r2[i] > config.bands.good) k_good.push_back(k[i]);
  if (!k_good.empty()) report.k_good = summarize(k_good);

  const std::vector<std::string> columns = {"fatigue_rate", "bmi",
                                            "joint_moment_strength", "age"};
  report.correlation = correlation_matrix(table, columns);

  if (table.n_rows() >= 2 * config.group_size) {
    report.split = split_by_strength(table, config.group_size);
    const auto group_values = [&](const std::vector<std::string>& ids) {
      std::vector<double> values;
      for (const auto& id : ids) {
        for (std::size_t i = 0; i < table.ids().size(); ++i)
          if (table.ids()[i] == id) values.push_back(k[i]);
      }
      return values;
    };
    const auto high = group_values(report.split->high_group);
    const auto low = group_values(report.split->low_group);
    const TTestVariant other = config.ttest == TTestVariant::welch
                                   ? TTestVariant::pooled
                                   : TTestVariant::welch;
    report.primary = t_test(high, low, config.ttest);
    report.secondary = t_test(high, low, other);
  }

  report.r2_hist = histogram(r2, 0.0, 1.0, config.hist_r2_bin_width);
  report.k_hist = histogram(k, 0.0, config.hist_k_max, config.hist_k_bin_width);
  return report;
}

namespace {

void write_histogram(const std::filesystem::path& path, const Histogram& h,
                     const RunConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path.string() + "' for writing");
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config.config_hash()));
  out << "# config_hash " << hash << '\n';
  out << "bin_lo,bin_hi,count\n";
  if (h.underflow > 0) out << "-inf," << format_double(h.lo) << ',' << h.underflow << '\n';
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << format_double(h.lo + static_cast<double>(i) * h.bin_width) << ','
        << format_double(h.lo + static_cast<double>(i + 1) * h.bin_width) << ','
        << h.counts[i] << '\n';
  if (h.overflow > 0)
    out << format_double(h.lo + static_cast<double>(h.counts.size()) * h.bin_width)
        << ",inf," << h.overflow << '\n';
}

void write_comparison(std::ofstream& out, const GroupComparison& cmp) {
  out << to_string(cmp.variant) << ',' << format_double(cmp.group_a.mean) << ','
      << format_double(cmp.group_a.sd) << ',' << cmp.group_a.n << ','
      << format_double(cmp.group_b.mean) << ',' << format_double(cmp.group_b.sd) << ','
      << cmp.group_b.n << ',' << format_double(cmp.t_statistic) << ','
      << format_double(cmp.df) << ',' << format_double(cmp.p_value) << ','
      << (cmp.degenerate ? "yes" : "no") << '\n';
}

}  // namespace

void write_stats_report(const std::filesystem::path& dir, const StatsReport& stats,
                        const RunConfig& config) {
  std::filesystem::create_directories(dir);

  auto summary = open_report(dir / "stats_summary.csv", config);
  summary << "scope,item,mean,sd,min,max,n\n";
  write_summary_row(summary, "all", "joint_moment_strength", stats.strength_all);
  write_summary_row(summary, "all", "k", stats.k_all);
  if (stats.r2_all.n > 0) write_summary_row(summary, "all", "r_squared", stats.r2_all);
  if (stats.k_good) write_summary_row(summary, "good_fits", "k", *stats.k_good);

  auto corr = open_report(dir / "correlation.csv", config);
  corr << "column_a,column_b,r,p_value,n,defined\n";
  const auto& names = stats.correlation.columns();
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto& cell = stats.correlation.cell(i, j);
      corr << names[i] << ',' << names[j] << ','
           << (cell.defined ? format_double(cell.r) : "nan") << ','
           << (cell.defined ? format_double(cell.p) : "nan") << ',' << cell.n << ','
           << (cell.defined ? "yes" : "no") << '\n';
    }

  if (stats.primary) {
    auto groups = open_report(dir / "groups.csv", config);
    groups << "variant,high_mean_k,high_sd_k,high_n,low_mean_k,low_sd_k,low_n,t,df,"
              "p_value,degenerate\n";
    write_comparison(groups, *stats.primary);
    if (stats.secondary) write_comparison(groups, *stats.secondary);
  }

  write_histogram(dir / "hist_r_squared.csv", stats.r2_hist, config);
  write_histogram(dir / "hist_k.csv", stats.k_hist, config);
}

// ---------------------------------------------------------------------------
// moment
// ---------------------------------------------------------------------------

std::vector<MomentRow> run_moment(const MarkerSet& markers,
                                  const std::vector<SubjectRecord>& subjects,
                                  const RunConfig& config) {
  config.validate();

  std::vector<MomentRow> rows;
  for (const auto& [key, frames] : markers.frames) {
    const std::string& subject_id = key.first;
    const double session_time_s = key.second;
    const auto subject =
        std::find_if(subjects.begin(), subjects.end(),
                     [&](const SubjectRecord& s) { return s.id == subject_id; });
    if (subject == subjects.end())
      throw ValidationError("markers reference unknown subject '" + subject_id + "'");

    const auto anthro = subject->anthropometry(config.coefficients);
    const auto forces = segment_forces_from_anthropometry(
        anthro, config.machine_mass_kg, config.load_force_n,
        config.drill_direction.normalized());

    for (const auto& frame : frames) {
      MomentRow row;
      row.subject_id = subject_id;
      row.session_time_s = session_time_s;
      row.frame_time_s = frame.time_s;
      row.load_moment = moment_load(frame, forces, config.arm_model, config.coefficients);
      row.posture = posture_angles(frame);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_moment_report(const std::filesystem::path& dir,
                         const std::vector<MomentRow>& rows, const RunConfig& config) {
  std::filesystem::create_directories(dir);
  auto out = open_report(dir / "moments.csv", config);
  out << "subject_id,session_time_s,frame_time_s,moment_flexion_nm,mx,my,mz,"
         "out_of_plane_nm,shoulder_flexion_deg,elbow_flexion_deg\n";
  for (const auto& r : rows)
    out << r.subject_id << ',' << format_double(r.session_time_s) << ','
        << format_double(r.frame_time_s) << ',' << format_double(r.load_moment.flexion_nm)
        << ',' << format_double(r.load_moment.torque.x) << ','
        << format_double(r.load_moment.torque.y) << ','
        << format_double(r.load_moment.torque.z) << ','
        << format_double(r.load_moment.out_of_plane_nm) << ','
        << format_double(r.posture.shoulder_flexion_deg) << ','
        << format_double(r.posture.elbow_flexion_deg) << '\n';
}

}  // namespace fatiguekit
