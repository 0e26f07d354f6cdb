#include "fatiguekit/estimation.hpp"

#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include <doctest.h>

#include "fatiguekit/rng.hpp"
#include "fatiguekit/subject.hpp"
#include "fatiguekit/synth.hpp"

using namespace fatiguekit;

namespace {

std::vector<SessionMeasurement> measurements_on_curve(double k, double f,
                                                      double capacity) {
  std::vector<SessionMeasurement> out;
  for (double t_s : ProtocolSchedule::standard().times_s) {
    const double t = minutes_from_seconds(t_s);
    out.push_back({t, capacity * std::exp(-k * f * t), CapacityUnit::moment});
  }
  return out;
}

SubjectRecord noise_free_subject(double k, double f, double capacity) {
  SubjectRecord rec;
  rec.id = "T01";
  rec.age_yr = 40.0;
  rec.stature_m = 1.71;
  rec.body_mass_kg = 70.0;
  rec.upper_limb_cm = 23.6;
  rec.lower_limb_cm = 25.6;
  rec.unit = CapacityUnit::moment;
  for (const auto& m : measurements_on_curve(k, f, capacity)) {
    if (m.time_min == 0.0)
      rec.mvc_trials.push_back(m.value);
    else
      rec.sessions.push_back(m);
  }
  return rec;
}

}  // namespace

TEST_CASE("linearize") {
  SUBCASE("a measurement at the MVC maps to zero") {
    const std::vector<SessionMeasurement> ms = {{1.0, 100.0, CapacityUnit::force}};
    const auto pts = linearize(ms, 100.0, RelativeLoad(0.3));
    CHECK(pts[0].y == 0.0);
    CHECK_FALSE(pts[0].exceeds_mvc);
  }

  SUBCASE("hand-computed point") {
    const std::vector<SessionMeasurement> ms = {
        {2.0, std::exp(-0.5) * 100.0, CapacityUnit::force}};
    const auto pts = linearize(ms, 100.0, RelativeLoad(0.25));
    CHECK(pts[0].y == doctest::Approx(-2.0).epsilon(1e-12));
  }

  SUBCASE("noise-free series linearizes onto y = -k t") {
    const double k = 0.8, f = 0.22;
    const auto ms = measurements_on_curve(k, f, 57.0);
    const auto pts = linearize(ms, 57.0, RelativeLoad(f));
    for (const auto& p : pts)
      CHECK(p.y == doctest::Approx(-k * p.time_min).epsilon(1e-12));
  }

  SUBCASE("non-positive values are rejected naming the session") {
    const std::vector<SessionMeasurement> ms = {{0.5, -3.0, CapacityUnit::force}};
    try {
      linearize(ms, 100.0, RelativeLoad(0.3));
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("30") != std::string::npos);  // 0.5 min = 30 s
    }
  }

  SUBCASE("values above the MVC are kept and flagged") {
    const std::vector<SessionMeasurement> ms = {{0.25, 104.0, CapacityUnit::force}};
    const auto pts = linearize(ms, 100.0, RelativeLoad(0.3));
    CHECK(pts[0].y > 0.0);
    CHECK(pts[0].exceeds_mvc);
  }
}

TEST_CASE("fit_fatigue_rate") {
  SUBCASE("exact line") {
    std::vector<LinearizedPoint> pts;
    for (double t : {0.0, 0.5, 1.0, 2.0, 3.0}) pts.push_back({t, -1.5 * t, false});
    const auto fit = fit_fatigue_rate(pts);
    CHECK(fit.k_hat == doctest::Approx(1.5).epsilon(1e-15));
    REQUIRE(fit.r_squared.has_value());
    CHECK(*fit.r_squared == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fit.n_points == 5);
    CHECK(fit.residuals.size() == 5);
  }

  SUBCASE("single informative point plus the origin") {
    const std::vector<LinearizedPoint> pts = {{0.0, 0.0, false}, {1.0, -0.375, false}};
    CHECK(fit_fatigue_rate(pts).k_hat == doctest::Approx(0.375).epsilon(1e-15));
  }

  SUBCASE("all times zero is degenerate") {
    const std::vector<LinearizedPoint> pts = {{0.0, 0.0, false}, {0.0, -0.1, false}};
    CHECK_THROWS_AS(fit_fatigue_rate(pts), DegeneracyError);
  }

  SUBCASE("fewer than two points is invalid") {
    const std::vector<LinearizedPoint> pts = {{1.0, -1.0, false}};
    CHECK_THROWS_AS(fit_fatigue_rate(pts), ValidationError);
  }

  SUBCASE("no decline at all: k = 0, R^2 undefined") {
    const std::vector<LinearizedPoint> pts = {
        {0.0, 0.0, false}, {1.0, 0.0, false}, {2.0, 0.0, false}};
    const auto fit = fit_fatigue_rate(pts);
    CHECK(fit.k_hat == 0.0);
    CHECK_FALSE(fit.r_squared.has_value());
    CHECK(fit.quality == FitQuality::poor);
  }

  SUBCASE("r_squared never exceeds one") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<LinearizedPoint> pts;
      for (int i = 0; i < 8; ++i)
        pts.push_back({0.25 * (i + 1), 2.0 * rng.uniform() - 1.5, false});
      const auto fit = fit_fatigue_rate(pts);
      if (fit.r_squared) CHECK(*fit.r_squared <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("fit_subject") {
  SUBCASE("noise-free subject at the weakest reported operating point") {
    const auto rec = noise_free_subject(0.37, 0.14, 45.1);
    FitOptions options;
    options.external_load = 0.14 * 45.1;
    const auto fit = fit_subject(rec, options);
    CHECK(fit.k_hat == doctest::Approx(0.37).epsilon(1e-9));
    REQUIRE(fit.r_squared.has_value());
    CHECK(*fit.r_squared >= 1.0 - 1e-12);
    CHECK(fit.quality == FitQuality::good);
    CHECK(fit.mvc_used == doctest::Approx(45.1));
    CHECK(fit.f_mvc_used == doctest::Approx(0.14).epsilon(1e-12));
    CHECK(fit.n_points == 10);
  }

  SUBCASE("missing MVC trial is a protocol error") {
    auto rec = noise_free_subject(1.0, 0.3, 50.0);
    rec.mvc_trials.clear();
    CHECK_THROWS_AS(fit_subject(rec, {15.0, {}}), ValidationError);
  }

  SUBCASE("needs at least two fatiguing sessions") {
    auto rec = noise_free_subject(1.0, 0.3, 50.0);
    rec.sessions.resize(1);
    CHECK_THROWS_AS(fit_subject(rec, {15.0, {}}), ValidationError);
  }

  SUBCASE("subject whose strength never declines") {
    auto rec = noise_free_subject(1.0, 0.3, 50.0);
    for (auto& s : rec.sessions) s.value = 50.0;
    FitOptions options;
    options.external_load = 15.0;
    const auto fit = fit_subject(rec, options);
    CHECK(fit.k_hat == 0.0);
    CHECK_FALSE(fit.r_squared.has_value());
    CHECK(fit.quality == FitQuality::poor);
  }

  SUBCASE("MVC is the maximum over trials") {
    auto rec = noise_free_subject(1.0, 0.3, 50.0);
    rec.mvc_trials = {47.0, 50.0, 49.2};
    CHECK(rec.mvc() == 50.0);
  }

  SUBCASE("quality bands") {
    CHECK(classify_fit(0.85) == FitQuality::good);
    CHECK(classify_fit(0.7) == FitQuality::fair);
    CHECK(classify_fit(0.5) == FitQuality::poor);
    CHECK(classify_fit(std::nullopt) == FitQuality::poor);
    const QualityBands strict{0.95, 0.9};
    CHECK(classify_fit(0.85, strict) == FitQuality::poor);
  }
}

TEST_CASE("estimator properties") {
  SUBCASE("round trip over random operating points") {
    Rng rng(32);
    for (int i = 0; i < 100; ++i) {
      const double k = 0.2 + 2.8 * rng.uniform();
      const double f = 0.1 + 0.4 * rng.uniform();
      const auto ms = measurements_on_curve(k, f, 50.0);
      const auto pts = linearize(ms, 50.0, RelativeLoad(f));
      const auto fit = fit_fatigue_rate(pts);
      CHECK(std::abs(fit.k_hat - k) / k < 1e-9);
      REQUIRE(fit.r_squared.has_value());
      CHECK(*fit.r_squared >= 1.0 - 1e-12);
    }
  }

  SUBCASE("binary rescaling of strengths leaves the fit bit-identical") {
    const auto rec = noise_free_subject(1.1, 0.25, 45.1);
    FitOptions options;
    options.external_load = 0.25 * 45.1;
    const auto base = fit_subject(rec, options);

    for (const double scale : {0x1.0p-8, 0x1.0p5, 0x1.0p20}) {
      SubjectRecord scaled = rec;
      for (auto& trial : scaled.mvc_trials) trial *= scale;
      for (auto& s : scaled.sessions) s.value *= scale;
      FitOptions scaled_options = options;
      scaled_options.external_load *= scale;
      const auto fit = fit_subject(scaled, scaled_options);
      CHECK(fit.k_hat == base.k_hat);
      CHECK(*fit.r_squared == *base.r_squared);
    }
  }

  SUBCASE("general rescaling agrees to floating-point accuracy") {
    const auto rec = noise_free_subject(1.1, 0.25, 45.1);
    FitOptions options;
    options.external_load = 0.25 * 45.1;
    const auto base = fit_subject(rec, options);

    SubjectRecord scaled = rec;
    const double c = 3.7;
    for (auto& trial : scaled.mvc_trials) trial *= c;
    for (auto& s : scaled.sessions) s.value *= c;
    FitOptions scaled_options = options;
    scaled_options.external_load *= c;
    const auto fit = fit_subject(scaled, scaled_options);
    CHECK(fit.k_hat == doctest::Approx(base.k_hat).epsilon(1e-12));
  }

  SUBCASE("per-second view is exactly the per-minute rate over 60") {
    const auto rec = noise_free_subject(1.34, 0.3, 50.0);
    FitOptions options;
    options.external_load = 15.0;
    const auto fit = fit_subject(rec, options);
    CHECK(fit.k_hat_per_second() == fit.k_hat / 60.0);
  }

  SUBCASE("feeding times in seconds scales the slope by exactly 1/60") {
    // Raw-pair route: same y values, t in seconds instead of minutes.
    const double k = 0.9, f = 0.3;
    const auto ms = measurements_on_curve(k, f, 50.0);
    const auto pts_min = linearize(ms, 50.0, RelativeLoad(f));
    std::vector<LinearizedPoint> pts_s = pts_min;
    for (auto& p : pts_s) p.time_min *= 60.0;
    const double k_min = fit_fatigue_rate(pts_min).k_hat;
    const double k_s = fit_fatigue_rate(pts_s).k_hat;
    CHECK(k_s == doctest::Approx(k_min / 60.0).epsilon(1e-12));
  }

  SUBCASE("fits are pure functions: concurrent callers agree") {
    const auto rec = noise_free_subject(1.02, 0.243, 45.1);
    FitOptions options;
    options.external_load = 0.243 * 45.1;
    const auto reference = fit_subject(rec, options);

    std::vector<double> results(8, 0.0);
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < results.size(); ++w)
      workers.emplace_back([&, w] {
        for (int i = 0; i < 50; ++i) results[w] = fit_subject(rec, options).k_hat;
      });
    for (auto& t : workers) t.join();
    for (double k : results) CHECK(k == reference.k_hat);
  }

  SUBCASE("multiplicative noise leaves the estimator nearly unbiased") {
    // 1000 noisy subjects at sigma = 3%: the mean estimate stays within 2%
    // of the generating rate.
    const double k = 1.02, f = 0.243, capacity = 45.1;
    double sum = 0.0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
      SyntheticSubjectSpec spec;
      spec.true_k = k;
      spec.true_capacity = capacity;
      spec.f_mvc = f;
      spec.noise_sigma = 0.03;
      spec.rng_seed = 9000 + static_cast<std::uint64_t>(i);
      const auto sessions = generate_sessions(spec, ProtocolSchedule::standard());
      double mvc = 0.0;
      std::vector<SessionMeasurement> rest;
      for (const auto& s : sessions) {
        if (s.time_min == 0.0)
          mvc = s.value;
        else
          rest.push_back(s);
      }
      std::vector<SessionMeasurement> all = rest;
      all.insert(all.begin(), {0.0, mvc, spec.unit});
      const double f_hat = std::min(f * capacity / mvc, 1.0);
      const auto pts = linearize(all, mvc, RelativeLoad(f_hat));
      sum += fit_fatigue_rate(pts).k_hat;
    }
    const double mean = sum / trials;
    CHECK(std::abs(mean - k) / k < 0.02);
  }
}
