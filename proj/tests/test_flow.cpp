#include <doctest.h>

#include <cstdlib>
#include <random>

#include "mceus/error.hpp"
#include "mceus/flow.hpp"
#include "oracles.hpp"

using namespace mceus;

namespace {

Eigen::ArrayXd samples(std::initializer_list<double> v) {
  Eigen::ArrayXd a(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) a(i++) = x;
  return a;
}

std::vector<double> to_vector(const Eigen::ArrayXd& a) { return {a.data(), a.data() + a.size()}; }

}  // namespace

TEST_CASE("minip_window") {
  CHECK(minip_window(samples({0.3, 0.5, 0.2, 0.7, 0.4})) == 0.2);
  CHECK(minip_window(Eigen::ArrayXd::Constant(7, 0.35)) == 0.35);
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(10, 0.25);
  w(0) += 0.3;
  w(4) += 0.1;
  w(9) += 0.6;
  CHECK(minip_window(w) == 0.25);
  CHECK_THROWS_AS(minip_window(Eigen::ArrayXd(0)), Error);
}

TEST_CASE("perip_window") {
  const auto five = samples({0.3, 0.5, 0.2, 0.7, 0.4});
  CHECK(perip_window(five, 20.0) == minip_window(five));
  Eigen::ArrayXd ten(10);
  for (int i = 0; i < 10; ++i) ten(i) = 0.1 * (10 - i);  // shuffled order is irrelevant
  CHECK(perip_window(ten, 20.0) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(perip_window(ten, 100.0) == doctest::Approx(ten.mean()).epsilon(1e-15));
  CHECK(perip_window(Eigen::ArrayXd::Constant(9, 0.1), 50.0) == 0.1);
  CHECK_THROWS_AS(perip_window(ten, 0.0), Error);
  CHECK_THROWS_AS(perip_window(Eigen::ArrayXd(0), 20.0), Error);
}

TEST_CASE("stat_window") {
  SUBCASE("constant window returns the constant for any alpha") {
    for (double alpha : {0.0, 1.7, 2.7, 50.0}) {
      const auto s = stat_window(Eigen::ArrayXd::Constant(20, 0.1), alpha);
      CHECK(s.sigma == 0.0);
      CHECK(s.estimate == 0.1);
    }
  }
  SUBCASE("clamps at zero when alpha*sigma exceeds the mean") {
    CHECK(stat_window(samples({0, 0, 0, 0, 1}), 10.0).estimate == 0.0);
  }
  SUBCASE("frozen two-pass values") {
    // Computed beforehand with an independent two-pass mean/deviation:
    // u = 0.1, sigma = sqrt(0.00016), s = u - 2 sigma.
    const auto s = stat_window(samples({0.10, 0.12, 0.08, 0.10, 0.10}), 2.0);
    CHECK(s.mean == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(s.sigma == doctest::Approx(0.012649110640673514).epsilon(1e-12));
    CHECK(s.estimate == doctest::Approx(0.07470177871865298).epsilon(1e-12));
    CHECK(s.alpha == 2.0);
  }
  SUBCASE("templated on the scalar type") {
    Eigen::ArrayXf f(3);
    f << 0.2f, 0.2f, 0.2f;
    const WindowStats<float> s = stat_window(f, 1.0f);
    CHECK(s.estimate == 0.2f);
  }
  CHECK_THROWS_AS(stat_window(samples({0.5}), 1.0), Error);
}

TEST_CASE("window operations agree with the two-pass oracle and keep their ordering") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> width(2, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> alphas(0.0, 5.0);
  std::uniform_real_distribution<double> pct(1.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::ArrayXd x(width(rng));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = unit(rng);
    const double a1 = alphas(rng);
    const double a2 = a1 + alphas(rng);
    const auto s1 = stat_window(x, a1);
    const auto s2 = stat_window(x, a2);
    const auto ref = oracle::two_pass(to_vector(x), a1);
    CHECK(std::abs(s1.mean - ref.mean) <= 1e-12);
    CHECK(std::abs(s1.sigma - ref.sigma) <= 1e-9);
    CHECK(std::abs(s1.estimate - ref.estimate) <= 1e-9);

    // Bounds and alpha monotonicity.
    const double mean = x.mean();
    const double minip = minip_window(x);
    const double perip = perip_window(x, pct(rng));
    CHECK(0.0 <= minip);
    CHECK(minip <= perip + 1e-15);
    CHECK(perip <= mean + 1e-12);
    CHECK(0.0 <= s1.estimate);
    CHECK(s1.estimate <= s1.mean);
    CHECK(s2.estimate <= s1.estimate);
    CHECK(stat_window(x, 0.0).estimate == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("sparse flow leaves MinIP exactly at the baseline") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double base = 0.5 * unit(rng);
    Eigen::ArrayXd x = Eigen::ArrayXd::Constant(20, base);
    const int lit = static_cast<int>(unit(rng) * 19.0);  // strictly fewer than w
    for (int i = 0; i < lit; ++i) x((i * 7) % 20) += 0.5 * unit(rng);
    CHECK(minip_window(x) == base);
  }
}

TEST_CASE("project_loop") {
  std::mt19937_64 rng(3);
  SUBCASE("N == w yields one frame") {
    const auto frames = oracle::random_frames(rng, 4, 3, 6);
    CHECK(project_loop(frames, {6}, Method::kStat).size() == 1);
    CHECK(project_loop(frames, {2}, Method::kMinip).size() == 5);
  }
  SUBCASE("constant loop reproduces the frame for every method") {
    const Frame f(Image::Constant(3, 5, 0.37));
    const std::vector<Frame> frames(12, f);
    for (Method m : {Method::kMinip, Method::kPerip, Method::kStat}) {
      const auto out = project_loop(frames, {5}, m, {2.7, 20.0});
      REQUIRE(out.size() == 8);
      for (const auto& o : out) CHECK(o == f);
    }
  }
  SUBCASE("random 8x8x30 stat output matches per-pixel brute force") {
    const auto frames = oracle::random_frames(rng, 8, 8, 30);
    const auto out = project_loop(frames, {7}, Method::kStat, {1.3, 20.0});
    REQUIRE(out.size() == 24);
    double worst = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (Eigen::Index y = 0; y < 8; ++y) {
        for (Eigen::Index x = 0; x < 8; ++x) {
          std::vector<double> window;
          for (std::size_t t = k; t < k + 7; ++t) window.push_back(frames[t].at(x, y));
          worst = std::max(worst, std::abs(out[k].at(x, y) - oracle::two_pass(window, 1.3).estimate));
        }
      }
    }
    CHECK(worst <= 1e-9);
  }
  SUBCASE("loop shorter than window") {
    const auto frames = oracle::random_frames(rng, 2, 2, 4);
    try {
      project_loop(frames, {5}, Method::kStat);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "loop shorter than window");
    }
  }
  SUBCASE("method none passes frames through") {
    const auto frames = oracle::random_frames(rng, 3, 3, 4);
    const auto out = project_loop(frames, {20}, Method::kNone);
    REQUIRE(out.size() == 4);
    CHECK(out[2] == frames[2]);
  }
}

TEST_CASE("project_loop output does not depend on the thread count") {
  std::mt19937_64 rng(8);
  const auto frames = oracle::random_frames(rng, 13, 11, 25);
  ::setenv("MCEUS_THREADS", "1", 1);
  const auto serial = project_loop(frames, {6}, Method::kPerip, {2.7, 35.0});
  ::setenv("MCEUS_THREADS", "5", 1);
  const auto threaded = project_loop(frames, {6}, Method::kPerip, {2.7, 35.0});
  ::unsetenv("MCEUS_THREADS");
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t k = 0; k < serial.size(); ++k) CHECK(serial[k] == threaded[k]);
}

TEST_CASE("update granularity on a strictly increasing ramp") {
  const int n = 60;
  const int w = 20;
  std::vector<Frame> frames;
  for (int t = 0; t < n; ++t) frames.emplace_back(Image::Constant(1, 1, 0.01 + 0.015 * t));
  const auto minip = project_loop(frames, {w}, Method::kMinip);
  const auto stat = project_loop(frames, {w}, Method::kStat, {1.0, 20.0});
  for (std::size_t k = 0; k < minip.size(); ++k) {
    CHECK(minip[k].at(0, 0) == frames[k].at(0, 0));  // lags by w - 1 samples
  }
  for (std::size_t k = 1; k < stat.size(); ++k) CHECK(stat[k].at(0, 0) > stat[k - 1].at(0, 0));
}

TEST_CASE("time series extraction") {
  const std::vector<Frame> constant(6, Frame(Image::Constant(4, 4, 0.2)));
  const auto series = extract_time_series(constant, 1, 2);
  REQUIRE(series.size() == 6);
  for (const auto& p : series) CHECK(p.intensity == 0.2);
  CHECK(series[3].t == 3);

  std::mt19937_64 rng(4);
  const auto frames = oracle::random_frames(rng, 5, 5, 8);
  const Roi one = make_roi("px", {{2, 3}, {3, 3}, {3, 4}, {2, 4}}, 5, 5);
  REQUIRE(one.pixel_count() == 1);
  const auto by_roi = extract_time_series(frames, one);
  const auto by_pixel = extract_time_series(frames, 2, 3);
  for (std::size_t t = 0; t < frames.size(); ++t) CHECK(by_roi[t].intensity == by_pixel[t].intensity);

  CHECK_THROWS_AS(extract_time_series(frames, 5, 0), Error);
  CHECK_THROWS_AS(extract_time_series(frames, -1, 0), Error);
  Roi empty = one;
  empty.mask.setConstant(false);
  CHECK_THROWS_AS(extract_time_series(frames, empty), Error);
}

TEST_CASE("stat series on a noiseless wash-in settles at the plateau") {
  // Nondecreasing per-pixel input: a ramp that saturates at 0.4.
  std::vector<Frame> frames;
  for (int t = 0; t < 70; ++t) frames.emplace_back(Image::Constant(2, 2, std::min(0.4, 0.02 * t)));
  const auto stat = project_loop(frames, {20}, Method::kStat, {2.7, 20.0});
  const auto series = extract_time_series(stat, 1, 1);
  for (const auto& p : series) {
    if (p.t >= 20) CHECK(p.intensity == 0.4);  // windows fully inside the plateau
  }
}

TEST_CASE("time series CSV uses 9 significant digits") {
  const std::string csv = time_series_csv({{0, 0.123456789123}, {1, 1.0}, {2, 0.0}});
  CHECK(csv == "t,intensity\n0,0.123456789\n1,1\n2,0\n");
}
