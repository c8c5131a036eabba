#include "doctest.h"

#include "walrus/analysis.hpp"

#include <cmath>
#include <random>

using namespace walrus;

namespace {

std::vector<double> pulse(long n, long start, long width, double a) {
  std::vector<double> u(n, 0.0);
  for (long k = start; k < start + width; ++k) u[k] = a;
  return u;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("overall mse") {
    const std::vector<double> u{1, 2, 3}, z{0, 0, 0}, c{2, 2, 2};
    CHECK(overall_mse(u, u) == 0.0);
    CHECK(overall_mse(z, c) == 4.0);
    CHECK_THROWS(overall_mse(u, std::vector<double>{1, 2}));
  }

  TEST_CASE("quantiles and running summary") {
    CHECK(quantile({3, 1, 2, 4, 5}, 0.5) == 3.0);
    CHECK(quantile({0, 10}, 0.4) == doctest::Approx(4.0));
    std::mt19937_64 g(1);
    std::exponential_distribution<double> ed;
    std::vector<std::vector<double>> runs(37, std::vector<double>(20));
    for (auto& r : runs)
      for (auto& v : r) v = ed(g);
    std::vector<long> steps(20);
    for (int i = 0; i < 20; ++i) steps[i] = i + 1;
    const MseReport rep = summarize_running(runs, steps, {1.0, 3.0});
    CHECK(rep.overall == 2.0);
    for (std::size_t s = 0; s < 20; ++s) {
      CHECK(rep.q40[s] <= rep.median[s]);
      CHECK(rep.median[s] <= rep.q60[s]);
    }
    runs[3].pop_back();
    CHECK_THROWS(summarize_running(runs, steps, {}));
  }

  TEST_CASE("running mse on a constant-coefficient trajectory") {
    // One-element frame: the constant function.
    FrameSpec s;
    s.family = Family::Legendre;
    s.basis_n = 1;
    s.grid_len = 256;
    const Frame f = build_basis_frame(s);
    const DualFrame d = dual_frame(f, 1e-12);
    StateTrajectory t;
    t.times = {10, 20};
    t.states = Mat::Constant(2, 1, 2.0);
    const std::vector<double> u(20, 0.0);
    const auto r = running_mse(t, d.rows.rows() ? Reconstructor(d) : Reconstructor(), u, Measure::scaled());
    REQUIRE(r.size() == 2);
    CHECK(r[0] == doctest::Approx(4.0));
    CHECK(r[1] == doctest::Approx(4.0));
  }

  TEST_CASE("single rectangular spike") {
    const auto u = pulse(4096, 1950, 100, 1.0);
    const auto det = detect_peaks(u, PeakDetector{});
    REQUIRE(det.size() == 1);
    CHECK(std::abs(det[0].position - 2000) <= 2);
    CHECK(det[0].amplitude == 1.0);
  }

  TEST_CASE("two separated spikes") {
    auto u = pulse(4096, 800, 100, 1.0);
    const auto v = pulse(4096, 1300, 100, 0.6);
    for (int i = 0; i < 4096; ++i) u[i] += v[i];
    const auto det = detect_peaks(u, PeakDetector{});
    REQUIRE(det.size() == 2);
    CHECK(std::abs(det[0].position - 850) <= 2);
    CHECK(std::abs(det[1].position - 1350) <= 2);
  }

  TEST_CASE("noise-only false alarms") {
    PeakDetector pd;
    pd.threshold_k = 4.0;
    int with_false = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      std::mt19937_64 g(seed);
      std::normal_distribution<double> nd(0.0, 1e-6);
      std::vector<double> u(4096);
      for (auto& v : u) v = nd(g);
      with_false += !detect_peaks(u, pd).empty();
    }
    CHECK(with_false <= 2);
  }

  TEST_CASE("constant input and short input") {
    CHECK(detect_peaks(std::vector<double>(512, 3.0), PeakDetector{}).empty());
    CHECK_THROWS_AS(detect_peaks(std::vector<double>(10, 0.0), PeakDetector{}), ConfigError);
  }

  TEST_CASE("translation and amplitude covariance") {
    std::mt19937_64 g(2);
    std::normal_distribution<double> nd(0.0, 0.02);
    std::vector<double> u(4096, 0.0);
    for (long c : {600L, 1500L, 2600L}) {
      const auto p = pulse(4096, c, 80, 0.5 + c / 3000.0);
      for (int i = 0; i < 4096; ++i) u[i] += p[i];
    }
    for (auto& v : u) v += nd(g);
    const PeakDetector pd;
    const auto base = detect_peaks(u, pd);
    REQUIRE(!base.empty());
    std::vector<double> shifted(4096, 0.0), scaled(4096);
    for (int i = 0; i + 37 < 4096; ++i) shifted[i + 37] = u[i];
    for (int i = 0; i < 4096; ++i) scaled[i] = 3.5 * u[i];
    const auto s = detect_peaks(shifted, pd);
    REQUIRE(s.size() == base.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i].position == base[i].position + 37);
    const auto a = detect_peaks(scaled, pd);
    REQUIRE(a.size() == base.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].position == base[i].position);
  }

  TEST_CASE("matching") {
    std::vector<Event> truth;
    for (int i = 0; i < 10; ++i) truth.push_back({100 * (i + 1), 1.0 + i});
    auto r = match_peaks(truth, truth, 20);
    CHECK(r.missed == 0);
    CHECK(r.false_peaks == 0);
    CHECK(r.avg_displacement == 0.0);
    CHECK(r.rel_amp_error == 0.0);
    r = match_peaks({}, truth, 20);
    CHECK(r.missed == 10);
    r = match_peaks({{150, 1.0}}, {{100, 1.0}, {200, 1.0}}, 60);
    REQUIRE(r.matches.size() == 1);
    CHECK(r.matches[0].truth_pos == 100);
    CHECK(r.missed == 1);
    r = match_peaks({{105, 1.5}, {400, 1.0}}, {{100, 1.0}}, 20);
    CHECK(r.avg_displacement == 5.0);
    CHECK(r.rel_amp_error == 0.5);
    CHECK(r.false_peaks == 1);
  }

  TEST_CASE("accounting identities on random fixtures") {
    std::mt19937_64 g(3);
    std::uniform_int_distribution<long> pos(0, 5000), cnt(0, 15);
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<Event> t, d;
      for (long i = cnt(g); i > 0; --i) t.push_back({pos(g), 1.0});
      for (long i = cnt(g); i > 0; --i) d.push_back({pos(g), 2.0});
      const auto r = match_peaks(d, t, 150);
      CHECK(r.missed + static_cast<long>(r.matches.size()) == static_cast<long>(t.size()));
      CHECK(r.false_peaks + static_cast<long>(r.matches.size()) == static_cast<long>(d.size()));
      for (const auto& m : r.matches) CHECK(std::abs(m.truth_pos - m.det_pos) <= 150);
    }
  }

  TEST_CASE("win tallies") {
    PeakReport a, b;
    a.missed = 1;
    b.missed = 2;
    auto w = tally_wins({"x"}, std::vector<std::vector<PeakReport>>{{a, b}});
    CHECK(w.percent[0] == 100.0);
    w = tally_wins({"x", "y"}, std::vector<std::vector<PeakReport>>{{a, a}, {a, a}});
    CHECK(w.percent[0] == 100.0);
    CHECK(w.percent[1] == 100.0);
    w = tally_wins({"x", "y"}, std::vector<std::vector<PeakReport>>{{a, b}, {b, a}});
    CHECK(w.wins == std::vector<long>{1, 1});
    w = tally_wins({"x", "y"}, std::vector<std::vector<double>>{{0.1, 0.5, 0.3}, {0.2, 0.4, 0.3}});
    CHECK(w.wins == std::vector<long>{2, 2});
  }

  TEST_CASE("kernel diagnostics fixtures") {
    Mat ideal = Mat::Zero(3, 100);
    ideal.rightCols(40).setOnes();
    auto d = kernel_diagnostics(ideal, 40);
    CHECK(d.out_of_window_energy_ratio == 0.0);
    CHECK(d.mean_dead_zone() == 0.0);
    d = kernel_diagnostics(Mat::Constant(1, 100, 0.3), 50);
    CHECK(d.out_of_window_energy_ratio == doctest::Approx(0.5));
    Mat gap = Mat::Zero(1, 100);
    gap.block(0, 60, 1, 30).setOnes();
    d = kernel_diagnostics(gap, 50);
    CHECK(d.dead_zone_front[0] == 10);
    CHECK(d.dead_zone_back[0] == 10);
    KernelMatrix k;
    k.entries = CRowMat::Constant(2, 10, std::complex<double>(0.0, 1.0));
    CHECK(kernel_diagnostics(k, 5).out_of_window_energy_ratio == doctest::Approx(0.5));
    CHECK_THROWS(kernel_diagnostics(ideal, 0));
  }

  TEST_CASE("detector validation") {
    PeakDetector p;
    p.scales = {64, 32};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.scales = {32};
    p.persistence = 2;
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }
}
