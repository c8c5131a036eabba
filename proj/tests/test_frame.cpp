#include "doctest.h"

#include "walrus/dual.hpp"
#include "walrus/frame.hpp"
#include "walrus/signals.hpp"

#include <cmath>

using namespace walrus;

namespace {

FrameSpec wavelet_spec(int p, int smin, int smax, double m, int L) {
  FrameSpec s;
  s.family = Family::Daubechies;
  s.order_p = p;
  s.scale_min = smin;
  s.scale_max = smax;
  s.shift_m = m;
  s.grid_len = L;
  return s;
}

FrameSpec basis_spec(Family f, int n, int L) {
  FrameSpec s;
  s.family = f;
  s.basis_n = n;
  s.grid_len = L;
  return s;
}

Mat gram(const Frame& f) {
  const Vec w = quadrature_weights(f.grid_len());
  return f.rows * w.asDiagonal() * f.rows.transpose();
}

// f = Phi^T a lies in the row span.
Vec span_signal(const Frame& f, SplitMix64& rng) {
  Vec a(f.n_full());
  for (long i = 0; i < a.size(); ++i) a(i) = rng.gaussian();
  return f.rows.transpose() * a;
}

}  // namespace

TEST_SUITE("frame") {
  TEST_CASE("Legendre rows: constant first row and sqrt3 at t=1") {
    const Frame f = build_basis_frame(basis_spec(Family::Legendre, 4, 1024));
    for (long k = 0; k < f.grid_len(); ++k) CHECK(f.rows(0, k) == 1.0);
    CHECK(f.rows(1, f.grid_len() - 1) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(f.rows(1, 0) == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-15));
    // P_3(x) = (5x^3 - 3x)/2 scaled by sqrt7, spot check at t = 0.3
    const double x = 2.0 * (307.0 / 1023.0) - 1.0;
    CHECK(f.rows(3, 307) == doctest::Approx(std::sqrt(7.0) * (5 * x * x * x - 3 * x) / 2).epsilon(1e-12));
  }

  TEST_CASE("Fourier Gram matrix is the identity at L=4096") {
    const Frame f = build_basis_frame(basis_spec(Family::Fourier, 3, 4096));
    CHECK((gram(f) - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-6);
    const Frame g = build_basis_frame(basis_spec(Family::Fourier, 33, 4096));
    CHECK((gram(g) - Mat::Identity(33, 33)).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("D4 scale-0 dyadic frame: unclipped copies are nearly orthonormal") {
    const Frame f = build_wavelet_frame(wavelet_spec(2, 0, 0, 1.0, 1024));
    const Mat g = gram(f);
    // Copies cut by the boundary are renormalized fragments and may coincide.
    std::vector<long> inside;
    for (long i = 0; i < f.rows.rows(); ++i)
      if (f.rows(i, 0) == 0.0 && f.rows(i, f.rows.cols() - 1) == 0.0) inside.push_back(i);
    REQUIRE(inside.size() >= 2);
    for (long a : inside)
      for (long b : inside)
        if (a != b) CHECK(std::abs(g(a, b)) < 0.1);
  }

  TEST_CASE("wavelet rows have unit discrete norm and finite entries") {
    const Frame f = build_wavelet_frame(wavelet_spec(11, 0, 3, 0.25, 2048));
    REQUIRE(f.n_full() == static_cast<long>(f.descriptors.size()));
    CHECK(f.rows.allFinite());
    for (long i = 0; i < f.n_full(); ++i) CHECK(std::abs(discrete_norm(f.rows.row(i)) - 1.0) < 1e-6);
    // father copies live at scale_max only
    for (const auto& d : f.descriptors)
      if (d.kind == ElementKind::Father) CHECK(d.scale == 3);
  }

  TEST_CASE("halving m halves the shift increment") {
    for (int scale : {-1, 0, 2}) {
      CAPTURE(scale);
      const double s1 = wavelet_offset(11, 1.0, scale, 1), s2 = wavelet_offset(11, 0.5, scale, 1);
      CHECK(s2 == s1 / 2);
      const auto c1 = static_cast<long>(wavelet_shift_range(11, 1.0, scale).size());
      const auto c2 = static_cast<long>(wavelet_shift_range(11, 0.5, scale).size());
      // same open interval covered with half the step
      CHECK(c2 >= 2 * c1 - 1);
      CHECK(c2 <= 2 * c1 + 1);
    }
  }

  TEST_CASE("m=1 reproduces integer translates at the dilated scale") {
    // At scale i the element is f((t - off) (2p-1) / 2^i), so integer translates have step 2^i/(2p-1).
    CHECK(wavelet_offset(2, 1.0, 0, 3) == doctest::Approx(1.0));
    CHECK(wavelet_offset(2, 1.0, 1, 3) == doctest::Approx(2.0));
  }

  TEST_CASE("same spec gives a bit-identical frame") {
    const auto spec = wavelet_spec(11, -1, 1, 0.25, 1024);
    const Frame a = build_wavelet_frame(spec), b = build_wavelet_frame(spec);
    REQUIRE(a.rows.rows() == b.rows.rows());
    CHECK(a.rows == b.rows);
    CHECK(a.descriptors == b.descriptors);
  }

  TEST_CASE("invalid specs are configuration errors") {
    CHECK_THROWS_AS(build_wavelet_frame(wavelet_spec(1, 0, 0, 1.0, 1024)), ConfigError);
    CHECK_THROWS_AS(build_wavelet_frame(wavelet_spec(11, 2, 1, 1.0, 1024)), ConfigError);
    CHECK_THROWS_AS(build_wavelet_frame(wavelet_spec(11, 0, 1, 1.0, 1000)), ConfigError);
    CHECK_THROWS_AS(build_basis_frame(basis_spec(Family::Legendre, 0, 1024)), ConfigError);
  }

  TEST_CASE("frame_derivative: constant, linear and Legendre n=2 rows") {
    const long L = 4096;
    Frame f;
    f.rows.resize(3, L);
    const Vec t = grid_points(L);
    f.rows.row(0).setConstant(2.5);
    f.rows.row(1) = t.transpose();
    // sqrt5 P_2(2t-1) = sqrt5 (6t^2 - 6t + 1), derivative sqrt5 (12t - 6)
    f.rows.row(2) = (std::sqrt(5.0) * (6.0 * t.array().square() - 6.0 * t.array() + 1.0)).matrix().transpose();
    const RowMat d = frame_derivative(f);
    CHECK(d.row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((d.row(1).array() - 1.0).abs().maxCoeff() < 1e-10);
    const Eigen::ArrayXd exact = std::sqrt(5.0) * (12.0 * t.array() - 6.0);
    CHECK((d.row(2).transpose().array() - exact).abs().maxCoeff() < 1e-4);
  }
}

TEST_SUITE("frame") {
  TEST_CASE("discretely orthonormal frame is self-dual") {
    Frame f = build_basis_frame(basis_spec(Family::Legendre, 8, 1 << 14));
    const Vec w = quadrature_weights(f.rows.cols());
    const Mat g = f.rows * w.asDiagonal() * f.rows.transpose();
    const Mat linv = g.llt().matrixL().solve(Mat::Identity(8, 8));
    f.rows = linv * f.rows;
    const DualFrame d = dual_frame(f, 1e-12);
    CHECK(d.rank_eff == 8);
    CHECK((d.rows - f.rows).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("Legendre dual approaches the rows as the grid refines") {
    double prev = 1.0;
    for (int L : {1 << 10, 1 << 12, 1 << 14}) {
      const Frame f = build_basis_frame(basis_spec(Family::Legendre, 8, L));
      const double err = (dual_frame(f, 1e-12).rows - f.rows).cwiseAbs().maxCoeff();
      CHECK(err < prev / 10.0);
      prev = err;
    }
    CHECK(prev < 1e-5);
  }

  TEST_CASE("two identical rows: each dual row is half the row") {
    const Frame base = build_basis_frame(basis_spec(Family::Fourier, 2, 512));
    Frame f;
    f.rows.resize(2, 512);
    f.rows.row(0) = base.rows.row(1);
    f.rows.row(1) = base.rows.row(1);
    const DualFrame d = dual_frame(f, 1e-8);
    CHECK(d.rank_eff == 1);
    CHECK((d.rows.row(0) - 0.5 * f.rows.row(0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((d.rows.row(1) - 0.5 * f.rows.row(1)).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("project then synthesize is the identity on the row span") {
    for (const auto& spec : {wavelet_spec(11, 0, 3, 0.25, 2048), wavelet_spec(4, -1, 1, 0.5, 1024),
                             basis_spec(Family::Fourier, 17, 1024)}) {
      const Frame f = build_frame(spec);
      const DualFrame d = dual_frame(f, spec.family == Family::Daubechies ? 1e-9 : 1e-12);
      SplitMix64 rng(7);
      for (int i = 0; i < 20; ++i) {
        const Vec x = span_signal(f, rng);
        const Vec y = synthesize(d, analyze(f, x));
        CHECK((y - x).norm() / x.norm() < 1e-6);
      }
    }
  }

  TEST_CASE("truncated dual is the identity on the kept singular subspace") {
    const Frame f = build_wavelet_frame(wavelet_spec(11, 0, 3, 0.25, 2048));
    const DualFrame d = dual_frame(f, 0.01);
    const Mat s = span_synthesis(d);
    SplitMix64 rng(3);
    for (int i = 0; i < 20; ++i) {
      Vec y(d.rank_eff);
      for (long k = 0; k < y.size(); ++k) y(k) = rng.gaussian();
      const Vec x = s * y;
      CHECK((synthesize(d, analyze(f, x)) - x).norm() / x.norm() < 1e-6);
    }
    // operator form: dual^T Phi W restricted to the span is the identity
    const Vec w = quadrature_weights(f.grid_len());
    const Mat p = d.rows.transpose() * (f.rows * w.asDiagonal()) * s;
    CHECK((p - s).norm() / s.norm() < 1e-6);
  }

  TEST_CASE("rank_eff counts singular values above rcond * sigma_max and is monotone") {
    const Frame f = build_wavelet_frame(wavelet_spec(11, 0, 2, 0.25, 1024));
    long prev = f.n_full() + 1;
    for (double rc : {1e-10, 1e-6, 1e-3, 1e-2, 0.1, 0.5, 0.9}) {
      const DualFrame d = dual_frame(f, rc);
      long want = 0;
      for (double s : d.sigma) want += s > rc * d.sigma(0);
      CHECK(d.rank_eff == want);
      CHECK(d.rank_eff <= prev);
      prev = d.rank_eff;
    }
  }

  TEST_CASE("rcond=1 discards everything") {
    const Frame f = build_basis_frame(basis_spec(Family::Legendre, 4, 256));
    CHECK_THROWS_AS(dual_frame(f, 1.0), NumericalError);
  }
}
