#include "doctest.h"

#include "walrus/safari.hpp"

#include <cmath>

using namespace walrus;

namespace {

struct Built {
  Frame frame;
  DualFrame dual;
  RowMat d;
};

Built basis(Family f, int n, int L) {
  FrameSpec s;
  s.family = f;
  s.basis_n = n;
  s.grid_len = L;
  Built b{build_basis_frame(s), {}, {}};
  b.dual = dual_frame(b.frame, 1e-12);
  b.d = frame_derivative(b.frame);
  return b;
}

double max_err(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("safari") {
  TEST_CASE("Legendre N=1 scaled: A=[[1]], B=[1]") {
    const Built b = basis(Family::Legendre, 1, 1024);
    const SSMOperator op = build_scaled_ssm(b.frame, b.dual, b.d);
    CHECK(op.a(0, 0) == 1.0);
    CHECK(op.b(0) == 1.0);
    CHECK(op.measure.is_scaled());
  }

  TEST_CASE("Legendre N=2 by hand: scaled and translated") {
    // scaled: int t phi_1' phi_0 = int t 2sqrt3 = sqrt3; int t phi_1' phi_1 = 1
    // translated: phi_i(0) phi_j(0) + int phi_i' phi_j
    const Built b = basis(Family::Legendre, 2, 4096);
    const double s3 = std::sqrt(3.0);
    Mat as(2, 2), at(2, 2);
    as << 1, 0, s3, 2;
    at << 1, -s3, s3, 3;
    const SSMOperator sc = build_scaled_ssm(b.frame, b.dual, b.d);
    const SSMOperator tr = build_translated_ssm(b.frame, b.dual, b.d, 100);
    CHECK(max_err(sc.a, as) < 1e-3);
    CHECK(max_err(tr.a, at) < 1e-3);
    CHECK(std::abs(sc.b(1) - s3) < 1e-12);
    CHECK(tr.measure.theta == 100);
  }

  TEST_CASE("Fourier N=1 translated: boundary term 1, derivative term 0") {
    const Built b = basis(Family::Fourier, 1, 1024);
    const SSMOperator op = build_translated_ssm(b.frame, b.dual, b.d, 7);
    CHECK(op.a(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(op.b(0) == 1.0);
  }

  TEST_CASE("theta does not enter A or B") {
    const Built b = basis(Family::Fourier, 7, 1024);
    const SSMOperator a = build_translated_ssm(b.frame, b.dual, b.d, 10);
    const SSMOperator c = build_translated_ssm(b.frame, b.dual, b.d, 999);
    CHECK(a.a == c.a);
    CHECK(a.b == c.b);
  }

  TEST_CASE("B is the last grid sample and is shared by both measures") {
    const Built b = basis(Family::Legendre, 6, 2048);
    const SSMOperator sc = build_scaled_ssm(b.frame, b.dual, b.d);
    const SSMOperator tr = build_translated_ssm(b.frame, b.dual, b.d, 5);
    CHECK(sc.b == tr.b);
    for (long i = 0; i < 6; ++i) CHECK(std::abs(sc.b(i) - b.frame.rows(i, 2047)) <= 1e-12);
  }

  TEST_CASE("scaled A splits exactly into identity plus quadrature") {
    const Built b = basis(Family::Fourier, 9, 2048);
    const SSMOperator sc = build_scaled_ssm(b.frame, b.dual, b.d);
    const Mat q = scaled_quadrature_term(b.frame, b.dual, b.d);
    for (long i = 0; i < 9; ++i)
      for (long j = 0; j < 9; ++j) CHECK(sc.a(i, j) == (i == j ? q(i, j) + 1.0 : q(i, j)));
  }

  TEST_CASE("closed forms agree with the numerical construction at L=2^14") {
    for (HippoKind k : {HippoKind::LegS, HippoKind::LegT, HippoKind::FouS, HippoKind::FouT}) {
      const bool leg = k == HippoKind::LegS || k == HippoKind::LegT;
      const bool scaled = k == HippoKind::LegS || k == HippoKind::FouS;
      const Built b = basis(leg ? Family::Legendre : Family::Fourier, 16, 1 << 14);
      const SSMOperator num =
          scaled ? build_scaled_ssm(b.frame, b.dual, b.d) : build_translated_ssm(b.frame, b.dual, b.d, 1);
      for (long n : {1L, 2L, 5L, 16L}) {
        CAPTURE(hippo_name(k));
        CAPTURE(n);
        const SSMOperator cf = build_hippo_closed_form(k, n);
        CHECK(cf.construction == Construction::ClosedFormHiPPO);
        CHECK(cf.measure.is_scaled() == scaled);
        CHECK(max_err(cf.a, num.a.topLeftCorner(n, n)) < 1e-3);
        CHECK(max_err(cf.b, num.b.head(n)) < 1e-12);
      }
    }
  }

  TEST_CASE("closed-form small cases") {
    Mat legs2(2, 2);
    legs2 << 1, 0, std::sqrt(3.0), 2;
    CHECK(max_err(build_hippo_closed_form(HippoKind::LegS, 2).a, legs2) == 0.0);
    CHECK(build_hippo_closed_form(HippoKind::FouS, 1).a(0, 0) == 1.0);
    const Mat legs = build_hippo_closed_form(HippoKind::LegS, 64).a;
    for (long i = 0; i < 64; ++i)
      for (long j = i + 1; j < 64; ++j) CHECK(legs(i, j) == 0.0);
    CHECK_THROWS_AS(build_hippo_closed_form(HippoKind::LegS, 0), ConfigError);
    CHECK_THROWS_AS(parse_hippo("legx"), ConfigError);
  }

  TEST_CASE("numerical operators converge as the grid is refined") {
    for (Family f : {Family::Legendre, Family::Fourier})
      for (bool scaled : {true, false}) {
        Mat a[3];
        int idx = 0;
        for (int L : {1 << 10, 1 << 12, 1 << 14}) {
          const Built b = basis(f, 8, L);
          a[idx++] = scaled ? build_scaled_ssm(b.frame, b.dual, b.d).a : build_translated_ssm(b.frame, b.dual, b.d, 1).a;
        }
        CAPTURE(family_name(f));
        CAPTURE(scaled);
        CHECK(max_err(a[1], a[2]) < max_err(a[0], a[1]));
      }
  }

  TEST_CASE("dimension mismatch is rejected") {
    const Built a = basis(Family::Legendre, 3, 256), b = basis(Family::Legendre, 4, 256);
    CHECK_THROWS_AS(build_scaled_ssm(a.frame, b.dual, a.d), ConfigError);
    CHECK_THROWS_AS(build_translated_ssm(a.frame, a.dual, b.d, 3), ConfigError);
  }
}

TEST_SUITE("safari") {
  TEST_CASE("span operator carries the nontrivial spectrum and exact reconstruction dynamics") {
    FrameSpec s;
    s.order_p = 6;
    s.scale_min = 0;
    s.scale_max = 1;
    s.shift_m = 0.5;
    s.grid_len = 1024;
    const Frame f = build_wavelet_frame(s);
    const DualFrame d = dual_frame(f, 1e-6);
    const RowMat df = frame_derivative(f);
    for (bool scaled : {true, false}) {
      const Measure m = scaled ? Measure::scaled() : Measure::translated(50);
      const SSMOperator full = scaled ? build_scaled_ssm(f, d, df) : build_translated_ssm(f, d, df, 50);
      const SpanOperator sp = build_span_ssm(f, d, df, m);
      REQUIRE(sp.op.n() == d.rank_eff);
      // A U = U A_r + (I - U U^T) X: projected onto the span the actions agree.
      const Mat lhs = d.left.transpose() * full.a * d.left;
      CHECK((lhs - sp.op.a).cwiseAbs().maxCoeff() < 1e-9 * full.a.cwiseAbs().maxCoeff());
      // Off the span, A is the identity (scaled) or zero (translated).
      const Mat perp = Mat::Identity(f.n_full(), f.n_full()) - d.left * d.left.transpose();
      const Mat expect = scaled ? perp : Mat::Zero(f.n_full(), f.n_full());
      CHECK((full.a * perp - expect).cwiseAbs().maxCoeff() < 1e-8 * full.a.cwiseAbs().maxCoeff());
      CHECK((sp.op.b - d.left.transpose() * full.b).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}
