#include "doctest.h"

#include "walrus/runtime.hpp"

#include <cmath>
#include <random>

using namespace walrus;

namespace {

struct Span {
  Frame frame;
  DualFrame dual;
  SpanOperator span;
};

Span span_model(int smin, int smax, int L, const Measure& m) {
  FrameSpec s;
  s.scale_min = smin;
  s.scale_max = smax;
  s.grid_len = L;
  Span out;
  out.frame = build_wavelet_frame(s);
  out.dual = dual_frame(out.frame, s.rcond);
  out.span = build_span_ssm(out.frame, out.dual, frame_derivative(out.frame), m);
  return out;
}

std::vector<double> random_signal(long n, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> nd;
  std::vector<double> u(n);
  for (auto& v : u) v = nd(g);
  return u;
}

double rel(const Vec& a, const Vec& ref) { return (a - ref).norm() / ref.norm(); }

RunConfig mode(RunMode m, long stride = 1) {
  RunConfig r;
  r.mode = m;
  r.emit_stride = stride;
  return r;
}

SSMOperator scalar(double a, double b, const Measure& m) {
  SSMOperator op;
  op.a = Mat::Constant(1, 1, a);
  op.b = Vec::Constant(1, b);
  op.measure = m;
  return op;
}

}  // namespace

TEST_SUITE("runtime") {
  TEST_CASE("translated step with A=0") {
    const Vec c = gbt_step_dense(scalar(0.0, 1.0, Measure::translated(4)), Vec::Zero(1), 1.0, 0, 0.5);
    CHECK(c(0) == doctest::Approx(0.25));
  }

  TEST_CASE("alpha=0 is forward Euler") {
    const SSMOperator op = build_hippo_closed_form(HippoKind::LegS, 5);
    const Vec c0 = Vec::LinSpaced(5, 0.1, 0.5);
    for (long k : {0L, 3L, 50L}) {
      const double s = 1.0 / static_cast<double>(k + 1);
      const Vec euler = c0 - s * op.a * c0 + s * op.b * 0.7;
      CHECK((gbt_step_dense(op, c0, 0.7, k, 0.0) - euler).cwiseAbs().maxCoeff() < 1e-14);
    }
  }

  TEST_CASE("scaled n=1 approaches the fixed point") {
    const SSMOperator op = scalar(1.0, 1.0, Measure::scaled());
    const std::vector<double> u(10000, 1.0);
    const auto t = run_sequential(op, u, mode(RunMode::DenseSequential, 10000));
    CHECK(std::abs(t.final_state()(0) - 1.0) < 1e-3);
  }

  TEST_CASE("singular step is reported") {
    // I + alpha A / theta = 0 at alpha = 1
    CHECK_THROWS_AS(gbt_step_dense(scalar(-4.0, 1.0, Measure::translated(4)), Vec::Zero(1), 1.0, 0, 1.0),
                    NumericalError);
  }

  TEST_CASE("trajectory shape and trivial inputs") {
    const SSMOperator op = build_hippo_closed_form(HippoKind::FouS, 9);
    const auto diag = full_diagonal(diagonalize(op), Mat::Identity(9, 9));
    const std::vector<double> zero(100, 0.0);
    for (auto m : {RunMode::DenseSequential, RunMode::DiagonalSequential}) {
      const auto t = m == RunMode::DenseSequential ? run_sequential(op, zero, mode(m, 7))
                                                   : run_sequential(diag, zero, mode(m, 7));
      CHECK(t.states.rows() == 15);
      CHECK(t.times.back() == 100);
      CHECK(t.states.cwiseAbs().maxCoeff() == 0.0);
    }
    const auto empty = run_sequential(op, std::vector<double>{}, mode(RunMode::DenseSequential));
    CHECK(empty.states.rows() == 0);
    const auto u = random_signal(100, 1);
    const auto full = run_sequential(op, u, mode(RunMode::DenseSequential));
    const auto one = run_sequential(op, u, mode(RunMode::DenseSequential, 100));
    CHECK(one.states.rows() == 1);
    CHECK(one.final_state() == full.final_state());
  }

  TEST_CASE("dense and diagonal agree on a WaLRUS scaled operator") {
    const Span s = span_model(0, 1, 2048, Measure::scaled());
    REQUIRE(s.span.op.n() <= 128);
    const auto diag = full_diagonal(diagonalize(s.span.op), Mat::Identity(s.span.op.n(), s.span.op.n()));
    const auto u = random_signal(2048, 2);
    const Vec a = run_sequential(s.span.op, u, mode(RunMode::DenseSequential, 2048)).final_state();
    const Vec b = run_sequential(diag, u, mode(RunMode::DiagonalSequential, 2048)).final_state();
    CHECK(rel(b, a) < 1e-6);
  }

  TEST_CASE("kernel application matches stepping") {
    for (const Measure& m : {Measure::translated(700), Measure::scaled()}) {
      const Span s = span_model(0, 1, 2048, m);
      const long n = s.span.op.n();
      const auto diag = full_diagonal(diagonalize(s.span.op), Mat::Identity(n, n));
      const auto u = random_signal(2048, 3);
      const Vec a = run_sequential(diag, u, mode(RunMode::DiagonalSequential, 2048)).final_state();
      const KernelMatrix k = build_kernel(diag, 2048, 0.5);
      const Vec b = apply_kernel(k, u, diag.b_tilde, diag.v_out);
      CHECK(rel(b, a) < 1e-6);
      const Vec c = run_sequential(diag, u, mode(RunMode::Kernel, 2048)).final_state();
      CHECK(rel(c, a) < 1e-6);
    }
  }

  TEST_CASE("translated kernel mode emits the full running trajectory") {
    const SSMOperator op = build_hippo_closed_form(HippoKind::FouT, 15, 300);
    const auto diag = full_diagonal(diagonalize(op), Mat::Identity(15, 15));
    const auto u = random_signal(1000, 4);
    const auto a = run_sequential(diag, u, mode(RunMode::DiagonalSequential, 50));
    const auto b = run_sequential(diag, u, mode(RunMode::Kernel, 50));
    REQUIRE(a.states.rows() == b.states.rows());
    CHECK(a.times == b.times);
    for (long r = 0; r < a.states.rows(); ++r)
      CHECK(rel(b.states.row(r).transpose(), a.states.row(r).transpose()) < 1e-6);
  }

  TEST_CASE("zero-decay translated mode gives a constant kernel row") {
    DiagonalSSM d;
    d.lambdas = CVec::Zero(1);
    d.b_tilde = CVec::Ones(1);
    d.v_out = CMat::Ones(1, 1);
    d.measure = Measure::translated(8);
    d.n_eff = 1;
    const KernelMatrix k = build_kernel(d, 64, 0.5);
    for (long j = 0; j < 64; ++j) CHECK(std::abs(k.entries(0, j) - 0.125) < 1e-15);
  }

  TEST_CASE("apply_kernel: zero input and last-sample impulse") {
    const SSMOperator op = build_hippo_closed_form(HippoKind::FouS, 7);
    const auto diag = full_diagonal(diagonalize(op), Mat::Identity(7, 7));
    const KernelMatrix k = build_kernel(diag, 500, 0.5);
    CHECK(apply_kernel(k, std::vector<double>(500, 0.0), diag.b_tilde, diag.v_out).norm() == 0.0);
    std::vector<double> imp(500, 0.0);
    imp.back() = 1.0;
    const Vec c = apply_kernel(k, imp, diag.b_tilde, diag.v_out);
    const Vec expect = (diag.v_out * diag.b_tilde.asDiagonal() * k.entries.col(499)).real();
    CHECK((c - expect).norm() < 1e-14 * std::max(1.0, expect.norm()));
    CHECK_THROWS(apply_kernel(k, std::vector<double>(10, 0.0), diag.b_tilde, diag.v_out));
  }

  TEST_CASE("fft and direct running states agree") {
    const Span s = span_model(0, 1, 2048, Measure::translated(1000));
    const long n = s.span.op.n();
    const auto diag = full_diagonal(diagonalize(s.span.op), Mat::Identity(n, n));
    const auto u = random_signal(4096, 5);
    const KernelMatrix k = build_kernel(diag, 4096, 0.5);
    const CRowMat a = kernel_running_states(k, u, diag.b_tilde);
    const CRowMat b = kernel_running_states_direct(k, u, diag.b_tilde);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8 * b.cwiseAbs().maxCoeff());
  }

  TEST_CASE("linearity") {
    const SSMOperator op = build_hippo_closed_form(HippoKind::LegT, 12, 400);
    const auto u1 = random_signal(1500, 6), u2 = random_signal(1500, 7);
    std::vector<double> mix(1500);
    for (int i = 0; i < 1500; ++i) mix[i] = 2.0 * u1[i] - 0.5 * u2[i];
    const RunConfig rc = mode(RunMode::DenseSequential, 1500);
    const Vec a = run_sequential(op, u1, rc).final_state(), b = run_sequential(op, u2, rc).final_state();
    const Vec c = run_sequential(op, mix, rc).final_state();
    CHECK((c - (2.0 * a - 0.5 * b)).norm() < 1e-8 * std::max(1.0, c.norm()));
  }

  TEST_CASE("translated causality") {
    const long theta = 300, L = 16384;
    const SSMOperator op = build_hippo_closed_form(HippoKind::FouT, 15, theta);
    const auto diag = full_diagonal(diagonalize(op), Mat::Identity(15, 15));
    const KernelMatrix k = build_kernel(diag, L, 0.5);
    REQUIRE(k.effective_length < L);
    auto u = random_signal(L, 8);
    const Vec a = run_sequential(diag, u, mode(RunMode::DiagonalSequential, L)).final_state();
    for (long i = 0; i < L - k.effective_length; ++i) u[i] += 5.0;
    const Vec b = run_sequential(diag, u, mode(RunMode::DiagonalSequential, L)).final_state();
    CHECK((b - a).norm() < 1e-8 * a.norm());
  }

  TEST_CASE("scaled dilation") {
    const SSMOperator op = build_hippo_closed_form(HippoKind::LegS, 8);
    const long L = 8192;
    std::vector<double> u(L), u2(L / 2);
    auto f = [](double t) { return std::sin(6.0 * t) + 0.5 * t * t; };
    for (long k = 0; k < L; ++k) u[k] = f(static_cast<double>(k) / L);
    for (long k = 0; k < L / 2; ++k) u2[k] = f(2.0 * static_cast<double>(k) / L);
    const RunConfig rc = mode(RunMode::DenseSequential, L);
    const Vec a = run_sequential(op, u, rc).final_state(), b = run_sequential(op, u2, rc).final_state();
    Eigen::Index ia, ib;
    a.cwiseAbs().maxCoeff(&ia);
    b.cwiseAbs().maxCoeff(&ib);
    CHECK((a / a(ia) - b / b(ib)).cwiseAbs().maxCoeff() < 1e-2);
  }

  TEST_CASE("reconstruction") {
    const Span s = span_model(0, 3, 4096, Measure::scaled());
    std::mt19937_64 g(9);
    std::normal_distribution<double> nd;
    // random combination of frame rows, cut to the kept singular directions
    const Vec z = s.dual.left.transpose() * Vec::NullaryExpr(s.frame.n_full(), [&] { return nd(g); });
    const Vec f = s.span.synthesis * s.span.sigma.array().square().matrix().cwiseProduct(z);
    // direct projection
    const Vec c = analyze(s.frame, f);
    CHECK(rel(reconstruct(c, s.frame, s.dual, Measure::scaled(), 4096), f) < 1e-6);
    CHECK(reconstruct(Vec::Zero(c.size()), s.frame, s.dual, Measure::scaled(), 100).norm() == 0.0);
    CHECK_THROWS(reconstruct(c, s.frame, s.dual, Measure::translated(500), 100));
    // end to end
    const std::vector<double> u(f.data(), f.data() + f.size());
    const Vec y = run_sequential(s.span.op, u, mode(RunMode::DenseSequential, 4096)).final_state();
    const Vec hat = Reconstructor(s.span).window(y, Measure::scaled(), 4096);
    CHECK((hat - f).squaredNorm() / f.squaredNorm() < 1e-3);
  }

  TEST_CASE("resample") {
    const Vec g = Vec::LinSpaced(5, 0.0, 1.0);
    const Vec r = resample(g, 9);
    for (int i = 0; i < 9; ++i) CHECK(r(i) == doctest::Approx(i / 8.0));
    CHECK(resample(g, 1)(0) == 1.0);
  }

  TEST_CASE("run config validation") {
    RunConfig r;
    r.alpha = 1.5;
    CHECK_THROWS_AS(r.validate(), ConfigError);
    r.alpha = 0.5;
    r.emit_stride = 0;
    CHECK_THROWS_AS(r.validate(), ConfigError);
    CHECK(parse_run_mode("kernel") == RunMode::Kernel);
    CHECK_THROWS_AS(parse_run_mode("fast"), ConfigError);
  }
}
