#include "walrus/safari.hpp"

#include <cmath>
#include <numbers>

namespace walrus {

namespace {

void check_dims(const Frame& frame, const DualFrame& dual, const RowMat& dframe) {
  if (dual.rows.rows() != frame.n_full() || dual.rows.cols() != frame.grid_len() ||
      dframe.rows() != frame.n_full() || dframe.cols() != frame.grid_len())
    throw ConfigError("frame, dual and derivative dimensions differ");
}

}  // namespace

std::string hippo_name(HippoKind k) {
  switch (k) {
    case HippoKind::LegS: return "legs";
    case HippoKind::LegT: return "legt";
    case HippoKind::FouS: return "fous";
    case HippoKind::FouT: return "fout";
  }
  return "?";
}

HippoKind parse_hippo(const std::string& s) {
  if (s == "legs") return HippoKind::LegS;
  if (s == "legt") return HippoKind::LegT;
  if (s == "fous") return HippoKind::FouS;
  if (s == "fout") return HippoKind::FouT;
  throw ConfigError("unsupported closed-form kind '" + s + "' (expected legs, legt, fous or fout)");
}

Mat scaled_quadrature_term(const Frame& frame, const DualFrame& dual, const RowMat& dframe) {
  check_dims(frame, dual, dframe);
  const long L = frame.grid_len();
  const Vec tw = grid_points(L).cwiseProduct(quadrature_weights(L));
  return (dframe * tw.asDiagonal()) * dual.rows.transpose();
}

SSMOperator build_scaled_ssm(const Frame& frame, const DualFrame& dual, const RowMat& dframe) {
  SSMOperator op;
  op.a = scaled_quadrature_term(frame, dual, dframe);
  op.a.diagonal().array() += 1.0;
  op.b = frame.rows.col(frame.grid_len() - 1);
  op.measure = Measure::scaled();
  op.frame_id = frame.id;
  return op;
}

SSMOperator build_translated_ssm(const Frame& frame, const DualFrame& dual, const RowMat& dframe, long theta) {
  check_dims(frame, dual, dframe);
  const Vec w = quadrature_weights(frame.grid_len());
  SSMOperator op;
  op.a = (dframe * w.asDiagonal()) * dual.rows.transpose();
  op.a.noalias() += frame.rows.col(0) * dual.rows.col(0).transpose();
  op.b = frame.rows.col(frame.grid_len() - 1);
  op.measure = Measure::translated(theta);
  op.frame_id = frame.id;
  return op;
}

SSMOperator build_hippo_closed_form(HippoKind kind, long n, long theta) {
  if (n < 1) throw ConfigError("closed-form operator size must be >= 1");
  SSMOperator op;
  op.construction = Construction::ClosedFormHiPPO;
  op.frame_id = "closed:" + hippo_name(kind) + ":n=" + std::to_string(n);
  op.a = Mat::Zero(n, n);
  op.b = Vec::Zero(n);
  const double pi = std::numbers::pi;
  switch (kind) {
    case HippoKind::LegS:
    case HippoKind::LegT:
      for (long i = 0; i < n; ++i) {
        op.b(i) = std::sqrt(2.0 * i + 1.0);
        for (long j = 0; j < n; ++j) {
          const double s = std::sqrt((2.0 * i + 1.0) * (2.0 * j + 1.0));
          if (kind == HippoKind::LegS)
            op.a(i, j) = i > j ? s : (i == j ? i + 1.0 : 0.0);
          else
            op.a(i, j) = i >= j ? s : (((i + j) % 2) ? -s : s);
        }
      }
      break;
    case HippoKind::FouS:
    case HippoKind::FouT: {
      // Index 2m-1 holds cos(2 pi m t), index 2m holds sin(2 pi m t).
      auto is_cos = [](long i) { return i % 2 == 1; };
      auto freq = [](long i) { return static_cast<double>((i + 1) / 2); };
      for (long i = 0; i < n; ++i) op.b(i) = i == 0 ? 1.0 : (is_cos(i) ? std::sqrt(2.0) : 0.0);
      if (kind == HippoKind::FouT) {
        op.a = op.b * op.b.transpose();
        for (long i = 1; i < n; ++i)
          if (is_cos(i) && i + 1 < n) {
            op.a(i, i + 1) = -2.0 * pi * freq(i);
            op.a(i + 1, i) = 2.0 * pi * freq(i);
          }
      } else {
        op.a.setIdentity();
        for (long i = 1; i < n; ++i) {
          const double m = freq(i);
          if (is_cos(i)) {
            op.a(i, 0) += std::sqrt(2.0);
            for (long j = 1; j < n; ++j) {
              if (!is_cos(j)) continue;
              const double k = freq(j);
              op.a(i, j) += k == m ? 0.5 : 2.0 * m * m / (m * m - k * k);
            }
            if (i + 1 < n) op.a(i, i + 1) -= pi * m;
          } else {
            op.a(i, i - 1) += pi * m;
            for (long j = 2; j < n; j += 2) {
              const double k = freq(j);
              op.a(i, j) -= k == m ? 0.5 : 2.0 * m * k / (k * k - m * m);
            }
          }
        }
      }
      break;
    }
  }
  op.measure = (kind == HippoKind::LegS || kind == HippoKind::FouS) ? Measure::scaled() : Measure::translated(theta);
  return op;
}

SpanOperator build_span_ssm(const Frame& frame, const DualFrame& dual, const RowMat& dframe, const Measure& m) {
  check_dims(frame, dual, dframe);
  SpanOperator s;
  s.synthesis = span_synthesis(dual);
  s.lift = dual.left;
  s.sigma = dual.sigma.head(dual.rank_eff);
  const long L = frame.grid_len(), r = dual.rank_eff;
  const Vec w = quadrature_weights(L);
  Mat x;
  if (m.is_scaled()) {
    const Vec tw = grid_points(L).cwiseProduct(w);
    x = (dframe * tw.asDiagonal()) * s.synthesis;
    s.op.a = Mat::Identity(r, r) + s.lift.transpose() * x;
  } else {
    x = (dframe * w.asDiagonal()) * s.synthesis;
    x.noalias() += frame.rows.col(0) * s.synthesis.row(0);
    s.op.a = s.lift.transpose() * x;
  }
  s.op.b = s.lift.transpose() * frame.rows.col(L - 1);
  s.op.measure = m;
  s.op.frame_id = frame.id + ":span";
  return s;
}

}  // namespace walrus
