#pragma once

#include "walrus/dual.hpp"
#include "walrus/frame.hpp"
#include "walrus/runtime.hpp"
#include "walrus/safari.hpp"
#include "walrus/spectral.hpp"

#include <string>

namespace walrus {

// Artifact files: one ASCII header line, a few ASCII descriptor lines, then raw
// little-endian f64 data in row-major order.
void save_frame(const std::string& path, const Frame& f);
Frame load_frame(const std::string& path);

void save_dual(const std::string& path, const DualFrame& d);
DualFrame load_dual(const std::string& path);

void save_ssm(const std::string& path, const SSMOperator& op);
SSMOperator load_ssm(const std::string& path);

void save_diag(const std::string& path, const DiagonalSSM& d);
DiagonalSSM load_diag(const std::string& path);

// `step,c_0,...,c_{N-1}`
void save_trajectory_csv(const std::string& path, const StateTrajectory& t);
// `t,u,u_hat`
void save_reconstruction_csv(const std::string& path, std::span<const double> u, std::span<const double> u_hat,
                             long first_index = 0);

}  // namespace walrus
