#pragma once

#include "walrus/cascade.hpp"
#include "walrus/types.hpp"

#include <string>
#include <vector>

namespace walrus {

enum class Family { Daubechies, Legendre, Fourier };

std::string family_name(Family f);
Family parse_family(const std::string& s);

struct FrameSpec {
  Family family = Family::Daubechies;
  int order_p = 11;     // Daubechies D(2p)
  int scale_min = 0;
  int scale_max = 3;
  double shift_m = 0.25;
  int grid_len = 16384;
  double rcond = 0.01;
  int basis_n = 0;      // Legendre / Fourier only
  int cascade_levels = 12;

  // Throws ConfigError on any violated invariant.
  void validate() const;
  // Stable textual identity, used to tie operators back to their frame.
  std::string id() const;
  bool operator==(const FrameSpec&) const = default;
};

enum class ElementKind { Father, Mother, Basis };

struct ElementDescriptor {
  ElementKind kind = ElementKind::Basis;
  int scale = 0;
  long shift_index = 0;
  bool operator==(const ElementDescriptor&) const = default;
};

std::string element_kind_name(ElementKind k);
ElementKind parse_element_kind(const std::string& s);

struct Frame {
  RowMat rows;  // n_full x L, sampled at t_k = k/(L-1)
  std::vector<ElementDescriptor> descriptors;
  std::string id;

  long n_full() const { return rows.rows(); }
  long grid_len() const { return rows.cols(); }
};

// Endpoint-inclusive grid t_k = k/(L-1).
Vec grid_points(long L);
// Trapezoid weights h/2, h, ..., h, h/2 with h = 1/(L-1); these define every
// discrete inner product in the library.
Vec quadrature_weights(long L);
double discrete_norm(const Eigen::Ref<const Eigen::RowVectorXd>& row);

// Offset of a wavelet copy: shift_index * m * 2^scale / (2p-1), in domain units.
double wavelet_offset(int order_p, double shift_m, int scale, long shift_index);
// Element value at domain position t: f((t - offset) * (2p-1) / 2^scale).
double wavelet_sample(const Cascade& c, ElementKind kind, int scale, double offset, double t);

// Shift indices whose nominal support (offset-2^i, ... ) meets [0,1): offset in (-2^i, 1).
std::vector<long> wavelet_shift_range(int order_p, double shift_m, int scale);

Frame build_wavelet_frame(const FrameSpec& spec);
Frame build_basis_frame(const FrameSpec& spec);
Frame build_frame(const FrameSpec& spec);

// Central differences inside, one-sided second order at both ends, step 1/(L-1).
RowMat frame_derivative(const Frame& frame);

// Elements whose in-domain energy falls below this are dropped.
constexpr double kMinInDomainEnergy = 1e-8;

}  // namespace walrus
