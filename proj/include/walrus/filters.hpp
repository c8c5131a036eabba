#pragma once

#include <vector>

namespace walrus {

struct FilterBank {
  int order_p = 0;
  std::vector<double> h;  // scaling (low-pass), 2p taps
  std::vector<double> g;  // wavelet (high-pass), g[k] = (-1)^k h[2p-1-k]
  int taps() const { return static_cast<int>(h.size()); }
};

constexpr int kMinDaubechiesOrder = 1;
constexpr int kMaxDaubechiesOrder = 11;

// Minimum-phase Daubechies D(2p) filter, p in 1..11.
FilterBank daubechies_filter(int p);

struct FilterCheck {
  double sum_error;          // |sum h - sqrt(2)|
  double orthogonality;      // max_m |sum h[k] h[k+2m] - delta(m)|
  double vanishing_moments;  // max_q relative |sum (-1)^k k^q h[k]|, q < p
};
FilterCheck check_filter(const FilterBank& bank);

}  // namespace walrus
