#pragma once

#include <cmath>
#include <compare>
#include <numbers>
#include <span>
#include <vector>

#include "fsmr/errors.hpp"

namespace fsmr {

// Frequency pair of a 2-D DCT basis function: k horizontal, l vertical.
struct BasisIndex {
  int k = 0;
  int l = 0;
  friend auto operator<=>(const BasisIndex&, const BasisIndex&) = default;
};

// A scattered sample in block-local pixel coordinates.
struct MeshSample {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

inline double dct_alpha(int k, int size) {
  return k == 0 ? std::sqrt(1.0 / size) : std::sqrt(2.0 / size);
}

// cos(pi * k * (2x + 1) / (2 * size)), the unnormalized 1-D DCT-II kernel.
inline double dct_cos(int k, double x, int size) {
  return std::cos(std::numbers::pi * k * (2.0 * x + 1.0) / (2.0 * size));
}

// Orthonormal 2-D DCT-II basis over a size x size area, extended to
// continuous coordinates. Arguments outside [0, size) are allowed.
inline double dct_basis_eval(BasisIndex idx, double x, double y, int size) {
  detail::require(size >= 1 && idx.k >= 0 && idx.k < size && idx.l >= 0 && idx.l < size,
                  "dct_basis_eval: basis index out of range for block size");
  return dct_alpha(idx.k, size) * dct_alpha(idx.l, size) * dct_cos(idx.k, x, size) *
         dct_cos(idx.l, y, size);
}

// rho^(distance to the area center), center at ((size-1)/2, (size-1)/2).
inline double spatial_weight(double x, double y, int size, double rho_spatial) {
  if (rho_spatial == 1.0) return 1.0;
  const double c = 0.5 * (size - 1);
  return std::pow(rho_spatial, std::hypot(x - c, y - c));
}

inline std::vector<double> weights_spatial(std::span<const MeshSample> samples, int size,
                                           double rho_spatial) {
  std::vector<double> w;
  w.reserve(samples.size());
  for (const MeshSample& s : samples) w.push_back(spatial_weight(s.x, s.y, size, rho_spatial));
  return w;
}

// Selection bias toward low frequencies: rho^sqrt(k^2 + l^2).
inline double weight_freq(BasisIndex idx, double rho_freq) {
  if (idx.k == 0 && idx.l == 0) return 1.0;
  if (rho_freq == 1.0) return 1.0;
  return std::pow(rho_freq, std::hypot(static_cast<double>(idx.k), static_cast<double>(idx.l)));
}

// size*size table indexed [k * size + l].
inline std::vector<double> frequency_weight_table(int size, double rho_freq) {
  std::vector<double> wf(static_cast<std::size_t>(size) * size);
  for (int k = 0; k < size; ++k)
    for (int l = 0; l < size; ++l) wf[k * size + l] = weight_freq({k, l}, rho_freq);
  return wf;
}

}  // namespace fsmr
