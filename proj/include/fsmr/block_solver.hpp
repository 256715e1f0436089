#pragma once

#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fsmr/basis.hpp"
#include "fsmr/errors.hpp"

namespace fsmr {

// Block-wise model parameters. Each block of block_size^2 output pixels is
// modelled over a (block_size + 2 * margin)^2 area that also covers the
// surrounding margin band; only the block interior is written to the output.
// Defaults were calibrated against bicubic on held-out band-limited patterns
// (rotation and zoom) and are frozen; see tools/calibrate.cpp.
struct FsmrParams {
  int block_size = 8;
  int margin = 8;
  int max_iterations = 600;
  double energy_epsilon = 0.0;
  double gamma = 0.5;
  double rho_spatial = 0.75;
  double rho_freq = 0.85;

  int model_size() const noexcept { return block_size + 2 * margin; }

  void validate() const {
    detail::require(block_size >= 2, "FsmrParams: block_size must be >= 2");
    detail::require(margin >= 0, "FsmrParams: margin must be >= 0");
    detail::require(max_iterations >= 1, "FsmrParams: max_iterations must be >= 1");
    detail::require(energy_epsilon >= 0.0, "FsmrParams: energy_epsilon must be >= 0");
    detail::require(gamma > 0.0 && gamma <= 1.0, "FsmrParams: gamma must lie in (0, 1]");
    detail::require(rho_spatial > 0.0 && rho_spatial <= 1.0,
                    "FsmrParams: rho_spatial must lie in (0, 1]");
    detail::require(rho_freq > 0.0 && rho_freq <= 1.0, "FsmrParams: rho_freq must lie in (0, 1]");
  }

  friend bool operator==(const FsmrParams&, const FsmrParams&) = default;
};

struct CoefficientEstimate {
  double p_hat = 0.0;
  double denom = 0.0;
};

// Weighted least-squares fit of one basis to the residual:
// p = sum(w r phi) / sum(w phi^2). denom == 0 means the basis is not
// observable from these samples and p_hat is reported as 0.
inline CoefficientEstimate estimate_coefficient(std::span<const double> residuals,
                                                std::span<const double> basis_values,
                                                std::span<const double> spatial_weights) {
  detail::require(!residuals.empty() && residuals.size() == basis_values.size() &&
                      residuals.size() == spatial_weights.size(),
                  "estimate_coefficient: inputs must have the same nonzero length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double wphi = spatial_weights[i] * basis_values[i];
    num += wphi * residuals[i];
    den += wphi * basis_values[i];
  }
  if (!(den > 0.0)) return {0.0, 0.0};
  return {num / den, den};
}

inline double energy_reduction(double p_hat, double denom) { return p_hat * p_hat * denom; }

namespace detail {

// Argmax of delta[i] * wf[i] over a size x size table laid out [k * size + l].
// Scanning k-major keeps the first maximum, i.e. smallest k, then smallest l.
inline std::optional<BasisIndex> select_weighted(std::span<const double> delta,
                                                 std::span<const double> wf, int size,
                                                 double threshold = 0.0,
                                                 double* best_score = nullptr) {
  double best = -1.0;
  int best_i = -1;
  for (int i = 0; i < size * size; ++i) {
    const double s = delta[i] * wf[i];
    if (s > best) {
      best = s;
      best_i = i;
    }
  }
  if (best_score) *best_score = best;
  if (best_i < 0 || !(best > threshold)) return std::nullopt;
  return BasisIndex{best_i / size, best_i % size};
}

}  // namespace detail

// Basis maximizing delta * w_f; nullopt when every weighted value is zero.
inline std::optional<BasisIndex> select_basis(std::span<const double> delta_energies, int size,
                                              double rho_freq) {
  detail::require(size >= 1 && delta_energies.size() == static_cast<std::size_t>(size) * size,
                  "select_basis: table must be size x size");
  for (double v : delta_energies)
    detail::require(std::isfinite(v) && v >= 0.0,
                    "select_basis: energy reductions must be finite and non-negative");
  const std::vector<double> wf = frequency_weight_table(size, rho_freq);
  return detail::select_weighted(delta_energies, wf, size);
}

struct BlockModel {
  int size = 0;                 // model area edge length
  std::vector<double> coeffs;   // [k * size + l]
  int iterations_used = 0;
  double final_weighted_residual_energy = 0.0;

  double coeff(BasisIndex idx) const { return coeffs[idx.k * size + idx.l]; }
};

struct BlockResult {
  int block_size = 0;
  std::vector<double> grid_values;  // row-major [y * block_size + x]
  BlockModel model;
  bool fallback_used = false;
};

// Optional per-iteration record, for diagnostics and tests.
struct BlockTrace {
  std::vector<double> energies;  // weighted residual energy; [0] is the initial value
  std::vector<BasisIndex> selected;
};

namespace detail {

inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace detail

// Sample geometry of one block, shared by every channel.
//
// Gram entries come from products of cosines:
//   cos_k(x) cos_u(x) = (cos_{k+u}(x) + cos_{|k-u|}(x)) / 2,
// so every <phi_kl, phi_uv>_w is a combination of four entries of
//   H[p][q] = sum_i w_i cos_p(x_i) cos_q(y_i),  p, q < 2 * size - 1,
// and a greedy update costs O(size^2) instead of O(size^2 * samples).
class BlockGeometry {
 public:
  // Points are model-local: the model area spans [-0.5, size - 0.5)^2.
  BlockGeometry(std::span<const double> xs, std::span<const double> ys, int size,
                double rho_spatial)
      : size_(size), n_(xs.size()), span_(2 * size - 1) {
    detail::require(xs.size() == ys.size(), "BlockGeometry: coordinate length mismatch");
    weights_.resize(n_);
    cos_x_.resize(static_cast<std::size_t>(span_) * n_);
    cos_y_.resize(static_cast<std::size_t>(span_) * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      weights_[i] = spatial_weight(xs[i], ys[i], size, rho_spatial);
      for (int p = 0; p < span_; ++p) {
        cos_x_[p * n_ + i] = dct_cos(p, xs[i], size);
        cos_y_[p * n_ + i] = dct_cos(p, ys[i], size);
      }
    }
    alpha_.resize(size);
    for (int k = 0; k < size; ++k) alpha_[k] = dct_alpha(k, size);

    h_.assign(static_cast<std::size_t>(span_) * span_, 0.0);
    std::vector<double> tmp(n_);
    double weight_sum = 0.0;
    for (double w : weights_) weight_sum += w;
    for (int p = 0; p < span_; ++p) {
      const double* cx = &cos_x_[p * n_];
      for (std::size_t i = 0; i < n_; ++i) tmp[i] = weights_[i] * cx[i];
      for (int q = 0; q < span_; ++q) h_[p * span_ + q] = detail::dot(tmp.data(), &cos_y_[q * n_], n_);
    }

    // Bases whose weighted norm is at rounding level are treated as unobservable.
    const double floor = 1e-10 * weight_sum / (static_cast<double>(size) * size);
    denom_.resize(static_cast<std::size_t>(size) * size);
    for (int k = 0; k < size; ++k) {
      for (int l = 0; l < size; ++l) {
        const double g = gram(k, l, k, l);
        denom_[k * size + l] = g > floor ? g : 0.0;
      }
    }
  }

  int size() const noexcept { return size_; }
  std::size_t sample_count() const noexcept { return n_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> denominators() const noexcept { return denom_; }

  // cos_p at sample coordinates, p < 2 * size - 1.
  const double* cos_x(int p) const { return &cos_x_[p * n_]; }
  const double* cos_y(int p) const { return &cos_y_[p * n_]; }
  double alpha(int k) const { return alpha_[k]; }

  double h(int p, int q) const { return h_[p * span_ + q]; }

  double gram(int k, int l, int u, int v) const {
    const int kp = k + u, km = std::abs(k - u), lp = l + v, lm = std::abs(l - v);
    return 0.25 * alpha_[k] * alpha_[l] * alpha_[u] * alpha_[v] *
           ((h(kp, lp) + h(kp, lm)) + (h(km, lp) + h(km, lm)));
  }

 private:
  int size_;
  std::size_t n_;
  int span_;
  std::vector<double> weights_;
  std::vector<double> cos_x_, cos_y_;
  std::vector<double> alpha_;
  std::vector<double> h_;
  std::vector<double> denom_;
};

// Greedy model generation for one channel over a prepared geometry.
// wf is the frequency weight table for geometry.size().
inline BlockModel solve_block_channel(const BlockGeometry& geo, std::span<const double> values,
                                      const FsmrParams& params, std::span<const double> wf,
                                      BlockTrace* trace = nullptr) {
  const int size = geo.size();
  const std::size_t n = geo.sample_count();
  const std::size_t nb = static_cast<std::size_t>(size) * size;
  detail::require(values.size() == n, "solve_block_channel: value count mismatch");

  BlockModel model;
  model.size = size;
  model.coeffs.assign(nb, 0.0);

  const auto w = geo.weights();
  const auto den = geo.denominators();
  std::vector<double> residual(values.begin(), values.end());
  auto weighted_energy = [&] {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += w[i] * residual[i] * residual[i];
    return e;
  };

  // numer[k, l] = sum_i w_i r_i phi_kl(x_i, y_i)
  std::vector<double> numer(nb, 0.0);
  {
    std::vector<double> wr(n), tmp(n);
    for (std::size_t i = 0; i < n; ++i) wr[i] = w[i] * residual[i];
    for (int k = 0; k < size; ++k) {
      const double* cx = geo.cos_x(k);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = wr[i] * cx[i];
      for (int l = 0; l < size; ++l)
        numer[k * size + l] =
            geo.alpha(k) * geo.alpha(l) * detail::dot(tmp.data(), geo.cos_y(l), n);
    }
  }

  double energy = weighted_energy();
  if (trace) {
    trace->energies.assign(1, energy);
    trace->selected.clear();
  }

  std::vector<double> delta(nb), coef(nb);
  for (int it = 0; it < params.max_iterations; ++it) {
    for (std::size_t i = 0; i < nb; ++i) {
      if (den[i] > 0.0) {
        coef[i] = numer[i] / den[i];
        delta[i] = energy_reduction(coef[i], den[i]);
      } else {
        coef[i] = 0.0;
        delta[i] = 0.0;
      }
    }
    const auto pick = detail::select_weighted(delta, wf, size, params.energy_epsilon);
    if (!pick) break;
    const int u = pick->k, v = pick->l;
    const double step = params.gamma * coef[u * size + v];
    model.coeffs[u * size + v] += step;

    for (int k = 0; k < size; ++k)
      for (int l = 0; l < size; ++l) numer[k * size + l] -= step * geo.gram(k, l, u, v);

    const double au = geo.alpha(u) * geo.alpha(v) * step;
    const double* cx = geo.cos_x(u);
    const double* cy = geo.cos_y(v);
    for (std::size_t i = 0; i < n; ++i) residual[i] -= au * cx[i] * cy[i];
    energy = weighted_energy();
    ++model.iterations_used;
    if (trace) {
      trace->energies.push_back(energy);
      trace->selected.push_back(*pick);
    }
  }
  model.final_weighted_residual_energy = energy;
  return model;
}

// Model values at the block's integer interior positions, row-major.
inline std::vector<double> evaluate_block(const BlockModel& model, int block_size, int margin) {
  const int size = model.size;
  std::vector<double> basis(static_cast<std::size_t>(size) * block_size);  // [k * B + m]
  for (int k = 0; k < size; ++k)
    for (int m = 0; m < block_size; ++m)
      basis[k * block_size + m] = dct_alpha(k, size) * dct_cos(k, m + margin, size);

  // partial[k][y] = sum_l c[k][l] * basis_l(y)
  std::vector<double> partial(static_cast<std::size_t>(size) * block_size, 0.0);
  for (int k = 0; k < size; ++k)
    for (int y = 0; y < block_size; ++y) {
      double s = 0.0;
      for (int l = 0; l < size; ++l) s += model.coeffs[k * size + l] * basis[l * block_size + y];
      partial[k * block_size + y] = s;
    }
  std::vector<double> grid(static_cast<std::size_t>(block_size) * block_size, 0.0);
  for (int y = 0; y < block_size; ++y)
    for (int x = 0; x < block_size; ++x) {
      double s = 0.0;
      for (int k = 0; k < size; ++k) s += basis[k * block_size + x] * partial[k * block_size + y];
      grid[y * block_size + x] = s;
    }
  return grid;
}

// Reconstruct one block from samples in block-local coordinates: interior
// pixel centers at 0..block_size-1, margin samples extend to
// [-margin - 0.5, block_size + margin - 0.5).
inline BlockResult fsmr_block(std::span<const MeshSample> samples, const FsmrParams& params,
                              BlockTrace* trace = nullptr) {
  params.validate();
  const int size = params.model_size();
  BlockResult result;
  result.block_size = params.block_size;
  if (samples.empty()) {
    result.fallback_used = true;
    result.grid_values.assign(static_cast<std::size_t>(params.block_size) * params.block_size,
                              0.0);
    result.model.size = size;
    result.model.coeffs.assign(static_cast<std::size_t>(size) * size, 0.0);
    if (trace) *trace = {};
    return result;
  }
  std::vector<double> xs, ys, vals;
  xs.reserve(samples.size());
  ys.reserve(samples.size());
  vals.reserve(samples.size());
  for (const MeshSample& s : samples) {
    detail::require(std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.value),
                    "fsmr_block: samples must be finite");
    xs.push_back(s.x + params.margin);
    ys.push_back(s.y + params.margin);
    vals.push_back(s.value);
  }
  const BlockGeometry geo(xs, ys, size, params.rho_spatial);
  const std::vector<double> wf = frequency_weight_table(size, params.rho_freq);
  result.model = solve_block_channel(geo, vals, params, wf, trace);
  result.grid_values = evaluate_block(result.model, params.block_size, params.margin);
  return result;
}

}  // namespace fsmr
