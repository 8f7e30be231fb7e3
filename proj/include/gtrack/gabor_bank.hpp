#ifndef GTRACK_GABOR_BANK_HPP
#define GTRACK_GABOR_BANK_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gtrack/sequence_io.hpp"
#include "gtrack/types.hpp"

namespace gtrack {

/// Parameters of one spatio-temporal Gabor quadrature pair.
///
/// Frequencies are in cycles/pixel and cycles/frame. The orientation is measured
/// counterclockwise from the horizontal axis with x = column and y = row, so the
/// spatial center frequencies are (omega cos theta, omega sin theta).
struct GaborParams {
  double omega = 0.25;
  double theta_deg = 0.0;
  double omega_t0 = 1.0 / 8.0;
  double sigma_x = 4.0;
  double sigma_y = 4.0;
  double sigma_t = 1.0;
  int spatial_extent = 25;
  int temporal_extent = 7;

  double omega_x0() const { return omega * std::cos(theta_deg * std::numbers::pi / 180.0); }
  double omega_y0() const { return omega * std::sin(theta_deg * std::numbers::pi / 180.0); }
  double normalization() const {
    return 1.0 / (std::pow(2.0 * std::numbers::pi, 1.5) * sigma_x * sigma_y * sigma_t);
  }
  int spatial_radius() const { return spatial_extent / 2; }
  int temporal_radius() const { return temporal_extent / 2; }

  void validate() const {
    auto odd_and_big = [](int e) { return e >= 3 && e % 2 == 1; };
    if (!odd_and_big(spatial_extent))
      throw ValidationError("spatial extent must be odd and >= 3, got " + std::to_string(spatial_extent));
    if (!odd_and_big(temporal_extent))
      throw ValidationError("temporal extent must be odd and >= 3, got " + std::to_string(temporal_extent));
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0) || !(sigma_t > 0.0))
      throw ValidationError("Gabor sigmas must be positive");
    if (!std::isfinite(omega) || !std::isfinite(theta_deg) || !std::isfinite(omega_t0))
      throw ValidationError("Gabor frequencies must be finite");
  }

  friend bool operator==(const GaborParams&, const GaborParams&) = default;
};

/// Kernel taps on integer offsets centered at 0; t is the slowest axis, x the fastest.
class Kernel3D {
 public:
  Kernel3D() = default;
  Kernel3D(int spatial_extent, int temporal_extent)
      : rs_(spatial_extent / 2),
        rt_(temporal_extent / 2),
        taps_(static_cast<std::size_t>(spatial_extent) * spatial_extent * temporal_extent, 0.0) {}

  int spatial_radius() const { return rs_; }
  int temporal_radius() const { return rt_; }

  double& operator()(int t, int y, int x) { return taps_[index(t, y, x)]; }
  double operator()(int t, int y, int x) const { return taps_[index(t, y, x)]; }

  const std::vector<double>& taps() const { return taps_; }

 private:
  std::size_t index(int t, int y, int x) const {
    const int s = 2 * rs_ + 1;
    return (static_cast<std::size_t>(t + rt_) * s + (y + rs_)) * s + (x + rs_);
  }

  int rs_ = 0;
  int rt_ = 0;
  std::vector<double> taps_;
};

struct GaborPair {
  GaborParams params;
  Kernel3D odd;
  Kernel3D even;
};

/// Samples the odd (sine) and even (cosine) phase kernels.
inline GaborPair make_gabor_pair(const GaborParams& p) {
  p.validate();
  GaborPair pair{p, Kernel3D(p.spatial_extent, p.temporal_extent), Kernel3D(p.spatial_extent, p.temporal_extent)};
  const double norm = p.normalization();
  const double wx = p.omega_x0(), wy = p.omega_y0(), wt = p.omega_t0;
  const double two_pi = 2.0 * std::numbers::pi;
  const int rs = p.spatial_radius(), rt = p.temporal_radius();
  for (int t = -rt; t <= rt; ++t) {
    for (int y = -rs; y <= rs; ++y) {
      for (int x = -rs; x <= rs; ++x) {
        const double envelope =
            norm * std::exp(-0.5 * (x * x / (p.sigma_x * p.sigma_x) + y * y / (p.sigma_y * p.sigma_y) +
                                    t * t / (p.sigma_t * p.sigma_t)));
        const double phase = two_pi * (wx * x + wy * y + wt * t);
        pair.odd(t, y, x) = envelope * std::sin(phase);
        pair.even(t, y, x) = envelope * std::cos(phase);
      }
    }
  }
  return pair;
}

struct BankConfig {
  double omega = 0.25;
  std::vector<double> thetas_deg{0.0, 35.0, 75.0};
  std::vector<double> omega_t0s{1.0 / 7.0, 1.0 / 8.0, 1.0 / 9.0};
  double sigma_x = 4.0;
  double sigma_y = 4.0;
  double sigma_t = 1.0;
  int spatial_extent = 25;
  int temporal_extent = 7;

  friend bool operator==(const BankConfig&, const BankConfig&) = default;
};

/// One pair per (theta, omega_t0), theta outer.
inline std::vector<GaborPair> make_bank(const BankConfig& cfg) {
  if (cfg.thetas_deg.empty() || cfg.omega_t0s.empty())
    throw ValidationError("make_bank: orientation and temporal frequency lists must be non-empty");
  std::vector<GaborPair> bank;
  bank.reserve(cfg.thetas_deg.size() * cfg.omega_t0s.size());
  for (double theta : cfg.thetas_deg) {
    for (double wt : cfg.omega_t0s) {
      bank.push_back(make_gabor_pair({cfg.omega, theta, wt, cfg.sigma_x, cfg.sigma_y, cfg.sigma_t,
                                      cfg.spatial_extent, cfg.temporal_extent}));
    }
  }
  return bank;
}

struct PhaseResponse {
  Grid<double> odd;
  Grid<double> even;
};

namespace detail {

inline void check_block(const STBlock& block, const GaborParams& p) {
  if (block.length() != p.temporal_extent) {
    throw ValidationError("block has " + std::to_string(block.length()) + " frames but kernel depth is " +
                          std::to_string(p.temporal_extent));
  }
}

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace detail

/// Reference path: full 3D convolution, valid in time, edge-replicated in space.
///
/// The block's frame j sits at temporal offset (rt - j) from the kernel center, so
/// out(r, c) = sum_{t,y,x} k(t, y, x) * I_{rt - t}(clamp(r - y), clamp(c - x)).
inline PhaseResponse convolve_block_direct(const STBlock& block, const GaborPair& pair) {
  detail::check_block(block, pair.params);
  const int w = block.frames.front().width(), h = block.frames.front().height();
  const int rs = pair.params.spatial_radius(), rt = pair.params.temporal_radius();
  PhaseResponse out{Grid<double>(w, h), Grid<double>(w, h)};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double so = 0.0, se = 0.0;
      for (int t = -rt; t <= rt; ++t) {
        const auto& img = block.frames[static_cast<std::size_t>(rt - t)].pixels;
        for (int y = -rs; y <= rs; ++y) {
          const std::uint8_t* row = img.row_ptr(detail::clamp_index(r - y, h));
          for (int x = -rs; x <= rs; ++x) {
            const double v = row[detail::clamp_index(c - x, w)];
            so += pair.odd(t, y, x) * v;
            se += pair.even(t, y, x) * v;
          }
        }
      }
      out.odd(r, c) = so;
      out.even(r, c) = se;
    }
  }
  return out;
}

/// Fast path. The Gaussian envelope and the complex carrier both factor over
/// (x, y, t), so even + i*odd is a product of three 1D complex kernels. Clamped
/// padding also factors per axis, which makes this exact up to round-off.
inline PhaseResponse convolve_block_separable(const STBlock& block, const GaborPair& pair) {
  using cd = std::complex<double>;
  const auto& p = pair.params;
  detail::check_block(block, p);
  const int w = block.frames.front().width(), h = block.frames.front().height();
  const int rs = p.spatial_radius(), rt = p.temporal_radius();
  const double two_pi = 2.0 * std::numbers::pi;

  auto factor = [&](int radius, double sigma, double freq) {
    std::vector<cd> k(static_cast<std::size_t>(2 * radius + 1));
    for (int i = -radius; i <= radius; ++i)
      k[static_cast<std::size_t>(i + radius)] =
          std::exp(-0.5 * i * i / (sigma * sigma)) * std::polar(1.0, two_pi * freq * i);
    return k;
  };
  const auto kt = factor(rt, p.sigma_t, p.omega_t0);
  const auto kx = factor(rs, p.sigma_x, p.omega_x0());
  const auto ky = factor(rs, p.sigma_y, p.omega_y0());

  // Temporal reduction to a single complex frame.
  std::vector<cd> acc(static_cast<std::size_t>(w) * h);
  for (int t = -rt; t <= rt; ++t) {
    const cd g = kt[static_cast<std::size_t>(t + rt)];
    const auto& src = block.frames[static_cast<std::size_t>(rt - t)].pixels.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g * static_cast<double>(src[i]);
  }

  // Horizontal pass.
  std::vector<cd> horiz(acc.size());
  std::vector<cd> padded(static_cast<std::size_t>(w + 2 * rs));
  for (int r = 0; r < h; ++r) {
    const cd* row = acc.data() + static_cast<std::size_t>(r) * w;
    for (int c = -rs; c < w + rs; ++c) padded[static_cast<std::size_t>(c + rs)] = row[detail::clamp_index(c, w)];
    cd* dst = horiz.data() + static_cast<std::size_t>(r) * w;
    for (int c = 0; c < w; ++c) {
      cd s{};
      // padded[c + rs - x] holds row[clamp(c - x)]
      for (int x = -rs; x <= rs; ++x) s += kx[static_cast<std::size_t>(x + rs)] * padded[static_cast<std::size_t>(c + rs - x)];
      dst[c] = s;
    }
  }

  // Vertical pass.
  const double norm = p.normalization();
  PhaseResponse out{Grid<double>(w, h), Grid<double>(w, h)};
  std::vector<cd> col(static_cast<std::size_t>(h + 2 * rs));
  for (int c = 0; c < w; ++c) {
    for (int r = -rs; r < h + rs; ++r)
      col[static_cast<std::size_t>(r + rs)] = horiz[static_cast<std::size_t>(detail::clamp_index(r, h)) * w + c];
    for (int r = 0; r < h; ++r) {
      cd s{};
      for (int y = -rs; y <= rs; ++y) s += ky[static_cast<std::size_t>(y + rs)] * col[static_cast<std::size_t>(r + rs - y)];
      s *= norm;
      out.even(r, c) = s.real();
      out.odd(r, c) = s.imag();
    }
  }
  return out;
}

enum class ConvolutionMethod { separable, direct };

inline PhaseResponse convolve_block(const STBlock& block, const GaborPair& pair,
                                    ConvolutionMethod method = ConvolutionMethod::separable) {
  return method == ConvolutionMethod::direct ? convolve_block_direct(block, pair)
                                             : convolve_block_separable(block, pair);
}

/// odd^2 + even^2, element-wise.
inline Grid<double> energy_map(const Grid<double>& odd, const Grid<double>& even) {
  if (!odd.same_shape(even)) throw ValidationError("energy_map: odd and even responses differ in shape");
  Grid<double> e(odd.width(), odd.height());
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double o = odd.data()[i], v = even.data()[i];
    e.data()[i] = o * o + v * v;
  }
  return e;
}

struct EnergyStack {
  int target_index = 0;
  std::vector<Grid<double>> maps;
};

inline EnergyStack apply_bank(const STBlock& block, std::span<const GaborPair> bank,
                              ConvolutionMethod method = ConvolutionMethod::separable) {
  EnergyStack stack{block.target_index(), {}};
  stack.maps.reserve(bank.size());
  for (const auto& pair : bank) {
    const auto resp = convolve_block(block, pair, method);
    stack.maps.push_back(energy_map(resp.odd, resp.even));
  }
  return stack;
}

}  // namespace gtrack

#endif  // GTRACK_GABOR_BANK_HPP
