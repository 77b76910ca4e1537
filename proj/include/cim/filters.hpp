#pragma once

#include <algorithm>
#include <array>

#include "cim/image.hpp"

namespace cim {

namespace detail {

inline std::size_t clamp_index(std::ptrdiff_t v, std::size_t n) {
  if (v < 0) return 0;
  if (v >= static_cast<std::ptrdiff_t>(n)) return n - 1;
  return static_cast<std::size_t>(v);
}

// Replicate-padded sample.
inline std::uint8_t pad_at(const GrayImage& img, std::ptrdiff_t row, std::ptrdiff_t col) {
  return img.at(clamp_index(row, img.height), clamp_index(col, img.width));
}

inline std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
}

}  // namespace detail

/// Each pixel becomes the median of its replicate-padded (2m+1)^2 window.
inline GrayImage median_filter(const GrayImage& img, int radius = 1) {
  if (radius < 1) throw std::invalid_argument("median_filter: radius must be >= 1");
  GrayImage out = img;
  std::vector<std::uint8_t> window;
  window.reserve(static_cast<std::size_t>((2 * radius + 1) * (2 * radius + 1)));
  for (std::size_t row = 0; row < img.height; ++row)
    for (std::size_t col = 0; col < img.width; ++col) {
      window.clear();
      for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc)
          window.push_back(detail::pad_at(img, static_cast<std::ptrdiff_t>(row) + dr,
                                          static_cast<std::ptrdiff_t>(col) + dc));
      auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
      std::nth_element(window.begin(), mid, window.end());
      out.at(row, col) = *mid;
    }
  return out;
}

/// Each pixel becomes the most common value of its window; a tie between
/// distinct values keeps the center pixel.
inline GrayImage majority_filter(const GrayImage& img, int radius = 1) {
  if (radius < 1) throw std::invalid_argument("majority_filter: radius must be >= 1");
  GrayImage out = img;
  std::array<int, 256> counts{};
  for (std::size_t row = 0; row < img.height; ++row)
    for (std::size_t col = 0; col < img.width; ++col) {
      counts.fill(0);
      for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc)
          ++counts[detail::pad_at(img, static_cast<std::ptrdiff_t>(row) + dr,
                                  static_cast<std::ptrdiff_t>(col) + dc)];
      int best_value = 0;
      int best_count = -1;
      bool tied = false;
      for (int v = 0; v < 256; ++v) {
        if (counts[v] > best_count) {
          best_count = counts[v];
          best_value = v;
          tied = false;
        } else if (counts[v] == best_count) {
          tied = true;
        }
      }
      out.at(row, col) = tied ? img.at(row, col) : static_cast<std::uint8_t>(best_value);
    }
  return out;
}

/// Flat structuring element with odd dimensions; every cell is on by default.
struct StructElem {
  int width = 3;
  int height = 3;
  std::vector<std::uint8_t> on;  // row-major width*height mask

  static StructElem rect(int width, int height) {
    if (width < 1 || height < 1 || width % 2 == 0 || height % 2 == 0)
      throw std::invalid_argument("StructElem: dimensions must be odd and >= 1");
    StructElem se;
    se.width = width;
    se.height = height;
    se.on.assign(static_cast<std::size_t>(width * height), 1);
    return se;
  }
};

namespace detail {

enum class MorphOp { Min, Max };

inline GrayImage morph(const GrayImage& img, const StructElem& se, MorphOp op) {
  GrayImage out = img;
  const int hr = se.height / 2;
  const int wr = se.width / 2;
  for (std::size_t row = 0; row < img.height; ++row)
    for (std::size_t col = 0; col < img.width; ++col) {
      int extreme = op == MorphOp::Min ? 255 : 0;
      for (int dr = -hr; dr <= hr; ++dr)
        for (int dc = -wr; dc <= wr; ++dc) {
          if (!se.on[static_cast<std::size_t>((dr + hr) * se.width + (dc + wr))]) continue;
          const int v = pad_at(img, static_cast<std::ptrdiff_t>(row) + dr,
                               static_cast<std::ptrdiff_t>(col) + dc);
          extreme = op == MorphOp::Min ? std::min(extreme, v) : std::max(extreme, v);
        }
      out.at(row, col) = static_cast<std::uint8_t>(extreme);
    }
  return out;
}

}  // namespace detail

/// Grayscale erosion: neighborhood minimum under the structuring element.
inline GrayImage erode(const GrayImage& img, const StructElem& se = StructElem::rect(3, 3)) {
  return detail::morph(img, se, detail::MorphOp::Min);
}

/// Grayscale dilation: neighborhood maximum.
inline GrayImage dilate(const GrayImage& img, const StructElem& se = StructElem::rect(3, 3)) {
  return detail::morph(img, se, detail::MorphOp::Max);
}

/// Erosion followed by dilation; removes bright specks smaller than the element.
inline GrayImage morph_open(const GrayImage& img, const StructElem& se = StructElem::rect(3, 3)) {
  return dilate(erode(img, se), se);
}

/// Dilation followed by erosion; fills dark pits smaller than the element.
inline GrayImage morph_close(const GrayImage& img, const StructElem& se = StructElem::rect(3, 3)) {
  return erode(dilate(img, se), se);
}

/// Opening then closing; suppresses impulse noise of both polarities.
inline GrayImage morph_smooth(const GrayImage& img, const StructElem& se = StructElem::rect(3, 3)) {
  return morph_close(morph_open(img, se), se);
}

/// Locally adaptive minimum-MSE filter: out = mu + max(s2-v2,0)/max(s2,eps) *
/// (in - mu) with local mean mu, local variance s2 and noise power v2
/// estimated as the mean of the local variances.
inline GrayImage wiener_local(const GrayImage& img, int window = 3) {
  if (window < 3 || window % 2 == 0)
    throw std::invalid_argument("wiener_local: window must be odd and >= 3");
  const int radius = window / 2;
  const double count = static_cast<double>(window) * static_cast<double>(window);
  std::vector<double> mean(img.size());
  std::vector<double> var(img.size());
  double noise_power = 0.0;
  for (std::size_t row = 0; row < img.height; ++row)
    for (std::size_t col = 0; col < img.width; ++col) {
      double sum = 0.0;
      double sum_sq = 0.0;
      for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc) {
          const double v = detail::pad_at(img, static_cast<std::ptrdiff_t>(row) + dr,
                                          static_cast<std::ptrdiff_t>(col) + dc);
          sum += v;
          sum_sq += v * v;
        }
      const double mu = sum / count;
      const std::size_t i = row * img.width + col;
      mean[i] = mu;
      var[i] = std::max(sum_sq / count - mu * mu, 0.0);
      noise_power += var[i];
    }
  noise_power /= static_cast<double>(img.size());
  constexpr double eps = 1e-12;
  GrayImage out = img;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double gain = std::max(var[i] - noise_power, 0.0) / std::max(var[i], eps);
    out.pixels[i] = detail::clamp_u8(mean[i] + gain * (static_cast<double>(img.pixels[i]) - mean[i]));
  }
  return out;
}

namespace detail {

struct HaarBands {
  std::size_t half_w = 0;
  std::size_t half_h = 0;
  std::vector<double> ll, lh, hl, hh;  // each half_h x half_w
};

// Single-level orthonormal 2x2 Haar analysis on the replicate-padded-even image.
inline HaarBands haar_forward(const GrayImage& img) {
  const std::size_t w = img.width + (img.width % 2);
  const std::size_t h = img.height + (img.height % 2);
  HaarBands bands;
  bands.half_w = w / 2;
  bands.half_h = h / 2;
  const std::size_t n = bands.half_w * bands.half_h;
  bands.ll.resize(n);
  bands.lh.resize(n);
  bands.hl.resize(n);
  bands.hh.resize(n);
  for (std::size_t by = 0; by < bands.half_h; ++by)
    for (std::size_t bx = 0; bx < bands.half_w; ++bx) {
      const auto r0 = static_cast<std::ptrdiff_t>(2 * by);
      const auto c0 = static_cast<std::ptrdiff_t>(2 * bx);
      const double a = pad_at(img, r0, c0);
      const double b = pad_at(img, r0, c0 + 1);
      const double c = pad_at(img, r0 + 1, c0);
      const double d = pad_at(img, r0 + 1, c0 + 1);
      const std::size_t i = by * bands.half_w + bx;
      bands.ll[i] = (a + b + c + d) / 2.0;
      bands.lh[i] = (a - b + c - d) / 2.0;
      bands.hl[i] = (a + b - c - d) / 2.0;
      bands.hh[i] = (a - b - c + d) / 2.0;
    }
  return bands;
}

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Robust noise sigma from the HH subband: median(|HH|)/0.6745.
inline double mad_sigma(const std::vector<double>& hh) {
  if (hh.empty()) return 0.0;
  std::vector<double> mags(hh.size());
  for (std::size_t i = 0; i < hh.size(); ++i) mags[i] = std::abs(hh[i]);
  auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  return *mid / 0.6745;
}

}  // namespace detail

/// Noise standard deviation estimate for an image (Haar HH-subband MAD).
inline double estimate_noise_sigma(const GrayImage& img) {
  return detail::mad_sigma(detail::haar_forward(img).hh);
}

/// Single-level Haar shrinkage: soft-threshold the detail subbands at the
/// universal threshold T = sigma*sqrt(2*ln n), sigma from the HH MAD estimate,
/// then reconstruct and clamp.
inline GrayImage wavelet_denoise(const GrayImage& img) {
  detail::HaarBands bands = detail::haar_forward(img);
  const double sigma = detail::mad_sigma(bands.hh);
  const double n = static_cast<double>(4 * bands.half_w * bands.half_h);
  const double threshold = sigma * std::sqrt(2.0 * std::log(n));
  for (std::size_t i = 0; i < bands.hh.size(); ++i) {
    bands.lh[i] = detail::soft_threshold(bands.lh[i], threshold);
    bands.hl[i] = detail::soft_threshold(bands.hl[i], threshold);
    bands.hh[i] = detail::soft_threshold(bands.hh[i], threshold);
  }
  GrayImage out = img;
  for (std::size_t by = 0; by < bands.half_h; ++by)
    for (std::size_t bx = 0; bx < bands.half_w; ++bx) {
      const std::size_t i = by * bands.half_w + bx;
      const double ll = bands.ll[i];
      const double lh = bands.lh[i];
      const double hl = bands.hl[i];
      const double hh = bands.hh[i];
      const double a = (ll + lh + hl + hh) / 2.0;
      const double b = (ll - lh + hl - hh) / 2.0;
      const double c = (ll + lh - hl - hh) / 2.0;
      const double d = (ll - lh - hl + hh) / 2.0;
      const std::size_t r0 = 2 * by;
      const std::size_t c0 = 2 * bx;
      if (r0 < out.height && c0 < out.width) out.at(r0, c0) = detail::clamp_u8(a);
      if (r0 < out.height && c0 + 1 < out.width) out.at(r0, c0 + 1) = detail::clamp_u8(b);
      if (r0 + 1 < out.height && c0 < out.width) out.at(r0 + 1, c0) = detail::clamp_u8(c);
      if (r0 + 1 < out.height && c0 + 1 < out.width) out.at(r0 + 1, c0 + 1) = detail::clamp_u8(d);
    }
  return out;
}

/// Non-local means with flat patch distances: weight exp(-max(d2-2*v2,0)/h^2)
/// where d2 is the mean squared patch difference and v2 the HH-MAD noise power
/// estimate. The self candidate keeps weight 1.
inline GrayImage nlm_denoise(const GrayImage& img, int patch_radius = 1, int search_radius = 5,
                             double strength = 10.0) {
  if (patch_radius < 1 || search_radius < 1 || strength <= 0.0)
    throw std::invalid_argument("nlm_denoise: invalid parameters");
  const double sigma = estimate_noise_sigma(img);
  const double noise_offset = 2.0 * sigma * sigma;
  const double inv_h2 = 1.0 / (strength * strength);
  const double patch_count =
      static_cast<double>((2 * patch_radius + 1) * (2 * patch_radius + 1));
  GrayImage out = img;
  for (std::size_t row = 0; row < img.height; ++row)
    for (std::size_t col = 0; col < img.width; ++col) {
      double weight_sum = 0.0;
      double value_sum = 0.0;
      for (int sr = -search_radius; sr <= search_radius; ++sr)
        for (int sc = -search_radius; sc <= search_radius; ++sc) {
          double d2 = 0.0;
          for (int pr = -patch_radius; pr <= patch_radius; ++pr)
            for (int pc = -patch_radius; pc <= patch_radius; ++pc) {
              const double a = detail::pad_at(img, static_cast<std::ptrdiff_t>(row) + pr,
                                              static_cast<std::ptrdiff_t>(col) + pc);
              const double b =
                  detail::pad_at(img, static_cast<std::ptrdiff_t>(row) + sr + pr,
                                 static_cast<std::ptrdiff_t>(col) + sc + pc);
              d2 += (a - b) * (a - b);
            }
          d2 /= patch_count;
          const double w = std::exp(-std::max(d2 - noise_offset, 0.0) * inv_h2);
          weight_sum += w;
          value_sum += w * detail::pad_at(img, static_cast<std::ptrdiff_t>(row) + sr,
                                          static_cast<std::ptrdiff_t>(col) + sc);
        }
      out.at(row, col) = detail::clamp_u8(value_sum / weight_sum);
    }
  return out;
}

/// Composed enhancement pass: median, then majority, then morphological close.
inline GrayImage enhance_pipeline(const GrayImage& img) {
  return morph_close(majority_filter(median_filter(img, 1), 1), StructElem::rect(3, 3));
}

}  // namespace cim
