#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cim {

/// 8-bit grayscale raster, row-major.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
  std::uint8_t& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
  std::size_t size() const { return pixels.size(); }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

inline GrayImage make_image(std::size_t width, std::size_t height, std::uint8_t fill = 0) {
  if (width == 0 || height == 0) throw std::invalid_argument("make_image: empty dimensions");
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(width * height, fill);
  return img;
}

namespace detail {

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
inline std::size_t next_pnm_int(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char ch = bytes[pos];
    if (ch == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(ch))) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos])))
    throw std::runtime_error("pgm: malformed header");
  std::size_t value = 0;
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    value = value * 10 + static_cast<std::size_t>(bytes[pos] - '0');
    if (value > 1u << 24) throw std::runtime_error("pgm: header value out of range");
    ++pos;
  }
  return value;
}

}  // namespace detail

/// Parse a binary (P5) or ASCII (P2) PGM with maxval 255.
inline GrayImage read_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2'))
    throw std::runtime_error("pgm: expected P5 or P2 magic");
  const bool binary = bytes[1] == '5';
  std::size_t pos = 2;
  const std::size_t width = detail::next_pnm_int(bytes, pos);
  const std::size_t height = detail::next_pnm_int(bytes, pos);
  const std::size_t maxval = detail::next_pnm_int(bytes, pos);
  if (width == 0 || height == 0) throw std::runtime_error("pgm: empty dimensions");
  if (maxval != 255) throw std::runtime_error("pgm: only maxval 255 is supported");
  GrayImage img = make_image(width, height);
  if (binary) {
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
      throw std::runtime_error("pgm: missing whitespace after maxval");
    ++pos;  // single whitespace byte after maxval
    if (bytes.size() - pos < img.size()) throw std::runtime_error("pgm: truncated data");
    for (std::size_t i = 0; i < img.size(); ++i)
      img.pixels[i] = static_cast<std::uint8_t>(bytes[pos + i]);
  } else {
    for (std::size_t i = 0; i < img.size(); ++i) {
      const std::size_t v = detail::next_pnm_int(bytes, pos);
      if (v > 255) throw std::runtime_error("pgm: sample exceeds maxval");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

/// Serialize as binary P5, maxval 255. A single optional comment line is
/// embedded after the magic.
inline std::string write_pgm(const GrayImage& img, std::string_view comment = {}) {
  if (img.size() != img.width * img.height)
    throw std::invalid_argument("write_pgm: inconsistent image");
  std::string out = "P5\n";
  if (!comment.empty()) {
    out += "# ";
    out.append(comment);
    out += '\n';
  }
  out += std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.size());
  return out;
}

/// 8 bits per pixel, MSB first, row-major.
inline std::vector<std::uint8_t> pixels_to_bits(const GrayImage& img) {
  std::vector<std::uint8_t> bits;
  bits.reserve(img.size() * 8);
  for (std::uint8_t px : img.pixels)
    for (int b = 7; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((px >> b) & 1u));
  return bits;
}

inline GrayImage bits_to_pixels(std::span<const std::uint8_t> bits, std::size_t width,
                                std::size_t height) {
  if (bits.size() != 8 * width * height)
    throw std::invalid_argument("bits_to_pixels: bit count must equal 8*width*height");
  GrayImage img = make_image(width, height);
  for (std::size_t i = 0; i < img.size(); ++i) {
    std::uint8_t px = 0;
    for (int b = 0; b < 8; ++b) px = static_cast<std::uint8_t>((px << 1) | (bits[i * 8 + b] & 1u));
    img.pixels[i] = px;
  }
  return img;
}

struct PaddedBits {
  std::vector<std::uint8_t> bits;
  std::size_t pad = 0;
};

/// Zero-pad the tail so the length becomes a multiple of eta.
inline PaddedBits pad_bits(std::span<const std::uint8_t> bits, std::size_t eta) {
  if (eta == 0) throw std::invalid_argument("pad_bits: eta must be >= 1");
  PaddedBits out;
  out.bits.assign(bits.begin(), bits.end());
  out.pad = (eta - bits.size() % eta) % eta;
  out.bits.resize(bits.size() + out.pad, 0);
  return out;
}

inline std::vector<std::uint8_t> unpad_bits(std::span<const std::uint8_t> bits, std::size_t pad) {
  if (pad > bits.size()) throw std::invalid_argument("unpad_bits: pad exceeds length");
  return std::vector<std::uint8_t>(bits.begin(), bits.end() - static_cast<std::ptrdiff_t>(pad));
}

/// 10*log10(255^2 / MSE); +infinity for identical images.
inline double psnr(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("psnr: image dimensions differ");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    sq += d * d;
  }
  if (sq == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sq / static_cast<double>(a.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

inline double mse(const GrayImage& a, const GrayImage& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("mse: image dimensions differ");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    sq += d * d;
  }
  return sq / static_cast<double>(a.size());
}

/// Deterministic smooth-shape test card: flat background with three discs.
/// Used by the CLI demo and the link-level experiments.
inline GrayImage make_test_pattern(std::size_t width = 128, std::size_t height = 128) {
  GrayImage img = make_image(width, height, 64);
  struct Disc {
    double cx, cy, r;
    std::uint8_t value;
  };
  const Disc discs[] = {
      {0.34 * static_cast<double>(width), 0.34 * static_cast<double>(height),
       0.21 * static_cast<double>(width), 200},
      {0.69 * static_cast<double>(width), 0.62 * static_cast<double>(height),
       0.13 * static_cast<double>(width), 144},
      {0.28 * static_cast<double>(width), 0.72 * static_cast<double>(height),
       0.08 * static_cast<double>(width), 24},
  };
  for (std::size_t row = 0; row < height; ++row)
    for (std::size_t col = 0; col < width; ++col)
      for (const Disc& d : discs) {
        const double dx = static_cast<double>(col) - d.cx;
        const double dy = static_cast<double>(row) - d.cy;
        if (dx * dx + dy * dy <= d.r * d.r) img.at(row, col) = d.value;
      }
  return img;
}

}  // namespace cim
