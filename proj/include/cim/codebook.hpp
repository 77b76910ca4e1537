#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cim {

using cplx = std::complex<double>;

constexpr bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline int ilog2(std::size_t v) {
  int n = 0;
  while ((std::size_t{1} << n) < v) ++n;
  return n;
}

inline unsigned gray_encode(unsigned v) { return v ^ (v >> 1); }

inline unsigned gray_decode(unsigned g) {
  unsigned v = 0;
  for (; g; g >>= 1) v ^= g;
  return v;
}

/// Sylvester-Hadamard matrix of the given order: +/-1 entries, rows pairwise
/// orthogonal. Order must be a power of two (1 gives [[1]]).
inline std::vector<std::vector<int>> hadamard(std::size_t order) {
  if (!is_pow2(order))
    throw std::invalid_argument("hadamard: order must be a power of two >= 1");
  std::vector<std::vector<int>> h(order, std::vector<int>(order, 1));
  for (std::size_t blk = 1; blk < order; blk *= 2)
    for (std::size_t i = 0; i < blk; ++i)
      for (std::size_t j = 0; j < blk; ++j) {
        h[i + blk][j] = h[i][j];
        h[i][j + blk] = h[i][j];
        h[i + blk][j + blk] = -h[i][j];
      }
  return h;
}

/// 2^n_w spreading codes of chip_len chips each. Codes are the first rows of
/// the Sylvester-Hadamard matrix scaled by 1/sqrt(L), so every code has unit
/// norm and the set is orthonormal.
struct SpreadingCodebook {
  std::size_t n_codes = 0;
  std::size_t chip_len = 0;
  std::vector<double> chips;  // row-major n_codes x chip_len

  const double* code(std::size_t c) const { return chips.data() + c * chip_len; }
};

inline SpreadingCodebook build_codebook(int n_w, std::size_t chip_len) {
  if (n_w < 0) throw std::invalid_argument("build_codebook: n_w must be >= 0");
  if (!is_pow2(chip_len))
    throw std::invalid_argument("build_codebook: chip_len must be a power of two");
  const std::size_t n_codes = std::size_t{1} << n_w;
  if (n_codes > chip_len)
    throw std::invalid_argument("build_codebook: need 2^n_w <= chip_len");
  const auto h = hadamard(chip_len);
  SpreadingCodebook cb;
  cb.n_codes = n_codes;
  cb.chip_len = chip_len;
  cb.chips.resize(n_codes * chip_len);
  const double scale = 1.0 / std::sqrt(static_cast<double>(chip_len));
  for (std::size_t c = 0; c < n_codes; ++c)
    for (std::size_t l = 0; l < chip_len; ++l)
      cb.chips[c * chip_len + l] = scale * h[c][l];
  return cb;
}

enum class ConstellationKind { Qam, Psk };

/// M Gray-labelled complex points with unit average energy. points[label] is
/// the point carrying that bit pattern (MSB-first integer value).
struct Constellation {
  std::size_t order = 0;
  ConstellationKind kind = ConstellationKind::Qam;
  std::vector<cplx> points;

  int bits_per_symbol() const { return ilog2(order); }
  const cplx& point(std::size_t label) const { return points[label]; }
};

/// QAM uses a per-axis Gray code on a 2^ceil(b/2) x 2^floor(b/2) grid with the
/// I bits in the high half of the label; PSK places gray(p) at angle 2*pi*p/M.
inline Constellation build_constellation(std::size_t order, ConstellationKind kind) {
  if (order < 2 || !is_pow2(order))
    throw std::invalid_argument("build_constellation: order must be a power of two >= 2");
  Constellation cons;
  cons.order = order;
  cons.kind = kind;
  cons.points.assign(order, cplx{});
  const int n_bits = ilog2(order);
  if (kind == ConstellationKind::Psk) {
    for (std::size_t p = 0; p < order; ++p)
      cons.points[gray_encode(static_cast<unsigned>(p))] =
          std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(order));
  } else {
    const int bi = (n_bits + 1) / 2;
    const int bq = n_bits / 2;
    const std::size_t ki = std::size_t{1} << bi;
    const std::size_t kq = std::size_t{1} << bq;
    const double mean_sq =
        (static_cast<double>(ki * ki - 1) + static_cast<double>(kq * kq - 1)) / 3.0;
    const double scale = 1.0 / std::sqrt(mean_sq);
    for (std::size_t pi = 0; pi < ki; ++pi)
      for (std::size_t pq = 0; pq < kq; ++pq) {
        const std::size_t label =
            (static_cast<std::size_t>(gray_encode(static_cast<unsigned>(pi))) << bq) |
            gray_encode(static_cast<unsigned>(pq));
        const double re = 2.0 * static_cast<double>(pi) - static_cast<double>(ki - 1);
        const double im = 2.0 * static_cast<double>(pq) - static_cast<double>(kq - 1);
        cons.points[label] = scale * cplx(re, im);
      }
  }
  return cons;
}

}  // namespace cim
