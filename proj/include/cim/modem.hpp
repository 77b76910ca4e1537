#pragma once

#include <span>

#include "cim/codebook.hpp"

namespace cim {

/// One transmission unit: constellation label plus the two active code indices.
struct CimSymbol {
  int sym_idx = 0;
  int c_re = 0;
  int c_im = 0;

  friend bool operator==(const CimSymbol&, const CimSymbol&) = default;
};

/// Bits conveyed per symbol interval: 2*N_W index bits plus log2(M) symbol bits.
inline int spectral_efficiency(int n_w, std::size_t order) {
  if (n_w < 0 || order < 2 || !is_pow2(order))
    throw std::invalid_argument("spectral_efficiency: invalid parameters");
  return 2 * n_w + ilog2(order);
}

inline std::uint32_t uint_from_bits(std::span<const std::uint8_t> bits) {
  std::uint32_t v = 0;
  for (std::uint8_t b : bits) v = (v << 1) | (b & 1u);
  return v;
}

inline void append_bits(std::vector<std::uint8_t>& out, std::uint32_t value, int n_bits) {
  for (int k = n_bits - 1; k >= 0; --k) out.push_back(static_cast<std::uint8_t>((value >> k) & 1u));
}

/// Split an eta-bit group into (symbol label, c_re, c_im). Layout is the
/// symbol bits first, then c_re, then c_im, all MSB-first natural binary.
inline CimSymbol split_bits(std::span<const std::uint8_t> bits, int n_w, std::size_t order) {
  const int n_m = ilog2(order);
  if (n_w < 0 || bits.size() != static_cast<std::size_t>(2 * n_w + n_m))
    throw std::invalid_argument("split_bits: bit group length must equal 2*n_w + log2(order)");
  CimSymbol sym;
  sym.sym_idx = static_cast<int>(uint_from_bits(bits.first(static_cast<std::size_t>(n_m))));
  sym.c_re = static_cast<int>(uint_from_bits(bits.subspan(static_cast<std::size_t>(n_m), static_cast<std::size_t>(n_w))));
  sym.c_im = static_cast<int>(uint_from_bits(bits.subspan(static_cast<std::size_t>(n_m + n_w), static_cast<std::size_t>(n_w))));
  return sym;
}

/// L complex baseband chips of one symbol: s_l = x_re*z_re[l] + j*x_im*z_im[l].
struct TransmitBlock {
  std::vector<cplx> chips;
};

inline TransmitBlock spread(const CimSymbol& sym, const SpreadingCodebook& cb,
                            const Constellation& cons) {
  if (sym.sym_idx < 0 || static_cast<std::size_t>(sym.sym_idx) >= cons.order ||
      sym.c_re < 0 || static_cast<std::size_t>(sym.c_re) >= cb.n_codes ||
      sym.c_im < 0 || static_cast<std::size_t>(sym.c_im) >= cb.n_codes)
    throw std::invalid_argument("spread: symbol index out of range");
  const cplx x = cons.point(static_cast<std::size_t>(sym.sym_idx));
  const double* zr = cb.code(static_cast<std::size_t>(sym.c_re));
  const double* zi = cb.code(static_cast<std::size_t>(sym.c_im));
  TransmitBlock block;
  block.chips.resize(cb.chip_len);
  for (std::size_t l = 0; l < cb.chip_len; ++l)
    block.chips[l] = cplx(x.real() * zr[l], x.imag() * zi[l]);
  return block;
}

}  // namespace cim
