#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "cim/codebook.hpp"

namespace cim {

/// Hamming distance over length; both streams must be the same nonzero length.
inline double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
  if (tx.size() != rx.size() || tx.empty())
    throw std::invalid_argument("ber: streams must have equal nonzero length");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < tx.size(); ++i)
    if ((tx[i] ^ rx[i]) & 1u) ++errors;
  return static_cast<double>(errors) / static_cast<double>(tx.size());
}

/// Bits per second delivered error-free: (1 - aber) * eta / t_s.
inline double throughput(double aber, double eta, double t_s) {
  if (t_s <= 0.0) throw std::invalid_argument("throughput: t_s must be > 0");
  if (aber < 0.0 || aber > 1.0) throw std::invalid_argument("throughput: aber must be in [0,1]");
  return (1.0 - aber) * eta / t_s;
}

/// Percentage of per-bit energy saved against a system of spectral
/// efficiency n_c when eta bits ride each symbol: (1 - n_c/eta) * 100.
inline double energy_saving(double n_c, double eta) {
  if (n_c <= 0.0) throw std::invalid_argument("energy_saving: n_c must be > 0");
  if (n_c > eta) throw std::invalid_argument("energy_saving: n_c must not exceed eta");
  return (1.0 - n_c / eta) * 100.0;
}

/// Spatial-modulation comparator: log2(M) symbol bits plus log2(N_T) antenna
/// index bits.
inline int sm_bits_per_symbol(std::size_t order, std::size_t n_tx) {
  if (order < 2 || !is_pow2(order) || n_tx < 1 || !is_pow2(n_tx))
    throw std::invalid_argument("sm_bits_per_symbol: order and n_tx must be powers of two");
  return ilog2(order) + ilog2(n_tx);
}

}  // namespace cim
