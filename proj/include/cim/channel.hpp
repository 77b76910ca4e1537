#pragma once

#include <limits>
#include <random>

#include "cim/modem.hpp"

namespace cim {

using Rng = std::mt19937_64;

/// Pass +infinity as snr_db to disable noise entirely.
constexpr double kNoiselessSnrDb = std::numeric_limits<double>::infinity();

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Decorrelated 64-bit stream seed for (master, stream, trial). Trials seeded
/// this way are independent of worker count and scheduling.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t trial) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (stream + 0x9e3779b97f4a7c15ull));
  h = splitmix64(h ^ (trial + 0x9e3779b97f4a7c15ull));
  return h;
}

/// n_r i.i.d. CN(0,1) gains, one per receive antenna.
struct ChannelRealization {
  std::vector<cplx> gains;

  std::size_t size() const { return gains.size(); }
};

inline ChannelRealization draw_channel(std::size_t n_rx, Rng& rng) {
  if (n_rx == 0) throw std::invalid_argument("draw_channel: n_rx must be >= 1");
  std::normal_distribution<double> n01;
  const double s = std::sqrt(0.5);
  ChannelRealization h;
  h.gains.resize(n_rx);
  for (auto& g : h.gains) {
    const double re = n01(rng);
    const double im = n01(rng);
    g = cplx(s * re, s * im);
  }
  return h;
}

/// One received symbol block. The I and Q spreading rails are kept as separate
/// n_rx x chip_len complex matrices, rail_i = x_re*h*z_re^T + W_I and likewise
/// for Q; their combination rail_i + j*rail_q equals Y = h*s^T + W_I + j*W_Q.
struct ReceivedBlock {
  std::size_t n_rx = 0;
  std::size_t chip_len = 0;
  std::vector<cplx> rail_i;  // row-major n_rx x chip_len
  std::vector<cplx> rail_q;

  cplx rail_i_at(std::size_t r, std::size_t l) const { return rail_i[r * chip_len + l]; }
  cplx rail_q_at(std::size_t r, std::size_t l) const { return rail_q[r * chip_len + l]; }

  /// Combined baseband sample: rail_i + j*rail_q.
  cplx sample(std::size_t r, std::size_t l) const {
    const cplx a = rail_i_at(r, l);
    const cplx b = rail_q_at(r, l);
    return cplx(a.real() - b.imag(), a.imag() + b.real());
  }
};

/// Flat block fading plus AWGN at chip rate. N0 = Es/10^(snr_db/10) with
/// Es = 1; the noise matrices W_I and W_Q carry i.i.d. complex entries of
/// variance N0 each (N0/2 per real component), one matrix per spreading rail.
inline ReceivedBlock apply_channel(const TransmitBlock& block, const ChannelRealization& h,
                                   double snr_db, Rng& rng) {
  if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0))
    throw std::invalid_argument("apply_channel: snr_db must be finite or +inf");
  const std::size_t chip_len = block.chips.size();
  const std::size_t n_rx = h.size();
  ReceivedBlock y;
  y.n_rx = n_rx;
  y.chip_len = chip_len;
  y.rail_i.resize(n_rx * chip_len);
  y.rail_q.resize(n_rx * chip_len);
  const bool noiseless = std::isinf(snr_db);
  const double n0 = noiseless ? 0.0 : std::pow(10.0, -snr_db / 10.0);
  const double sd = std::sqrt(n0 / 2.0);  // per real component of each rail
  std::normal_distribution<double> n01;
  for (std::size_t r = 0; r < n_rx; ++r) {
    const cplx g = h.gains[r];
    for (std::size_t l = 0; l < chip_len; ++l) {
      const double si = block.chips[l].real();
      const double sq = block.chips[l].imag();
      cplx wi{0.0, 0.0};
      cplx wq{0.0, 0.0};
      if (!noiseless) {
        wi = cplx(sd * n01(rng), sd * n01(rng));
        wq = cplx(sd * n01(rng), sd * n01(rng));
      }
      y.rail_i[r * chip_len + l] = g * si + wi;
      y.rail_q[r * chip_len + l] = g * sq + wq;
    }
  }
  return y;
}

}  // namespace cim
