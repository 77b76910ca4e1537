#pragma once

#include "cim/channel.hpp"

namespace cim {

/// Gray-labelled point for one log2(M)-bit group.
inline cplx baseline_modulate(std::span<const std::uint8_t> bits, const Constellation& cons) {
  if (bits.size() != static_cast<std::size_t>(cons.bits_per_symbol()))
    throw std::invalid_argument("baseline_modulate: bit group length must equal log2(order)");
  return cons.point(uint_from_bits(bits));
}

/// Exact per-symbol ML for a single stream: argmin_x ||y - x*h||^2, evaluated
/// through the correlation form. Equivalent to MRC plus minimum distance.
inline int baseline_detect(std::span<const cplx> y, const ChannelRealization& h,
                           const Constellation& cons) {
  if (y.size() != h.size())
    throw std::invalid_argument("baseline_detect: observation/channel size mismatch");
  cplx p{};
  double hh = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    p += std::conj(h.gains[r]) * y[r];
    hh += std::norm(h.gains[r]);
  }
  int best = 0;
  double best_metric = std::numeric_limits<double>::infinity();
  for (std::size_t label = 0; label < cons.order; ++label) {
    const cplx x = cons.point(label);
    const double metric = std::norm(x) * hh - 2.0 * (std::conj(x) * p).real();
    if (metric < best_metric) {
      best_metric = metric;
      best = static_cast<int>(label);
    }
  }
  return best;
}

/// One SIMO symbol over flat Rayleigh fading: y_r = h_r*x + w_r with w_r
/// i.i.d. CN(0, N0), N0 = 1/10^(snr_db/10).
inline std::vector<std::uint8_t> baseline_link(std::span<const std::uint8_t> bits,
                                               const Constellation& cons, std::size_t n_rx,
                                               double snr_db, Rng& rng) {
  const cplx x = baseline_modulate(bits, cons);
  const ChannelRealization h = draw_channel(n_rx, rng);
  const bool noiseless = std::isinf(snr_db) && snr_db > 0;
  const double n0 = noiseless ? 0.0 : std::pow(10.0, -snr_db / 10.0);
  const double sd = std::sqrt(n0 / 2.0);
  std::normal_distribution<double> n01;
  std::vector<cplx> y(n_rx);
  for (std::size_t r = 0; r < n_rx; ++r) {
    cplx w{0.0, 0.0};
    if (!noiseless) w = cplx(sd * n01(rng), sd * n01(rng));
    y[r] = h.gains[r] * x + w;
  }
  const int label = baseline_detect(y, h, cons);
  std::vector<std::uint8_t> out;
  append_bits(out, static_cast<std::uint32_t>(label), cons.bits_per_symbol());
  return out;
}

}  // namespace cim
