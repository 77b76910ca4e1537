#pragma once

#include <chrono>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>

#include "cim/baselines.hpp"
#include "cim/image.hpp"
#include "cim/metrics.hpp"
#include "cim/receiver.hpp"

namespace cim {

enum class Scheme { Cim, Qam, Psk };

inline std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Cim: return "cim";
    case Scheme::Qam: return "qam";
    default: return "psk";
  }
}

/// One link configuration. For CIM the constellation is M-QAM and n_w/chip_len
/// describe the spreading codebook; QAM/PSK ignore those fields.
struct SchemeConfig {
  Scheme scheme = Scheme::Cim;
  std::size_t m = 4;
  int n_w = 0;
  std::size_t chip_len = 0;
  std::size_t n_rx = 1;

  int eta() const {
    return scheme == Scheme::Cim ? spectral_efficiency(n_w, m) : ilog2(m);
  }

  void validate() const {
    if (m < 2 || !is_pow2(m)) throw std::invalid_argument("config: m must be a power of two >= 2");
    if (n_rx < 1) throw std::invalid_argument("config: n_rx must be >= 1");
    if (scheme == Scheme::Cim) {
      if (n_w < 0) throw std::invalid_argument("config: n_w must be >= 0");
      if (!is_pow2(chip_len) || (std::size_t{1} << n_w) > chip_len)
        throw std::invalid_argument("config: CIM needs chip_len a power of two with 2^n_w <= chip_len");
      if (n_w >= 1 && m < 4)
        throw std::invalid_argument("config: CIM with index bits needs m >= 4 (complex constellation)");
    }
  }
};

struct SweepConfig {
  SchemeConfig link;
  std::vector<double> snr_db;
  std::size_t min_bit_errors = 100;
  std::uint64_t max_bits = 10'000'000;
  std::uint64_t master_seed = 1;
  unsigned workers = 1;
};

struct SweepPoint {
  double snr_db = 0.0;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  double ber = 0.0;
  double throughput = 0.0;
  double wall_s = 0.0;

  friend bool operator==(const SweepPoint& a, const SweepPoint& b) {
    return a.snr_db == b.snr_db && a.bits == b.bits && a.errors == b.errors && a.ber == b.ber &&
           a.throughput == b.throughput;
  }
};

struct SweepResult {
  SchemeConfig link;
  std::vector<SweepPoint> points;
};

namespace detail {

inline int popcount32(std::uint32_t v) {
  int n = 0;
  for (; v; v &= v - 1) ++n;
  return n;
}

// Immutable per-sweep state shared across workers.
struct LinkKit {
  SchemeConfig cfg;
  SpreadingCodebook codebook;
  Constellation cons;
  int eta = 0;

  explicit LinkKit(const SchemeConfig& c) : cfg(c) {
    cfg.validate();
    if (cfg.scheme == Scheme::Cim) {
      codebook = build_codebook(cfg.n_w, cfg.chip_len);
      cons = build_constellation(cfg.m, ConstellationKind::Qam);
    } else {
      cons = build_constellation(
          cfg.m, cfg.scheme == Scheme::Qam ? ConstellationKind::Qam : ConstellationKind::Psk);
    }
    eta = cfg.eta();
  }

  // Transmit one eta-bit group (MSB-first in the low eta bits of tx_bits) and
  // return the detected group in the same packing.
  std::uint32_t transmit_group(std::uint32_t tx_bits, double snr_db, Rng& rng) const {
    if (cfg.scheme == Scheme::Cim) {
      CimSymbol sym;
      sym.c_im = static_cast<int>(tx_bits & ((1u << cfg.n_w) - 1u));
      sym.c_re = static_cast<int>((tx_bits >> cfg.n_w) & ((1u << cfg.n_w) - 1u));
      sym.sym_idx = static_cast<int>(tx_bits >> (2 * cfg.n_w));
      const TransmitBlock block = spread(sym, codebook, cons);
      const ChannelRealization h = draw_channel(cfg.n_rx, rng);
      const ReceivedBlock y = apply_channel(block, h, snr_db, rng);
      const CimSymbol hat = detect(y, h, codebook, cons);
      return (static_cast<std::uint32_t>(hat.sym_idx) << (2 * cfg.n_w)) |
             (static_cast<std::uint32_t>(hat.c_re) << cfg.n_w) |
             static_cast<std::uint32_t>(hat.c_im);
    }
    const cplx x = cons.point(tx_bits);
    const ChannelRealization h = draw_channel(cfg.n_rx, rng);
    const bool noiseless = std::isinf(snr_db) && snr_db > 0;
    const double n0 = noiseless ? 0.0 : std::pow(10.0, -snr_db / 10.0);
    const double sd = std::sqrt(n0 / 2.0);
    std::normal_distribution<double> n01;
    std::vector<cplx> y(cfg.n_rx);
    for (std::size_t r = 0; r < cfg.n_rx; ++r) {
      cplx w{0.0, 0.0};
      if (!noiseless) w = cplx(sd * n01(rng), sd * n01(rng));
      y[r] = h.gains[r] * x + w;
    }
    return static_cast<std::uint32_t>(baseline_detect(y, h, cons));
  }

  // One random-data trial; returns the number of bit errors.
  unsigned run_trial(double snr_db, std::uint64_t seed) const {
    Rng rng(seed);
    const std::uint32_t tx = static_cast<std::uint32_t>(rng() & ((1ull << eta) - 1ull));
    const std::uint32_t rx = transmit_group(tx, snr_db, rng);
    return static_cast<unsigned>(popcount32(tx ^ rx));
  }
};

// Runs fn(i) for i in [0, n) on `workers` threads; results land in out[i].
template <typename Fn>
inline void parallel_index(std::size_t n, unsigned workers, std::vector<std::uint8_t>& out, Fn fn) {
  if (workers <= 1 || n < 2 * workers) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t stride = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = w * stride;
    const std::size_t end = std::min(n, begin + stride);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Monte Carlo BER sweep. Each point simulates eta-bit symbol trials until
/// min_bit_errors errors have been counted or max_bits bits have been sent.
/// Trial t of point p draws everything from an rng seeded with
/// mix_seed(master_seed, p, t), so results do not depend on the worker count.
inline SweepResult run_ber_sweep(const SweepConfig& config) {
  const detail::LinkKit kit(config.link);
  if (config.snr_db.empty()) throw std::invalid_argument("run_ber_sweep: no SNR points");
  for (double snr : config.snr_db)
    if (std::isnan(snr) || (std::isinf(snr) && snr < 0))
      throw std::invalid_argument("run_ber_sweep: SNR points must be finite or +inf");
  if (config.min_bit_errors == 0 || config.max_bits == 0)
    throw std::invalid_argument("run_ber_sweep: stop rule must be positive");
  const unsigned workers = std::max(1u, config.workers);
  const std::size_t eta = static_cast<std::size_t>(kit.eta);
  SweepResult result;
  result.link = config.link;
  result.points.reserve(config.snr_db.size());
  std::vector<std::uint8_t> outcomes;
  for (std::size_t p = 0; p < config.snr_db.size(); ++p) {
    const double snr = config.snr_db[p];
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t trial = 0;
    std::size_t round = 1024;
    bool done = false;
    while (!done) {
      const std::uint64_t remaining = (config.max_bits - bits + eta - 1) / eta;
      const std::size_t n = static_cast<std::size_t>(
          std::min<std::uint64_t>(round, std::max<std::uint64_t>(remaining, 1)));
      outcomes.assign(n, 0);
      detail::parallel_index(n, workers, outcomes, [&](std::size_t i) {
        return static_cast<std::uint8_t>(
            kit.run_trial(snr, mix_seed(config.master_seed, p, trial + i)));
      });
      for (std::size_t i = 0; i < n; ++i) {
        bits += eta;
        errors += outcomes[i];
        if (errors >= config.min_bit_errors || bits >= config.max_bits) {
          done = true;
          break;
        }
      }
      trial += n;
      round = std::min<std::size_t>(round * 2, 1 << 16);
    }
    SweepPoint point;
    point.snr_db = snr;
    point.bits = bits;
    point.errors = errors;
    point.ber = static_cast<double>(errors) / static_cast<double>(bits);
    point.throughput = throughput(point.ber, static_cast<double>(eta), 1.0);
    point.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.points.push_back(point);
  }
  return result;
}

struct ImageLinkResult {
  GrayImage image;
  double ber = 0.0;
  double psnr_db = 0.0;
};

/// Send a whole image through the link at one SNR: pixels -> bits -> pad ->
/// per-symbol modulate/channel/detect -> unpad -> pixels. Deterministic for a
/// fixed seed; trial t is seeded with mix_seed(seed, 0, t).
inline ImageLinkResult run_image_link(const GrayImage& image, const SchemeConfig& link,
                                      double snr_db, std::uint64_t seed) {
  const detail::LinkKit kit(link);
  const std::size_t eta = static_cast<std::size_t>(kit.eta);
  const std::vector<std::uint8_t> tx_bits = pixels_to_bits(image);
  const PaddedBits padded = pad_bits(tx_bits, eta);
  const std::size_t n_groups = padded.bits.size() / eta;
  std::vector<std::uint8_t> rx_bits(padded.bits.size());
  for (std::size_t t = 0; t < n_groups; ++t) {
    std::uint32_t tx = 0;
    for (std::size_t k = 0; k < eta; ++k) tx = (tx << 1) | padded.bits[t * eta + k];
    Rng rng(mix_seed(seed, 0, t));
    const std::uint32_t rx = kit.transmit_group(tx, snr_db, rng);
    for (std::size_t k = 0; k < eta; ++k)
      rx_bits[t * eta + k] = static_cast<std::uint8_t>((rx >> (eta - 1 - k)) & 1u);
  }
  const std::vector<std::uint8_t> data_bits = unpad_bits(rx_bits, padded.pad);
  ImageLinkResult out;
  out.image = bits_to_pixels(data_bits, image.width, image.height);
  out.ber = ber(tx_bits, data_bits);
  out.psnr_db = psnr(image, out.image);
  return out;
}

namespace detail {

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

/// CSV rows `snr_db,bits,errors,ber,throughput`, one per SNR point, with an
/// optional leading `# config:` comment line.
inline void write_sweep_csv(std::ostream& os, const SweepResult& result,
                            std::string_view config_comment = {}) {
  if (!config_comment.empty()) os << "# config: " << config_comment << "\n";
  os << "snr_db,bits,errors,ber,throughput\n";
  for (const SweepPoint& p : result.points)
    os << detail::format_double(p.snr_db) << ',' << p.bits << ',' << p.errors << ','
       << detail::format_double(p.ber) << ',' << detail::format_double(p.throughput) << "\n";
}

}  // namespace cim
