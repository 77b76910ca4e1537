#pragma once

#include <utility>

#include "cim/channel.hpp"

namespace cim {

/// Despread correlator outputs: one complex n_rx-vector per candidate code and
/// rail. Stored code-major so a column is contiguous.
struct CorrelatorBank {
  std::size_t n_rx = 0;
  std::size_t n_codes = 0;
  std::vector<cplx> i_branch;  // n_codes x n_rx
  std::vector<cplx> q_branch;

  const cplx* i_col(std::size_t c) const { return i_branch.data() + c * n_rx; }
  const cplx* q_col(std::size_t c) const { return q_branch.data() + c * n_rx; }
};

/// Correlate both rails against every codebook entry. For the true code the
/// column is x_re*h (resp. x_im*h); orthogonality zeroes the others.
inline CorrelatorBank despread(const ReceivedBlock& y, const SpreadingCodebook& cb) {
  if (cb.chip_len != y.chip_len)
    throw std::invalid_argument("despread: codebook/block chip length mismatch");
  CorrelatorBank bank;
  bank.n_rx = y.n_rx;
  bank.n_codes = cb.n_codes;
  bank.i_branch.assign(cb.n_codes * y.n_rx, cplx{});
  bank.q_branch.assign(cb.n_codes * y.n_rx, cplx{});
  for (std::size_t c = 0; c < cb.n_codes; ++c) {
    const double* z = cb.code(c);
    for (std::size_t r = 0; r < y.n_rx; ++r) {
      cplx acc_i{};
      cplx acc_q{};
      const cplx* row_i = y.rail_i.data() + r * y.chip_len;
      const cplx* row_q = y.rail_q.data() + r * y.chip_len;
      for (std::size_t l = 0; l < y.chip_len; ++l) {
        acc_i += row_i[l] * z[l];
        acc_q += row_q[l] * z[l];
      }
      bank.i_branch[c * y.n_rx + r] = acc_i;
      bank.q_branch[c * y.n_rx + r] = acc_q;
    }
  }
  return bank;
}

/// Index estimates maximizing the squared column norm per rail, independently.
/// Ties break to the smallest index.
inline std::pair<int, int> detect_indices(const CorrelatorBank& bank) {
  if (bank.n_codes == 0 || bank.n_rx == 0)
    throw std::invalid_argument("detect_indices: empty bank");
  int best_i = 0;
  int best_q = 0;
  double max_i = -1.0;
  double max_q = -1.0;
  for (std::size_t c = 0; c < bank.n_codes; ++c) {
    double ei = 0.0;
    double eq = 0.0;
    for (std::size_t r = 0; r < bank.n_rx; ++r) {
      ei += std::norm(bank.i_col(c)[r]);
      eq += std::norm(bank.q_col(c)[r]);
    }
    if (ei > max_i) {
      max_i = ei;
      best_i = static_cast<int>(c);
    }
    if (eq > max_q) {
      max_q = eq;
      best_q = static_cast<int>(c);
    }
  }
  return {best_i, best_q};
}

/// ML symbol decision on the selected columns: argmin over the constellation
/// of ||(r_i + j*r_q) - x*h||^2 (unit-norm codes make the despread gain 1).
/// Ties break to the smallest label.
inline int detect_symbol(const CorrelatorBank& bank, int c_re, int c_im,
                         const ChannelRealization& h, const Constellation& cons) {
  const cplx* col_i = bank.i_col(static_cast<std::size_t>(c_re));
  const cplx* col_q = bank.q_col(static_cast<std::size_t>(c_im));
  int best = 0;
  double best_metric = std::numeric_limits<double>::infinity();
  for (std::size_t label = 0; label < cons.order; ++label) {
    const cplx x = cons.point(label);
    double metric = 0.0;
    for (std::size_t r = 0; r < bank.n_rx; ++r) {
      const cplx a = col_i[r];
      const cplx b = col_q[r];
      const cplx observed(a.real() - b.imag(), a.imag() + b.real());
      metric += std::norm(observed - x * h.gains[r]);
    }
    if (metric < best_metric) {
      best_metric = metric;
      best = static_cast<int>(label);
    }
  }
  return best;
}

/// Exact inverse of split_bits.
inline std::vector<std::uint8_t> demap(const CimSymbol& sym, int n_w, std::size_t order) {
  const int n_m = ilog2(order);
  std::vector<std::uint8_t> bits;
  bits.reserve(static_cast<std::size_t>(2 * n_w + n_m));
  append_bits(bits, static_cast<std::uint32_t>(sym.sym_idx), n_m);
  append_bits(bits, static_cast<std::uint32_t>(sym.c_re), n_w);
  append_bits(bits, static_cast<std::uint32_t>(sym.c_im), n_w);
  return bits;
}

/// Two-stage detection: despread, pick code indices, then the ML symbol.
inline CimSymbol detect(const ReceivedBlock& y, const ChannelRealization& h,
                        const SpreadingCodebook& cb, const Constellation& cons) {
  const CorrelatorBank bank = despread(y, cb);
  const auto [c_re, c_im] = detect_indices(bank);
  const int sym = detect_symbol(bank, c_re, c_im, h, cons);
  return CimSymbol{sym, c_re, c_im};
}

inline std::vector<std::uint8_t> receive(const ReceivedBlock& y, const ChannelRealization& h,
                                         const SpreadingCodebook& cb, const Constellation& cons) {
  return demap(detect(y, h, cb, cons), ilog2(cb.n_codes), cons.order);
}

/// Brute-force ML over every (c_re, c_im, symbol) hypothesis, minimizing the
/// residual against both rails. Verification reference for the two-stage
/// receiver; refuses search spaces beyond 2^20 hypotheses. Ties resolve to the
/// lexicographically smallest (c_re, c_im, sym_idx).
inline CimSymbol joint_ml_oracle(const ReceivedBlock& y, const ChannelRealization& h,
                                 const SpreadingCodebook& cb, const Constellation& cons) {
  const std::size_t hypotheses = cons.order * cb.n_codes * cb.n_codes;
  if (hypotheses > (std::size_t{1} << 20))
    throw std::invalid_argument("joint_ml_oracle: search space exceeds 2^20 hypotheses");
  if (cb.chip_len != y.chip_len)
    throw std::invalid_argument("joint_ml_oracle: codebook/block chip length mismatch");
  CimSymbol best{};
  double best_metric = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < cb.n_codes; ++a) {
    const double* za = cb.code(a);
    for (std::size_t b = 0; b < cb.n_codes; ++b) {
      const double* zb = cb.code(b);
      for (std::size_t label = 0; label < cons.order; ++label) {
        const cplx x = cons.point(label);
        double metric = 0.0;
        for (std::size_t r = 0; r < y.n_rx; ++r) {
          const cplx g = h.gains[r];
          const cplx* row_i = y.rail_i.data() + r * y.chip_len;
          const cplx* row_q = y.rail_q.data() + r * y.chip_len;
          for (std::size_t l = 0; l < y.chip_len; ++l) {
            metric += std::norm(row_i[l] - g * (x.real() * za[l]));
            metric += std::norm(row_q[l] - g * (x.imag() * zb[l]));
          }
        }
        if (metric < best_metric) {
          best_metric = metric;
          best = CimSymbol{static_cast<int>(label), static_cast<int>(a), static_cast<int>(b)};
        }
      }
    }
  }
  return best;
}

}  // namespace cim
