// Command-line front end for the CIM link library: BER sweeps, image
// transmission, enhancement filters, and closed-form metrics, all emitted as
// plot-ready CSV or PGM.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cim/cim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

cim::Scheme parse_scheme(const std::string& name) {
  if (name == "cim") return cim::Scheme::Cim;
  if (name == "qam") return cim::Scheme::Qam;
  if (name == "psk" || name == "qpsk") return cim::Scheme::Psk;
  throw CLI::ValidationError("--scheme", "expected cim, qam or psk");
}

// "start:step:stop" inclusive, or a single value. "inf" disables noise.
std::vector<double> parse_snr_range(const std::string& text) {
  auto parse_one = [](const std::string& s) {
    if (s == "inf") return cim::kNoiselessSnrDb;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
  };
  const std::size_t first = text.find(':');
  if (first == std::string::npos) return {parse_one(text)};
  const std::size_t second = text.find(':', first + 1);
  if (second == std::string::npos)
    throw std::invalid_argument("--snr expects start:step:stop or a single value");
  const double start = parse_one(text.substr(0, first));
  const double step = parse_one(text.substr(first + 1, second - first - 1));
  const double stop = parse_one(text.substr(second + 1));
  if (step <= 0.0 || !std::isfinite(step) || !std::isfinite(start) || !std::isfinite(stop) ||
      stop < start)
    throw std::invalid_argument("--snr range must have positive step and stop >= start");
  std::vector<double> points;
  for (double v = start; v <= stop + 1e-9; v += step) points.push_back(v);
  return points;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path);
}

std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct SchemeFlags {
  std::string scheme = "cim";
  std::size_t m = 4;
  int n_w = -1;
  std::size_t chip_len = 0;
  std::size_t n_rx = 1;

  void attach(CLI::App* app) {
    app->add_option("--scheme", scheme, "Link scheme: cim, qam or psk")->required();
    app->add_option("--m", m, "Constellation order M")->required();
    app->add_option("--nw", n_w, "Index bits per rail N_W (CIM)");
    app->add_option("--l", chip_len, "Chips per spreading code L (CIM)");
    app->add_option("--nr", n_rx, "Receive antennas")->required();
  }

  cim::SchemeConfig config() const {
    cim::SchemeConfig cfg;
    cfg.scheme = parse_scheme(scheme);
    cfg.m = m;
    cfg.n_rx = n_rx;
    if (cfg.scheme == cim::Scheme::Cim) {
      if (n_w < 0 || chip_len == 0)
        throw CLI::ValidationError("--scheme cim", "requires --nw and --l");
      cfg.n_w = n_w;
      cfg.chip_len = chip_len;
    }
    cfg.validate();
    return cfg;
  }

  std::string describe() const {
    const cim::Scheme s = parse_scheme(scheme);
    std::ostringstream os;
    os << "scheme=" << cim::scheme_name(s) << " m=" << m;
    if (s == cim::Scheme::Cim) os << " nw=" << n_w << " l=" << chip_len;
    os << " nr=" << n_rx;
    return os.str();
  }
};

int run_ber_command(const SchemeFlags& flags, const std::string& snr_text, std::uint64_t seed,
                    std::size_t min_errors, std::uint64_t max_bits, unsigned workers,
                    const std::string& out_path) {
  cim::SweepConfig cfg;
  cfg.link = flags.config();
  cfg.snr_db = parse_snr_range(snr_text);
  cfg.min_bit_errors = min_errors;
  cfg.max_bits = max_bits;
  cfg.master_seed = seed;
  cfg.workers = workers;
  const cim::SweepResult result = cim::run_ber_sweep(cfg);
  std::ostringstream comment;
  comment << flags.describe() << " snr=" << snr_text << " seed=" << seed
          << " min-errors=" << min_errors << " max-bits=" << max_bits;
  std::ostringstream csv;
  cim::write_sweep_csv(csv, result, comment.str());
  if (out_path.empty() || out_path == "-")
    std::cout << csv.str();
  else
    write_file(out_path, csv.str());
  return kExitOk;
}

int run_send_image(const SchemeFlags& flags, const std::string& in_path, double snr_db,
                   std::uint64_t seed, const std::string& out_path,
                   const std::string& report_path) {
  const cim::GrayImage image = cim::read_pgm(read_file(in_path));
  const cim::ImageLinkResult result = cim::run_image_link(image, flags.config(), snr_db, seed);
  std::ostringstream comment;
  comment << flags.describe() << " snr=" << format_value(snr_db) << " seed=" << seed
          << " in=" << in_path;
  write_file(out_path, cim::write_pgm(result.image, comment.str()));
  std::ostringstream report;
  report << "# config: " << comment.str() << "\n"
         << "ber,psnr\n"
         << format_value(result.ber) << ',' << format_value(result.psnr_db) << "\n";
  if (report_path.empty() || report_path == "-")
    std::cout << report.str();
  else
    write_file(report_path, report.str());
  return kExitOk;
}

struct EnhanceFlags {
  std::string filter;
  int radius = 1;
  int window = 3;
  int patch = 1;
  int search = 5;
  double strength = 10.0;
  int se = 3;
  std::string op = "smooth";
};

cim::GrayImage apply_filter(const cim::GrayImage& img, const EnhanceFlags& flags) {
  if (flags.filter == "median") return cim::median_filter(img, flags.radius);
  if (flags.filter == "majority") return cim::majority_filter(img, flags.radius);
  if (flags.filter == "morph") {
    const cim::StructElem se = cim::StructElem::rect(flags.se, flags.se);
    if (flags.op == "erode") return cim::erode(img, se);
    if (flags.op == "dilate") return cim::dilate(img, se);
    if (flags.op == "open") return cim::morph_open(img, se);
    if (flags.op == "close") return cim::morph_close(img, se);
    if (flags.op == "smooth") return cim::morph_smooth(img, se);
    throw CLI::ValidationError("--op", "expected erode, dilate, open, close or smooth");
  }
  if (flags.filter == "wiener") return cim::wiener_local(img, flags.window);
  if (flags.filter == "wavelet") return cim::wavelet_denoise(img);
  if (flags.filter == "nlm") return cim::nlm_denoise(img, flags.patch, flags.search, flags.strength);
  if (flags.filter == "pipeline") return cim::enhance_pipeline(img);
  throw CLI::ValidationError("--filter", "unknown filter " + flags.filter);
}

int run_enhance(const EnhanceFlags& flags, const std::string& in_path,
                const std::string& out_path, const std::string& ref_path) {
  const cim::GrayImage noisy = cim::read_pgm(read_file(in_path));
  const cim::GrayImage enhanced = apply_filter(noisy, flags);
  write_file(out_path, cim::write_pgm(enhanced, "filter=" + flags.filter));
  if (!ref_path.empty()) {
    const cim::GrayImage ref = cim::read_pgm(read_file(ref_path));
    std::cout << "filter,psnr_in,psnr_out\n"
              << flags.filter << ',' << format_value(cim::psnr(ref, noisy)) << ','
              << format_value(cim::psnr(ref, enhanced)) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CIM spread-spectrum link simulator and image toolkit"};
  app.require_subcommand(1);

  // ber
  auto* ber_cmd = app.add_subcommand("ber", "Monte Carlo BER sweep, CSV output");
  SchemeFlags ber_flags;
  ber_flags.attach(ber_cmd);
  std::string ber_snr;
  std::uint64_t ber_seed = 1;
  std::size_t ber_min_errors = 100;
  std::uint64_t ber_max_bits = 10'000'000;
  unsigned ber_workers = 1;
  std::string ber_out;
  ber_cmd->add_option("--snr", ber_snr, "SNR in dB: start:step:stop or single value")->required();
  ber_cmd->add_option("--seed", ber_seed, "Master seed");
  ber_cmd->add_option("--min-errors", ber_min_errors, "Bit errors to collect per point");
  ber_cmd->add_option("--max-bits", ber_max_bits, "Bit budget per point");
  ber_cmd->add_option("--workers", ber_workers, "Worker threads");
  ber_cmd->add_option("--out", ber_out, "Output CSV path (- for stdout)");

  // send-image
  auto* send_cmd = app.add_subcommand("send-image", "Transmit a PGM image over the link");
  SchemeFlags send_flags;
  send_flags.attach(send_cmd);
  std::string send_in;
  std::string send_snr = "10";
  std::uint64_t send_seed = 1;
  std::string send_out;
  std::string send_report;
  send_cmd->add_option("--in", send_in, "Input PGM image")->required();
  send_cmd->add_option("--snr", send_snr, "SNR in dB (inf disables noise)")->required();
  send_cmd->add_option("--seed", send_seed, "Seed");
  send_cmd->add_option("--out", send_out, "Received PGM path")->required();
  send_cmd->add_option("--report", send_report, "CSV report path (- for stdout)");

  // enhance
  auto* enhance_cmd = app.add_subcommand("enhance", "Apply an enhancement filter to a PGM image");
  EnhanceFlags enhance_flags;
  std::string enhance_in;
  std::string enhance_out;
  std::string enhance_ref;
  enhance_cmd
      ->add_option("--filter", enhance_flags.filter,
                   "median, majority, morph, wiener, wavelet, nlm or pipeline")
      ->required();
  enhance_cmd->add_option("--in", enhance_in, "Input PGM image")->required();
  enhance_cmd->add_option("--out", enhance_out, "Output PGM path")->required();
  enhance_cmd->add_option("--ref", enhance_ref, "Reference image for PSNR reporting");
  enhance_cmd->add_option("--radius", enhance_flags.radius, "Median/majority window radius");
  enhance_cmd->add_option("--window", enhance_flags.window, "Wiener window size (odd)");
  enhance_cmd->add_option("--patch", enhance_flags.patch, "NLM patch radius");
  enhance_cmd->add_option("--search", enhance_flags.search, "NLM search radius");
  enhance_cmd->add_option("--strength", enhance_flags.strength, "NLM strength h");
  enhance_cmd->add_option("--se", enhance_flags.se, "Morphology structuring element size (odd)");
  enhance_cmd->add_option("--op", enhance_flags.op,
                          "Morphology op: erode, dilate, open, close, smooth");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "Closed-form metrics as CSV");
  metrics_cmd->require_subcommand(1);
  auto* eta_cmd = metrics_cmd->add_subcommand("eta", "CIM spectral efficiency");
  std::size_t eta_m = 4;
  int eta_nw = 0;
  eta_cmd->add_option("--m", eta_m, "Constellation order M")->required();
  eta_cmd->add_option("--nw", eta_nw, "Index bits per rail N_W");
  auto* thr_cmd = metrics_cmd->add_subcommand("throughput", "Closed-form throughput");
  std::size_t thr_m = 4;
  int thr_nw = 0;
  double thr_aber = 0.0;
  double thr_ts = 1.0;
  thr_cmd->add_option("--m", thr_m, "Constellation order M")->required();
  thr_cmd->add_option("--nw", thr_nw, "Index bits per rail N_W");
  thr_cmd->add_option("--aber", thr_aber, "Average bit error rate");
  thr_cmd->add_option("--ts", thr_ts, "Symbol period in seconds");
  auto* energy_cmd = metrics_cmd->add_subcommand("energy", "Energy-saving percentage");
  std::size_t energy_m = 4;
  int energy_nw = 0;
  std::string energy_vs = "qam";
  std::size_t energy_nt = 2;
  energy_cmd->add_option("--m", energy_m, "Constellation order M")->required();
  energy_cmd->add_option("--nw", energy_nw, "Index bits per rail N_W")->required();
  energy_cmd->add_option("--vs", energy_vs, "Compared system: sm, qam or psk");
  energy_cmd->add_option("--nt", energy_nt, "Transmit antennas of the SM comparator");

  // make-pattern
  auto* pattern_cmd = app.add_subcommand("make-pattern", "Write the built-in PGM test card");
  std::string pattern_out;
  std::size_t pattern_w = 128;
  std::size_t pattern_h = 128;
  pattern_cmd->add_option("--out", pattern_out, "Output PGM path")->required();
  pattern_cmd->add_option("--width", pattern_w, "Width in pixels");
  pattern_cmd->add_option("--height", pattern_h, "Height in pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (ber_cmd->parsed())
      return run_ber_command(ber_flags, ber_snr, ber_seed, ber_min_errors, ber_max_bits,
                             ber_workers, ber_out);
    if (send_cmd->parsed()) {
      const std::vector<double> snr = parse_snr_range(send_snr);
      if (snr.size() != 1) throw CLI::ValidationError("--snr", "send-image wants one SNR value");
      return run_send_image(send_flags, send_in, snr[0], send_seed, send_out, send_report);
    }
    if (enhance_cmd->parsed()) return run_enhance(enhance_flags, enhance_in, enhance_out, enhance_ref);
    if (metrics_cmd->parsed()) {
      if (eta_cmd->parsed()) {
        std::cout << "eta\n" << cim::spectral_efficiency(eta_nw, eta_m) << "\n";
      } else if (thr_cmd->parsed()) {
        const int eta = cim::spectral_efficiency(thr_nw, thr_m);
        std::cout << "eta,throughput\n"
                  << eta << ',' << format_value(cim::throughput(thr_aber, eta, thr_ts)) << "\n";
      } else {
        const int eta = cim::spectral_efficiency(energy_nw, energy_m);
        int n_c = 0;
        if (energy_vs == "sm")
          n_c = cim::sm_bits_per_symbol(energy_m, energy_nt);
        else if (energy_vs == "qam" || energy_vs == "psk")
          n_c = cim::ilog2(energy_m);
        else
          throw CLI::ValidationError("--vs", "expected sm, qam or psk");
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", cim::energy_saving(n_c, eta));
        std::cout << "eta,n_c,saving_pct\n" << eta << ',' << n_c << ',' << buf << "\n";
      }
      return kExitOk;
    }
    if (pattern_cmd->parsed()) {
      write_file(pattern_out, cim::write_pgm(cim::make_test_pattern(pattern_w, pattern_h)));
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
