#include "landmark/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>
#include <unsupported/Eigen/FFT>

#include "landmark/error.hpp"

namespace landmark {

void BandSpec::validate() const {
  for (std::size_t b = 0; b < kNumBands; ++b) {
    auto [lo, hi] = bands[b];
    if (!(lo >= 0.0) || !(hi > lo)) {
      throw ArgumentError("band " + std::to_string(b + 1) + " must satisfy 0 <= low < high");
    }
  }
}

std::size_t FrameGrid::frame_at(double t) const {
  if (n_frames == 0) return 0;
  double idx = std::round((t - origin_s) / hop_s);
  return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(n_frames - 1)));
}

std::size_t FrameGrid::frames_for(double seconds) const {
  return static_cast<std::size_t>(std::max(0.0, std::round(seconds / hop_s)));
}

std::size_t odd_span_frames(double span_s, double hop_s) {
  auto n = static_cast<std::size_t>(std::max(1.0, std::round(span_s / hop_s)));
  return n % 2 == 0 ? n + 1 : n;
}

BandEnergyContours band_energies(const SampledSignal& sig, const BandSpec& spec, const AnalysisConfig& cfg) {
  spec.validate();
  if (sig.sample_rate_hz <= 0) throw ArgumentError("band_energies: sample rate must be positive");
  const double rate = sig.sample_rate_hz;
  const auto window = static_cast<std::size_t>(std::llround(cfg.window_s * rate));
  const auto hop = static_cast<std::size_t>(std::llround(cfg.hop_s * rate));
  const std::size_t nfft = cfg.fft_size;
  if (window == 0 || hop == 0 || hop > window) {
    throw ArgumentError("band_energies: need 0 < hop <= window (in samples)");
  }
  if (nfft < window || (nfft & (nfft - 1)) != 0) {
    throw ArgumentError("band_energies: fft_size must be a power of two no smaller than the window");
  }
  if (!(cfg.floor > 0.0)) throw ArgumentError("band_energies: floor must be positive");
  if (sig.samples.size() < window) {
    throw ArgumentError("band_energies: signal shorter than one analysis window");
  }

  std::vector<double> win(window);
  double win_energy = 0.0;
  for (std::size_t n = 0; n < window; ++n) {
    win[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(n) + 1.0) /
                                  (static_cast<double>(window) + 1.0));
    win_energy += win[n] * win[n];
  }

  // Bin k contributes to band b when its centre frequency lies in [low, high).
  const std::size_t n_bins = nfft / 2 + 1;
  std::array<std::vector<std::size_t>, kNumBands> members;
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double f = static_cast<double>(k) * rate / static_cast<double>(nfft);
    for (std::size_t b = 0; b < kNumBands; ++b) {
      if (f >= spec.bands[b].first && f < spec.bands[b].second) members[b].push_back(k);
    }
  }

  BandEnergyContours out;
  out.grid.hop_s = static_cast<double>(hop) / rate;
  out.grid.window_s = static_cast<double>(window) / rate;
  out.grid.n_frames = 1 + (sig.samples.size() - window) / hop;
  out.grid.origin_s = static_cast<double>(window) / (2.0 * rate);
  out.smoothing = Smoothing::kRaw;
  for (auto& row : out.energy_db) row.resize(out.grid.n_frames);

  Eigen::FFT<double> fft;
  std::vector<double> frame(nfft, 0.0);
  std::vector<std::complex<double>> spectrum;
  std::vector<double> power(n_bins);
  const double norm = static_cast<double>(nfft) * win_energy;
  for (std::size_t i = 0; i < out.grid.n_frames; ++i) {
    const double* x = sig.samples.data() + i * hop;
    for (std::size_t n = 0; n < window; ++n) frame[n] = x[n] * win[n];
    fft.fwd(spectrum, frame);
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double scale = (k == 0 || 2 * k == nfft) ? 1.0 : 2.0;
      power[k] = scale * std::norm(spectrum[k]) / norm;
    }
    for (std::size_t b = 0; b < kNumBands; ++b) {
      double e = 0.0;
      for (std::size_t k : members[b]) e += power[k];
      out.energy_db[b][i] = 10.0 * std::log10(e + cfg.floor);
    }
  }
  return out;
}

std::vector<double> convolve_normalized(std::span<const double> x, std::span<const double> kernel) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto len = static_cast<std::ptrdiff_t>(kernel.size());
  const std::ptrdiff_t half = len / 2;
  std::vector<double> y(x.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    double wsum = 0.0;
    for (std::ptrdiff_t j = 0; j < len; ++j) {
      const std::ptrdiff_t src = i + j - half;
      if (src < 0 || src >= n) continue;
      acc += kernel[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(src)];
      wsum += kernel[static_cast<std::size_t>(j)];
    }
    y[static_cast<std::size_t>(i)] = wsum > 0.0 ? acc / wsum : x[static_cast<std::size_t>(i)];
  }
  return y;
}

BandEnergyContours smooth_basic(const BandEnergyContours& c, double span_s) {
  if (!(span_s > 0.0)) throw ArgumentError("smooth_basic: span must be positive");
  const std::size_t len = odd_span_frames(span_s, c.grid.hop_s);
  const auto half = static_cast<std::ptrdiff_t>(len / 2);
  BandEnergyContours out = c;
  out.smoothing = Smoothing::kBasic;
  const auto n = static_cast<std::ptrdiff_t>(c.n_frames());
  for (std::size_t b = 0; b < kNumBands; ++b) {
    const auto& x = c.energy_db[b];
    // Direct window sums: spans are a few dozen frames, and unlike running
    // prefix sums this does not lose precision on long utterances.
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, i + half + 1);
      double sum = 0.0;
      for (std::ptrdiff_t j = lo; j < hi; ++j) sum += x[static_cast<std::size_t>(j)];
      out.energy_db[b][static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo);
    }
  }
  return out;
}

SmoothingKernel SmoothingKernel::hanning() { return SmoothingKernel{}; }

SmoothingKernel SmoothingKernel::custom(std::vector<double> weights) {
  if (weights.empty()) throw ArgumentError("custom kernel must have at least one weight");
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ArgumentError("custom kernel weights must be finite and non-negative");
    sum += w;
  }
  if (sum <= 0.0) throw ArgumentError("custom kernel weights are all zero");
  SmoothingKernel k;
  k.weights_ = std::move(weights);
  return k;
}

std::vector<double> SmoothingKernel::weights(std::size_t length) const {
  if (!weights_.empty()) return weights_;
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(n) + 1.0) /
                                (static_cast<double>(length) + 1.0));
  }
  return w;
}

BandEnergyContours smooth_advanced(const BandEnergyContours& c, double span_s, const SmoothingKernel& kernel) {
  if (!(span_s > 0.0)) throw ArgumentError("smooth_advanced: span must be positive");
  const std::vector<double> w = kernel.weights(odd_span_frames(span_s, c.grid.hop_s));
  BandEnergyContours out = c;
  out.smoothing = Smoothing::kAdvanced;
  for (std::size_t b = 0; b < kNumBands; ++b) out.energy_db[b] = convolve_normalized(c.energy_db[b], w);
  return out;
}

BandMatrix rate_of_rise(const BandEnergyContours& c, double step_s) {
  if (!(step_s >= c.grid.hop_s)) throw ArgumentError("rate_of_rise: step must be at least one hop");
  const auto k = static_cast<std::ptrdiff_t>(std::round(step_s / (2.0 * c.grid.hop_s)));
  const auto n = static_cast<std::ptrdiff_t>(c.n_frames());
  BandMatrix ror;
  for (std::size_t b = 0; b < kNumBands; ++b) {
    const auto& x = c.energy_db[b];
    ror[b].resize(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto ahead = static_cast<std::size_t>(std::min(n - 1, i + k));
      const auto behind = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, i - k));
      ror[b][static_cast<std::size_t>(i)] = x[ahead] - x[behind];
    }
  }
  return ror;
}

void write_contours_csv(std::ostream& out, const BandEnergyContours& c) {
  out << "frame_time_s";
  for (std::size_t b = 0; b < kNumBands; ++b) out << ",band" << (b + 1) << "_db";
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < c.n_frames(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f", c.grid.frame_time(i));
    out << buf;
    for (std::size_t b = 0; b < kNumBands; ++b) {
      std::snprintf(buf, sizeof buf, ",%.4f", c.energy_db[b][i]);
      out << buf;
    }
    out << '\n';
  }
}

void write_contours_json(std::ostream& out, const BandEnergyContours& c) {
  nlohmann::json j;
  j["hop_s"] = c.grid.hop_s;
  j["window_s"] = c.grid.window_s;
  j["origin_s"] = c.grid.origin_s;
  std::vector<double> times(c.n_frames());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = c.grid.frame_time(i);
  j["frame_time_s"] = times;
  j["bands_db"] = c.energy_db;
  out << j.dump() << '\n';
}

}  // namespace landmark
