#include "landmark/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "landmark/error.hpp"

namespace landmark {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

static_assert(std::endian::native == std::endian::little,
              "WAV decoding assumes a little-endian host");

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open audio file: " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

struct PcmLayout {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const char* p, const PcmLayout& f) {
  if (f.format == kFormatFloat) {
    if (f.bits == 32) return static_cast<double>(load<float>(p));
    return load<double>(p);
  }
  switch (f.bits) {
    case 8:
      return (static_cast<double>(static_cast<std::uint8_t>(*p)) - 128.0) / 128.0;
    case 16:
      return static_cast<double>(load<std::int16_t>(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::uint8_t>(p[0]) | (static_cast<std::uint8_t>(p[1]) << 8) |
                       (static_cast<std::int8_t>(p[2]) * 65536);
      return static_cast<double>(v) / 8388608.0;
    }
    default:
      return static_cast<double>(load<std::int32_t>(p)) / 2147483648.0;
  }
}

SampledSignal downmix(const char* data, std::size_t bytes, const PcmLayout& f,
                      const std::string& name) {
  const std::size_t width = f.bits / 8;
  const std::size_t frame_bytes = width * f.channels;
  const std::size_t n = bytes / frame_bytes;
  if (n == 0) throw FormatError("zero-length audio: " + name);

  SampledSignal sig;
  sig.sample_rate_hz = static_cast<int>(f.rate);
  sig.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const char* frame = data + i * frame_bytes;
    double acc = 0.0;
    for (std::size_t c = 0; c < f.channels; ++c) acc += decode_sample(frame + c * width, f);
    double v = acc / f.channels;
    if (!std::isfinite(v)) throw FormatError("non-finite sample in " + name);
    sig.samples[i] = std::clamp(v, -1.0, 1.0);
  }
  return sig;
}

void check_layout(const PcmLayout& f, const std::string& name) {
  if (f.channels == 0) throw FormatError("audio declares zero channels: " + name);
  if (f.rate == 0) throw FormatError("audio declares zero sample rate: " + name);
  bool ok = (f.format == kFormatPcm && (f.bits == 8 || f.bits == 16 || f.bits == 24 || f.bits == 32)) ||
            (f.format == kFormatFloat && (f.bits == 32 || f.bits == 64));
  if (!ok) {
    throw FormatError("unsupported encoding (format " + std::to_string(f.format) + ", " +
                      std::to_string(f.bits) + " bits): " + name);
  }
}

SampledSignal decode_riff(const std::vector<char>& buf, const std::string& name) {
  if (buf.size() < 12 || std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw FormatError("not a WAVE file: " + name);

  PcmLayout fmt;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const char* id = buf.data() + pos;
    std::size_t size = load<std::uint32_t>(id + 4);
    std::size_t body = pos + 8;
    std::size_t avail = std::min(size, buf.size() - body);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (avail < 16) throw FormatError("truncated fmt chunk: " + name);
      fmt.format = load<std::uint16_t>(buf.data() + body);
      fmt.channels = load<std::uint16_t>(buf.data() + body + 2);
      fmt.rate = load<std::uint32_t>(buf.data() + body + 4);
      fmt.bits = load<std::uint16_t>(buf.data() + body + 14);
      if (fmt.format == kFormatExtensible) {
        if (avail < 26) throw FormatError("truncated WAVE_FORMAT_EXTENSIBLE header: " + name);
        // First two bytes of the sub-format GUID carry the real format tag.
        fmt.format = load<std::uint16_t>(buf.data() + body + 24);
      }
      check_layout(fmt, name);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk: " + name);
      return downmix(buf.data() + body, avail, fmt, name);
    }
    pos = body + size + (size & 1);
  }
  throw FormatError("no data chunk: " + name);
}

// NIST SPHERE as distributed with TIMIT: "NIST_1A\n   1024\n" then
// "key -type value" lines up to "end_head", raw samples after the header.
SampledSignal decode_sphere(const std::vector<char>& buf, const std::string& name) {
  std::string head(buf.data(), std::min<std::size_t>(buf.size(), 4096));
  std::istringstream hs(head);
  std::string magic;
  std::size_t header_bytes = 0;
  hs >> magic >> header_bytes;
  if (header_bytes == 0 || header_bytes > buf.size()) throw FormatError("bad SPHERE header: " + name);

  PcmLayout fmt{kFormatPcm, 1, 0, 16};
  std::string coding = "pcm";
  std::string byte_format = "01";
  std::string key, type;
  while (hs >> key && key != "end_head") {
    hs >> type;
    std::string value;
    hs >> value;
    if (key == "channel_count") fmt.channels = static_cast<std::uint16_t>(std::stoi(value));
    else if (key == "sample_rate") fmt.rate = static_cast<std::uint32_t>(std::stoul(value));
    else if (key == "sample_n_bytes") fmt.bits = static_cast<std::uint16_t>(8 * std::stoi(value));
    else if (key == "sample_coding") coding = value;
    else if (key == "sample_byte_format") byte_format = value;
  }
  if (coding != "pcm") throw FormatError("unsupported SPHERE coding '" + coding + "': " + name);
  check_layout(fmt, name);

  std::vector<char> data(buf.begin() + static_cast<std::ptrdiff_t>(header_bytes), buf.end());
  if (byte_format == "10" && fmt.bits == 16) {
    for (std::size_t i = 0; i + 1 < data.size(); i += 2) std::swap(data[i], data[i + 1]);
  }
  return downmix(data.data(), data.size(), fmt, name);
}

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

SampledSignal read_wav(const std::filesystem::path& path) {
  std::vector<char> buf = slurp(path);
  const std::string name = path.string();
  if (buf.size() >= 4 && std::memcmp(buf.data(), "RIFF", 4) == 0) return decode_riff(buf, name);
  if (buf.size() >= 7 && std::memcmp(buf.data(), "NIST_1A", 7) == 0) return decode_sphere(buf, name);
  if (buf.empty()) throw FormatError("zero-length audio: " + name);
  throw FormatError("unrecognised audio container: " + name);
}

void write_wav(const std::filesystem::path& path, const SampledSignal& sig, WavEncoding encoding) {
  if (sig.sample_rate_hz <= 0) throw ArgumentError("sample rate must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write audio file: " + path.string());

  const bool is_float = encoding == WavEncoding::kFloat32;
  const std::uint16_t bits = is_float ? 32 : 16;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(sig.samples.size() * (bits / 8));
  const auto rate = static_cast<std::uint32_t>(sig.sample_rate_hz);

  out.write("RIFF", 4);
  put<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, is_float ? kFormatFloat : kFormatPcm);
  put<std::uint16_t>(out, 1);
  put<std::uint32_t>(out, rate);
  put<std::uint32_t>(out, rate * (bits / 8));
  put<std::uint16_t>(out, bits / 8);
  put<std::uint16_t>(out, bits);
  out.write("data", 4);
  put<std::uint32_t>(out, data_bytes);
  for (double s : sig.samples) {
    if (is_float) {
      put<float>(out, static_cast<float>(s));
    } else {
      double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
      put<std::int16_t>(out, static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0)));
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace landmark
