#include "sdvc/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "sdvc/error.hpp"
#include "sdvc/model_io.hpp"

namespace sdvc {

namespace {

std::uint32_t le32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

}  // namespace

bool is_supported_rate(int sample_rate) { return sample_rate == 16000 || sample_rate == 48000; }

Waveform wav_decode(std::span<const std::uint8_t> bytes) {
  require(bytes.size() >= 12 && std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
              std::memcmp(bytes.data() + 8, "WAVE", 4) == 0,
          ErrorKind::Malformed, "not a RIFF/WAVE file");

  bool have_fmt = false;
  int rate = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* hdr = bytes.data() + pos;
    const std::size_t size = le32(hdr + 4);
    const std::size_t body = pos + 8;
    require(body + size <= bytes.size() || std::memcmp(hdr, "data", 4) == 0, ErrorKind::Malformed,
            "chunk runs past the end of the file");
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      require(size >= 16, ErrorKind::Malformed, "fmt chunk too short");
      const std::uint8_t* f = bytes.data() + body;
      const auto format = le16(f);
      const auto channels = le16(f + 2);
      rate = static_cast<int>(le32(f + 4));
      const auto bits = le16(f + 14);
      require(format == 1, ErrorKind::Unsupported,
              "unsupported codec (format tag " + std::to_string(format) + "), expected PCM");
      require(channels == 1, ErrorKind::Unsupported,
              "unsupported channel count " + std::to_string(channels) + ", expected mono");
      require(bits == 16, ErrorKind::Unsupported,
              "unsupported sample width " + std::to_string(bits) + " bits, expected 16");
      require(is_supported_rate(rate), ErrorKind::Unsupported,
              "unsupported sample rate " + std::to_string(rate) + " Hz");
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      require(body + size <= bytes.size(), ErrorKind::Malformed, "data chunk is truncated");
      data = bytes.subspan(body, size);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }
  require(have_fmt, ErrorKind::Malformed, "missing fmt chunk");
  require(have_data, ErrorKind::Malformed, "missing data chunk");
  require(data.size() % 2 == 0, ErrorKind::Malformed, "odd byte count in 16-bit data");

  Waveform wave{std::vector<double>(data.size() / 2), rate};
  for (std::size_t i = 0; i < wave.samples.size(); ++i) {
    const auto v = static_cast<std::int16_t>(le16(data.data() + 2 * i));
    wave.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return wave;
}

Waveform wav_read(const std::filesystem::path& path) {
  try {
    return wav_decode(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> wav_encode(const Waveform& wave) {
  require(is_supported_rate(wave.sample_rate), ErrorKind::Unsupported,
          "unsupported sample rate " + std::to_string(wave.sample_rate) + " Hz");
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(wave.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(out, 16);
  put16(out, 1);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(wave.sample_rate));
  put32(out, static_cast<std::uint32_t>(wave.sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(out, data_bytes);
  for (double s : wave.samples) {
    require(std::isfinite(s), ErrorKind::InvalidArgument, "cannot encode a non-finite sample");
    const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

void wav_write(const std::filesystem::path& path, const Waveform& wave) {
  write_file_bytes(path, wav_encode(wave));
}

}  // namespace sdvc
