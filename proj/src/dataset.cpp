#include "sdvc/dataset.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "sdvc/error.hpp"
#include "sdvc/model_io.hpp"
#include "sdvc/wav.hpp"

namespace sdvc {

namespace {

constexpr char kMagic[8] = {'S', 'D', 'V', 'C', 'F', 'R', 'M', 'S'};
constexpr std::size_t kHeaderBytes = 32;

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

class Cursor {
public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    require(pos_ + sizeof(T) <= bytes_.size(), ErrorKind::CorruptFile, "frames file is truncated");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<PairEntry> parse_pair_list(std::string_view text, const std::filesystem::path& base) {
  std::vector<PairEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string src, tgt, extra;
    if (!(fields >> src)) continue;
    require(static_cast<bool>(fields >> tgt) && !(fields >> extra), ErrorKind::Malformed,
            "pair list line " + std::to_string(lineno) + ": expected two paths");
    auto resolve = [&](const std::string& p) {
      std::filesystem::path path(p);
      return path.is_absolute() ? path : base / path;
    };
    out.push_back({resolve(src), resolve(tgt)});
  }
  return out;
}

std::vector<PairEntry> read_pair_list(const std::filesystem::path& list) {
  const auto bytes = read_file_bytes(list);
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  try {
    return parse_pair_list(text, list.parent_path());
  } catch (const Error& e) {
    throw Error(e.kind(), list.string() + ": " + e.what());
  }
}

void write_pair_list(const std::filesystem::path& list, std::span<const PairEntry> pairs) {
  std::string text;
  for (const auto& p : pairs) text += p.source.string() + ' ' + p.target.string() + '\n';
  write_file_bytes(list, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

AlignedSet load_aligned_set(std::span<const PairEntry> entries, const AnalysisConfig& cfg,
                            const PrepOptions& opts) {
  AlignedSet set;
  for (const auto& e : entries) {
    const auto src = wav_read(e.source);
    const auto tgt = wav_read(e.target);
    for (const auto* w : {&src, &tgt}) {
      require(w->sample_rate == cfg.sample_rate, ErrorKind::SampleRateMismatch,
              (w == &src ? e.source : e.target).string() + " is " + std::to_string(w->sample_rate) +
                  " Hz, expected " + std::to_string(cfg.sample_rate) + " Hz");
    }
    set.pairs.push_back(align_utterances(src, tgt, cfg, opts));
    set.names.push_back(e.source.stem().string());
  }
  return set;
}

std::vector<std::uint8_t> encode_frames(const AlignedPair& data, const AnalysisConfig& cfg) {
  const std::size_t c = cfg.cep_dim;
  const std::size_t half = cfg.fft_len / 2 + 1;
  require(static_cast<std::size_t>(data.src_cep.rows()) == c &&
              static_cast<std::size_t>(data.tgt_cep.rows()) == c,
          ErrorKind::ShapeMismatch, "cepstra do not match the configured dimension");
  std::vector<std::uint8_t> out(kMagic, kMagic + sizeof(kMagic));
  put(out, kFramesFormatVersion);
  put(out, static_cast<std::uint32_t>(cfg.sample_rate));
  put(out, static_cast<std::uint32_t>(cfg.fft_len));
  put(out, static_cast<std::uint32_t>(c));
  put(out, static_cast<std::uint64_t>(data.size()));
  for (std::size_t t = 0; t < data.size(); ++t) {
    require(data.src_spec[t].size() == cfg.fft_len, ErrorKind::ShapeMismatch,
            "spectrum length does not match the FFT length");
    put(out, static_cast<std::uint64_t>(data.src_frame[t]));
    put(out, static_cast<std::uint64_t>(data.tgt_frame[t]));
    const auto col = static_cast<Eigen::Index>(t);
    for (std::size_t i = 0; i < c; ++i) put(out, data.src_cep(static_cast<Eigen::Index>(i), col));
    for (std::size_t i = 0; i < c; ++i) put(out, data.tgt_cep(static_cast<Eigen::Index>(i), col));
    for (std::size_t k = 0; k < half; ++k) {
      put(out, data.src_spec[t][k].real());
      put(out, data.src_spec[t][k].imag());
    }
  }
  put(out, fnv1a(out));
  return out;
}

AlignedPair decode_frames(std::span<const std::uint8_t> bytes, const AnalysisConfig& cfg) {
  require(bytes.size() >= sizeof(kMagic) && std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) == 0,
          ErrorKind::Malformed, "not a frames file");
  Cursor in(bytes.subspan(sizeof(kMagic)));
  const auto version = in.get<std::uint32_t>();
  require(version == kFramesFormatVersion, ErrorKind::VersionMismatch,
          "frames file version " + std::to_string(version) + " is not supported");
  const auto rate = in.get<std::uint32_t>();
  const auto n = in.get<std::uint32_t>();
  const auto c = in.get<std::uint32_t>();
  require(static_cast<int>(rate) == cfg.sample_rate && n == cfg.fft_len && c == cfg.cep_dim,
          ErrorKind::ShapeMismatch, "frames file was prepared with a different analysis config");
  const auto count = in.get<std::uint64_t>();
  const std::size_t half = n / 2 + 1;
  const std::size_t frame_bytes = 16 + 8 * (2 * c + 2 * half);
  require(count <= bytes.size() / frame_bytes &&
              bytes.size() == kHeaderBytes + count * frame_bytes + 8,
          ErrorKind::CorruptFile, "frames file size does not match its frame count");
  require(fnv1a(bytes.first(bytes.size() - 8)) ==
                                   Cursor(bytes.last(8)).get<std::uint64_t>(),
          ErrorKind::CorruptFile, "frames checksum mismatch");

  AlignedPair out;
  const auto frames = static_cast<Eigen::Index>(count);
  out.src_cep.resize(c, frames);
  out.tgt_cep.resize(c, frames);
  out.src_spec.reserve(count);
  for (Eigen::Index t = 0; t < frames; ++t) {
    out.src_frame.push_back(in.get<std::uint64_t>());
    out.tgt_frame.push_back(in.get<std::uint64_t>());
    for (std::uint32_t i = 0; i < c; ++i) out.src_cep(i, t) = in.get<double>();
    for (std::uint32_t i = 0; i < c; ++i) out.tgt_cep(i, t) = in.get<double>();
    Spectrum spec(n);
    for (std::size_t k = 0; k < half; ++k) {
      const double re = in.get<double>();
      spec[k] = {re, in.get<double>()};
    }
    for (std::size_t k = half; k < n; ++k) spec[k] = std::conj(spec[n - k]);
    out.src_spec.push_back(std::move(spec));
  }
  return out;
}

void save_frames(const std::filesystem::path& path, const AlignedPair& data,
                 const AnalysisConfig& cfg) {
  write_file_bytes(path, encode_frames(data, cfg));
}

AlignedPair load_frames(const std::filesystem::path& path, const AnalysisConfig& cfg) {
  try {
    return decode_frames(read_file_bytes(path), cfg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace sdvc
