#include "sdvc/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "sdvc/error.hpp"

namespace sdvc {

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

constexpr char kMagic[8] = {'S', 'D', 'V', 'C', 'M', 'O', 'D', 'L'};

class Writer {
public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    out.insert(out.end(), p, p + sizeof(T));
  }
  void put_u32(std::size_t v) { put(static_cast<std::uint32_t>(v)); }
  void put_doubles(const double* data, std::size_t n) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(data);
    out.insert(out.end(), p, p + n * sizeof(double));
  }
  void put_vector(const Vector& v) { put_doubles(v.data(), static_cast<std::size_t>(v.size())); }

  std::vector<std::uint8_t> out;
};

class Reader {
public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  void get_doubles(double* dst, std::size_t n) {
    need(n * sizeof(double));
    std::memcpy(dst, bytes_.data() + pos_, n * sizeof(double));
    pos_ += n * sizeof(double);
  }
  void get_vector(Vector& v, std::size_t n) {
    v.resize(static_cast<Eigen::Index>(n));
    get_doubles(v.data(), n);
  }
  std::size_t position() const { return pos_; }

private:
  void need(std::size_t n) const {
    require(pos_ + n <= bytes_.size(), ErrorKind::CorruptFile, "model file is truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_model(const AcousticModel& model) {
  const auto& cfg = model.config();
  Writer w;
  w.out.insert(w.out.end(), kMagic, kMagic + sizeof(kMagic));
  w.put(kModelFormatVersion);
  w.put_u32(static_cast<std::size_t>(cfg.sample_rate));
  w.put_u32(cfg.window_len);
  w.put_u32(cfg.hop);
  w.put_u32(cfg.fft_len);
  w.put_u32(cfg.cep_dim);
  w.put_u32(model.trained_taps);
  w.put_u32(model.lifter.trainable ? 1 : 0);
  w.put_u32(model.hidden_sizes().size());
  w.put_u32(0);
  for (auto h : model.hidden_sizes()) w.put_u32(h);
  w.put(static_cast<std::uint64_t>(model.parameter_count()));
  w.put_vector(model.input_stats.mean);
  w.put_vector(model.input_stats.stddev);
  w.put_vector(model.output_stats.mean);
  w.put_vector(model.output_stats.stddev);
  w.put_doubles(model.lifter.coeffs.data(), model.lifter.coeffs.size());
  w.put_doubles(model.parameters().data(), model.parameter_count());
  for (const auto& r : model.running_stats()) {
    w.put_vector(r.value_mean);
    w.put_vector(r.value_var);
    w.put_vector(r.gate_mean);
    w.put_vector(r.gate_var);
  }
  w.put(fnv1a(w.out));
  return std::move(w.out);
}

AcousticModel deserialize_model(std::span<const std::uint8_t> bytes,
                                const AnalysisConfig* expected) {
  require(bytes.size() >= sizeof(kMagic) && std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) == 0,
          ErrorKind::Malformed, "not a model file (bad magic)");
  Reader r(bytes.subspan(sizeof(kMagic)));
  const auto version = r.get<std::uint32_t>();
  require(version == kModelFormatVersion, ErrorKind::VersionMismatch,
          "model format version " + std::to_string(version) + ", expected " +
              std::to_string(kModelFormatVersion));
  require(bytes.size() >= sizeof(kMagic) + 8, ErrorKind::CorruptFile, "model file is truncated");

  AnalysisConfig cfg;
  cfg.sample_rate = static_cast<int>(r.get<std::uint32_t>());
  cfg.window_len = r.get<std::uint32_t>();
  cfg.hop = r.get<std::uint32_t>();
  cfg.fft_len = r.get<std::uint32_t>();
  cfg.cep_dim = r.get<std::uint32_t>();
  const std::size_t trained_taps = r.get<std::uint32_t>();
  const bool trainable = r.get<std::uint32_t>() != 0;
  const std::size_t num_hidden = r.get<std::uint32_t>();
  r.get<std::uint32_t>();
  require(num_hidden > 0 && num_hidden < 64, ErrorKind::CorruptFile, "implausible layer count");
  std::vector<std::size_t> hidden(num_hidden);
  for (auto& h : hidden) h = r.get<std::uint32_t>();

  if (expected != nullptr) {
    require(expected->sample_rate == cfg.sample_rate && expected->window_len == cfg.window_len &&
                expected->hop == cfg.hop && expected->fft_len == cfg.fft_len &&
                expected->cep_dim == cfg.cep_dim,
            ErrorKind::ShapeMismatch,
            "model has cep_dim " + std::to_string(cfg.cep_dim) + " / fft_len " +
                std::to_string(cfg.fft_len) + " at " + std::to_string(cfg.sample_rate) +
                " Hz, configuration expects cep_dim " + std::to_string(expected->cep_dim) +
                " / fft_len " + std::to_string(expected->fft_len) + " at " +
                std::to_string(expected->sample_rate) + " Hz");
  }

  AcousticModel model = [&] {
    try {
      return make_model_shell(cfg, hidden);
    } catch (const Error& e) {
      fail(ErrorKind::CorruptFile, std::string("invalid embedded configuration: ") + e.what());
    }
  }();
  const auto count = r.get<std::uint64_t>();
  require(count == model.parameter_count(), ErrorKind::ShapeMismatch,
          "parameter count does not match the embedded layer sizes");
  require(trained_taps > 0 && trained_taps <= cfg.fft_len, ErrorKind::CorruptFile,
          "trained tap count out of range");
  model.trained_taps = trained_taps;
  model.lifter.trainable = trainable;

  const std::size_t c = cfg.cep_dim;
  r.get_vector(model.input_stats.mean, c);
  r.get_vector(model.input_stats.stddev, c);
  r.get_vector(model.output_stats.mean, c);
  r.get_vector(model.output_stats.stddev, c);
  r.get_doubles(model.lifter.coeffs.data(), c);
  r.get_doubles(model.parameters().data(), model.parameter_count());
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    auto& rs = model.running_stats()[i];
    r.get_vector(rs.value_mean, hidden[i]);
    r.get_vector(rs.value_var, hidden[i]);
    r.get_vector(rs.gate_mean, hidden[i]);
    r.get_vector(rs.gate_var, hidden[i]);
  }
  const std::size_t body = sizeof(kMagic) + r.position();
  const auto stored = r.get<std::uint64_t>();
  require(fnv1a(bytes.first(body)) == stored, ErrorKind::CorruptFile, "model checksum mismatch");
  require(sizeof(kMagic) + r.position() == bytes.size(), ErrorKind::CorruptFile,
          "trailing bytes after model payload");
  return model;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::Io, "write failed for " + path.string());
}

void save_model(const std::filesystem::path& path, const AcousticModel& model) {
  write_file_bytes(path, serialize_model(model));
}

AcousticModel load_model(const std::filesystem::path& path, const AnalysisConfig* expected) {
  return deserialize_model(read_file_bytes(path), expected);
}

}  // namespace sdvc
