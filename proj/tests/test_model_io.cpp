#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "sdvc/error.hpp"
#include "sdvc/model_io.hpp"

using namespace sdvc;

namespace {

AcousticModel trained_looking_model(const AnalysisConfig& cfg, std::vector<std::size_t> hidden) {
  AcousticModel m(cfg, std::move(hidden), 11);
  std::mt19937_64 rng(4);
  const auto c = static_cast<Eigen::Index>(cfg.cep_dim);
  for (Eigen::Index i = 0; i < c; ++i) {
    m.input_stats.mean[i] = oracle::random_vector(rng, 1)[0];
    m.input_stats.stddev[i] = 1.0 + std::abs(oracle::random_vector(rng, 1)[0]);
    m.output_stats.mean[i] = oracle::random_vector(rng, 1)[0];
    m.output_stats.stddev[i] = 0.1 + std::abs(oracle::random_vector(rng, 1)[0]);
  }
  m.lifter.coeffs = oracle::random_vector(rng, cfg.cep_dim);
  m.lifter.trainable = true;
  m.trained_taps = cfg.fft_len / 4;
  for (auto& r : m.running_stats()) {
    r.value_mean.setRandom();
    r.gate_var.setConstant(2.5);
  }
  return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("model round trip is bit-exact") {
  const auto cfg = AnalysisConfig::narrow_band();
  const auto m = trained_looking_model(cfg, {12, 7});
  const auto bytes = serialize_model(m);
  const auto back = deserialize_model(bytes, &cfg);

  CHECK(back.config() == cfg);
  CHECK(back.hidden_sizes() == m.hidden_sizes());
  CHECK(back.trained_taps == m.trained_taps);
  CHECK(back.lifter.trainable);
  CHECK(back.lifter.coeffs == m.lifter.coeffs);
  CHECK(std::equal(back.parameters().begin(), back.parameters().end(), m.parameters().begin()));
  CHECK(serialize_model(back) == bytes);

  std::mt19937_64 rng(1);
  const auto x = oracle::random_vector(rng, 40 * 9);
  const Matrix in = Eigen::Map<const Matrix>(x.data(), 40, 9);
  CHECK(back.forward(in, Mode::Infer) == m.forward(in, Mode::Infer));

  const auto dir = std::filesystem::temp_directory_path() / "sdvc_model_io_test";
  std::filesystem::create_directories(dir);
  save_model(dir / "m.sdvc", m);
  CHECK(read_file_bytes(dir / "m.sdvc") == bytes);
  CHECK(serialize_model(load_model(dir / "m.sdvc")) == bytes);
  std::filesystem::remove_all(dir);
}

TEST_CASE("damaged model files are rejected") {
  const auto cfg = AnalysisConfig::narrow_band();
  const auto bytes = serialize_model(trained_looking_model(cfg, {6}));

  for (std::size_t len : {std::size_t{12}, std::size_t{40}, bytes.size() / 2, bytes.size() - 1}) {
    const std::span<const std::uint8_t> cut(bytes.data(), len);
    CHECK(kind_of([&] { deserialize_model(cut); }) == ErrorKind::CorruptFile);
  }
  for (std::size_t at : {std::size_t{60}, bytes.size() / 2, bytes.size() - 9}) {
    auto bad = bytes;
    bad[at] ^= 0x10;
    CHECK(kind_of([&] { deserialize_model(bad); }) == ErrorKind::CorruptFile);
  }
  auto extra = bytes;
  extra.push_back(0);
  CHECK(kind_of([&] { deserialize_model(extra); }) == ErrorKind::CorruptFile);

  auto magic = bytes;
  magic[0] = 'X';
  CHECK(kind_of([&] { deserialize_model(magic); }) == ErrorKind::Malformed);

  auto version = bytes;
  version[8] = 2;
  CHECK(kind_of([&] { deserialize_model(version); }) == ErrorKind::VersionMismatch);

  CHECK(kind_of([&] { load_model("/nonexistent/dir/m.sdvc"); }) == ErrorKind::Io);
}

TEST_CASE("a model for another bandwidth is a shape mismatch") {
  const auto narrow = AnalysisConfig::narrow_band();
  const auto full = AnalysisConfig::full_band();
  const auto bytes = serialize_model(trained_looking_model(full, {8}));
  CHECK(deserialize_model(bytes).cep_dim() == 120);
  CHECK(kind_of([&] { deserialize_model(bytes, &narrow); }) == ErrorKind::ShapeMismatch);
  CHECK_NOTHROW(deserialize_model(bytes, &full));
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a({}) == 0xcbf29ce484222325ULL);
  const std::uint8_t a[] = {'a'};
  CHECK(fnv1a(a) == 0xaf63dc4c8601ec8cULL);
  const std::uint8_t foobar[] = {'f', 'o', 'o', 'b', 'a', 'r'};
  CHECK(fnv1a(foobar) == 0x85944171f73967e8ULL);
}
