#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sdvc/acoustic_model.hpp"
#include "sdvc/config.hpp"

namespace sdvc {

// Model file layout (all integers and floats little-endian):
//
//   char[8]   magic "SDVCMODL"
//   u32       format version (kModelFormatVersion)
//   u32 x 9   sample_rate, window_len, hop, fft_len, cep_dim, trained_taps,
//             lifter_trainable, num_hidden, reserved (0)
//   u32 x H   hidden layer sizes
//   u64       trainable parameter count
//   f64 x c   input mean, input stddev, output mean, output stddev, lifter
//   f64 x P   trainable parameters (AcousticModel layout)
//   f64 x ... per layer: value running mean, value running var,
//             gate running mean, gate running var
//   u64       FNV-1a hash of every preceding byte
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> serialize_model(const AcousticModel& model);

/// When `expected` is given its shape fields (rate, window, hop, fft_len,
/// cep_dim) must equal the embedded config or ErrorKind::ShapeMismatch is
/// raised.
AcousticModel deserialize_model(std::span<const std::uint8_t> bytes,
                                const AnalysisConfig* expected = nullptr);

void save_model(const std::filesystem::path& path, const AcousticModel& model);
AcousticModel load_model(const std::filesystem::path& path,
                         const AnalysisConfig* expected = nullptr);

/// 64-bit FNV-1a, the checksum used by the binary file formats.
std::uint64_t fnv1a(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace sdvc
