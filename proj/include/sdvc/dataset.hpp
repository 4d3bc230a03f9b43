#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdvc/config.hpp"
#include "sdvc/training.hpp"

namespace sdvc {

struct PairEntry {
  std::filesystem::path source;
  std::filesystem::path target;
};

/// One "source.wav target.wav" pair per line. Blank lines and text after '#'
/// are ignored; relative paths are resolved against `base`.
std::vector<PairEntry> parse_pair_list(std::string_view text, const std::filesystem::path& base);
std::vector<PairEntry> read_pair_list(const std::filesystem::path& list);
void write_pair_list(const std::filesystem::path& list, std::span<const PairEntry> pairs);

struct AlignedSet {
  std::vector<AlignedPair> pairs;
  std::vector<std::string> names;  // source file stems
};

/// Reads and aligns every pair. All files must share cfg.sample_rate.
AlignedSet load_aligned_set(std::span<const PairEntry> entries, const AnalysisConfig& cfg,
                            const PrepOptions& opts);

// Frames file layout (little-endian):
//
//   char[8]  magic "SDVCFRMS"
//   u32      version (kFramesFormatVersion)
//   u32 x 3  sample_rate, fft_len, cep_dim
//   u64      frame count T
//   per frame: u64 source frame, u64 target frame, f64 x c source cepstrum,
//              f64 x c target cepstrum, f64 x 2 (N/2 + 1) source half spectrum
//   u64      FNV-1a hash of every preceding byte
//
// Spectra of real frames are conjugate symmetric, so only bins 0..N/2 are
// stored and the rest are rebuilt as conjugates.
inline constexpr std::uint32_t kFramesFormatVersion = 1;

std::vector<std::uint8_t> encode_frames(const AlignedPair& data, const AnalysisConfig& cfg);
AlignedPair decode_frames(std::span<const std::uint8_t> bytes, const AnalysisConfig& cfg);
void save_frames(const std::filesystem::path& path, const AlignedPair& data,
                 const AnalysisConfig& cfg);
AlignedPair load_frames(const std::filesystem::path& path, const AnalysisConfig& cfg);

}  // namespace sdvc
