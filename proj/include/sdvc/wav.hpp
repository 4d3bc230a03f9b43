#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sdvc/spectral.hpp"

namespace sdvc {

/// RIFF/WAVE, PCM 16-bit, mono, 16 kHz or 48 kHz. Samples are scaled by
/// 1/32768. Unknown chunks are skipped.
Waveform wav_read(const std::filesystem::path& path);
Waveform wav_decode(std::span<const std::uint8_t> bytes);

/// Samples are clamped to [-1, 1], scaled by 32768 and rounded half away
/// from zero, then clamped to the int16 range.
void wav_write(const std::filesystem::path& path, const Waveform& wave);
std::vector<std::uint8_t> wav_encode(const Waveform& wave);

bool is_supported_rate(int sample_rate);

}  // namespace sdvc
