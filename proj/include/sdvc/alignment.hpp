#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sdvc/acoustic_model.hpp"
#include "sdvc/spectral.hpp"

namespace sdvc {

inline constexpr double kDefaultSilenceDb = 40.0;

/// Drops every non-overlapping `block`-sample block whose RMS level is more
/// than `threshold_db` below the loudest block and concatenates the rest.
/// Throws ErrorKind::EmptyInput for an empty or entirely silent waveform.
Waveform trim_silence(const Waveform& wave, std::size_t block, double threshold_db);

struct DtwResult {
  std::vector<std::pair<std::size_t, std::size_t>> path;  // (source, target) frame indices
  double cost = 0.0;                                       // summed frame distances on the path
};

/// Dynamic time warping between column sequences (dim x frames) with steps
/// (1,0), (0,1), (1,1) and Euclidean frame distance. The path starts at (0,0)
/// and ends at (Ts-1, Tt-1); ties prefer the diagonal step.
DtwResult dtw_align(const Matrix& src, const Matrix& tgt);

}  // namespace sdvc
