#include "sdvc/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdvc/error.hpp"

namespace sdvc {

Waveform trim_silence(const Waveform& wave, std::size_t block, double threshold_db) {
  require(!wave.empty(), ErrorKind::EmptyInput, "cannot trim an empty waveform");
  require(block > 0, ErrorKind::InvalidArgument, "silence block must be positive");

  const std::size_t blocks = frame_count(wave.size(), block);
  std::vector<double> level_db(blocks);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t start = b * block;
    const std::size_t len = std::min(block, wave.size() - start);
    double energy = 0.0;
    for (std::size_t i = 0; i < len; ++i) energy += wave.samples[start + i] * wave.samples[start + i];
    const double rms = std::sqrt(energy / static_cast<double>(len));
    level_db[b] = rms > 0.0 ? 20.0 * std::log10(rms) : -std::numeric_limits<double>::infinity();
    peak = std::max(peak, level_db[b]);
  }
  require(std::isfinite(peak), ErrorKind::EmptyInput, "waveform is entirely silent");

  Waveform out{{}, wave.sample_rate};
  out.samples.reserve(wave.size());
  for (std::size_t b = 0; b < blocks; ++b) {
    if (level_db[b] < peak - threshold_db) continue;
    const std::size_t start = b * block;
    const std::size_t len = std::min(block, wave.size() - start);
    out.samples.insert(out.samples.end(), wave.samples.begin() + static_cast<std::ptrdiff_t>(start),
                       wave.samples.begin() + static_cast<std::ptrdiff_t>(start + len));
  }
  return out;
}

DtwResult dtw_align(const Matrix& src, const Matrix& tgt) {
  require(src.cols() > 0 && tgt.cols() > 0, ErrorKind::EmptyInput, "dtw of an empty sequence");
  require(src.rows() == tgt.rows(), ErrorKind::ShapeMismatch, "dtw sequences differ in dimension");
  const auto ts = static_cast<std::size_t>(src.cols());
  const auto tt = static_cast<std::size_t>(tgt.cols());
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> acc(ts * tt, inf);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * tt + j]; };
  for (std::size_t i = 0; i < ts; ++i) {
    for (std::size_t j = 0; j < tt; ++j) {
      const double d = (src.col(static_cast<Eigen::Index>(i)) - tgt.col(static_cast<Eigen::Index>(j))).norm();
      double best = (i == 0 && j == 0) ? 0.0 : inf;
      if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
      if (i > 0) best = std::min(best, at(i - 1, j));
      if (j > 0) best = std::min(best, at(i, j - 1));
      at(i, j) = d + best;
    }
  }

  DtwResult result;
  result.cost = at(ts - 1, tt - 1);
  std::size_t i = ts - 1, j = tt - 1;
  result.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const double diag = at(i - 1, j - 1);
      const double up = at(i - 1, j);
      const double left = at(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    } else if (i > 0) {
      --i;
    } else {
      --j;
    }
    result.path.emplace_back(i, j);
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

}  // namespace sdvc
