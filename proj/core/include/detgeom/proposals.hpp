// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "detgeom/box.hpp"

namespace detgeom {

struct ProposalConfig {
  int num_proposals = 300;
  double mu = 0.0;
  double sigma2 = 0.01;  // variance, not standard deviation
  std::uint64_t seed = 0;
};

/// Offsets are clamped to this magnitude so augmented extents stay positive.
inline constexpr double kMaxOffset = 0.49;

struct Offset {
  double x = 0.0;
  double y = 0.0;
};

/// Shift the center by (eps_x, eps_y) and shrink each side by twice the
/// shift: {cx + ex, cy + ey, w - 2|ex|, h - 2|ey|}. For the image-size box
/// this is an inward movement of the edges. Offsets are clamped to
/// [-kMaxOffset, kMaxOffset] first.
Box augment_box(const Box& b, double eps_x, double eps_y);

/// Deterministic standard-normal stream.
///
/// Uniforms come from std::mt19937_64, whose output sequence is fixed by
/// the C++ standard, converted with the top 53 bits. Normals use the
/// Box-Muller transform and emit both values of each pair (cosine branch
/// first), so the stream depends only on the seed.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed);

  double next();

 private:
  double uniform_open();  // (0, 1]

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// The (eps_x, eps_y) pairs drawn for each proposal, already clamped.
/// Pairs are drawn fresh per proposal: eps_x first, then eps_y.
std::vector<Offset> sample_offsets(const ProposalConfig& cfg);

/// num_proposals noise-augmented copies of the image-size box.
std::vector<Box> generate_proposals(const ProposalConfig& cfg);

}  // namespace detgeom
