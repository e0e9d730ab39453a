// SPDX-License-Identifier: Apache-2.0
#include "detgeom/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "detgeom/error.hpp"

namespace detgeom {

Box augment_box(const Box& b, double eps_x, double eps_y) {
  const double ex = std::clamp(eps_x, -kMaxOffset, kMaxOffset);
  const double ey = std::clamp(eps_y, -kMaxOffset, kMaxOffset);
  return Box{b.cx + ex, b.cy + ey, b.w - 2.0 * std::abs(ex),
             b.h - 2.0 * std::abs(ey)};
}

GaussianStream::GaussianStream(std::uint64_t seed) : engine_(seed) {}

double GaussianStream::uniform_open() {
  // 53 random bits -> [0, 1), then flip to (0, 1] so log() stays finite.
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return 1.0 - u;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::vector<Offset> sample_offsets(const ProposalConfig& cfg) {
  if (cfg.num_proposals <= 0) {
    throw InputError("num_proposals must be positive");
  }
  if (!(cfg.sigma2 >= 0.0) || !std::isfinite(cfg.sigma2)) {
    throw InputError("noise variance must be finite and non-negative");
  }
  if (!std::isfinite(cfg.mu)) throw InputError("noise mean must be finite");

  const double sigma = std::sqrt(cfg.sigma2);
  GaussianStream normal(cfg.seed);
  std::vector<Offset> out;
  out.reserve(static_cast<std::size_t>(cfg.num_proposals));
  for (int i = 0; i < cfg.num_proposals; ++i) {
    const double ex = cfg.mu + sigma * normal.next();
    const double ey = cfg.mu + sigma * normal.next();
    out.push_back({std::clamp(ex, -kMaxOffset, kMaxOffset),
                   std::clamp(ey, -kMaxOffset, kMaxOffset)});
  }
  return out;
}

std::vector<Box> generate_proposals(const ProposalConfig& cfg) {
  const auto offsets = sample_offsets(cfg);
  std::vector<Box> out;
  out.reserve(offsets.size());
  for (const auto& e : offsets) {
    out.push_back(augment_box(kImageBox, e.x, e.y));
  }
  return out;
}

}  // namespace detgeom
