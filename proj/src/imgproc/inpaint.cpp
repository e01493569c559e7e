#include "wedge/imgproc/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wedge/core/error.hpp"

namespace wedge::imgproc {
namespace {

constexpr int kNearestBand = 8;
constexpr int kLinearDilation = 3;

struct Candidate {
  long d2 = std::numeric_limits<long>::max();
  int row = -1;
  int col = -1;

  bool better_than(const Candidate& o) const {
    if (d2 != o.d2) return d2 < o.d2;
    if (row != o.row) return row < o.row;
    return col < o.col;
  }
};

/// Nearest unmasked pixel, searched ring by ring out to kNearestBand and
/// globally if nothing turns up there.
Candidate nearest_unmasked(const Mask& mask, int r, int c) {
  const int h = mask.height();
  const int w = mask.width();
  Candidate best;
  auto consider = [&](int rr, int cc) {
    if (rr < 0 || rr >= h || cc < 0 || cc >= w || is_set(mask, rr, cc)) return;
    const Candidate cand{static_cast<long>(rr - r) * (rr - r) + static_cast<long>(cc - c) * (cc - c), rr, cc};
    if (cand.better_than(best)) best = cand;
  };
  for (int k = 1; k <= kNearestBand; ++k) {
    // Ring k is at least k away; a strictly closer hit cannot be beaten or tied.
    if (best.row >= 0 && best.d2 < static_cast<long>(k) * k) break;
    for (int dc = -k; dc <= k; ++dc) {
      consider(r - k, c + dc);
      consider(r + k, c + dc);
    }
    for (int dr = -k + 1; dr <= k - 1; ++dr) {
      consider(r + dr, c - k);
      consider(r + dr, c + k);
    }
  }
  if (best.row >= 0) return best;
  for (int rr = 0; rr < h; ++rr)
    for (int cc = 0; cc < w; ++cc) consider(rr, cc);
  return best;
}

/// 8-connected components of the mask; label -1 for unmasked pixels.
std::vector<int> label_markers(const Mask& mask, int& count) {
  const int h = mask.height();
  const int w = mask.width();
  std::vector<int> labels(static_cast<std::size_t>(h) * w, -1);
  std::vector<std::pair<int, int>> stack;
  count = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!is_set(mask, r, c) || labels[static_cast<std::size_t>(r) * w + c] >= 0) continue;
      const int id = count++;
      labels[static_cast<std::size_t>(r) * w + c] = id;
      stack.emplace_back(r, c);
      while (!stack.empty()) {
        auto [pr, pc] = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = pr + dr, cc = pc + dc;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w || !is_set(mask, rr, cc)) continue;
            int& l = labels[static_cast<std::size_t>(rr) * w + cc];
            if (l >= 0) continue;
            l = id;
            stack.emplace_back(rr, cc);
          }
        }
      }
    }
  }
  return labels;
}

void fill_linear(GradientField& out, const GradientField& grads, const Mask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  int count = 0;
  const std::vector<int> labels = label_markers(mask, count);

  std::vector<std::vector<std::pair<int, int>>> members(count);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int l = labels[static_cast<std::size_t>(r) * w + c];
      if (l >= 0) members[l].emplace_back(r, c);
    }

  const int d = kLinearDilation;
  std::vector<int> ring_stamp(static_cast<std::size_t>(h) * w, -1);
  for (int id = 0; id < count; ++id) {
    // Ring: unmasked pixels within d of any pixel of this marker.
    std::vector<std::pair<int, int>> ring;
    for (auto [r, c] : members[id]) {
      for (int dr = -d; dr <= d; ++dr) {
        for (int dc = -d; dc <= d; ++dc) {
          if (dr * dr + dc * dc > d * d) continue;
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w || is_set(mask, rr, cc)) continue;
          int& stamp = ring_stamp[static_cast<std::size_t>(rr) * w + cc];
          if (stamp == id) continue;
          stamp = id;
          ring.emplace_back(rr, cc);
        }
      }
    }
    std::sort(ring.begin(), ring.end());

    for (auto [r, c] : members[id]) {
      if (ring.empty()) {
        const Candidate n = nearest_unmasked(mask, r, c);
        for (int ch = 0; ch < 2; ++ch) out.at(r, c, ch) = grads.at(n.row, n.col, ch);
        continue;
      }
      // Weighted mean written as base + weighted deviations, so a constant
      // field is reproduced exactly.
      for (int ch = 0; ch < 2; ++ch) {
        const double base = grads.at(ring.front().first, ring.front().second, ch);
        double num = 0.0, den = 0.0;
        for (auto [rr, cc] : ring) {
          const double wgt = 1.0 / static_cast<double>((rr - r) * (rr - r) + (cc - c) * (cc - c));
          num += wgt * (grads.at(rr, cc, ch) - base);
          den += wgt;
        }
        out.at(r, c, ch) = static_cast<float>(base + num / den);
      }
    }
  }
}

}  // namespace

MarkerMethod marker_method_from_string(const std::string& s) {
  if (s == "zero") return MarkerMethod::Zero;
  if (s == "nearest") return MarkerMethod::Nearest;
  if (s == "linear") return MarkerMethod::Linear;
  throw InvalidArgument("unknown marker method '" + s + "' (expected zero|nearest|linear)");
}

std::string to_string(MarkerMethod m) {
  switch (m) {
    case MarkerMethod::Zero: return "zero";
    case MarkerMethod::Nearest: return "nearest";
    case MarkerMethod::Linear: return "linear";
  }
  return "?";
}

GradientField interpolate_marker_gradients(const GradientField& grads, const Mask& mask, MarkerMethod method) {
  if (grads.height() != mask.height() || grads.width() != mask.width()) throw InvalidArgument("interpolate_marker_gradients: mask size differs from gradients");
  const std::size_t masked = count_set(mask);
  if (masked == mask.pixel_count()) throw InvalidArgument("interpolate_marker_gradients: mask covers the whole raster");

  GradientField out = grads;
  if (masked == 0) return out;

  switch (method) {
    case MarkerMethod::Zero:
      for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c)
          if (is_set(mask, r, c)) out.at(r, c, 0) = out.at(r, c, 1) = 0.0f;
      break;
    case MarkerMethod::Nearest:
      for (int r = 0; r < mask.height(); ++r)
        for (int c = 0; c < mask.width(); ++c) {
          if (!is_set(mask, r, c)) continue;
          const Candidate n = nearest_unmasked(mask, r, c);
          out.at(r, c, 0) = grads.at(n.row, n.col, 0);
          out.at(r, c, 1) = grads.at(n.row, n.col, 1);
        }
      break;
    case MarkerMethod::Linear:
      fill_linear(out, grads, mask);
      break;
  }
  return out;
}

}  // namespace wedge::imgproc
