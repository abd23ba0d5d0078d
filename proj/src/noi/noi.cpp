#include "noi/noi.hpp"

#include <cmath>
#include <cstdlib>

#include "common/error.hpp"

namespace rlf::noi {

NoiResult classify_noi(const RegionPair& pair, const NoiOptions& options) {
  if (options.channel_threshold < 0 || options.channel_threshold > 255) {
    throw Error(ErrorCode::kInvalidArgument, "channel_threshold must be within 0..255");
  }
  const Raster& a = pair.visible;
  const Raster& b = pair.hidden;
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorCode::kDimensionMismatch,
                "raster sizes differ: " + std::to_string(a.width) + "x" +
                    std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                    std::to_string(b.height));
  }
  const auto& r = pair.region;
  const int x0 = static_cast<int>(std::floor(r.x));
  const int y0 = static_cast<int>(std::floor(r.y));
  const int x1 = static_cast<int>(std::ceil(r.right()));
  const int y1 = static_cast<int>(std::ceil(r.bottom()));
  if (x0 < 0 || y0 < 0 || x1 > a.width || y1 > a.height || r.w < 0 || r.h < 0) {
    throw Error(ErrorCode::kDimensionMismatch, "region lies outside the rasters");
  }
  NoiResult out;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const auto* p = a.pixel(x, y);
      const auto* q = b.pixel(x, y);
      for (int c = 0; c < 4; ++c) {
        if (std::abs(p[c] - q[c]) > options.channel_threshold) {
          ++out.differing_pixels;
          break;
        }
      }
    }
  }
  out.observability = out.differing_pixels >= options.min_diff_pixels
                          ? detection::Observability::kObservable
                          : detection::Observability::kNoi;
  return out;
}

std::vector<detection::FailureReport> annotate(const snapshot::CaptureBundle& bundle,
                                               std::vector<detection::FailureReport> failures,
                                               const NoiOptions& options) {
  const auto& shots = bundle.data().screenshots;
  for (auto& f : failures) {
    auto it = shots.find(f.id);
    if (it == shots.end()) continue;
    RegionPair pair{read_png(bundle.root_dir() / it->second.visible),
                    read_png(bundle.root_dir() / it->second.hidden), it->second.region, f.id};
    const NoiResult result = classify_noi(pair, options);
    f.observability = result.observability;
    f.differing_pixels = result.differing_pixels;
  }
  return failures;
}

}  // namespace rlf::noi
