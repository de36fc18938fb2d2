#pragma once

#include "surfsketch/color.hpp"
#include "surfsketch/spatial_index.hpp"

#include <optional>
#include <span>
#include <vector>

namespace surfsketch {

// One tracked pointer/hand sample. Times are milliseconds, positions meters.
struct HandSample {
  double t_ms = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 ray_dir = Vec3(0.0, 0.0, -1.0);
  bool pinch = false;

  friend bool operator==(const HandSample&, const HandSample&) = default;
};

struct RawStroke {
  std::vector<HandSample> samples;
  double brush_radius = 0.01;
  Rgba color = kDefaultInk;

  friend bool operator==(const RawStroke&, const RawStroke&) = default;
};

struct StrokePoint {
  SurfacePoint surface;
  Vec3 ray_dir = Vec3(0.0, 0.0, -1.0);
  // Index of the originating sample in the raw stroke; -1 for points
  // inserted by gap bridging.
  std::int32_t source_index = -1;

  bool inserted() const { return source_index < 0; }
};

struct ProjectedStroke {
  std::vector<StrokePoint> points;
  double brush_radius = 0.01;
  Rgba color = kDefaultInk;
  bool densified = false;

  // Surface points that came from samples, excluding bridging insertions.
  std::vector<SurfacePoint> sample_points() const;
};

// Consecutive samples closer than this are treated as sensor jitter and dropped.
inline constexpr double kSampleDedupDistance = 1e-5;

void validate_stroke(const RawStroke& stroke);

// Incremental anchored ("mimicry") projection. The first sample is seeded by
// raycast, falling back to the closest point; every later sample applies its
// mid-air displacement to the previous surface point and snaps that to the
// surface. Feeding samples one at a time or all at once gives the same result.
class MimicryProjector {
 public:
  explicit MimicryProjector(const SpatialIndex& index) : index_(&index) {}

  // Returns nothing when the sample is dropped as a near-duplicate.
  std::optional<StrokePoint> add(const HandSample& sample, std::int32_t source_index);

  bool started() const { return last_.has_value(); }

 private:
  struct Anchor {
    Vec3 hand;
    Vec3 surface;
  };
  const SpatialIndex* index_;
  std::optional<Anchor> last_;
};

ProjectedStroke project_mimicry(const SpatialIndex& index, const RawStroke& stroke);

// Baseline: every sample projected independently along its own ray.
ProjectedStroke project_spraycan(const SpatialIndex& index, const RawStroke& stroke);

// Surface points strictly between a and b so that, together with the
// endpoints, no consecutive gap exceeds max_gap. Follows the plane section
// spanned by the chord and the mean ray; falls back to closest-point
// bisection of the chord when the section is degenerate or disconnected.
std::vector<StrokePoint> bridge_segment(const SpatialIndex& index, const StrokePoint& a,
                                        const StrokePoint& b, double max_gap);

ProjectedStroke bridge_gaps(const SpatialIndex& index, const ProjectedStroke& stroke);

}  // namespace surfsketch
