#pragma once

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "zedloc/geometry.hpp"

namespace zedloc {

struct Wall {
    Segment segment;
    double transmission_loss_db = 0.0;           // power loss per crossing, >= 0
    std::complex<double> reflection_coeff{0.0};  // amplitude factor per bounce, |.| <= 1
};

struct Room {
    std::string name;
    Polygon polygon;
};

struct FloorPlan {
    std::vector<Wall> walls;
    std::vector<Room> rooms;
    Box bounds;

    /// Throws ValidationError on zero-length walls, out-of-range materials,
    /// non-simple rooms or an empty bounding box.
    void validate() const;

    /// Index into rooms of the first polygon containing p, or -1.
    int room_at(Vec2 p) const;
};

/// One propagation path: complex amplitude at the carrier and delay.
struct Ray {
    std::complex<double> gain;
    double delay;  // s

    friend bool operator==(const Ray&, const Ray&) = default;
};

struct TraceOptions {
    double f0 = 857e6;
    int max_reflections = 2;
    double gain_floor_db = -180.0;
    // Unfolded path lengths below this are clamped; 0 disables the clamp and
    // makes tx == rx an error.
    double min_distance_m = 0.0;
    // Scalar applied to every ray of the link (antenna gains).
    std::complex<double> link_gain{1.0, 0.0};
};

/// Specular image-source tracer over the plan's walls. Each path's gain is
/// link_gain * lambda/(4 pi d) * prod(reflection) * prod(transmission) with d
/// the unfolded length. Rays are sorted by delay, then by |gain| descending.
std::vector<Ray> trace(const FloorPlan& plan, Vec2 tx, Vec2 rx, const TraceOptions& opts = {});

std::vector<Ray> load_rays(const std::filesystem::path& path);
std::vector<Ray> read_rays(std::istream& in, const std::string& source = "<stream>");
void write_rays(std::ostream& out, const std::vector<Ray>& rays);
void save_rays(const std::filesystem::path& path, const std::vector<Ray>& rays);

}  // namespace zedloc
