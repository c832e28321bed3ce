#include "zedloc/raytrace.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "zedloc/sysparams.hpp"

namespace zedloc {

void FloorPlan::validate() const {
    if (!(bounds.max.x > bounds.min.x && bounds.max.y > bounds.min.y)) {
        throw ValidationError("floor plan bounds must have positive width and height");
    }
    for (std::size_t i = 0; i < walls.size(); ++i) {
        const Wall& w = walls[i];
        if (w.segment.length() == 0.0) {
            throw ValidationError(fmt::format("wall {} has zero length", i));
        }
        if (!(w.transmission_loss_db >= 0.0)) {
            throw ValidationError(fmt::format("wall {} transmission_loss_db must be >= 0", i));
        }
        if (std::abs(w.reflection_coeff) > 1.0 + 1e-12) {
            throw ValidationError(fmt::format("wall {} |reflection_coeff| must be <= 1", i));
        }
    }
    for (const Room& room : rooms) {
        if (!is_simple_polygon(room.polygon)) {
            throw ValidationError(fmt::format("room '{}' is not a simple polygon", room.name));
        }
    }
}

int FloorPlan::room_at(Vec2 p) const {
    for (std::size_t i = 0; i < rooms.size(); ++i) {
        if (point_in_polygon(p, rooms[i].polygon)) return static_cast<int>(i);
    }
    return -1;
}

namespace {

constexpr double kLegEps = 1e-9;

class ImageSourceTracer {
   public:
    ImageSourceTracer(const FloorPlan& plan, Vec2 tx, Vec2 rx, const TraceOptions& opts)
        : plan_(plan), tx_(tx), rx_(rx), opts_(opts), wavelength_(kSpeedOfLight / opts.f0) {
        transmission_.reserve(plan.walls.size());
        for (const Wall& w : plan.walls) {
            transmission_.push_back(std::pow(10.0, -w.transmission_loss_db / 20.0));
        }
        floor_ = std::pow(10.0, opts.gain_floor_db / 20.0);
    }

    std::vector<Ray> run() {
        images_.push_back(tx_);
        add_path();
        extend(0);
        std::stable_sort(rays_.begin(), rays_.end(), [](const Ray& a, const Ray& b) {
            if (a.delay != b.delay) return a.delay < b.delay;
            return std::abs(a.gain) > std::abs(b.gain);
        });
        return std::move(rays_);
    }

   private:
    void extend(int depth) {
        if (depth >= opts_.max_reflections) return;
        for (std::size_t w = 0; w < plan_.walls.size(); ++w) {
            if (!sequence_.empty() && sequence_.back() == w) continue;
            if (plan_.walls[w].reflection_coeff == 0.0) continue;
            sequence_.push_back(w);
            images_.push_back(reflect_point(images_.back(), plan_.walls[w].segment));
            add_path();
            extend(depth + 1);
            images_.pop_back();
            sequence_.pop_back();
        }
    }

    // Backtracks from rx through the current image chain and records the ray
    // if every bounce lands on its wall segment.
    void add_path() {
        const std::size_t k = sequence_.size();
        points_.assign(k + 2, Vec2{});
        points_[0] = tx_;
        points_[k + 1] = rx_;
        std::complex<double> gain = opts_.link_gain;
        for (std::size_t i = k; i >= 1; --i) {
            const Wall& wall = plan_.walls[sequence_[i - 1]];
            const auto hit = intersect(points_[i + 1], images_[i], wall.segment);
            if (!hit || hit->t <= kLegEps || hit->t >= 1.0 - kLegEps) return;
            points_[i] = points_[i + 1] + hit->t * (images_[i] - points_[i + 1]);
            gain *= wall.reflection_coeff;
        }
        for (std::size_t leg = 0; leg <= k; ++leg) {
            gain *= leg_transmission(leg, k);
            if (gain == 0.0) return;
        }
        double d = distance(images_[k], rx_);
        if (opts_.min_distance_m > 0.0) d = std::max(d, opts_.min_distance_m);
        gain *= wavelength_ / (4.0 * std::numbers::pi * d);
        if (!(std::abs(gain) >= floor_) || !std::isfinite(std::abs(gain))) return;
        rays_.push_back({gain, d / kSpeedOfLight});
    }

    // Product of transmission factors of walls crossed by leg points_[leg] -> points_[leg + 1],
    // excluding the walls the leg bounces on at either end.
    double leg_transmission(std::size_t leg, std::size_t k) const {
        double factor = 1.0;
        const Vec2 p = points_[leg];
        const Vec2 q = points_[leg + 1];
        for (std::size_t w = 0; w < plan_.walls.size(); ++w) {
            if (leg >= 1 && sequence_[leg - 1] == w) continue;
            if (leg + 1 <= k && sequence_[leg] == w) continue;
            const auto hit = intersect(p, q, plan_.walls[w].segment);
            if (hit && hit->t > kLegEps && hit->t < 1.0 - kLegEps) factor *= transmission_[w];
        }
        return factor;
    }

    const FloorPlan& plan_;
    Vec2 tx_;
    Vec2 rx_;
    const TraceOptions& opts_;
    double wavelength_;
    double floor_ = 0.0;
    std::vector<double> transmission_;
    std::vector<std::size_t> sequence_;
    std::vector<Vec2> images_;
    std::vector<Vec2> points_;
    std::vector<Ray> rays_;
};

}  // namespace

std::vector<Ray> trace(const FloorPlan& plan, Vec2 tx, Vec2 rx, const TraceOptions& opts) {
    if (opts.max_reflections < 0) throw ValidationError("max_reflections must be >= 0");
    if (!(opts.f0 > 0.0)) throw ValidationError("f0 must be > 0");
    if (tx == rx && !(opts.min_distance_m > 0.0)) {
        throw ValidationError(fmt::format("trace: tx and rx coincide at ({}, {})", tx.x, tx.y));
    }
    for (std::size_t i = 0; i < plan.walls.size(); ++i) {
        if (plan.walls[i].segment.length() == 0.0) {
            throw ValidationError(fmt::format("trace: wall {} has zero length", i));
        }
    }
    return ImageSourceTracer(plan, tx, rx, opts).run();
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, const std::string& where) {
    field = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw ValidationError(fmt::format("{}: cannot parse number '{}'", where, field));
    }
    return value;
}

}  // namespace

std::vector<Ray> read_rays(std::istream& in, const std::string& source) {
    std::vector<Ray> rays;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const std::string where = fmt::format("{}:{}", source, line_no);

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = body.find(',', start);
            fields.push_back(body.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 3) {
            throw ValidationError(fmt::format("{}: expected 3 fields re,im,delay but got {}", where, fields.size()));
        }
        const double re = parse_field(fields[0], where);
        const double im = parse_field(fields[1], where);
        const double delay = parse_field(fields[2], where);
        if (delay < 0.0) throw ValidationError(fmt::format("{}: negative delay {}", where, delay));
        rays.push_back({{re, im}, delay});
    }
    return rays;
}

std::vector<Ray> load_rays(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(fmt::format("cannot open ray file {}", path.string()));
    return read_rays(in, path.string());
}

void write_rays(std::ostream& out, const std::vector<Ray>& rays) {
    out << "# zedloc-rays v1\n# re(gain),im(gain),delay_s\n";
    for (const Ray& r : rays) {
        out << fmt::format("{:.17g},{:.17g},{:.17g}\n", r.gain.real(), r.gain.imag(), r.delay);
    }
}

void save_rays(const std::filesystem::path& path, const std::vector<Ray>& rays) {
    std::ofstream out(path);
    if (!out) throw ValidationError(fmt::format("cannot write ray file {}", path.string()));
    write_rays(out, rays);
}

}  // namespace zedloc
