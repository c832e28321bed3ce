#include "zedloc/commands.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "zedloc/channel.hpp"
#include "zedloc/link.hpp"
#include "zedloc/locmap.hpp"
#include "zedloc/output.hpp"
#include "zedloc/raytrace.hpp"

namespace zedloc {

namespace {

double parse_coordinate(std::string_view text, const std::string& spec) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ValidationError(fmt::format("cannot parse point '{}' (expected bs, zed:<id> or x,y)", spec));
    }
    return v;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ValidationError(fmt::format("cannot write {}", (dir / name).string()));
    return f;
}

SystemParams effective_params(const Scenario& scenario, std::optional<int> n_tti) {
    SystemParams p = scenario.params();
    if (n_tti) p.n_tti = *n_tti;
    p.validate();
    return p;
}

TraceOptions scenario_trace_options(const Scenario& s, const SystemParams& p, double min_distance) {
    TraceOptions t;
    t.f0 = p.f0;
    t.max_reflections = s.raytrace.max_reflections;
    t.gain_floor_db = s.raytrace.gain_floor_db;
    t.min_distance_m = min_distance;
    return t;
}

PilotChannel scenario_channel(const Scenario& s, const SystemParams& p, const PilotGrid& grid, Vec2 zed, Vec2 sm) {
    const TraceOptions direct = scenario_trace_options(s, p, 0.0);
    const TraceOptions clamped = scenario_trace_options(s, p, s.raytrace.min_distance_m);
    return build_pilot_channel(trace(s.plan, s.bs, sm, direct), trace(s.plan, s.bs, zed, direct),
                               trace(s.plan, zed, sm, clamped), grid);
}

std::string bits_string(const std::vector<int>& bits) {
    std::string out;
    for (int b : bits) out += static_cast<char>('0' + b);
    return out;
}

}  // namespace

Vec2 resolve_point(const Scenario& scenario, const std::string& spec) {
    if (spec == "bs") return scenario.bs;
    if (spec.rfind("zed:", 0) == 0) {
        const std::string_view id_text = std::string_view(spec).substr(4);
        int id = 0;
        const auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
        if (ec != std::errc() || ptr != id_text.data() + id_text.size()) {
            throw ValidationError(fmt::format("cannot parse beacon reference '{}'", spec));
        }
        return scenario.beacon(id).position;
    }
    const auto comma = spec.find(',');
    if (comma == std::string::npos) {
        throw ValidationError(fmt::format("cannot parse point '{}' (expected bs, zed:<id> or x,y)", spec));
    }
    return {parse_coordinate(std::string_view(spec).substr(0, comma), spec),
            parse_coordinate(std::string_view(spec).substr(comma + 1), spec)};
}

double q_inverse(double p) {
    if (!(p > 0.0 && p <= 0.5)) throw ValidationError("q_inverse: p must be in (0, 0.5]");
    double lo = 0.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (q_function(mid) > p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

int cmd_validate_bep(const Scenario& scenario, const ValidateBepOptions& opts, std::ostream& out,
                     std::vector<BepPoint>* points_out) {
    const SystemParams params = effective_params(scenario, opts.n_tti);
    const PilotGrid grid = build_pilot_grid(params);
    const LinkBudget budget = derive_link_budget(params);
    const std::uint64_t seed = opts.common.seed.value_or(scenario.seed);
    if (opts.points < 1) throw ValidationError("validate-bep: --points must be >= 1");

    const auto n = static_cast<double>(grid.size());
    auto snr_db_for_bep = [&](double bep) {
        const double a = q_inverse(bep);
        return linear_to_db(8.0 * a * a / n);
    };
    const double lo = opts.snr_db_min.value_or(snr_db_for_bep(0.3));
    const double hi = opts.snr_db_max.value_or(snr_db_for_bep(1e-3));

    // Channel shape: a traced link when the scenario has a usable beacon,
    // otherwise flat unit links. Lambda is rescaled to hit each SNR.
    PilotChannel shape;
    std::string source = "flat";
    if (!scenario.beacons.empty()) {
        const ZedBeacon& b = opts.zed_id ? scenario.beacon(*opts.zed_id) : scenario.beacons.front();
        const Vec2 sm = opts.sm.value_or(b.position + Vec2{1.0, 0.0});
        shape = scenario_channel(scenario, params, grid, b.position, sm);
        source = fmt::format("traced zed {} -> ({:g}, {:g})", b.id, sm.x, sm.y);
    }
    double base_snr = shape.size() ? budget.p_u * zed_delta_norm2(shape) / budget.n0 : 0.0;
    if (!(base_snr > 0.0)) {
        const CVector ones = CVector::Ones(static_cast<Eigen::Index>(grid.size()));
        shape = make_pilot_channel(ones, ones, ones);
        base_snr = budget.p_u * zed_delta_norm2(shape) / budget.n0;
        source = "flat";
    }

    std::ostringstream csv;
    csv << kBepSchema << '\n' << params_banner(params) << '\n';
    csv << fmt::format("# channel: {}; bits per point: {}; seed: {}\n", source, opts.bits, seed);
    csv << "snr_db,analytic_bep,empirical_ber,band_3sigma,errors,bits,within_band\n";

    bool all_inside = true;
    std::vector<BepPoint> points;
    for (int i = 0; i < opts.points; ++i) {
        const double snr_db = opts.points == 1 ? lo : lo + (hi - lo) * i / (opts.points - 1);
        const double factor = std::sqrt(db_to_linear(snr_db) / base_snr);
        const PilotChannel chan = make_pilot_channel(shape.gamma, shape.phi, shape.lambda_ * factor);
        const DetectorState det(transmit_pilots(effective(chan, 0), budget.p_u),
                                transmit_pilots(effective(chan, 1), budget.p_u));
        const double analytic = analytic_bep(det, budget.n0);
        const NoiseModel noise{budget.n0, derive_seed(seed, static_cast<std::uint64_t>(i))};
        const BerEstimate est = monte_carlo_ber(chan, budget, noise, opts.bits, opts.common.workers);
        const double band = binomial_half_width(analytic, opts.bits);
        const bool inside = std::abs(est.ber - analytic) <= band;
        all_inside = all_inside && inside;
        points.push_back({snr_db, analytic, est.ber, band, est.errors, est.bits, inside});
        csv << fmt::format("{:.4f},{:.6e},{:.6e},{:.6e},{},{},{}\n", snr_db, analytic, est.ber, band, est.errors,
                           est.bits, inside ? 1 : 0);
    }
    out << csv.str();
    if (!opts.common.out_dir.empty()) open_output(opts.common.out_dir, "validate_bep.csv") << csv.str();
    if (points_out) *points_out = std::move(points);
    return all_inside ? kExitOk : kExitValidation;
}

int cmd_link(const Scenario& scenario, const LinkOptions& opts, std::ostream& out, LinkReport* report_out) {
    const SystemParams params = effective_params(scenario, opts.n_tti);
    const PilotGrid grid = build_pilot_grid(params);
    const LinkBudget budget = derive_link_budget(params);
    const ZedBeacon& beacon = scenario.beacon(opts.zed_id);
    const std::uint64_t seed = opts.common.seed.value_or(scenario.seed);
    if (opts.idle_periods < 0) throw ValidationError("link: idle periods must be >= 0");

    const PilotChannel chan = scenario_channel(scenario, params, grid, beacon.position, opts.sm);
    const CVector x_t = transmit_pilots(effective(chan, 0), budget.p_u);
    const CVector x_r = transmit_pilots(effective(chan, 1), budget.p_u);

    LinkReport report;
    report.sent_bits.assign(static_cast<std::size_t>(opts.idle_periods + params.l_train), 0);
    report.sent_bits.insert(report.sent_bits.end(), static_cast<std::size_t>(params.l_train), 1);
    report.sent_bits.insert(report.sent_bits.end(), beacon.codeword.begin(), beacon.codeword.end());

    Rng rng(derive_seed(seed, 0));
    const NoiseModel noise{budget.n0, seed};
    std::vector<CVector> stream;
    stream.reserve(report.sent_bits.size());
    for (int b : report.sent_bits) stream.push_back(add_noise(b == 0 ? x_t : x_r, noise.sample_power(), rng));

    const auto span_len = static_cast<std::size_t>(2 * params.l_train);
    for (std::size_t o = 0; o + span_len <= stream.size(); ++o) {
        report.mu_trace.push_back(sync_metric(std::span(stream).subspan(o, span_len), params.l_train));
    }
    report.sync_offset = detect_training(stream, params.l_train);

    const double separation = (x_t - x_r).norm();
    if (separation > 0.0) {
        const DetectorState truth(x_t, x_r);
        report.snr = zed_snr(truth, budget.n0);
        report.analytic_bep = analytic_bep(truth, budget.n0);
    }

    if (report.sync_offset) {
        const StateEstimate est = estimate_states(std::span(stream).subspan(*report.sync_offset, span_len),
                                                  params.l_train);
        if ((est.x_t - est.x_r).norm() > 0.0) {
            const DetectorState learned(est.x_t, est.x_r);
            report.estimated_snr = zed_snr(learned, budget.n0);
            for (std::size_t i = *report.sync_offset + span_len;
                 i < stream.size() && report.decoded_bits.size() < beacon.codeword.size(); ++i) {
                report.decoded_bits.push_back(detect_bit(stream[i], learned).bit);
            }
            if (report.decoded_bits.size() == beacon.codeword.size()) report.decoded_id = decode_id(report.decoded_bits);
        }
    }

    out << "# zedloc-link v1\n" << params_banner(params) << '\n';
    out << fmt::format("zed_id: {}\nzed_position_m: {:g},{:g}\nsm_position_m: {:g},{:g}\nseed: {}\n", beacon.id,
                       beacon.position.x, beacon.position.y, opts.sm.x, opts.sm.y, seed);
    out << fmt::format("snr_db: {}\nanalytic_bep: {:.6e}\n", format_db(report.snr), report.analytic_bep);
    out << "mu_trace:";
    for (double mu : report.mu_trace) out << fmt::format(" {:.4f}", mu);
    out << '\n';
    out << "sync_offset: " << (report.sync_offset ? std::to_string(*report.sync_offset) : "none") << '\n';
    out << fmt::format("estimated_snr_db: {}\n", format_db(report.estimated_snr));
    out << "sent_bits: " << bits_string(report.sent_bits) << '\n';
    out << "codeword: " << bits_string(beacon.codeword) << '\n';
    out << "decoded_bits: " << bits_string(report.decoded_bits) << '\n';
    out << "decoded_id: " << (report.decoded_id ? std::to_string(*report.decoded_id) : "none") << '\n';
    out << "decoded_ok: " << (report.decoded_id == beacon.id ? "yes" : "no") << '\n';
    if (report_out) *report_out = std::move(report);
    return kExitOk;
}

int cmd_sweep(const Scenario& scenario, const SweepOptions& opts, std::ostream& out, std::ostream& err) {
    if (opts.n_tti.empty()) throw ValidationError("sweep: at least one n_tti value required");
    if (opts.common.out_dir.empty()) throw ValidationError("sweep: --out-dir is required");
    Deployment dep = scenario.deployment();
    const LinkBudget budget = derive_link_budget(dep.params);
    const NttiComparison cmp = compare_ntti(dep, opts.n_tti, budget, scenario.propagation(opts.common.workers));

    std::vector<std::pair<int, RoomAccuracy>> accuracy;
    for (std::size_t k = 0; k < cmp.maps.size(); ++k) {
        const CoverageMap& map = cmp.maps[k];
        const int n_tti = opts.n_tti[k];
        SystemParams p = dep.params;
        p.n_tti = n_tti;
        {
            auto f = open_output(opts.common.out_dir, fmt::format("map_ntti{}.csv", n_tti));
            write_map_csv(f, map, p);
        }
        for (Heatmap h : {Heatmap::BestZed, Heatmap::BestSnrDb, Heatmap::BestBep, Heatmap::Covered}) {
            auto f = open_output(opts.common.out_dir, fmt::format("{}_ntti{}.pgm", heatmap_name(h), n_tti));
            write_pgm(f, map, h);
        }
        if (const std::size_t clamped = map.clamped_pixels(); clamped > 0) {
            err << fmt::format("warning: n_tti={}: {} pixel(s) closer than {:g} m to a beacon; distance clamped\n",
                               n_tti, clamped, scenario.raytrace.min_distance_m);
        }
        accuracy.emplace_back(n_tti, room_accuracy(map, scenario.plan));
    }
    {
        auto f = open_output(opts.common.out_dir, "ca_table.csv");
        write_ca_table_csv(f, cmp.table);
    }
    {
        auto f = open_output(opts.common.out_dir, "room_accuracy.csv");
        write_room_accuracy_csv(f, accuracy);
    }

    out << params_banner(dep.params) << '\n';
    out << fmt::format("beacons: {}; pixels: {} x {}\n", dep.beacons.size(),
                       cmp.maps.empty() ? 0 : cmp.maps.front().nx, cmp.maps.empty() ? 0 : cmp.maps.front().ny);
    for (const auto& [n_tti, acc] : accuracy) {
        out << fmt::format("n_tti={}: covered-in-room pixels {}, room accuracy {}\n", n_tti, acc.evaluated,
                           acc.accuracy ? fmt::format("{:.4f}", *acc.accuracy) : "undefined");
    }
    write_ca_table_csv(out, cmp.table);
    return kExitOk;
}

int cmd_trace(const Scenario& scenario, const TraceCommandOptions& opts, std::ostream& out) {
    const SystemParams params = scenario.params();
    const Vec2 tx = resolve_point(scenario, opts.tx);
    const Vec2 rx = resolve_point(scenario, opts.rx);
    const auto rays = trace(scenario.plan, tx, rx, scenario_trace_options(scenario, params, 0.0));
    if (opts.output) {
        save_rays(*opts.output, rays);
    } else if (!opts.common.out_dir.empty()) {
        auto f = open_output(opts.common.out_dir, "rays.csv");
        write_rays(f, rays);
    } else {
        write_rays(out, rays);
    }
    return kExitOk;
}

}  // namespace zedloc
