#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "zedloc/commands.hpp"
#include "zedloc/link.hpp"
#include "zedloc/output.hpp"

using namespace zedloc;
namespace fs = std::filesystem;

namespace {

Scenario fixture(double pixel = 1.0) {
    Scenario s = load_scenario(ZEDLOC_FIXTURE_DIR "/four_room.json");
    s.config.pixel_size_m = pixel;
    return s;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("zedloc_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("point references") {
    const Scenario s = fixture();
    CHECK(resolve_point(s, "bs") == s.bs);
    CHECK(resolve_point(s, "zed:3") == Vec2{4, 12});
    CHECK(resolve_point(s, "1.5,-2") == Vec2{1.5, -2});
    CHECK_THROWS_AS(resolve_point(s, "zed:9"), ValidationError);
    CHECK_THROWS_AS(resolve_point(s, "zed:x"), ValidationError);
    CHECK_THROWS_AS(resolve_point(s, "1,2,3"), ValidationError);
    CHECK_THROWS_AS(resolve_point(s, "here"), ValidationError);
}

TEST_CASE("inverse Q") {
    for (double x : {0.0, 0.3, 1.0, 2.0, 3.09, 5.0}) CHECK(q_inverse(q_function(x)) == doctest::Approx(x).epsilon(1e-9));
    CHECK_THROWS_AS(q_inverse(0.6), ValidationError);
}

TEST_CASE("validate-bep") {
    const Scenario s = fixture();
    ValidateBepOptions o;
    o.points = 5;
    o.bits = 20000;
    o.common.out_dir = scratch("bep");
    std::ostringstream out;
    std::vector<BepPoint> pts;
    const int rc = cmd_validate_bep(s, o, out, &pts);
    CHECK(rc == kExitOk);
    REQUIRE(pts.size() == 5);
    CHECK(pts.front().analytic == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(pts.back().analytic == doctest::Approx(1e-3).epsilon(1e-9));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].within_band);
        CHECK(pts[i].bits == 20000);
        CHECK(pts[i].band == doctest::Approx(binomial_half_width(pts[i].analytic, 20000)));
        if (i > 0) CHECK(pts[i].snr_db > pts[i - 1].snr_db);
    }
    const auto text = lines(out.str());
    CHECK(text[0] == "# zedloc-validate-bep v1");
    CHECK(text[1] == params_banner(s.params()));
    CHECK(text[3] == "snr_db,analytic_bep,empirical_ber,band_3sigma,errors,bits,within_band");
    CHECK(text.size() == 4 + pts.size());
    CHECK(slurp(o.common.out_dir / "validate_bep.csv") == out.str());

    SUBCASE("seeded runs repeat exactly") {
        std::ostringstream again;
        cmd_validate_bep(s, o, again);
        CHECK(again.str() == out.str());
        o.common.seed = 99;
        std::ostringstream other;
        cmd_validate_bep(s, o, other);
        CHECK(other.str() != out.str());
    }
    SUBCASE("longer bits shift the default range down") {
        o.n_tti = 2;
        std::vector<BepPoint> two;
        cmd_validate_bep(s, o, out, &two);
        CHECK(two.front().snr_db == doctest::Approx(pts.front().snr_db - linear_to_db(2.0)).epsilon(1e-9));
    }
    SUBCASE("explicit range") {
        o.snr_db_min = -20;
        o.snr_db_max = -10;
        o.points = 3;
        std::vector<BepPoint> three;
        cmd_validate_bep(s, o, out, &three);
        REQUIRE(three.size() == 3);
        CHECK(three[1].snr_db == doctest::Approx(-15));
    }
}

TEST_CASE("link decodes the beacon id near the tag") {
    const Scenario s = fixture();
    LinkOptions o;
    o.zed_id = 1;
    o.sm = {4.3, 4.0};
    std::ostringstream out;
    LinkReport r;
    CHECK(cmd_link(s, o, out, &r) == kExitOk);
    REQUIRE(r.sync_offset.has_value());
    CHECK(*r.sync_offset == 3);
    CHECK(r.decoded_id == 1);
    CHECK(r.decoded_bits == s.beacon(1).codeword);
    CHECK(r.sent_bits.size() == 3 + 16 + 7);
    CHECK(r.mu_trace.size() == r.sent_bits.size() - 16 + 1);
    CHECK(r.mu_trace[3] >= kSyncThreshold);
    CHECK(linear_to_db(r.estimated_snr) == doctest::Approx(linear_to_db(r.snr)).epsilon(0.05));
    CHECK(out.str().find("decoded_ok: yes") != std::string::npos);

    o.idle_periods = 0;
    LinkReport r0;
    cmd_link(s, o, out, &r0);
    CHECK(r0.sync_offset == std::size_t{0});

    o.zed_id = 7;
    CHECK_THROWS_AS(cmd_link(s, o, out), ValidationError);
}

TEST_CASE("sweep writes maps, heatmaps and tables") {
    const Scenario s = fixture();
    SweepOptions o;
    o.n_tti = {1, 3};
    o.common.out_dir = scratch("sweep");
    std::ostringstream out;
    std::ostringstream err;
    CHECK(cmd_sweep(s, o, out, err) == kExitOk);
    for (int n : {1, 3}) {
        for (const char* q : {"best_zed", "best_snr_db", "best_bep", "covered"}) {
            const std::string pgm = slurp(o.common.out_dir / (std::string(q) + "_ntti" + std::to_string(n) + ".pgm"));
            CHECK(pgm.rfind("P5\n16 16\n255\n", 0) == 0);
            CHECK(pgm.size() == std::string("P5\n16 16\n255\n").size() + 256);
        }
        const auto map = lines(slurp(o.common.out_dir / ("map_ntti" + std::to_string(n) + ".csv")));
        CHECK(map[0] == "# zedloc-map v1");
        SystemParams p = s.params();
        p.n_tti = n;
        CHECK(map[1] == params_banner(p));
        CHECK(map[2] == "x_m,y_m,room,covered,best_zed,best_snr_db,best_bep");
        CHECK(map.size() == 3 + 256);
        CHECK(map[3].rfind("0.500,0.500,SW,", 0) == 0);
    }
    const std::string ca = slurp(o.common.out_dir / "ca_table.csv");
    CHECK(lines(ca)[1] == "zed_id,ca_pixels_ntti1,ca_m2_ntti1,ca_pixels_ntti3,ca_m2_ntti3");
    CHECK(out.str().find(ca) != std::string::npos);
    CHECK(fs::exists(o.common.out_dir / "room_accuracy.csv"));
    CHECK(err.str().empty());

    SUBCASE("a beacon-free scenario gives an all-uncovered map") {
        Scenario empty = s;
        empty.beacons.clear();
        empty.beacon_rooms.clear();
        o.n_tti = {1};
        o.common.out_dir = scratch("sweep_empty");
        std::ostringstream e_out;
        CHECK(cmd_sweep(empty, o, e_out, err) == kExitOk);
        const auto map = lines(slurp(o.common.out_dir / "map_ntti1.csv"));
        REQUIRE(map.size() == 3 + 256);
        for (std::size_t i = 3; i < map.size(); ++i) CHECK(map[i].find(",0,,") != std::string::npos);
        CHECK(e_out.str().find("room accuracy undefined") != std::string::npos);
    }
    SUBCASE("out-dir is required") {
        o.common.out_dir.clear();
        CHECK_THROWS_AS(cmd_sweep(s, o, out, err), ValidationError);
    }
}

TEST_CASE("trace emits loadable rays") {
    const Scenario s = fixture();
    TraceCommandOptions o;
    o.tx = "bs";
    o.rx = "zed:1";
    std::ostringstream out;
    CHECK(cmd_trace(s, o, out) == kExitOk);
    std::istringstream in(out.str());
    const std::vector<Ray> rays = read_rays(in);
    TraceOptions t;
    t.max_reflections = s.raytrace.max_reflections;
    t.gain_floor_db = s.raytrace.gain_floor_db;
    CHECK(rays == trace(s.plan, s.bs, s.beacon(1).position, t));
    CHECK_FALSE(rays.empty());

    o.output = scratch("trace") / "r.csv";
    fs::create_directories(o.output->parent_path());
    std::ostringstream quiet;
    cmd_trace(s, o, quiet);
    CHECK(load_rays(*o.output) == rays);
}
