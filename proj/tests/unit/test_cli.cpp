#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "sfa/cli.hpp"
#include "sfa/config.hpp"
#include "sfa/error.hpp"

using namespace sfa;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path scratch_root = fs::temp_directory_path() / ("sfa_cli_test_" + std::to_string(::getpid()));

struct Cleanup {
    ~Cleanup() {
        std::error_code ec;
        fs::remove_all(scratch_root, ec);
    }
} cleanup;

fs::path scratch(const std::string& name) {
    fs::path p = scratch_root / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const std::string& name, const json& j) {
    fs::path p = scratch("config_" + name) / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "sfa-orbits");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(int(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// header line and data rows of a CSV with leading '#' metadata
std::pair<std::string, std::vector<std::string>> csv(const fs::path& p) {
    std::ifstream f(p);
    std::string line, header;
    std::vector<std::string> rows;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header.empty()) header = line;
        else rows.push_back(line);
    }
    return {header, rows};
}

std::size_t fields(const std::string& row) { return std::count(row.begin(), row.end(), ',') + 1; }

json neon(json extra = json::object()) {
    json j = {{"field", {{"type", "linear"}, {"wavelength_nm", 800}, {"intensity_W_cm2", 2e14}}},
              {"atom", {{"Ip", "21.5645 eV"}}},
              {"omega_grid", {{"start", "20 orders"}, {"stop", "26 orders"}, {"step", "0.25 orders"}}}};
    j.update(extra);
    return j;
}

}  // namespace

TEST_CASE("energies with units") {
    double w = 0.05;
    CHECK(parse_energy(1.5, w) == 1.5);
    CHECK(parse_energy("27.211386245988 eV", w) == doctest::Approx(1.0));
    CHECK(parse_energy("3 orders", w) == doctest::Approx(0.15));
    CHECK(parse_energy("0.7 au", w) == doctest::Approx(0.7));
    CHECK_THROWS_AS(parse_energy("2 keV", w), ConfigError);
    CHECK_THROWS_AS(parse_energy("eV", w), ConfigError);
}

TEST_CASE("defaults describe an 800 nm neon run") {
    auto c = parse_config(json::object());
    auto lab = from_experiment(800, 2e14);
    CHECK(c.field.omega == doctest::Approx(lab.omega));
    CHECK(c.Ip == doctest::Approx(21.5645 / hartree_eV));
    CHECK(c.grid().size() == 193);
    CHECK(c.wants("spa"));
    CHECK(c.wants("hca"));
    CHECK(!c.wants("hca_qpi"));
    CHECK(c.prefactor == PrefactorModel::unity);
}

TEST_CASE("resolved configuration parses back to itself") {
    auto c = parse_config(neon({{"methods", {"hca"}}, {"qpi", {{"cutoff", 1}, {"r", 2.0}}}}));
    auto r = parse_config(c.resolved());
    CHECK(r.resolved() == c.resolved());
    CHECK(r.grid() == c.grid());
}

TEST_CASE("lists as arrays, steps or counts") {
    auto j = neon({{"scan", {{"cutoff_law", {{"gamma", {{"start", 0.1}, {"stop", 0.3}, {"count", 5}}},
                                             {"Ip", {"0.5 au", 0.9}}}},
                             {"mixing", {{"theta_deg", {{"start", 20}, {"stop", 30}, {"step", 2.5}}}}}}}});
    auto c = parse_config(j);
    REQUIRE(c.cutoff_law);
    CHECK(c.cutoff_law->gamma.size() == 5);
    CHECK(c.cutoff_law->gamma.back() == doctest::Approx(0.3));
    CHECK(c.cutoff_law->Ip == std::vector<double>{0.5, 0.9});
    REQUIRE(c.mixing);
    CHECK(c.mixing->theta_deg.size() == 5);
}

TEST_CASE("invalid configurations are rejected") {
    CHECK_THROWS_AS(parse_config(neon({{"colour", "blue"}})), ConfigError);
    CHECK_THROWS_AS(parse_config(neon({{"atom", {{"Ip", 0.5}, {"Z", 1}}}})), ConfigError);
    CHECK_THROWS_AS(parse_config(neon({{"omega_grid", {{"start", 2.0}, {"stop", 1.0}, {"step", 0.1}}}})),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(neon({{"methods", {"wkb"}}})), ConfigError);
    CHECK_THROWS_AS(parse_config(neon({{"prefactor", "coulomb"}})), ConfigError);
    CHECK_THROWS_AS(parse_config(neon({{"field", {{"type", "square"}}}})), ConfigError);
    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
}

TEST_CASE("configuration errors exit with code 2 and an error report") {
    auto out = scratch("bad");
    auto cfg = write_config("bad", neon({{"unknown_key", 1}}));
    CHECK(cli({"orbits", "--config", cfg.string(), "--out", out.string()}) == exit_config);
    auto e = read_json(out / "error.json");
    CHECK(e["status"] == "error");
    CHECK(e["exit_code"] == 2);
    CHECK(e["message"].get<std::string>().find("unknown_key") != std::string::npos);

    CHECK(cli({"orbits", "--config", "/nonexistent/x.json", "--out", out.string()}) == exit_config);
    CHECK(cli({"orbits", "--out", out.string()}) == exit_config);
    CHECK(cli({"fly", "--config", cfg.string(), "--out", out.string()}) == exit_config);
    auto good = write_config("good", neon());
    CHECK(cli({"orbits", "--config", good.string(), "--out", out.string(), "--tol", "-1"}) == exit_config);
}

TEST_CASE("orbits run writes documented outputs deterministically") {
    auto cfg = write_config("orbits", neon());
    auto a = scratch("orbits_a"), b = scratch("orbits_b");
    REQUIRE(cli({"orbits", "--config", cfg.string(), "--out", a.string(), "--threads", "1"}) == exit_ok);
    REQUIRE(cli({"orbits", "--config", cfg.string(), "--out", b.string(), "--threads", "2"}) == exit_ok);
    for (const char* f : {"saddles.csv", "cutoffs.csv", "audit.json", "config.resolved.json"})
        CHECK(slurp(a / f) == slurp(b / f));

    auto [h, rows] = csv(a / "saddles.csv");
    CHECK(h == "omega_au,label_strip,label_side,re_t,im_t,re_tp,im_tp,re_S,im_S,residual");
    CHECK(rows.size() >= 25 * 6);
    for (const auto& r : rows) CHECK(fields(r) == fields(h));
    auto [hc, crow] = csv(a / "cutoffs.csv");
    CHECK(hc == "index,type,re_t,im_t,re_tp,im_tp,re_omega_hc,im_omega_hc,re_A_hc,im_A_hc,arg_A_hc_deg,residual");
    CHECK(crow.size() == 6);

    auto man = read_json(a / "manifest.json");
    CHECK(man["status"] == "ok");
    CHECK(man["exit_code"] == 0);
    CHECK(man["command"] == "orbits");
    CHECK(man["config_hash"] == read_json(b / "manifest.json")["config_hash"]);
    CHECK(man["config_hash"] == fnv1a_hex(read_json(a / "config.resolved.json").dump()));
    CHECK(man["wall_time_s"].get<double>() >= 0);
    CHECK(read_json(a / "timing.json")["threads"] == 1);
    CHECK(read_json(a / "audit.json")["pass"] == true);

    // the echoed configuration reproduces the run
    auto c = scratch("orbits_c");
    REQUIRE(cli({"orbits", "--config", (a / "config.resolved.json").string(), "--out", c.string()}) == exit_ok);
    CHECK(slurp(c / "saddles.csv") == slurp(a / "saddles.csv"));
    CHECK(read_json(c / "manifest.json")["config_hash"] == man["config_hash"]);
}

TEST_CASE("thread count falls back to the environment") {
    auto cfg = write_config("env", neon({{"omega_grid", {{"start", "20 orders"}, {"stop", "22 orders"}, {"step", "1 orders"}}}}));
    auto out = scratch("env");
    ::setenv("SFA_ORBITS_THREADS", "3", 1);
    CHECK(cli({"orbits", "--config", cfg.string(), "--out", out.string()}) == exit_ok);
    CHECK(read_json(out / "timing.json")["threads"] == 3);
    CHECK(cli({"orbits", "--config", cfg.string(), "--out", out.string(), "--threads", "2"}) == exit_ok);
    CHECK(read_json(out / "timing.json")["threads"] == 2);
    ::setenv("SFA_ORBITS_THREADS", "many", 1);
    CHECK(cli({"orbits", "--config", cfg.string(), "--out", out.string()}) == exit_config);
    ::unsetenv("SFA_ORBITS_THREADS");
}

TEST_CASE("spectrum output and the cost of the cutoff approximation") {
    json grid = {{"start", "13 orders"}, {"stop", "61 orders"}, {"step", "0.09619238476953908 orders"}};
    auto hca = write_config("hca", neon({{"omega_grid", grid}, {"methods", {"hca"}}}));
    auto spa = write_config("spa", neon({{"omega_grid", grid}, {"methods", {"spa"}}}));
    auto oh = scratch("hca"), os = scratch("spa");
    auto time = [](auto f) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    double th = time([&] { CHECK(cli({"spectrum", "--config", hca.string(), "--out", oh.string(), "--threads", "1"}) == 0); });
    double ts = time([&] { CHECK(cli({"spectrum", "--config", spa.string(), "--out", os.string(), "--threads", "1"}) == 0); });
    MESSAGE("hca ", th, " s, spa ", ts, " s");
    CHECK(ts >= 10 * th);

    auto [h, rows] = csv(oh / "spectrum.csv");
    CHECK(h == "omega_au,harmonic_order,method,re_Dx,im_Dx,re_Dy,im_Dy,yield,included_orbits");
    CHECK(rows.size() == 500);
    for (const auto& r : rows) {
        CHECK(fields(r) == fields(h));
        CHECK(r.find(",hca,") != std::string::npos);
    }
    auto [hs, srows] = csv(os / "spectrum.csv");
    CHECK(srows.size() == 500);
}

TEST_CASE("scan with failing samples exits with code 4") {
    auto cfg = write_config("partial", neon({{"scan", {{"cutoff_law", {{"gamma", {0.1, 0.2, 40.0}}, {"Ip", {0.5}}}}}}}));
    auto out = scratch("partial");
    CHECK(cli({"scan", "--config", cfg.string(), "--out", out.string()}) == exit_partial);
    auto man = read_json(out / "manifest.json");
    CHECK(man["status"] == "partial");
    CHECK(man["failed_samples"].size() == 1);
    auto [h, rows] = csv(out / "cutoff_law.csv");
    CHECK(h == "Ip,Up,gamma,re_omega_hc,im_omega_hc,re_F,im_F");
    CHECK(rows.size() == 2);
    CHECK(fs::exists(out / "cutoff_law_fit.json"));
}

TEST_CASE("mixing scan and mesh outputs") {
    auto cfg = write_config("scan", json{
        {"field", {{"type", "bicircular"}, {"wavelength_nm", 800}, {"intensity_W_cm2", 2e14}}},
        {"atom", {{"Ip", "21.5645 eV"}}},
        {"scan", {{"mixing", {{"theta_deg", {{"start", 45}, {"stop", 60}, {"step", 1}}}}}}}});
    auto out = scratch("mixing");
    REQUIRE(cli({"scan", "--config", cfg.string(), "--out", out.string()}) == exit_ok);
    auto [h, rows] = csv(out / "transitions.csv");
    CHECK(h == "theta_deg,cutoff_id,eta");
    CHECK(rows.size() == 16);
    auto ev = read_json(out / "transition_events.json");
    CHECK(ev.is_array());
    CHECK(ev.size() >= 1);

    // families are joined along the default harmonic grid, which spans every cutoff
    json mj = neon();
    mj.erase("omega_grid");
    mj.update({{"scan", {{"mesh", {{"re_omega_au", {0.5, 3.5}}, {"im_omega_au", {-0.4, 0.4}},
                               {"re_step", 0.05}, {"im_step", 0.05}}}}}});
    auto mcfg = write_config("mesh", mj);
    auto mout = scratch("mesh");
    REQUIRE(cli({"scan", "--config", mcfg.string(), "--out", mout.string()}) == exit_ok);
    std::ifstream f(mout / "mesh.txt");
    auto mesh = read_mesh(f);
    CHECK(mesh.vertices.size() > 100);
    CHECK(mesh.triangles.size() > 100);
    auto cover = read_json(mout / "mesh_cover.json");
    CHECK(mesh.families.size() == cover["families"].size());
    for (const auto& f : cover["families"])
        CHECK(f["holes"].get<double>() + f["overlap"].get<double>() <= 0.05);
}
