#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "patr/cli_io.hpp"

using namespace patr;
namespace fs = std::filesystem;

namespace {

const char* kBase =
    "# comment line\n"
    "model = ksb\n"
    "alpha0 = 0.01   # trailing comment\n"
    "tau0 = 1.0\n"
    "gamma = 2.0\n"
    "phantom = ball 0 0 0 0.5 1\n";

int error_line(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

std::string error_text(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("patr_io_" + std::to_string(std::rand()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config maps onto a KSB model") {
    const auto c = parse_config_text(kBase);
    const auto* m = std::get_if<KSB>(&c.model);
    REQUIRE(m != nullptr);
    CHECK(m->alpha0 == 0.01);
    CHECK(m->tau0 == 1.0);
    CHECK(m->gamma == 2.0);
    REQUIRE(c.phantom.components.size() == 1);
    CHECK(c.phantom.support_radius == 0.5);
    CHECK(c.sensor_count == 256);
    CHECK(c.order == 0);
    CHECK(c.cutoff() == 1250.0);  // domain diameter 2 * sensor_radius = 4
}

TEST_CASE("config errors carry line numbers") {
    const std::string base = kBase;
    CHECK(error_line("model = ksb\nalpha0 = 0.01\ngamma = 2.5\nphantom = ball 0 0 0 0.5 1\n") == 3);
    CHECK(error_text("model = ksb\nalpha0 = 0.01\ngamma = 2.5\nphantom = ball 0 0 0 0.5 1\n")
              .find("(1, 2]") != std::string::npos);

    const std::string nsw = "model = nsw\ntau = 0.01\ntau_tilde = 0.02\nphantom = ball 0 0 0 0.5 1\n";
    CHECK(error_line(nsw) == 3);
    CHECK(error_text(nsw).find("causality") != std::string::npos);

    CHECK(error_line(base + "colour = blue\n") == 7);
    CHECK(error_line(base + "\nalpha0 = 0.02\n") == 8);
    CHECK(error_text(base + "\nalpha0 = 0.02\n").find("line 3") != std::string::npos);
    CHECK(error_line(base + "sensors = -4\n") == 7);
    CHECK(error_line(base + "rho = abc\n") == 7);
    CHECK(error_line(base + "order = 3\n") == 7);
    CHECK(error_line(base + "tau = 1\n") == 7);
    CHECK(error_line(base + "just words\n") == 7);
    CHECK(error_line("model = ksb\nalpha0 = 0.01\nphantom = ball 0 0 1.8 0.5 1\n") == 3);
    CHECK(error_line("model = ksb\nphantom = ball 0 0 0 0.5 1\n") == 0);
    CHECK_THROWS_AS(parse_config("/nonexistent/patr.cfg"), ConfigError);
}

TEST_CASE("nsw and thermo-viscous configs") {
    const auto c = parse_config_text(
        "model = nsw\ntau = 0.02, 0.03\ntau_tilde = 0.01,0.01\n"
        "phantom = gaussian 0.1 0 0 0.2 2; ball 0 0 0 0.3 1\nsensors = 32\n");
    const auto* m = std::get_if<NSW>(&c.model);
    REQUIRE(m != nullptr);
    REQUIRE(m->processes.size() == 2);
    CHECK(m->processes[1].tau == 0.03);
    CHECK(c.phantom.components.size() == 2);
    CHECK(c.sensors().size() == 32);

    const auto tv = parse_config_text("model = thermo_viscous\na = 0.01\nphantom = ball 0 0 0 0.5 1\n");
    CHECK(std::holds_alternative<ThermoViscous>(tv.model));
    CHECK_THROWS_AS(tv.cutoff(), ConfigError);
    const auto tv2 = parse_config_text("model = thermo_viscous\na = 0.01\nrho = 20\nphantom = ball 0 0 0 0.5 1\n");
    CHECK(tv2.cutoff() == 20.0);
}

TEST_CASE("model and phantom entries round trip") {
    for (const AttenuationModel& m :
         {AttenuationModel(KSB{0.01, 1.5, 1.3}), AttenuationModel(NSW{{{0.02, 0.01}, {0.5, 0.1}}}),
          AttenuationModel(ThermoViscous{0.003})}) {
        const auto back = model_from_entries(model_entries(m));
        CHECK(describe(back) == describe(m));
    }
    const Phantom p{{Ball{{0.1, 0.2, 0.3}, 0.4, 1.5}, Gaussian{{0, 0, -0.1}, 0.1, 0.7}}, 0.9};
    const auto q = phantom_from_entries(phantom_entries(p));
    CHECK(q.support_radius == p.support_radius);
    for (Vec3 x : {Vec3{0.1, 0.2, 0.3}, Vec3{0.0, 0.0, -0.05}, Vec3{0.4, 0.4, 0.1}})
        CHECK(q.value(x) == p.value(x));
}

TEST_CASE("config hash") {
    const auto a = parse_config_text(kBase);
    const auto b = parse_config_text(std::string("\n\n") + kBase + "# different comment\n");
    const auto c = parse_config_text(std::string(kBase) + "seed = 3\n");
    CHECK(a.hash().size() == 16);
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
}

TEST_CASE("dataset and result files") {
    TempDir dir;
    const Phantom p{{Gaussian{{0.1, 0.0, 0.0}, 0.15, 1.0}}, 0.85};
    const auto d = synthesize_dataset(p, SensorArray::fibonacci(8, 2.0), NSW{{{0.02, 0.01}}},
                                      TimeGrid::span(0.0, 4.0, 101));
    write_dataset(dir.path / "a.csv", d, "0123456789abcdef");
    const std::string text = slurp(dir.path / "a.csv");
    CHECK(text.find("# tool = patr " + std::string(kToolVersion)) != std::string::npos);
    CHECK(text.find("# config_hash = 0123456789abcdef") != std::string::npos);
    CHECK(text.find("sensor_index,x,y,z,t,value") != std::string::npos);

    const auto back = read_dataset(dir.path / "a.csv");
    CHECK(back.traces == d.traces);
    CHECK(back.sensors.points == d.sensors.points);
    CHECK(back.sensors.weights == d.sensors.weights);
    CHECK(back.grid.dt == d.grid.dt);
    CHECK(back.grid.n == d.grid.n);
    CHECK(describe(back.model) == describe(d.model));
    write_dataset(dir.path / "b.csv", back, "0123456789abcdef");
    CHECK(slurp(dir.path / "b.csv") == text);

    ReconstructionConfig c;
    c.rho = 4.0;
    c.half_count = 32;
    c.order = 1;
    c.points = line_profile({0, 0, 0}, {1, 0, 0}, 0.5, 5);
    const auto r = reconstruct(d, c);
    write_result(dir.path / "r.csv", r, "0123456789abcdef");
    const auto rr = read_result(dir.path / "r.csv");
    CHECK(rr.points == r.points);
    CHECK(rr.values == r.values);
    CHECK(slurp(dir.path / "r.csv").find("px,py,pz,value") != std::string::npos);

    write_sweep(dir.path / "s.csv", {{10.0, 0.5}, {20.0, 0.25}}, describe(d.model), "0123456789abcdef");
    const std::string sweep = slurp(dir.path / "s.csv");
    CHECK(sweep.find("rho,rel_l2_error\n10,0.5\n20,0.25\n") != std::string::npos);

    CHECK_THROWS_AS(read_dataset(dir.path / "r.csv"), ConfigError);
    CHECK_THROWS_AS(read_dataset(dir.path / "missing.csv"), ConfigError);
}

TEST_CASE("number formatting is lossless") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 5000.0, 1e22})
        CHECK(std::stod(format_double(v)) == v);
    CHECK(format_double(5000.0) == "5000");
}
