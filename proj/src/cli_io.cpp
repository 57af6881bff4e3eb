#include "patr/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace patr {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const std::set<std::string> kKeys = {
    "model",          "a",
    "alpha0",         "tau0",
    "gamma",          "tau",
    "tau_tilde",      "phantom",
    "phantom_support", "sensors",
    "sensor_radius",  "final_time",
    "time_samples",   "rho",
    "frequency_samples", "order",
    "profile_center", "profile_direction",
    "profile_half_length", "profile_points",
    "sweep_rhos",     "seed",
    "noise_level",    "quiescence_tolerance",
    "dataset",        "verify_sigma",
    "verify_rho",
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

// Lookup with line numbers for error reporting.
class Entries {
public:
    Entries(const std::map<std::string, std::string>& values, std::map<std::string, int> lines)
        : values_(values), lines_(std::move(lines)) {}

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    int line(const std::string& key) const {
        const auto it = lines_.find(key);
        return it == lines_.end() ? 0 : it->second;
    }
    const std::string& text(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
        return it->second;
    }
    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError(key + ": " + what, line(key));
    }

    double number(const std::string& key, const std::string& word) const {
        double v = 0.0;
        const auto* end = word.data() + word.size();
        const auto r = std::from_chars(word.data(), end, v);
        if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v))
            fail(key, "'" + word + "' is not a finite number");
        return v;
    }
    double number(const std::string& key) const { return number(key, text(key)); }
    double number(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    std::uint64_t integer(const std::string& key) const {
        const std::string& word = text(key);
        std::uint64_t v = 0;
        const auto* end = word.data() + word.size();
        const auto r = std::from_chars(word.data(), end, v);
        if (r.ec != std::errc() || r.ptr != end)
            fail(key, "'" + word + "' is not a non-negative integer");
        return v;
    }
    std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        for (const auto& w : split(text(key), ',')) out.push_back(number(key, w));
        if (out.empty()) fail(key, "empty list");
        return out;
    }

    Vec3 vec(const std::string& key, Vec3 fallback) const {
        if (!has(key)) return fallback;
        auto v = words(text(key));
        if (v.size() == 1) v = split(text(key), ',');
        if (v.size() != 3) fail(key, "expected three coordinates");
        return {number(key, v[0]), number(key, v[1]), number(key, v[2])};
    }

private:
    const std::map<std::string, std::string>& values_;
    std::map<std::string, int> lines_;
};

void forbid(const Entries& e, const std::string& model, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
        if (e.has(k)) e.fail(k, std::string("does not apply to model ") + model);
}

AttenuationModel build_model(const Entries& e) {
    const std::string kind = e.text("model");
    if (kind == "ksb") {
        forbid(e, kind, {"a", "tau", "tau_tilde"});
        KSB m;
        m.alpha0 = e.number("alpha0");
        m.tau0 = e.number("tau0", 1.0);
        m.gamma = e.number("gamma", 2.0);
        if (m.alpha0 < 0.0) e.fail("alpha0", "must be >= 0");
        if (!(m.tau0 > 0.0)) e.fail("tau0", "must be > 0");
        if (!(m.gamma > 1.0 && m.gamma <= 2.0)) e.fail("gamma", "must lie in (1, 2]");
        return m;
    }
    if (kind == "nsw") {
        forbid(e, kind, {"a", "alpha0", "tau0", "gamma"});
        const auto tau = e.list("tau");
        const auto tilde = e.list("tau_tilde");
        if (tau.size() != tilde.size())
            e.fail("tau_tilde", "needs as many entries as tau");
        NSW m;
        for (std::size_t j = 0; j < tau.size(); ++j) {
            if (tilde[j] < 0.0) e.fail("tau_tilde", "must be >= 0");
            if (!(tau[j] >= tilde[j]))
                e.fail("tau_tilde", "causality violation, tau must exceed tau_tilde");
            m.processes.push_back({tau[j], tilde[j]});
        }
        return m;
    }
    if (kind == "thermo_viscous") {
        forbid(e, kind, {"alpha0", "tau0", "gamma", "tau", "tau_tilde"});
        ThermoViscous m{e.number("a")};
        if (m.a < 0.0) e.fail("a", "must be >= 0");
        return m;
    }
    e.fail("model", "unknown model '" + kind + "' (expected ksb, nsw or thermo_viscous)");
}

Phantom build_phantom(const Entries& e) {
    Phantom p;
    for (const auto& item : split(e.text("phantom"), ';')) {
        if (item.empty()) continue;
        const auto w = words(item);
        if (w.size() != 6 || (w[0] != "ball" && w[0] != "gaussian"))
            e.fail("phantom", "expected 'ball|gaussian x y z size amplitude' items separated by ';'");
        const Vec3 c{e.number("phantom", w[1]), e.number("phantom", w[2]),
                     e.number("phantom", w[3])};
        const double size = e.number("phantom", w[4]);
        const double amp = e.number("phantom", w[5]);
        if (!(size > 0.0)) e.fail("phantom", "radius and sigma must be > 0");
        if (w[0] == "ball")
            p.components.push_back(Ball{c, size, amp});
        else
            p.components.push_back(Gaussian{c, size, amp});
    }
    p.support_radius = e.number("phantom_support", Phantom::natural_support(p.components));
    return p;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string join(const std::vector<double>& v, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += format_double(v[i]);
    }
    return s;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    return out;
}

void header(std::ostream& out, const std::string& kind, const std::string& config_hash) {
    out << "# tool = patr " << kToolVersion << "\n";
    out << "# file = " << kind << "\n";
    out << "# config_hash = " << config_hash << "\n";
}

struct CsvFile {
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

CsvFile read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    CsvFile f;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos)
                f.meta[trim(std::string_view(line).substr(1, eq - 1))] =
                    trim(std::string_view(line).substr(eq + 1));
            continue;
        }
        if (f.columns.empty()) {
            f.columns = split(line, ',');
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : split(line, ',')) {
            double v = 0.0;
            const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (r.ec != std::errc() || r.ptr != cell.data() + cell.size())
                throw ConfigError(path.string() + ": bad number '" + cell + "'", number);
            row.push_back(v);
        }
        if (row.size() != f.columns.size())
            throw ConfigError(path.string() + ": wrong column count", number);
        f.rows.push_back(std::move(row));
    }
    return f;
}

const std::string& meta(const CsvFile& f, const std::string& key) {
    const auto it = f.meta.find(key);
    if (it == f.meta.end()) throw ConfigError("file header lacks '" + key + "'");
    return it->second;
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line)
    : ParameterError(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunConfig parse_config_text(std::string_view text) {
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;
    std::istringstream is{std::string(text)};
    std::string raw;
    int number = 0;
    while (std::getline(is, raw)) {
        ++number;
        const std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", number);
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (!kKeys.count(key)) throw ConfigError("unknown key '" + key + "'", number);
        if (values.count(key))
            throw ConfigError("duplicate key '" + key + "' (first set on line " +
                                  std::to_string(lines[key]) + ")",
                              number);
        if (value.empty()) throw ConfigError("empty value for '" + key + "'", number);
        values[key] = value;
        lines[key] = number;
    }

    const Entries e(values, lines);
    RunConfig c;
    c.entries = values;
    c.model = build_model(e);
    c.phantom = build_phantom(e);
    c.sensor_count = e.integer("sensors", c.sensor_count);
    c.sensor_radius = e.number("sensor_radius", c.sensor_radius);
    if (c.sensor_count == 0) e.fail("sensors", "must be >= 1");
    if (!(c.sensor_radius > 0.0)) e.fail("sensor_radius", "must be > 0");
    if (!(c.phantom.support_radius < c.sensor_radius))
        e.fail("phantom", "support must lie strictly inside the sensor sphere");
    c.final_time = e.number("final_time", default_final_time(c.model, c.phantom, c.sensors()));
    if (!(c.final_time > 0.0)) e.fail("final_time", "must be > 0");
    c.time_samples = e.integer("time_samples", c.time_samples);
    if (c.time_samples < 2) e.fail("time_samples", "must be >= 2");
    if (e.has("rho")) {
        c.rho = e.number("rho");
        if (!(*c.rho > 0.0)) e.fail("rho", "must be > 0");
    }
    c.frequency_samples = e.integer("frequency_samples", c.frequency_samples);
    if (c.frequency_samples == 0) e.fail("frequency_samples", "must be >= 1");
    c.order = static_cast<int>(e.integer("order", 0));
    if (c.order > 2) e.fail("order", "must be 0, 1 or 2");
    c.profile_center = e.vec("profile_center", c.profile_center);
    c.profile_direction = e.vec("profile_direction", c.profile_direction);
    if (norm(c.profile_direction) == 0.0) e.fail("profile_direction", "must be non-zero");
    c.profile_half_length = e.number("profile_half_length", 0.5 * c.sensor_radius);
    c.profile_points = e.integer("profile_points", c.profile_points);
    if (c.profile_points < 2) e.fail("profile_points", "must be >= 2");
    if (norm(c.profile_center) + c.profile_half_length >= c.sensor_radius)
        e.fail("profile_half_length", "profile must stay inside the sensor sphere");
    if (e.has("sweep_rhos")) {
        c.sweep_rhos = e.list("sweep_rhos");
        for (double r : c.sweep_rhos)
            if (!(r > 0.0)) e.fail("sweep_rhos", "values must be > 0");
    }
    c.seed = e.integer("seed", 0);
    c.noise_level = e.number("noise_level", 0.0);
    if (c.noise_level < 0.0) e.fail("noise_level", "must be >= 0");
    c.quiescence_tolerance = e.number("quiescence_tolerance", c.quiescence_tolerance);
    if (!(c.quiescence_tolerance > 0.0)) e.fail("quiescence_tolerance", "must be > 0");
    if (e.has("dataset")) c.dataset = e.text("dataset");
    c.verify_sigma = e.number("verify_sigma", c.verify_sigma);
    c.verify_rho = e.number("verify_rho", c.verify_rho);
    if (!(c.verify_sigma > 0.0)) e.fail("verify_sigma", "must be > 0");
    if (!(c.verify_rho > 0.0)) e.fail("verify_rho", "must be > 0");
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string RunConfig::hash() const {
    std::string canonical;
    for (const auto& [k, v] : entries) canonical += k + "=" + v + "\n";
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
    return buf;
}

TimeGrid RunConfig::time_grid() const { return TimeGrid::span(0.0, final_time, time_samples); }

SensorArray RunConfig::sensors() const { return SensorArray::fibonacci(sensor_count, sensor_radius); }

double RunConfig::cutoff() const {
    if (rho) return *rho;
    double threshold = 0.0;
    try {
        threshold = rho_threshold(model, 2.0 * sensor_radius);
    } catch (const CapabilityError& err) {
        throw ConfigError(std::string("rho is required: ") + err.what());
    }
    if (!std::isfinite(threshold))
        throw ConfigError("rho is required for a model without attenuation");
    return threshold;
}

ReconstructionConfig RunConfig::reconstruction(int threads,
                                               std::optional<double> override_rho) const {
    ReconstructionConfig r;
    r.rho = override_rho.value_or(cutoff());
    r.override_rho = override_rho.has_value();
    r.half_count = frequency_samples;
    r.order = order;
    r.threads = threads;
    r.points = line_profile(profile_center, profile_direction, profile_half_length, profile_points);
    return r;
}

AttenuationModel model_from_entries(const std::map<std::string, std::string>& entries) {
    return build_model(Entries(entries, {}));
}

Phantom phantom_from_entries(const std::map<std::string, std::string>& entries) {
    return build_phantom(Entries(entries, {}));
}

std::map<std::string, std::string> model_entries(const AttenuationModel& model) {
    std::map<std::string, std::string> e;
    std::visit(Overloaded{
                   [&](const ThermoViscous& m) {
                       e["model"] = "thermo_viscous";
                       e["a"] = format_double(m.a);
                   },
                   [&](const KSB& m) {
                       e["model"] = "ksb";
                       e["alpha0"] = format_double(m.alpha0);
                       e["tau0"] = format_double(m.tau0);
                       e["gamma"] = format_double(m.gamma);
                   },
                   [&](const NSW& m) {
                       std::vector<double> tau, tilde;
                       for (const auto& p : m.processes) {
                           tau.push_back(p.tau);
                           tilde.push_back(p.tau_tilde);
                       }
                       e["model"] = "nsw";
                       e["tau"] = join(tau, ", ");
                       e["tau_tilde"] = join(tilde, ", ");
                   },
               },
               model);
    return e;
}

std::map<std::string, std::string> phantom_entries(const Phantom& phantom) {
    std::string spec;
    for (const auto& c : phantom.components) {
        if (!spec.empty()) spec += "; ";
        std::visit(Overloaded{
                       [&](const Ball& b) {
                           spec += "ball " + join({b.center.x, b.center.y, b.center.z, b.radius,
                                                   b.amplitude},
                                                  " ");
                       },
                       [&](const Gaussian& g) {
                           spec += "gaussian " + join({g.center.x, g.center.y, g.center.z,
                                                       g.sigma, g.amplitude},
                                                      " ");
                       },
                   },
                   c);
    }
    return {{"phantom", spec}, {"phantom_support", format_double(phantom.support_radius)}};
}

void write_dataset(const std::filesystem::path& path, const DataSet& data,
                   const std::string& config_hash) {
    auto out = open_output(path);
    header(out, "dataset", config_hash);
    out << "# model_description = " << describe(data.model) << "\n";
    for (const auto& [k, v] : model_entries(data.model)) out << "# " << k << " = " << v << "\n";
    for (const auto& [k, v] : phantom_entries(data.phantom)) out << "# " << k << " = " << v << "\n";
    out << "# sensor_radius = " << format_double(data.sensors.radius) << "\n";
    out << "# sensor_count = " << data.sensors.size() << "\n";
    out << "# sensor_weights = " << join(data.sensors.weights, " ") << "\n";
    out << "# t0 = " << format_double(data.grid.t0) << "\n";
    out << "# dt = " << format_double(data.grid.dt) << "\n";
    out << "# time_samples = " << data.grid.n << "\n";
    out << "sensor_index,x,y,z,t,value\n";
    for (std::size_t m = 0; m < data.sensors.size(); ++m) {
        const Vec3 y = data.sensors.points[m];
        const std::string prefix = std::to_string(m) + "," + format_double(y.x) + "," +
                                   format_double(y.y) + "," + format_double(y.z) + ",";
        for (std::size_t i = 0; i < data.grid.n; ++i) {
            out << prefix << format_double(data.grid.at(i)) << ","
                << format_double(data.traces[m][i]) << "\n";
        }
    }
    if (!out) throw ConfigError("failed writing " + path.string());
}

DataSet read_dataset(const std::filesystem::path& path) {
    const CsvFile f = read_csv(path);
    if (meta(f, "file") != "dataset") throw ConfigError(path.string() + " is not a dataset file");
    const std::vector<std::string> expected{"sensor_index", "x", "y", "z", "t", "value"};
    if (f.columns != expected) throw ConfigError(path.string() + ": unexpected columns");

    std::map<std::string, std::string> params;
    for (const char* k : {"model", "a", "alpha0", "tau0", "gamma", "tau", "tau_tilde", "phantom",
                          "phantom_support"}) {
        const auto it = f.meta.find(k);
        if (it != f.meta.end()) params[k] = it->second;
    }
    const Entries e(params, {});
    DataSet d;
    d.model = build_model(e);
    d.phantom = build_phantom(e);

    const Entries h(f.meta, {});
    d.sensors.radius = h.number("sensor_radius");
    const auto count = static_cast<std::size_t>(h.integer("sensor_count"));
    d.grid = {h.number("t0"), h.number("dt"), static_cast<std::size_t>(h.integer("time_samples"))};
    for (const auto& w : words(meta(f, "sensor_weights"))) d.sensors.weights.push_back(h.number("sensor_weights", w));
    if (d.sensors.weights.size() != count || f.rows.size() != count * d.grid.n)
        throw ConfigError(path.string() + ": sensor or sample counts do not match the header");

    d.traces.assign(count, std::vector<double>(d.grid.n));
    for (std::size_t m = 0; m < count; ++m) {
        const auto& first = f.rows[m * d.grid.n];
        d.sensors.points.push_back({first[1], first[2], first[3]});
        for (std::size_t i = 0; i < d.grid.n; ++i) {
            const auto& row = f.rows[m * d.grid.n + i];
            if (row[0] != static_cast<double>(m))
                throw ConfigError(path.string() + ": rows are not ordered by sensor then time");
            d.traces[m][i] = row[5];
        }
    }
    validate(d.sensors);
    return d;
}

void write_result(const std::filesystem::path& path, const ImagingResult& result,
                  const std::string& config_hash) {
    auto out = open_output(path);
    header(out, "result", config_hash);
    out << "# model_description = " << result.model << "\n";
    out << "# order = " << result.order << "\n";
    out << "# rho = " << format_double(result.rho) << "\n";
    out << "# frequency_samples = " << result.half_count << "\n";
    if (result.relative_error)
        out << "# rel_l2_error = " << format_double(*result.relative_error) << "\n";
    for (const auto& w : result.warnings) out << "# warning = " << w << "\n";
    out << "px,py,pz,value\n";
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        const Vec3 p = result.points[i];
        out << format_double(p.x) << "," << format_double(p.y) << "," << format_double(p.z) << ","
            << format_double(result.values[i]) << "\n";
    }
    if (!out) throw ConfigError("failed writing " + path.string());
}

ImagingResult read_result(const std::filesystem::path& path) {
    const CsvFile f = read_csv(path);
    if (meta(f, "file") != "result") throw ConfigError(path.string() + " is not a result file");
    ImagingResult r;
    for (const auto& row : f.rows) {
        r.points.push_back({row[0], row[1], row[2]});
        r.values.push_back(row[3]);
    }
    r.model = meta(f, "model_description");
    return r;
}

void write_sweep(const std::filesystem::path& path,
                 const std::vector<std::pair<double, double>>& table, const std::string& model,
                 const std::string& config_hash) {
    auto out = open_output(path);
    header(out, "sweep", config_hash);
    out << "# model_description = " << model << "\n";
    out << "rho,rel_l2_error\n";
    for (const auto& [rho, err] : table) out << format_double(rho) << "," << format_double(err) << "\n";
    if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace patr
