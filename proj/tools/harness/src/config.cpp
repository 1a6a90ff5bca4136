#include "levyfilter/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "levyfilter/errors.hpp"

namespace levyfilter::harness {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <class T>
    T get(const std::string& key, T fallback) {
        if (!j_.contains(key)) return fallback;
        return convert<T>(key);
    }

    template <class T>
    T require(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(join(path_, key), "required key missing");
        return convert<T>(key);
    }

    /// Number or null; null and absence both give an empty optional.
    // Absent and null both mean "not set".
    template <class T>
    std::optional<T> optional(const std::string& key) {
        if (!j_.contains(key)) return std::nullopt;
        if (j_.at(key).is_null()) {
            seen_.insert(key);
            return std::nullopt;
        }
        return convert<T>(key);
    }

    ObjectReader child(const std::string& key) {
        seen_.insert(key);
        return ObjectReader(j_.at(key), join(path_, key));
    }

    std::string path(const std::string& key) const { return join(path_, key); }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) {
                throw ConfigError(join(path_, item.key()), "unknown key");
            }
        }
    }

private:
    template <class T>
    T convert(const std::string& key) {
        seen_.insert(key);
        const json& v = j_.at(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
            } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
                if (!v.is_number_unsigned()) {
                    throw ConfigError(join(path_, key), "expected a non-negative integer");
                }
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
            } else if constexpr (std::is_same_v<T, std::vector<double>>) {
                if (!v.is_array()) throw ConfigError(join(path_, key), "expected an array of numbers");
                for (const auto& e : v) {
                    if (!e.is_number()) {
                        throw ConfigError(join(path_, key), "expected an array of numbers");
                    }
                }
            }
            return v.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(join(path_, key), e.what());
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

InitSpec parse_init(ObjectReader r) {
    const auto kind = r.require<std::string>("kind");
    InitSpec spec;
    if (kind == "gaussian") {
        GaussianInit g;
        g.center = r.get("center", g.center);
        g.sigma = r.get("sigma", g.sigma);
        spec = g;
    } else if (kind == "uniform") {
        UniformInit u;
        u.a = r.get("a", u.a);
        u.b = r.get("b", u.b);
        spec = u;
    } else if (kind == "point_mass") {
        PointMassInit p;
        p.x0 = r.get("x0", p.x0);
        spec = p;
    } else {
        throw ConfigError(r.path("kind"), "unknown init kind '" + kind +
                                              "' (expected gaussian, uniform or point_mass)");
    }
    r.finish();
    return spec;
}

json init_to_json(const InitSpec& spec) {
    if (const auto* g = std::get_if<GaussianInit>(&spec)) {
        return {{"kind", "gaussian"}, {"center", g->center}, {"sigma", g->sigma}};
    }
    if (const auto* u = std::get_if<UniformInit>(&spec)) {
        return {{"kind", "uniform"}, {"a", u->a}, {"b", u->b}};
    }
    return {{"kind", "point_mass"}, {"x0", std::get<PointMassInit>(spec).x0}};
}

template <class F>
void wrap_domain(const std::string& field, F&& check) {
    try {
        check();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(field, e.what());
    }
}

bool is_multiple(double a, double b) {
    const double k = std::round(a / b);
    return k >= 1.0 && std::abs(a - k * b) <= 1e-6 * b;
}

}  // namespace

std::string to_string(ObservationMode mode) {
    switch (mode) {
        case ObservationMode::None: return "none";
        case ObservationMode::Discrete: return "discrete";
        case ObservationMode::Continuous: return "continuous";
    }
    return "none";
}

ObservationMode observation_mode_from_string(const std::string& name) {
    if (name == "none") return ObservationMode::None;
    if (name == "discrete") return ObservationMode::Discrete;
    if (name == "continuous") return ObservationMode::Continuous;
    throw DomainError("unknown observation mode '" + name + "' (expected none, discrete or continuous)");
}

DriftFn DriftConfig::make() const {
    if (kind == "double_well") return double_well_drift();
    if (kind == "zero") return zero_function();
    if (kind == "polynomial") return polynomial_function(coefficients);
    throw ConfigError("drift.kind", "unknown drift '" + kind + "' (expected double_well, zero or polynomial)");
}

ObservationFn ObservationConfig::make_h() const {
    if (h.size() == 2 && h[0] == 0.0 && h[1] == 1.0) return identity_observation();
    return polynomial_function(h);
}

void ScenarioConfig::validate() const {
    if (name.empty() || name.find_first_of(" =/\\") != std::string::npos) {
        throw ConfigError("name", "must be non-empty without spaces, '=' or slashes");
    }
    if (drift.kind == "polynomial" && drift.coefficients.empty()) {
        throw ConfigError("drift.coefficients", "polynomial drift needs at least one coefficient");
    }
    if (drift.kind != "polynomial" && !drift.coefficients.empty()) {
        throw ConfigError("drift.coefficients", "only allowed for a polynomial drift");
    }
    (void)drift.make();
    if (!(noise.alpha > 0.0 && noise.alpha < 2.0)) {
        throw ConfigError("noise.alpha", "must lie in (0, 2)");
    }
    if (!(noise.epsilon >= 0.0)) throw ConfigError("noise.epsilon", "must be non-negative");
    wrap_domain("noise", [&] { noise.validate(); });
    if (!(grid.dx > 0.0)) throw ConfigError("grid.dx", "must be positive");
    wrap_domain("grid", [&] { (void)grid.make(); });
    if (!(time.dt > 0.0)) throw ConfigError("time.dt", "must be positive");
    if (!(time.t_end > 0.0)) throw ConfigError("time.t_end", "must be positive");
    if (time.store_stride == 0) throw ConfigError("time.store_stride", "must be at least 1");
    wrap_domain("init", [&] { (void)init_density(grid.make(), init); });
    if (const auto* g = std::get_if<GaussianInit>(&init); g && !(g->sigma > 0.0)) {
        throw ConfigError("init.sigma", "must be positive");
    }
    if (const auto* u = std::get_if<UniformInit>(&init); u && !(u->b > u->a)) {
        throw ConfigError("init.b", "must exceed init.a");
    }
    if (observation.h.empty()) throw ConfigError("observation.h", "needs at least one coefficient");
    if (observation.mode == ObservationMode::Discrete) {
        if (!(observation.variance > 0.0)) {
            throw ConfigError("observation.variance", "must be positive (R = 0 degenerates the likelihood)");
        }
        if (!is_multiple(observation.spacing, time.dt)) {
            throw ConfigError("observation.spacing", "must be a positive multiple of time.dt");
        }
    }
    if (observation.mode == ObservationMode::Continuous) {
        if (!(observation.noise_scale > 0.0)) {
            throw ConfigError("observation.noise_scale", "must be positive");
        }
        if (!is_multiple(observation.path_dt, time.dt)) {
            throw ConfigError("observation.path_dt", "must be a positive multiple of time.dt");
        }
        if (observation.renormalize_every == 0) {
            throw ConfigError("observation.renormalize_every", "must be at least 1");
        }
    }
    if (truth.observations_file && observation.mode == ObservationMode::None) {
        throw ConfigError("truth.observations_file", "needs an observation mode");
    }
    if (analysis.wells.size() < 2) throw ConfigError("analysis.wells", "needs at least two wells");
    for (std::size_t i = 0; i < analysis.wells.size(); ++i) {
        for (std::size_t k = i + 1; k < analysis.wells.size(); ++k) {
            const double gap = std::abs(analysis.wells[i] - analysis.wells[k]);
            if (gap == 0.0) throw ConfigError("analysis.wells", "wells must be distinct");
            if (!(analysis.deadband < gap / 2.0)) {
                throw ConfigError("analysis.deadband", "must be below half the well separation");
            }
        }
    }
    if (!(analysis.deadband > 0.0)) throw ConfigError("analysis.deadband", "must be positive");
    if (analysis.min_dwell < 0.0) throw ConfigError("analysis.min_dwell", "must be non-negative");
    if (analysis.burn_in < 0.0) throw ConfigError("analysis.burn_in", "must be non-negative");
    if (!(analysis.event_tolerance > 0.0)) {
        throw ConfigError("analysis.event_tolerance", "must be positive");
    }
    if (oracle.enabled) {
        if (oracle.particles < 100) throw ConfigError("oracle.particles", "must be at least 100");
        for (double t : oracle.times) {
            if (t < 0.0 || t > time.t_end) {
                throw ConfigError("oracle.times", "every time must lie in [0, time.t_end]");
            }
        }
    }
}

ScenarioConfig parse_config(const json& j) {
    ScenarioConfig c;
    ObjectReader root(j, "");
    c.name = root.get("name", c.name);
    if (root.has("drift")) {
        auto r = root.child("drift");
        c.drift.kind = r.get("kind", c.drift.kind);
        c.drift.coefficients = r.get("coefficients", c.drift.coefficients);
        r.finish();
    }
    if (root.has("noise")) {
        auto r = root.child("noise");
        c.noise.alpha = r.get("alpha", c.noise.alpha);
        c.noise.epsilon = r.get("epsilon", c.noise.epsilon);
        r.finish();
    }
    if (root.has("grid")) {
        auto r = root.child("grid");
        c.grid.x_min = r.get("x_min", c.grid.x_min);
        c.grid.x_max = r.get("x_max", c.grid.x_max);
        c.grid.dx = r.get("dx", c.grid.dx);
        r.finish();
    }
    if (root.has("time")) {
        auto r = root.child("time");
        c.time.t_end = r.get("t_end", c.time.t_end);
        c.time.dt = r.get("dt", c.time.dt);
        c.time.store_stride = r.get("store_stride", c.time.store_stride);
        r.finish();
    }
    if (root.has("init")) c.init = parse_init(root.child("init"));
    if (root.has("observation")) {
        auto r = root.child("observation");
        auto& o = c.observation;
        try {
            o.mode = observation_mode_from_string(r.get<std::string>("mode", to_string(o.mode)));
        } catch (const DomainError& e) {
            throw ConfigError(r.path("mode"), e.what());
        }
        try {
            o.gain = zakai_gain_from_string(r.get<std::string>("gain", to_string(o.gain)));
        } catch (const DomainError& e) {
            throw ConfigError(r.path("gain"), e.what());
        }
        o.h = r.get("h", o.h);
        o.variance = r.get("variance", o.variance);
        o.spacing = r.get("spacing", o.spacing);
        o.noise_scale = r.get("noise_scale", o.noise_scale);
        o.path_dt = r.get("path_dt", o.path_dt);
        o.renormalize_every = r.get("renormalize_every", o.renormalize_every);
        r.finish();
    }
    if (root.has("truth")) {
        auto r = root.child("truth");
        c.truth.x0 = r.optional<double>("x0");
        if (auto file = r.optional<std::string>("observations_file")) c.truth.observations_file = *file;
        r.finish();
    }
    if (root.has("analysis")) {
        auto r = root.child("analysis");
        auto& a = c.analysis;
        a.wells = r.get("wells", a.wells);
        a.deadband = r.get("deadband", a.deadband);
        a.min_dwell = r.get("min_dwell", a.min_dwell);
        a.burn_in = r.get("burn_in", a.burn_in);
        a.event_tolerance = r.get("event_tolerance", a.event_tolerance);
        a.refine_orbit = r.get("refine_orbit", a.refine_orbit);
        r.finish();
    }
    if (root.has("oracle")) {
        auto r = root.child("oracle");
        c.oracle.enabled = r.get("enabled", c.oracle.enabled);
        c.oracle.particles = r.get("particles", c.oracle.particles);
        c.oracle.times = r.get("times", c.oracle.times);
        r.finish();
    }
    if (root.has("numerics")) {
        auto r = root.child("numerics");
        try {
            c.drift_scheme =
                drift_scheme_from_string(r.get<std::string>("drift_scheme", to_string(c.drift_scheme)));
        } catch (const DomainError& e) {
            throw ConfigError(r.path("drift_scheme"), e.what());
        }
        r.finish();
    }
    c.seed = root.get("seed", c.seed);
    if (root.has("output_dir")) c.output_dir = root.require<std::string>("output_dir");
    root.finish();
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot read " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", path.string() + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const ScenarioConfig& c) {
    json j;
    j["name"] = c.name;
    j["drift"] = {{"kind", c.drift.kind}, {"coefficients", c.drift.coefficients}};
    j["noise"] = {{"alpha", c.noise.alpha}, {"epsilon", c.noise.epsilon}};
    j["grid"] = {{"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}, {"dx", c.grid.dx}};
    j["time"] = {{"t_end", c.time.t_end},
                 {"dt", c.time.dt},
                 {"store_stride", c.time.store_stride}};
    j["init"] = init_to_json(c.init);
    const auto& o = c.observation;
    j["observation"] = {{"mode", to_string(o.mode)},
                        {"h", o.h},
                        {"variance", o.variance},
                        {"spacing", o.spacing},
                        {"noise_scale", o.noise_scale},
                        {"path_dt", o.path_dt},
                        {"gain", to_string(o.gain)},
                        {"renormalize_every", o.renormalize_every}};
    j["truth"] = json::object();
    j["truth"]["x0"] = c.truth.x0 ? json(*c.truth.x0) : json(nullptr);
    if (c.truth.observations_file) {
        j["truth"]["observations_file"] = c.truth.observations_file->string();
    }
    const auto& a = c.analysis;
    j["analysis"] = {{"wells", a.wells},
                     {"deadband", a.deadband},
                     {"min_dwell", a.min_dwell},
                     {"burn_in", a.burn_in},
                     {"event_tolerance", a.event_tolerance},
                     {"refine_orbit", a.refine_orbit}};
    j["oracle"] = {{"enabled", c.oracle.enabled},
                   {"particles", c.oracle.particles},
                   {"times", c.oracle.times}};
    j["numerics"] = {{"drift_scheme", to_string(c.drift_scheme)}};
    j["seed"] = c.seed;
    if (c.output_dir) j["output_dir"] = c.output_dir->string();
    return j;
}

}  // namespace levyfilter::harness
