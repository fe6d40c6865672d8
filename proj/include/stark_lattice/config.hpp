#pragma once

#include <algorithm>
#include <iterator>
#include <string>

#include <json.hpp>

#include "core_model.hpp"
#include "errors.hpp"

namespace stark {

enum class Mode { Spectrum, ScanWidth, Collapse, Analytic, Propagate, Bessel };
enum class Spacing { Linear, Log };

inline const char* to_string(Mode m) {
    switch (m) {
    case Mode::Spectrum: return "spectrum";
    case Mode::ScanWidth: return "scan-width";
    case Mode::Collapse: return "collapse";
    case Mode::Analytic: return "analytic";
    case Mode::Propagate: return "propagate";
    case Mode::Bessel: return "bessel";
    }
    return "?";
}

inline Mode parse_mode(const std::string& s) {
    for (Mode m : {Mode::Spectrum, Mode::ScanWidth, Mode::Collapse, Mode::Analytic, Mode::Propagate, Mode::Bessel})
        if (s == to_string(m))
            return m;
    throw ConfigError("unknown mode '" + s + "'");
}

inline const char* to_string(Spacing s) { return s == Spacing::Log ? "log" : "linear"; }

inline Spacing parse_spacing(const std::string& s) {
    if (s == "log")
        return Spacing::Log;
    if (s == "linear")
        return Spacing::Linear;
    throw ConfigError("unknown scan spacing '" + s + "'");
}

struct ForceScan {
    double f_min = 1.5;
    double f_max = 30.0;
    int n_points = 60;
    Spacing spacing = Spacing::Log;

    friend bool operator==(const ForceScan&, const ForceScan&) = default;
};

struct DynamicsConfig {
    double duration = 40.0;
    double dt = 0.0;          // max propagator step, <= 0 selects duration / samples
    int n1 = 128;
    int n2 = 128;
    std::string packet = "single_site"; // or "gaussian"
    double sigma = 4.0;
    double kappa0 = 0.0;

    friend bool operator==(const DynamicsConfig&, const DynamicsConfig&) = default;
};

struct BesselConfig {
    int n_max = 6;
    double z_max = 20.0;
    int points = 201;

    friend bool operator==(const BesselConfig&, const BesselConfig&) = default;
};

struct RunConfig {
    Mode mode = Mode::Spectrum;
    LatticeSpec lattice;
    int r = 2;
    int q = 1;
    double F = 2.3;
    ForceScan scan;
    int kappa_points = 256;
    int max_order = 7;
    double threshold_ratio = 0.05;
    std::string output = "out.csv";
    DynamicsConfig dynamics;
    BesselConfig bessel;

    void validate() const {
        lattice.validate();
        if (r == 0 && q == 0)
            throw ConfigError("tilt direction (0, 0) is undefined");
        if (!(F > 0.0))
            throw ConfigError("F must be positive");
        if (!(scan.f_min > 0.0) || !(scan.f_max >= scan.f_min))
            throw ConfigError("scan needs 0 < f_min <= f_max");
        if (scan.n_points < 1)
            throw ConfigError("scan needs n_points >= 1");
        if (kappa_points < 2)
            throw ConfigError("kappa_points must be at least 2");
        if (max_order < 0)
            throw ConfigError("max_order must be non-negative");
        if (!(threshold_ratio > 0.0))
            throw ConfigError("threshold_ratio must be positive");
        if (output.empty())
            throw ConfigError("output path is empty");
        if (!(dynamics.duration > 0.0))
            throw ConfigError("dynamics duration must be positive");
        if (dynamics.packet != "single_site" && dynamics.packet != "gaussian")
            throw ConfigError("unknown packet kind '" + dynamics.packet + "'");
        if (bessel.n_max < 0 || bessel.points < 2 || !(bessel.z_max > 0.0))
            throw ConfigError("bessel table needs n_max >= 0, points >= 2, z_max > 0");
    }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline nlohmann::json to_json(const RunConfig& c) {
    return {
        {"mode", to_string(c.mode)},
        {"lattice", {{"t1", c.lattice.t1}, {"t2", c.lattice.t2}, {"t3", c.lattice.t3}, {"a", c.lattice.a}}},
        {"tilt", {{"r", c.r}, {"q", c.q}}},
        {"F", c.F},
        {"scan",
         {{"f_min", c.scan.f_min}, {"f_max", c.scan.f_max}, {"n_points", c.scan.n_points},
          {"spacing", to_string(c.scan.spacing)}}},
        {"kappa_points", c.kappa_points},
        {"max_order", c.max_order},
        {"threshold_ratio", c.threshold_ratio},
        {"output", c.output},
        {"dynamics",
         {{"T", c.dynamics.duration}, {"dt", c.dynamics.dt}, {"patch", {c.dynamics.n1, c.dynamics.n2}},
          {"packet", {{"kind", c.dynamics.packet}, {"sigma", c.dynamics.sigma}, {"kappa0", c.dynamics.kappa0}}}}},
        {"bessel", {{"n_max", c.bessel.n_max}, {"z_max", c.bessel.z_max}, {"points", c.bessel.points}}},
    };
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline RunConfig config_from_json(const nlohmann::json& j) {
    static const char* known[] = {"mode", "lattice", "tilt", "F", "scan", "kappa_points", "max_order",
                                  "threshold_ratio", "output", "dynamics", "bessel"};
    if (!j.is_object())
        throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw ConfigError("unknown config key '" + key + "'");
    RunConfig c;
    try {
        if (j.contains("mode"))
            c.mode = parse_mode(j.at("mode").get<std::string>());
        if (j.contains("lattice")) {
            const auto& l = j.at("lattice");
            c.lattice.t1 = l.value("t1", c.lattice.t1);
            c.lattice.t2 = l.value("t2", c.lattice.t2);
            c.lattice.t3 = l.value("t3", c.lattice.t3);
            c.lattice.a = l.value("a", c.lattice.a);
        }
        if (j.contains("tilt")) {
            c.r = j.at("tilt").value("r", c.r);
            c.q = j.at("tilt").value("q", c.q);
        }
        c.F = j.value("F", c.F);
        if (j.contains("scan")) {
            const auto& s = j.at("scan");
            c.scan.f_min = s.value("f_min", c.scan.f_min);
            c.scan.f_max = s.value("f_max", c.scan.f_max);
            c.scan.n_points = s.value("n_points", c.scan.n_points);
            if (s.contains("spacing"))
                c.scan.spacing = parse_spacing(s.at("spacing").get<std::string>());
        }
        c.kappa_points = j.value("kappa_points", c.kappa_points);
        c.max_order = j.value("max_order", c.max_order);
        c.threshold_ratio = j.value("threshold_ratio", c.threshold_ratio);
        c.output = j.value("output", c.output);
        if (j.contains("dynamics")) {
            const auto& d = j.at("dynamics");
            c.dynamics.duration = d.value("T", c.dynamics.duration);
            c.dynamics.dt = d.value("dt", c.dynamics.dt);
            if (d.contains("patch")) {
                c.dynamics.n1 = d.at("patch").at(0).get<int>();
                c.dynamics.n2 = d.at("patch").at(1).get<int>();
            }
            if (d.contains("packet")) {
                const auto& p = d.at("packet");
                c.dynamics.packet = p.value("kind", c.dynamics.packet);
                c.dynamics.sigma = p.value("sigma", c.dynamics.sigma);
                c.dynamics.kappa0 = p.value("kappa0", c.dynamics.kappa0);
            }
        }
        if (j.contains("bessel")) {
            const auto& b = j.at("bessel");
            c.bessel.n_max = b.value("n_max", c.bessel.n_max);
            c.bessel.z_max = b.value("z_max", c.bessel.z_max);
            c.bessel.points = b.value("points", c.bessel.points);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return c;
}

} // namespace stark
