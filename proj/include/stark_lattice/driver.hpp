#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

#include "config.hpp"
#include "dynamics.hpp"
#include "emit.hpp"
#include "exact_spectrum.hpp"
#include "perturbative.hpp"
#include "scan.hpp"
#include "special_fn.hpp"

namespace stark {

struct RunResult {
    CsvTable table;
    nlohmann::json summary = nlohmann::json::object();
    bool numerical_failure = false; // more than 20% of scan rows unconverged
};

inline CsvTable to_table(const DispersionCurve& c) {
    CsvTable t{{"kappa", "E"}, {}};
    for (std::size_t i = 0; i < c.kappas.size(); ++i)
        t.rows.push_back({c.kappas[i], c.energies[i]});
    return t;
}

inline CsvTable to_table(const AnalyticDispersion& d) {
    CsvTable t{{"kappa", "e_plus", "e_minus"}, {}};
    for (std::size_t i = 0; i < d.kappas.size(); ++i)
        t.rows.push_back({d.kappas[i], d.e_plus[i], d.e_minus[i]});
    return t;
}

inline CsvTable to_table(const BandWidthScan& s) {
    CsvTable t{{"F", "width_numeric", "width_analytic_2term", "width_analytic_full", "J_used", "converged"}, {}};
    for (const auto& r : s.rows)
        t.rows.push_back({r.F, r.width_numeric, r.width_analytic_2term, r.width_analytic_full, double(r.J_used),
                          r.converged ? 1.0 : 0.0});
    return t;
}

inline CsvTable to_table(const std::vector<Collapse>& cs) {
    CsvTable t{{"F", "width_min"}, {}};
    for (const auto& c : cs)
        t.rows.push_back({c.F, c.width_min});
    return t;
}

inline CsvTable to_table(const SpreadTrajectory& s) {
    CsvTable t{{"t", "sigma_eta", "sigma_xi", "norm", "energy"}, {}};
    for (std::size_t i = 0; i < s.times.size(); ++i)
        t.rows.push_back({s.times[i], s.sigma_eta[i], s.sigma_xi[i], s.norm[i], s.energy[i]});
    return t;
}

inline RunResult run_mode(const RunConfig& cfg) {
    cfg.validate();
    RunResult out;
    switch (cfg.mode) {
    case Mode::Spectrum: {
        const auto tilt = make_tilt(cfg.r, cfg.q, cfg.F, cfg.lattice);
        const auto grid = kappa_grid(tilt, cfg.kappa_points);
        const auto w = band_width_converged(cfg.lattice, tilt, std::min(cfg.kappa_points, 64));
        const auto curve = dispersion_numeric(cfg.lattice, tilt, grid, central_energy(tilt), w.site_range);
        out.table = to_table(curve);
        out.summary = {{"width", curve.width}, {"band_label", curve.band_label}, {"J_used", w.site_range},
                       {"ladder_symmetry_residual", ladder_symmetry_residual(curve, cfg.lattice, tilt, w.site_range)}};
        break;
    }
    case Mode::Analytic: {
        const auto tilt = make_tilt(cfg.r, cfg.q, cfg.F, cfg.lattice);
        const auto disp = dispersion_analytic(cfg.lattice, tilt, kappa_grid(tilt, cfg.kappa_points),
                                              {cfg.max_order, 0, true});
        out.table = to_table(disp);
        out.summary = {{"width", width_analytic(disp)}, {"orientation", to_string(classify_orientation(tilt))}};
        break;
    }
    case Mode::ScanWidth:
    case Mode::Collapse: {
        const auto scan = run_scan_width(cfg);
        out.numerical_failure = double(scan.unconverged()) > 0.2 * double(scan.rows.size());
        out.summary["unconverged_rows"] = scan.unconverged();
        if (cfg.mode == Mode::ScanWidth) {
            out.table = to_table(scan);
            break;
        }
        const auto collapses = find_collapses(scan, cfg.threshold_ratio, numeric_width_evaluator(cfg));
        out.table = to_table(collapses);
        const auto tilt = make_tilt(cfg.r, cfg.q, cfg.F, cfg.lattice);
        if (classify_orientation(tilt) == OrientationClass::Generic
            && std::abs(cfg.lattice.t2 + cfg.lattice.t3) <= 1e-12 * std::max(1.0, cfg.lattice.hopping_sum())) {
            try {
                out.summary["predicted"] = collapse_predict(cfg.lattice, tilt, 3, cfg.max_order);
            } catch (const NumericalError&) {
            }
        }
        break;
    }
    case Mode::Propagate: {
        const auto tilt = make_tilt(cfg.r, cfg.q, cfg.F, cfg.lattice);
        const auto lattice = build_lattice(cfg.lattice, tilt, cfg.dynamics.n1, cfg.dynamics.n2);
        PacketKind kind = SingleSite{};
        if (cfg.dynamics.packet == "gaussian")
            kind = GaussianPacket{cfg.dynamics.sigma, cfg.dynamics.kappa0};
        auto state = initial_packet(lattice, kind);
        PropagationOptions opts;
        opts.duration = cfg.dynamics.duration;
        opts.max_step = cfg.dynamics.dt;
        const auto traj = propagate(state, lattice, opts);
        out.table = to_table(traj);
        out.summary = {{"ballistic_velocity", traj.ballistic_velocity}, {"r_squared", traj.r_squared},
                       {"reliable", traj.reliable}};
        break;
    }
    case Mode::Bessel: {
        out.table.header = {"z"};
        for (int n = 0; n <= cfg.bessel.n_max; ++n)
            out.table.header.push_back("J" + std::to_string(n));
        for (int i = 0; i < cfg.bessel.points; ++i) {
            const double z = cfg.bessel.z_max * i / (cfg.bessel.points - 1);
            std::vector<double> row{z};
            const auto tab = bessel_j_table(cfg.bessel.n_max, z);
            for (int n = 0; n <= cfg.bessel.n_max; ++n)
                row.push_back(tab[std::size_t(cfg.bessel.n_max + n)]);
            out.table.rows.push_back(std::move(row));
        }
        nlohmann::json roots = nlohmann::json::object();
        for (int n = 0; n <= cfg.bessel.n_max; ++n)
            roots[std::to_string(n)] = {bessel_root(n, 1), bessel_root(n, 2), bessel_root(n, 3)};
        out.summary["roots"] = roots;
        break;
    }
    }
    return out;
}

/// Runs the configured mode and writes CSV plus metadata sidecar.
inline RunResult run_and_emit(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    auto result = run_mode(cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const nlohmann::json meta = {
        {"config", to_json(cfg)}, {"version", kVersion}, {"wall_time_seconds", wall}, {"summary", result.summary}};
    emit(result.table, cfg.output, meta);
    return result;
}

} // namespace stark
