#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "config.hpp"
#include "core_model.hpp"
#include "exact_spectrum.hpp"
#include "fitting.hpp"
#include "parallel.hpp"
#include "perturbative.hpp"

namespace stark {

struct BandWidthRow {
    double F = 0.0;
    double width_numeric = 0.0;
    double width_analytic_2term = 0.0;
    double width_analytic_full = 0.0;
    int J_used = 0;
    bool converged = true;
};

struct BandWidthScan {
    std::vector<BandWidthRow> rows;

    std::size_t unconverged() const {
        return std::size_t(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.converged; }));
    }
};

inline std::vector<double> force_values(const ForceScan& s) {
    std::vector<double> f(std::size_t(s.n_points));
    for (int i = 0; i < s.n_points; ++i) {
        const double u = s.n_points == 1 ? 0.0 : double(i) / (s.n_points - 1);
        f[std::size_t(i)] = s.spacing == Spacing::Log ? s.f_min * std::pow(s.f_max / s.f_min, u)
                                                      : s.f_min + (s.f_max - s.f_min) * u;
    }
    return f;
}

/// Analytic width at one force with the given series options (generic
/// tilts) or the closed forms (diagonal / anti-diagonal).
inline double analytic_width_at(const LatticeSpec& lat, const TiltSpec& tilt, int kappa_points, SeriesOptions opts) {
    return width_analytic(dispersion_analytic(lat, tilt, kappa_grid(tilt, kappa_points), opts));
}

inline BandWidthRow scan_row(const LatticeSpec& lat, const TiltSpec& tilt, int kappa_points, int max_order) {
    BandWidthRow row;
    row.F = tilt.F;
    try {
        const auto w = band_width_converged(lat, tilt, kappa_points);
        row.width_numeric = w.width;
        row.J_used = w.site_range;
    } catch (const NonConvergence& e) {
        row.width_numeric = e.last();
        row.J_used = e.site_range();
        row.converged = false;
    }
    row.width_analytic_2term = analytic_width_at(lat, tilt, kappa_points, {max_order, 2, false});
    row.width_analytic_full = analytic_width_at(lat, tilt, kappa_points, {max_order, 0, true});
    return row;
}

/// One row per force, computed independently and assembled in F order.
inline BandWidthScan run_scan_width(const RunConfig& cfg) {
    cfg.validate();
    const auto fs = force_values(cfg.scan);
    BandWidthScan scan;
    scan.rows.resize(fs.size());
    parallel_for(fs.size(), [&](std::size_t i) {
        const auto tilt = make_tilt(cfg.r, cfg.q, fs[i], cfg.lattice);
        scan.rows[i] = scan_row(cfg.lattice, tilt, cfg.kappa_points, cfg.max_order);
    });
    return scan;
}

struct Collapse {
    double F = 0.0;
    double width_min = 0.0;
};

inline constexpr double kFlatWidth = 1e-6;

/// Local minima of the numeric width, refined by golden-section search on
/// fresh evaluations of width_at to dF <= tol. A minimum is reported when
/// it is at most threshold_ratio times the smaller of the neighbouring
/// local maxima, and those maxima are not flat.
inline std::vector<Collapse> find_collapses(const BandWidthScan& scan, double threshold_ratio,
                                            const std::function<double(double)>& width_at,
                                            double tol = 1e-3) {
    const auto& rows = scan.rows;
    if (rows.size() < 20)
        throw ConfigError("collapse search needs a scan with at least 20 rows");
    std::vector<Collapse> out;
    const auto w = [&](std::size_t i) { return rows[i].width_numeric; };
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        if (!(w(i) <= w(i - 1) && w(i) < w(i + 1)))
            continue;
        std::size_t l = i, r = i;
        while (l > 0 && w(l - 1) >= w(l))
            --l;
        while (r + 1 < rows.size() && w(r + 1) >= w(r))
            ++r;
        const double neighbour = std::min(w(l), w(r));
        if (neighbour <= kFlatWidth)
            continue;
        const auto best = golden_section_minimize(width_at, rows[i - 1].F, rows[i + 1].F, tol);
        if (best.value <= threshold_ratio * neighbour)
            out.push_back({best.x, best.value});
    }
    return out;
}

/// Width evaluator matching run_scan_width's numeric column.
inline std::function<double(double)> numeric_width_evaluator(const RunConfig& cfg) {
    return [cfg](double F) {
        const auto tilt = make_tilt(cfg.r, cfg.q, F, cfg.lattice);
        try {
            return band_width_converged(cfg.lattice, tilt, cfg.kappa_points).width;
        } catch (const NonConvergence& e) {
            return e.last();
        }
    };
}

/// log(width) = slope log(F) + intercept over rows with F >= f_min_fit.
inline LinearFit fit_power_law(const BandWidthScan& scan, double f_min_fit) {
    std::vector<double> x, y;
    for (const auto& row : scan.rows) {
        if (row.F < f_min_fit)
            continue;
        if (!(row.width_numeric > 0.0))
            throw ConfigError("power-law fit window contains a non-positive width");
        x.push_back(std::log(row.F));
        y.push_back(std::log(row.width_numeric));
    }
    if (x.size() < 5)
        throw ConfigError("power-law fit needs at least 5 rows in the window");
    return least_squares(x, y);
}

} // namespace stark
