#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "volterra/error.hpp"
#include "volterra/hierarchy.hpp"
#include "volterra/lattice.hpp"
#include "volterra/matrix.hpp"
#include "volterra/realization.hpp"

namespace volterra {

// A fixed-step trajectory: row k holds time, state and monitor values after
// k steps (row 0 is the initial condition).  note records anything unusual,
// e.g. a disabled monitor and why.
struct Trajectory {
    Vec times;
    std::vector<Vec> states;
    std::vector<Vec> monitors;
    std::vector<std::string> monitor_names;
    std::string note;
};

namespace detail {

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline Vec rk4_step(const std::function<Vec(const Vec&)>& rhs, const Vec& x, double dt) {
    const Vec k1 = rhs(x);
    const Vec k2 = rhs(x + (0.5 * dt) * k1);
    const Vec k3 = rhs(x + (0.5 * dt) * k2);
    const Vec k4 = rhs(x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace detail

// Classic fixed-step RK4.  t_end = 0 yields the single initial row.  If the
// state stops being finite the integration aborts with the last good time.
inline Trajectory integrate_rk4(const std::function<Vec(const Vec&)>& rhs, const Vec& x0,
                                double t_end, double dt,
                                const std::function<Vec(const Vec&)>& monitor = {},
                                std::vector<std::string> monitor_names = {}) {
    if (dt <= 0.0) throw Error("integrate_rk4: dt must be positive");
    if (t_end < 0.0) throw Error("integrate_rk4: t_end must be >= 0");
    if (!detail::all_finite(x0)) throw NonFinite("integrate_rk4: non-finite initial state", 0.0);
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));

    Trajectory tr;
    tr.monitor_names = std::move(monitor_names);
    tr.times.reserve(steps + 1);
    tr.states.reserve(steps + 1);
    Vec x = x0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (k > 0) {
            x = detail::rk4_step(rhs, x, dt);
            if (!detail::all_finite(x))
                throw NonFinite("integrate_rk4: state became non-finite",
                                static_cast<double>(k - 1) * dt);
        }
        tr.times.push_back(t);
        tr.states.push_back(x);
        if (monitor) tr.monitors.push_back(monitor(x));
    }
    return tr;
}

// Volterra flow with conservation monitors: the invariants H_1..H_m always,
// and the Lax eigenvalues whenever the initial point admits the symmetric
// Lax matrix (all products u_i u_{i+1} >= 0).  Off that domain the
// eigenvalue columns are dropped and the reason is recorded in note.
inline Trajectory integrate_volterra(const UPoint& u0, double t_end, double dt,
                                     bool want_eigenvalues = true) {
    const std::size_t m = u0.m();
    bool eig_ok = want_eigenvalues;
    std::string note;
    if (want_eigenvalues) {
        try {
            (void)lax_pair(u0);
        } catch (const NegativeProduct&) {
            eig_ok = false;
            note = "eigenvalue monitor disabled: initial point has u_i*u_{i+1} < 0, "
                   "symmetric Lax matrix undefined";
        }
    }

    std::vector<std::string> names;
    for (std::size_t i = 1; i <= m; ++i) names.push_back("H" + std::to_string(i));
    if (eig_ok)
        for (std::size_t i = 1; i <= m + 1; ++i)
            names.push_back("lambda" + std::to_string(i));

    bool eig_lost = false;
    auto monitor = [m, eig_ok, &eig_lost](const Vec& v) {
        const UPoint u(v);
        Vec row;
        for (std::size_t i = 1; i <= m; ++i)
            row.push_back(invariant_h(u, static_cast<unsigned>(i)));
        if (eig_ok) {
            try {
                const Vec ev = eigenvalues_symmetric(lax_pair(u).L);
                row.insert(row.end(), ev.begin(), ev.end());
            } catch (const NegativeProduct&) {
                eig_lost = true;
                row.insert(row.end(), m + 1, std::numeric_limits<double>::quiet_NaN());
            }
        }
        return row;
    };

    auto rhs = [](const Vec& v) { return volterra_rhs(UPoint(v)); };
    Trajectory tr = integrate_rk4(rhs, u0.values(), t_end, dt, monitor, names);
    tr.note = note;
    if (eig_lost) {
        if (!tr.note.empty()) tr.note += "; ";
        tr.note += "eigenvalue monitor left the positive product domain mid-run, "
                   "NaN recorded";
    }
    return tr;
}

// chi_1 flow on the realization side, monitoring h_1..h_4.
inline Trajectory integrate_qp(const PhasePoint& x0, double t_end, double dt) {
    std::vector<std::string> names = {"h1", "h2", "h3", "h4"};
    auto monitor = [](const Vec& v) {
        const PhasePoint x = PhasePoint::from_flat(v);
        Vec row;
        for (int i = 1; i <= 4; ++i) row.push_back(generate_h(i, x));
        return row;
    };
    auto rhs = [](const Vec& v) { return chi1(PhasePoint::from_flat(v)); };
    return integrate_rk4(rhs, x0.flat(), t_end, dt, monitor, names);
}

// Two flows run side by side plus a per-step gap between them.
struct PairedTrajectory {
    Trajectory first;
    Trajectory second;
    Vec gap;
    double max_gap = 0.0;
};

// chi_1 on the qp side against the Volterra flow started at realize(x0);
// the realization must intertwine the two flows, so the gap
// || realize(x_qp(t)) - u(t) ||_inf measures the claimed correspondence.
inline PairedTrajectory integrate_qp_vs_u(const PhasePoint& x0, double t_end, double dt) {
    PairedTrajectory pt;
    pt.first = integrate_qp(x0, t_end, dt);
    pt.second = integrate_volterra(realize(x0), t_end, dt);
    for (std::size_t k = 0; k < pt.first.states.size(); ++k) {
        const PhasePoint x = PhasePoint::from_flat(pt.first.states[k]);
        const double g = norm_inf(realize(x).values() - pt.second.states[k]);
        pt.gap.push_back(g);
        pt.max_gap = std::max(pt.max_gap, g);
    }
    return pt;
}

// Volterra flow against the Toda flow started at its Henon image; the gap
// || henon(u(t)) - y(t) ||_inf measures the map's equivariance.
inline PairedTrajectory integrate_henon_pair(const UPoint& u0, double t_end, double dt) {
    const TodaPoint y0 = henon_map(u0);
    const std::size_t n = y0.n();

    PairedTrajectory pt;
    pt.first = integrate_volterra(u0, t_end, dt);
    auto toda_flat_rhs = [n](const Vec& v) {
        return toda_rhs(TodaPoint::from_flat(n, v)).flat();
    };
    pt.second = integrate_rk4(toda_flat_rhs, y0.flat(), t_end, dt);
    for (std::size_t k = 0; k < pt.first.states.size(); ++k) {
        const UPoint u(pt.first.states[k]);
        const double g = norm_inf(henon_map(u).flat() - pt.second.states[k]);
        pt.gap.push_back(g);
        pt.max_gap = std::max(pt.max_gap, g);
    }
    return pt;
}

// Largest relative drift of any monitor column over a trajectory.
inline double monitor_drift(const Trajectory& tr, std::size_t col_begin,
                            std::size_t col_end) {
    double worst = 0.0;
    if (tr.monitors.empty()) return worst;
    for (std::size_t c = col_begin; c < col_end; ++c) {
        const double ref = tr.monitors.front()[c];
        for (const Vec& row : tr.monitors)
            worst = std::max(worst, std::fabs(row[c] - ref) / std::max(1.0, std::fabs(ref)));
    }
    return worst;
}

struct IsospectralDriftResult {
    double h_drift = 0.0;
    double eig_drift = 0.0;
};

inline IsospectralDriftResult isospectral_drift(const UPoint& u0, double t_end, double dt) {
    const Trajectory tr = integrate_volterra(u0, t_end, dt);
    IsospectralDriftResult r;
    const std::size_t m = u0.m();
    r.h_drift = monitor_drift(tr, 0, m);
    if (tr.monitor_names.size() > m) r.eig_drift = monitor_drift(tr, m, tr.monitor_names.size());
    return r;
}

// Error ratio e(dt) / e(dt/2) against a dt/16 reference; near 16 for a
// fourth-order scheme.
inline double rk4_order_factor(const UPoint& u0, double t_end, double dt) {
    auto rhs = [](const Vec& v) { return volterra_rhs(UPoint(v)); };
    auto endpoint = [&](double step) {
        return integrate_rk4(rhs, u0.values(), t_end, step).states.back();
    };
    const Vec ref = endpoint(dt / 16.0);
    const double e1 = norm_inf(endpoint(dt) - ref);
    const double e2 = norm_inf(endpoint(dt / 2.0) - ref);
    return e1 / e2;
}

} // namespace volterra
