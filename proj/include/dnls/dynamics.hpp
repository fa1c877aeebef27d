#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dnls/errors.hpp"
#include "dnls/io.hpp"
#include "dnls/lattice.hpp"
#include "dnls/linear.hpp"

namespace dnls {

// conserved l2 mass and the Hamiltonian generating i u_t = -Delta u - |u|^6 u:
// E = sum |u(x+1) - u(x)|^2 - 1/4 sum |u(x)|^8
inline double mass(const LatticeField& u) {
    double s = 0.0;
    for (const auto& z : u.values) s += std::norm(z);
    return s;
}

inline double energy(const LatticeField& u) {
    const int n = u.half_width();
    double grad = 0.0;
    const int lo = u.window.boundary == Boundary::dirichlet ? -n - 1 : -n;
    for (int x = lo; x <= n; ++x) grad += std::norm(u.beyond(x + 1) - u.beyond(x));
    double pot = 0.0;
    for (const auto& z : u.values) pot += std::pow(std::norm(z), 4);
    return grad - 0.25 * pot;
}

// exact nonlinear sub-flow of i u_t = -|u|^6 u: pointwise phase rotation
inline LatticeField nonlinear_phase(const LatticeField& u, double t) {
    LatticeField out = u;
    for (auto& z : out.values) z *= std::exp(complexd{0.0, t * std::pow(std::norm(z), 3)});
    return out;
}

// half-step nonlinear, full linear, half-step nonlinear; both sub-flows exact
inline LatticeField step_strang(const LatticeField& u, double dt) {
    if (!(dt > 0.0)) throw PreconditionViolation("step_strang: dt must be positive");
    LatticeField v = nonlinear_phase(u, dt / 2.0);
    v = free_propagate(v, dt);
    return nonlinear_phase(v, dt / 2.0);
}

struct Trajectory {
    std::vector<double> times;
    std::vector<LatticeField> states; // thinned by stride
    double dt = 0.0;
    int stride = 1;
    std::string integrator = "strang";
};

struct AbsorbingMask {
    bool active = false;
    int width = 40;        // ramp width in sites
    double strength = 1.0; // damping exponent scale at the edge
};

struct EvolveOptions {
    double horizon = 1.0;
    double dt = 0.01;
    int stride = 1;
    double blowup_factor = 10.0; // abort when ||u||_inf exceeds this multiple of its start
    AbsorbingMask mask;
};

struct EvolveResult {
    Trajectory trajectory;
    NormTrace trace; // (t, mass, energy, l2, l2_wm1)
};

namespace detail {

inline std::vector<double> mask_profile(const Window& w, const AbsorbingMask& m, double dt) {
    std::vector<double> g(w.size(), 1.0);
    if (!m.active) return g;
    const int n = w.half_width;
    for (int x = -n; x <= n; ++x) {
        const int d = n - std::abs(x);
        if (d < m.width) {
            const double s = std::cos(0.5 * M_PI * double(m.width - d) / double(m.width));
            g[x + n] = std::exp(-m.strength * dt * (1.0 - s * s));
        }
    }
    return g;
}

} // namespace detail

// Repeated Strang steps with probes every stride; deterministic given (u0, options).
inline EvolveResult evolve(const LatticeField& u0, const EvolveOptions& opts) {
    if (!(opts.horizon > 0.0)) throw PreconditionViolation("evolve: horizon must be positive");
    if (!(opts.dt > 0.0) || opts.dt > 0.05)
        throw PreconditionViolation("evolve: dt must lie in (0, 0.05]");
    require_finite(u0);

    const int nsteps = int(std::llround(opts.horizon / opts.dt));
    const double linf0 = linf_norm(u0);
    const auto mask = detail::mask_profile(u0.window, opts.mask, opts.dt);
    const auto w2 = detail::decaying_weight_sq(u0.window);

    EvolveResult out;
    out.trajectory.dt = opts.dt;
    out.trajectory.stride = opts.stride;
    out.trace.columns = {"t", "mass", "energy", "l2", "l2_wm1"};

    LatticeField u = u0;
    auto probe = [&](int step) {
        const double t = step * opts.dt;
        double l2sq = 0.0, wm1 = 0.0;
        for (int i = 0; i < u.size(); ++i) {
            const double a2 = std::norm(u.values[i]);
            l2sq += a2;
            wm1 += w2[i] * a2;
        }
        out.trajectory.times.push_back(t);
        out.trajectory.states.push_back(u);
        out.trace.push({t, l2sq, energy(u), std::sqrt(l2sq), std::sqrt(wm1)});
    };

    probe(0);
    for (int step = 1; step <= nsteps; ++step) {
        u = step_strang(u, opts.dt);
        if (opts.mask.active)
            for (int i = 0; i < u.size(); ++i) u.values[i] *= mask[i];
        const double li = linf_norm(u);
        if (!std::isfinite(li) || li > opts.blowup_factor * std::max(linf0, 1e-300))
            throw NonFinite("evolve: blow-up guard tripped at t = " +
                            std::to_string(step * opts.dt));
        if (step % opts.stride == 0) probe(step);
    }
    return out;
}

} // namespace dnls
