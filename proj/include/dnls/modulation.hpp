#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dnls/dynamics.hpp"
#include "dnls/errors.hpp"
#include "dnls/io.hpp"
#include "dnls/lattice.hpp"
#include "dnls/linear.hpp"
#include "dnls/soliton.hpp"

namespace dnls {

// Profiles keyed by omega quantized at 1e-12 relative. Solves happen on a small
// core window (the soliton carries no mass further out) and callers pair against
// the core sites only.
class ProfileCache {
public:
    ProfileCache(Window core, double tol = 1e-12, SolitonOptions opts = {})
        : core_(core), tol_(tol), opts_(opts) {}

    std::shared_ptr<const SolitonProfile> get(double omega) {
        const std::int64_t key = std::llround(std::log(omega) * 1e12);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
        std::shared_ptr<const SolitonProfile> p;
        try {
            p = std::make_shared<SolitonProfile>(solve_profile(omega, core_, tol_, opts_));
        } catch (const Error& e) {
            throw ProfileFailure(std::string("profile solve failed at omega = ") +
                                 std::to_string(omega) + ": " + e.what());
        }
        if (map_.size() > 200000) map_.clear();
        map_.emplace(key, p);
        return p;
    }

    const Window& core_window() const { return core_; }
    double tol() const { return tol_; }

private:
    Window core_;
    double tol_;
    SolitonOptions opts_;
    std::map<std::int64_t, std::shared_ptr<const SolitonProfile>> map_;
};

namespace detail {

inline void require_contains(const LatticeField& u, const SolitonProfile& p) {
    if (p.window.half_width > u.half_width())
        throw WindowMismatch("profile window is wider than the field window");
}

// sum over the profile core of Re/Im(e^{-i theta} v(x)) g(x) for real g
inline double dot_re(const LatticeField& v, double theta, const SolitonProfile& p,
                     const std::vector<double>& g) {
    require_contains(v, p);
    const complexd ph = std::exp(complexd{0.0, -theta});
    const int nc = p.window.half_width;
    double s = 0.0;
    for (int x = -nc; x <= nc; ++x) s += (ph * v.at(x)).real() * g[x + nc];
    return s;
}

inline double dot_im(const LatticeField& v, double theta, const SolitonProfile& p,
                     const std::vector<double>& g) {
    require_contains(v, p);
    const complexd ph = std::exp(complexd{0.0, -theta});
    const int nc = p.window.half_width;
    double s = 0.0;
    for (int x = -nc; x <= nc; ++x) s += (ph * v.at(x)).imag() * g[x + nc];
    return s;
}

} // namespace detail

// u = e^{i theta} phi_omega + xi with the symplectic orthogonality certificates
struct ModulationState {
    double theta = 0.0; // unwrapped
    double omega = 0.0;
    LatticeField xi;
    LatticeField eta; // P0perp xi
    std::shared_ptr<const SolitonProfile> profile;
    double orth_theta = 0.0; // |Omega(xi, d_theta phi)| / (||xi|| ||d_theta phi||)
    double orth_omega = 0.0;

    double theta_mod_2pi() const {
        double t = std::fmod(theta, 2.0 * M_PI);
        if (t < 0) t += 2.0 * M_PI;
        return t;
    }
};

// xi = u - e^{i theta} phi on u's window (phi vanishes beyond its core)
inline LatticeField subtract_soliton(const LatticeField& u, double theta,
                                     const SolitonProfile& p) {
    detail::require_contains(u, p);
    LatticeField xi = u;
    const complexd ph = std::exp(complexd{0.0, theta});
    const int nc = p.window.half_width;
    for (int x = -nc; x <= nc; ++x) xi.at(x) -= ph * p.phi[x + nc];
    return xi;
}

// Newton on F(theta, omega) = (Omega(u - phi, d_theta phi), Omega(u - phi, d_omega phi))
// with the explicit Jacobian q'(omega) J + second-derivative corrections.
inline ModulationState decompose(const LatticeField& u, double theta_init, double omega_init,
                                 double tol, ProfileCache& cache, int max_iter = 50) {
    double th = theta_init, om = omega_init;
    std::shared_ptr<const SolitonProfile> prof;

    for (int it = 0; it < max_iter; ++it) {
        prof = cache.get(om);
        const int nc = prof->window.half_width;
        const complexd ph = std::exp(complexd{0.0, -th});

        // one pass over the core: pairings of zeta = e^{-i theta} u - phi
        double re_phi = 0.0, re_dphi = 0.0, im_phi = 0.0, im_dphi = 0.0, im_d2phi = 0.0;
        for (int x = -nc; x <= nc; ++x) {
            const complexd z = ph * u.at(x) - complexd{prof->phi[x + nc], 0.0};
            re_phi += z.real() * prof->phi[x + nc];
            re_dphi += z.real() * prof->dphi[x + nc];
            im_phi += z.imag() * prof->phi[x + nc];
            im_dphi += z.imag() * prof->dphi[x + nc];
            im_d2phi += z.imag() * prof->d2phi[x + nc];
        }
        const double qp = prof->q_prime;
        const double f1 = re_phi;
        const double f2 = -im_dphi;
        const double j11 = im_phi;
        const double j12 = -qp + re_dphi;
        const double j21 = qp + re_dphi;
        const double j22 = -im_d2phi;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det))
            throw NoConvergence("decompose: singular modulation Jacobian");
        const double dth = (-f1 * j22 + f2 * j12) / det;
        const double dom = (-j11 * f2 + j21 * f1) / det;
        th += dth;
        om += dom;
        if (!(om > 0.0)) throw NoConvergence("decompose: omega left the admissible range");
        if (std::abs(dth) <= 1e-12 + 1e-15 * std::abs(th) && std::abs(dom) <= 1e-12 * om) {
            prof = cache.get(om);
            break;
        }
        if (it + 1 == max_iter) throw NoConvergence("decompose: Newton did not converge");
    }

    ModulationState st;
    st.theta = th;
    st.omega = om;
    st.profile = prof;
    st.xi = subtract_soliton(u, th, *prof);
    st.eta = project_out_origin(st.xi);

    const double xin = l2_norm(st.xi);
    double phin = 0.0, dphin = 0.0;
    for (double v : prof->phi) phin += v * v;
    for (double v : prof->dphi) dphin += v * v;
    phin = std::sqrt(phin);
    dphin = std::sqrt(dphin);
    const double floor = 1e-30 + xin;
    st.orth_theta = std::abs(detail::dot_re(st.xi, th, *prof, prof->phi)) / (floor * phin);
    st.orth_omega = std::abs(detail::dot_im(st.xi, th, *prof, prof->dphi)) / (floor * dphin);
    if (st.orth_theta > tol || st.orth_omega > tol)
        throw NoConvergence("decompose: orthogonality certificates exceed tolerance");
    return st;
}

// Q[theta,omega] u = u + e^{i theta}(-phi(0)^{-1} Omega(u, d_theta phi)
//                                    + i dphi(0)^{-1} Omega(u, d_omega phi)) delta_0
inline LatticeField correction_Q(double theta, const SolitonProfile& p, const LatticeField& eta) {
    require_vanishes_at_origin(eta, "correction_Q");
    const double phi0 = p.at(0);
    const double dphi0 = p.dat(0);
    if (phi0 == 0.0 || dphi0 == 0.0)
        throw DegenerateProfile("correction_Q: profile origin values vanish");
    const double om_theta = detail::dot_re(eta, theta, p, p.phi);   // Omega(eta, d_theta phi)
    const double om_omega = -detail::dot_im(eta, theta, p, p.dphi); // Omega(eta, d_omega phi)
    const complexd q{-om_theta / phi0, om_omega / dphi0};
    LatticeField out = eta;
    out.at(0) += std::exp(complexd{0.0, theta}) * q;
    return out;
}

// f[theta, omega, xi] through its defining identity:
// f = |phi+xi|^6 (phi+xi) - |phi|^6 phi - 4 |phi|^6 xi - 3 |phi|^4 phi^2 conj(xi) - |xi|^6 xi
inline LatticeField remainder_f(double theta, const SolitonProfile& p, const LatticeField& xi) {
    detail::require_contains(xi, p);
    const complexd ph = std::exp(complexd{0.0, theta});
    const int n = xi.half_width();
    const int nc = p.window.half_width;
    LatticeField f(xi.window);
    for (int x = -n; x <= n; ++x) {
        const double phv = std::abs(x) <= nc ? p.phi[x + nc] : 0.0;
        if (phv == 0.0) continue; // f vanishes where the soliton does
        const complexd phc = ph * phv;
        const complexd z = xi.at(x);
        const complexd w = phc + z;
        const double p6 = std::pow(phv, 6);
        f.at(x) = std::pow(std::abs(w), 6) * w - p6 * phc - 4.0 * p6 * z -
                  3.0 * p6 * (ph * ph) * std::conj(z) - std::pow(std::abs(z), 6) * z;
    }
    return f;
}

// H[theta,omega] u = -Delta_d u - 4 |phi|^6 u - 3 |phi|^4 phi^2 conj(u); R-linear only.
inline LatticeField linearized_apply(double theta, const SolitonProfile& p, const LatticeField& u) {
    detail::require_contains(u, p);
    LatticeField out = laplacian(u);
    const int n = u.half_width();
    const int nc = p.window.half_width;
    const complexd ph2 = std::exp(complexd{0.0, 2.0 * theta});
    for (int x = -n; x <= n; ++x) {
        complexd v = -out.at(x);
        const double phv = std::abs(x) <= nc ? p.phi[x + nc] : 0.0;
        if (phv != 0.0) {
            const double p6 = std::pow(phv, 6);
            v += -4.0 * p6 * u.at(x) - 3.0 * p6 * ph2 * std::conj(u.at(x));
        }
        out.at(x) = v;
    }
    return out;
}

// A[theta,omega,eta] (thetadot - omega, omegadot/omega)^T =
//   (<f + |xi|^6 xi, d_omega phi>, -omega^{-1} <f + |xi|^6 xi, d_theta phi>)^T
struct ModulationMatrix {
    double a[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double rhs[2] = {0.0, 0.0};
    double rate_theta = 0.0; // thetadot - omega
    double rate_omega = 0.0; // omegadot / omega
    double det = 0.0;
    double q_prime = 0.0;
};

inline ModulationMatrix modulation_rates(const ModulationState& st) {
    const SolitonProfile& p = *st.profile;
    const double om = st.omega;
    const double qp = p.q_prime;

    const LatticeField q_eta = correction_Q(st.theta, p, st.eta);
    const double re_dphi = detail::dot_re(q_eta, st.theta, p, p.dphi);

    ModulationMatrix m;
    m.q_prime = qp;
    m.a[0][0] = qp + re_dphi;
    m.a[0][1] = -om * detail::dot_im(q_eta, st.theta, p, p.d2phi);
    m.a[1][0] = -(1.0 / om) * detail::dot_im(q_eta, st.theta, p, p.phi);
    m.a[1][1] = qp - re_dphi;
    m.det = m.a[0][0] * m.a[1][1] - m.a[0][1] * m.a[1][0];
    if (!(std::abs(m.det) > 0.05 * qp * qp))
        throw NearSingularA("modulation_rates: det A too close to zero");

    LatticeField g = remainder_f(st.theta, p, st.xi);
    for (int i = 0; i < g.size(); ++i) {
        const complexd z = st.xi.values[i];
        g.values[i] += std::pow(std::abs(z), 6) * z;
    }
    m.rhs[0] = detail::dot_re(g, st.theta, p, p.dphi);
    m.rhs[1] = -(1.0 / om) * detail::dot_im(g, st.theta, p, p.phi);

    m.rate_theta = (m.rhs[0] * m.a[1][1] - m.a[0][1] * m.rhs[1]) / m.det;
    m.rate_omega = (m.a[0][0] * m.rhs[1] - m.a[1][0] * m.rhs[0]) / m.det;
    return m;
}

// ---------------------------------------------------------------------------
// trajectory tracking

struct TrackOptions {
    double tol_orth = 1e-10;
    Window core = Window(40, Boundary::dirichlet);
    double profile_tol = 1e-12;
};

struct TrackResult {
    std::vector<ModulationState> states;
    NormTrace trace; // t, theta_unwrapped, omega, xi_l2, xi_l2wm1, rate_theta, rate_omega,
                     // rate_residual, detA, stz_linf_l2, stz_l6_linf, xt_l2_wm1
    std::optional<std::size_t> exit_index; // first sample where decompose failed (TubeExit)
};

inline TrackResult track(const Trajectory& traj, double theta0, double omega0,
                         TrackOptions opts = {}) {
    TrackResult out;
    out.trace.columns = {"t",          "theta_unwrapped", "omega",      "xi_l2",
                         "xi_l2wm1",   "rate_theta",      "rate_omega", "rate_residual",
                         "detA",       "stz_linf_l2",     "stz_l6_linf", "xt_l2_wm1"};
    if (traj.states.empty()) return out;

    Window core = opts.core;
    if (core.half_width > traj.states.front().half_width())
        core = Window(traj.states.front().half_width(), Boundary::dirichlet);
    ProfileCache cache(core, opts.profile_tol);
    const auto w2 = detail::decaying_weight_sq(traj.states.front().window);

    double th = theta0, om = omega0;
    double run_linf_l2 = 0.0, run_l6 = 0.0, run_xt = 0.0;
    double prev6 = 0.0, prev2 = 0.0;
    std::vector<double> rate_th, rate_om;

    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const double t = traj.times[i];
        const double dt_sample = i > 0 ? traj.times[i] - traj.times[i - 1] : 0.0;
        ModulationState st;
        ModulationMatrix m;
        try {
            st = decompose(traj.states[i], th + om * dt_sample, om, opts.tol_orth, cache);
            m = modulation_rates(st);
        } catch (const Error&) {
            out.exit_index = i; // left the tube; partial results stand
            break;
        }
        th = st.theta;
        om = st.omega;

        const double xin = l2_norm(st.xi);
        double wm1 = 0.0;
        for (int k = 0; k < st.xi.size(); ++k) wm1 += w2[k] * std::norm(st.xi.values[k]);
        wm1 = std::sqrt(wm1);
        const double li = linf_norm(st.xi);

        run_linf_l2 = std::max(run_linf_l2, xin);
        const double p6 = std::pow(li, 6), p2 = wm1 * wm1;
        if (i > 0) {
            run_l6 += 0.5 * dt_sample * (prev6 + p6);
            run_xt += 0.5 * dt_sample * (prev2 + p2);
        }
        prev6 = p6;
        prev2 = p2;

        rate_th.push_back(m.rate_theta);
        rate_om.push_back(m.rate_omega);
        out.trace.push({t, th, om, xin, wm1, m.rate_theta, m.rate_omega, 0.0, m.det, run_linf_l2,
                        std::pow(run_l6, 1.0 / 6.0), std::sqrt(run_xt)});
        out.states.push_back(std::move(st));
    }

    // centered-difference residual of the tracked (theta, omega) series
    const std::size_t nres = out.trace.rows.size();
    const std::size_t c_rr = out.trace.col("rate_residual");
    for (std::size_t i = 1; i + 1 < nres; ++i) {
        const double h = out.trace.rows[i + 1][0] - out.trace.rows[i - 1][0];
        const double fd_th =
            (out.trace.rows[i + 1][1] - out.trace.rows[i - 1][1]) / h - out.trace.rows[i][2];
        const double fd_lom =
            (std::log(out.trace.rows[i + 1][2]) - std::log(out.trace.rows[i - 1][2])) / h;
        out.trace.rows[i][c_rr] =
            std::abs(fd_th - rate_th[i]) + std::abs(fd_lom - rate_om[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// scattering extraction: xi_+(t) = e^{-i t Delta_d} xi(t)

struct ScatteringReport {
    std::vector<double> t_list;
    std::vector<std::array<double, 3>> cauchy_defects; // (t_i, t_j, ||xi+(t_i) - xi+(t_j)||)
    LatticeField xi_plus;                              // estimate at the last requested time
    double xi_plus_norm = 0.0;
};

inline ScatteringReport scattering_extract(const TrackResult& tr,
                                           const std::vector<double>& t_list) {
    if (tr.states.empty()) throw PreconditionViolation("scattering_extract: empty track");
    ScatteringReport rep;
    rep.t_list = t_list;
    std::vector<LatticeField> xplus;
    for (double t : t_list) {
        std::size_t best = 0;
        double bd = std::abs(tr.trace.rows[0][0] - t);
        for (std::size_t i = 1; i < tr.states.size(); ++i) {
            const double d = std::abs(tr.trace.rows[i][0] - t);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        const double ts = tr.trace.rows[best][0];
        xplus.push_back(free_propagate(tr.states[best].xi, -ts));
    }
    for (std::size_t i = 0; i < xplus.size(); ++i)
        for (std::size_t j = i + 1; j < xplus.size(); ++j) {
            double s = 0.0;
            for (int k = 0; k < xplus[i].size(); ++k)
                s += std::norm(xplus[i].values[k] - xplus[j].values[k]);
            rep.cauchy_defects.push_back({t_list[i], t_list[j], std::sqrt(s)});
        }
    rep.xi_plus = xplus.back();
    rep.xi_plus_norm = l2_norm(rep.xi_plus);
    return rep;
}

inline nlohmann::json scattering_to_json(const ScatteringReport& rep) {
    nlohmann::json j;
    j["t_list"] = rep.t_list;
    nlohmann::json defects = nlohmann::json::array();
    for (const auto& d : rep.cauchy_defects)
        defects.push_back({{"t_i", d[0]}, {"t_j", d[1]}, {"defect", d[2]}});
    j["cauchy_defects"] = defects;
    j["xi_plus_norm"] = rep.xi_plus_norm;
    return j;
}

} // namespace dnls
