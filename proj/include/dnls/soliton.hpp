#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dnls/errors.hpp"
#include "dnls/lattice.hpp"

namespace dnls {

// phi_omega with its omega-derivatives; everything real and even.
struct SolitonProfile {
    double omega = 0.0;
    Window window;
    std::vector<double> phi;   // indexed like LatticeField values
    std::vector<double> dphi;  // d/domega phi
    std::vector<double> d2phi; // d^2/domega^2 phi
    double residual_norm = 0.0;
    double q_prime = 0.0; // <dphi, phi> = d/domega (1/2 ||phi||^2)

    double at(int x) const { return phi[x + window.half_width]; }
    double dat(int x) const { return dphi[x + window.half_width]; }
    double d2at(int x) const { return d2phi[x + window.half_width]; }

    LatticeField field(double theta = 0.0) const {
        LatticeField f(window);
        const complexd ph = std::exp(complexd{0.0, theta});
        for (std::size_t i = 0; i < phi.size(); ++i) f.values[i] = ph * phi[i];
        return f;
    }
};

namespace detail {

// l2 norm of -Delta_d v + omega v - v^7 for a real even field on the window
inline double stationary_residual(const std::vector<double>& v, double omega, const Window& w) {
    const int n = w.half_width;
    auto at = [&](int x) -> double {
        if (x >= -n && x <= n) return v[x + n];
        if (w.boundary == Boundary::dirichlet) return 0.0;
        return x > n ? v[(x - (2 * n + 1)) + n] : v[(x + (2 * n + 1)) + n];
    };
    double s = 0.0;
    for (int x = -n; x <= n; ++x) {
        const double lap = at(x + 1) - 2.0 * at(x) + at(x - 1);
        const double vx = at(x);
        const double r = -lap + omega * vx - std::pow(vx, 7);
        s += r * r;
    }
    return std::sqrt(s);
}

// half residual (variables x = 0..N on the even subspace)
inline Eigen::VectorXd even_residual(const Eigen::VectorXd& p, double omega, const Window& w) {
    const int n = w.half_width;
    Eigen::VectorXd r(n + 1);
    auto up = [&](int x) -> double {
        if (x <= n) return p(x);
        return w.boundary == Boundary::dirichlet ? 0.0 : p(n); // even wrap: site N+1 ~ -N
    };
    r(0) = -(2.0 * p(1) - 2.0 * p(0)) + omega * p(0) - std::pow(p(0), 7);
    for (int x = 1; x <= n; ++x)
        r(x) = -(up(x + 1) - 2.0 * p(x) + p(x - 1)) + omega * p(x) - std::pow(p(x), 7);
    return r;
}

inline Eigen::MatrixXd even_jacobian(const Eigen::VectorXd& p, double omega, const Window& w) {
    const int n = w.half_width;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int x = 0; x <= n; ++x) {
        J(x, x) = 2.0 + omega - 7.0 * std::pow(p(x), 6);
        if (x + 1 <= n) J(x, x + 1) = (x == 0) ? -2.0 : -1.0;
        if (x - 1 >= 0) J(x, x - 1) = -1.0;
    }
    if (w.boundary == Boundary::periodic) J(n, n) -= 1.0; // wrap neighbor is p(n) itself
    return J;
}

inline double full_norm_from_half(const Eigen::VectorXd& r) {
    double s = r(0) * r(0);
    for (int x = 1; x < r.size(); ++x) s += 2.0 * r(x) * r(x);
    return std::sqrt(s);
}

} // namespace detail

struct SolitonOptions {
    double omega_min = 5.0;
    int max_iter = 80;
};

// Newton on the real even subspace from the anti-continuous guess omega^{1/6} delta_0.
// The linearization -Delta_d + omega - 7 phi^6 (restricted to even functions) is
// solved densely; dphi and d2phi come from implicit differentiation of the
// stationary equation, not finite differences.
inline SolitonProfile solve_profile(double omega, const Window& window, double tol = 1e-12,
                                    const SolitonOptions& opts = {}) {
    if (!(omega > 0.0)) throw NonpositiveOmega("solve_profile: omega must be positive");
    if (omega < opts.omega_min)
        throw PreconditionViolation("solve_profile: omega below omega_min");
    if (!(tol > 0.0) || tol > 1e-6)
        throw PreconditionViolation("solve_profile: tol must lie in (0, 1e-6]");

    const int n = window.half_width;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n + 1);
    p(0) = std::pow(omega, 1.0 / 6.0);

    bool converged = false;
    double res = detail::full_norm_from_half(detail::even_residual(p, omega, window));
    for (int it = 0; it < opts.max_iter; ++it) {
        if (res < tol) {
            // push to the rounding floor so far tail sites stay relatively accurate
            for (int extra = 0; extra < 3; ++extra) {
                const Eigen::VectorXd rr = detail::even_residual(p, omega, window);
                const Eigen::VectorXd dd =
                    Eigen::PartialPivLU<Eigen::MatrixXd>(detail::even_jacobian(p, omega, window))
                        .solve(-rr);
                const Eigen::VectorXd next = p + dd;
                const double nres =
                    detail::full_norm_from_half(detail::even_residual(next, omega, window));
                if (nres >= res) break;
                p = next;
                res = nres;
            }
            converged = true;
            break;
        }

        const Eigen::VectorXd r = detail::even_residual(p, omega, window);
        const Eigen::MatrixXd J = detail::even_jacobian(p, omega, window);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        const Eigen::VectorXd d = lu.solve(-r);
        if (!d.allFinite() || (J * d + r).norm() > 1e-6 * std::max(r.norm(), 1e-300))
            throw SingularJacobian("solve_profile: linearization not invertible (omega too small?)");

        // step halving on residual increase
        double lam = 1.0;
        Eigen::VectorXd cand;
        double cres = res;
        for (int h = 0; h < 30; ++h) {
            cand = p + lam * d;
            cres = detail::full_norm_from_half(detail::even_residual(cand, omega, window));
            if (cres < res) break;
            lam *= 0.5;
        }
        if (!(cres < res))
            throw NoConvergence("solve_profile: residual stagnated above tolerance");
        p = cand;
        res = cres;
    }
    if (!converged || res > tol)
        throw NoConvergence("solve_profile: no convergence in max_iter iterations");

    const Eigen::MatrixXd J = detail::even_jacobian(p, omega, window);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    // (-Delta + omega - 7 phi^6) dphi = -phi
    const Eigen::VectorXd dp = lu.solve(-p);
    // (-Delta + omega - 7 phi^6) d2phi = -2 dphi + 42 phi^5 dphi^2
    Eigen::VectorXd rhs2(n + 1);
    for (int x = 0; x <= n; ++x)
        rhs2(x) = -2.0 * dp(x) + 42.0 * std::pow(p(x), 5) * dp(x) * dp(x);
    const Eigen::VectorXd d2 = lu.solve(rhs2);

    SolitonProfile prof;
    prof.omega = omega;
    prof.window = window;
    prof.phi.assign(window.size(), 0.0);
    prof.dphi.assign(window.size(), 0.0);
    prof.d2phi.assign(window.size(), 0.0);
    for (int x = 0; x <= n; ++x) {
        prof.phi[n + x] = p(x);
        prof.phi[n - x] = p(x); // evenness exact by construction
        prof.dphi[n + x] = dp(x);
        prof.dphi[n - x] = dp(x);
        prof.d2phi[n + x] = d2(x);
        prof.d2phi[n - x] = d2(x);
    }
    prof.residual_norm = detail::stationary_residual(prof.phi, omega, window);
    double qp = p(0) * dp(0);
    for (int x = 1; x <= n; ++x) qp += 2.0 * p(x) * dp(x);
    prof.q_prime = qp;
    return prof;
}

// zero-padded copy on a wider window (tails beyond the solved core are below tol)
inline SolitonProfile embed_profile(const SolitonProfile& p, const Window& target) {
    if (target.half_width < p.window.half_width)
        throw Error("embed_profile: target window is narrower than the profile");
    SolitonProfile out;
    out.omega = p.omega;
    out.window = target;
    out.q_prime = p.q_prime;
    out.phi.assign(target.size(), 0.0);
    out.dphi.assign(target.size(), 0.0);
    out.d2phi.assign(target.size(), 0.0);
    const int off = target.half_width - p.window.half_width;
    for (int i = 0; i < p.window.size(); ++i) {
        out.phi[off + i] = p.phi[i];
        out.dphi[off + i] = p.dphi[i];
        out.d2phi[off + i] = p.d2phi[i];
    }
    out.residual_norm = detail::stationary_residual(out.phi, out.omega, target);
    return out;
}

// ---------------------------------------------------------------------------
// anti-continuous-limit power series (truncated system, closure psi_{J+1} := psi_J)

struct SeriesSolution {
    double a = 0.0;
    int truncation = 0; // J
    std::vector<double> psi;
    double residual_norm = 0.0;
};

namespace detail {

inline const double kC7[8] = {1, 7, 21, 35, 35, 21, 7, 1};

inline Eigen::VectorXd series_residual(const Eigen::VectorXd& psi, double a) {
    const int J = int(psi.size()) - 1;
    Eigen::VectorXd F(J + 1);
    double s = 0.0;
    for (int n = 1; n <= 7; ++n) s += kC7[n] * std::pow(a, n - 1) * std::pow(psi(0), n);
    F(0) = 2.0 - 2.0 * a * psi(1) + 2.0 * a * psi(0) + psi(0) - s;
    F(1) = -1.0 - a * psi(0) + 2.0 * a * psi(1) - a * a * psi(2) + psi(1) -
           std::pow(a, 6) * std::pow(psi(1), 7);
    for (int j = 2; j <= J; ++j) {
        const double up = (j + 1 <= J) ? psi(j + 1) : psi(J); // closure
        F(j) = -psi(j - 1) + 2.0 * a * psi(j) - a * a * up + psi(j) -
               std::pow(a, 6 * j) * std::pow(psi(j), 7);
    }
    return F;
}

inline Eigen::MatrixXd series_jacobian(const Eigen::VectorXd& psi, double a) {
    const int J = int(psi.size()) - 1;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(J + 1, J + 1);
    double ds = 0.0;
    for (int n = 1; n <= 7; ++n) ds += kC7[n] * n * std::pow(a, n - 1) * std::pow(psi(0), n - 1);
    M(0, 0) = 2.0 * a + 1.0 - ds;
    M(0, 1) = -2.0 * a;
    M(1, 0) = -a;
    M(1, 1) = 2.0 * a + 1.0 - 7.0 * std::pow(a, 6) * std::pow(psi(1), 6);
    M(1, 2) = -a * a;
    for (int j = 2; j <= J; ++j) {
        M(j, j - 1) = -1.0;
        M(j, j) = 2.0 * a + 1.0 - 7.0 * std::pow(a, 6 * j) * std::pow(psi(j), 6);
        if (j + 1 <= J) M(j, j + 1) = -a * a;
        else M(j, j) += -a * a; // closure psi_{J+1} := psi_J
    }
    return M;
}

} // namespace detail

struct SeriesOptions {
    double a_max = 0.2;
    int max_iter = 60;
};

// Newton on the truncated system F_0..F_J = 0, seeded at the a = 0 root (1/3, 1, 1, ...).
inline SeriesSolution series_solve(double a, int truncation, double tol = 1e-12,
                                   const SeriesOptions& opts = {}) {
    if (std::abs(a) > opts.a_max) throw PreconditionViolation("series_solve: |a| exceeds a_max");
    if (truncation < 3) throw PreconditionViolation("series_solve: truncation must be >= 3");
    if (!(tol > 0.0)) throw PreconditionViolation("series_solve: tol must be positive");

    const int J = truncation;
    Eigen::VectorXd psi(J + 1);
    psi(0) = 1.0 / 3.0;
    for (int j = 1; j <= J; ++j) psi(j) = 1.0;

    double res = detail::series_residual(psi, a).norm();
    for (int it = 0; it < opts.max_iter && res >= tol; ++it) {
        const Eigen::VectorXd F = detail::series_residual(psi, a);
        const Eigen::VectorXd d =
            Eigen::PartialPivLU<Eigen::MatrixXd>(detail::series_jacobian(psi, a)).solve(-F);
        if (!d.allFinite()) throw SingularJacobian("series_solve: singular Jacobian");
        psi += d;
        res = detail::series_residual(psi, a).norm();
    }
    if (res >= tol) {
        if (res < 1e-6) {
            // one polish step, then accept only if under tol
            const Eigen::VectorXd F = detail::series_residual(psi, a);
            psi += Eigen::PartialPivLU<Eigen::MatrixXd>(detail::series_jacobian(psi, a)).solve(-F);
            res = detail::series_residual(psi, a).norm();
        }
        if (res >= tol) throw NoConvergence("series_solve: no convergence");
    }

    // closure contamination on the assembled scale: the row-J substitution error
    // a^2 (psi_{J+1} - psi_J) enters coefficient J, which carries weight a^J.
    const double closure = std::pow(std::abs(a), J) * a * a * std::abs(psi(J) - psi(J - 1));
    if (closure > tol)
        throw ClosureDominant("series_solve: closure term dominates requested tolerance (J too small)");

    SeriesSolution out;
    out.a = a;
    out.truncation = J;
    out.psi.assign(psi.data(), psi.data() + J + 1);
    out.residual_norm = res;
    return out;
}

// phi = omega^{1/6} ((1 + a psi_0) delta_0 + sum_{j>=1} a^j psi_j (delta_j + delta_{-j})),  omega = 1/a
inline LatticeField assemble_from_series(const SeriesSolution& s, const Window& window) {
    if (!(s.a > 0.0)) throw NonpositiveOmega("assemble_from_series: need a > 0");
    const double om16 = std::pow(1.0 / s.a, 1.0 / 6.0);
    LatticeField f(window);
    f.at(0) = om16 * (1.0 + s.a * s.psi[0]);
    const int jmax = std::min(s.truncation, window.half_width);
    for (int j = 1; j <= jmax; ++j) {
        const double v = om16 * std::pow(s.a, j) * s.psi[j];
        f.at(j) = v;
        f.at(-j) = v;
    }
    return f;
}

// ---------------------------------------------------------------------------
// asymptotics verification

struct AsymptoticsRow {
    double omega;
    double r1;    // omega^{5/6} sum_j omega^j ||d^j phi - d^j(omega^{1/6} delta_0)||_{l^2_a}
    double r2;    // same with P0perp d^j phi
    double slope; // mean_{1<=x<=8} log(phi(x)/phi(x+1)) / log omega
};

struct AsymptoticsReport {
    double a_weight = 1.0;
    std::vector<AsymptoticsRow> rows;
};

namespace detail {

inline double weighted_l2_real(const std::vector<double>& v, const Window& w, double a) {
    LatticeField f(w);
    for (std::size_t i = 0; i < v.size(); ++i) f.values[i] = complexd{v[i], 0.0};
    return weighted_norm(f, WeightSpec(2, a));
}

// the residual floor grows like omega^{7/6} eps (the equation's natural scale)
inline double scan_tol(double omega, double tol) {
    return std::max(tol, 2e-15 * std::pow(omega, 7.0 / 6.0));
}

} // namespace detail

inline AsymptoticsReport verify_asymptotics(const std::vector<double>& omega_grid, double a_weight,
                                            const Window& window, double tol = 1e-12) {
    if (omega_grid.empty()) throw PreconditionViolation("verify_asymptotics: empty grid");
    for (std::size_t i = 1; i < omega_grid.size(); ++i)
        if (omega_grid[i] < omega_grid[i - 1])
            throw PreconditionViolation("verify_asymptotics: grid must be sorted ascending");
    if (std::exp(a_weight) >= omega_grid.front())
        throw WeightTooLarge("verify_asymptotics: e^{a_weight} must stay below min omega");
    if (window.half_width < 9)
        throw PreconditionViolation("verify_asymptotics: window too small for the decay slope");

    AsymptoticsReport rep;
    rep.a_weight = a_weight;
    for (double om : omega_grid) {
        const SolitonProfile p = solve_profile(om, window, detail::scan_tol(om, tol));
        const int n = window.half_width;
        std::vector<double> t0 = p.phi, t1 = p.dphi, t2 = p.d2phi;
        // d^j (omega^{1/6} delta_0): omega^{1/6}, (1/6) omega^{-5/6}, -(5/36) omega^{-11/6}
        t0[n] -= std::pow(om, 1.0 / 6.0);
        t1[n] -= (1.0 / 6.0) * std::pow(om, -5.0 / 6.0);
        t2[n] -= -(5.0 / 36.0) * std::pow(om, -11.0 / 6.0);
        const double r1 = std::pow(om, 5.0 / 6.0) *
                          (detail::weighted_l2_real(t0, window, a_weight) +
                           om * detail::weighted_l2_real(t1, window, a_weight) +
                           om * om * detail::weighted_l2_real(t2, window, a_weight));

        std::vector<double> s0 = p.phi, s1 = p.dphi, s2 = p.d2phi;
        s0[n] = s1[n] = s2[n] = 0.0;
        const double r2 = std::pow(om, 5.0 / 6.0) *
                          (detail::weighted_l2_real(s0, window, a_weight) +
                           om * detail::weighted_l2_real(s1, window, a_weight) +
                           om * om * detail::weighted_l2_real(s2, window, a_weight));

        double slope = 0.0;
        for (int x = 1; x <= 8; ++x) slope += std::log(p.at(x) / p.at(x + 1));
        slope /= 8.0 * std::log(om);

        rep.rows.push_back({om, r1, r2, slope});
    }
    return rep;
}

// q'(omega) * omega^{2/3} over a grid; approaches 1/6 as omega grows.
inline std::vector<std::pair<double, double>> q_prime_scan(const std::vector<double>& omega_grid,
                                                           const Window& window,
                                                           double tol = 1e-12) {
    std::vector<std::pair<double, double>> rows;
    for (double om : omega_grid) {
        const SolitonProfile p = solve_profile(om, window, detail::scan_tol(om, tol));
        rows.emplace_back(om, p.q_prime * std::pow(om, 2.0 / 3.0));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// serialization: lattice-core field format plus a JSON header

inline nlohmann::json profile_to_json(const SolitonProfile& p) {
    nlohmann::json j;
    j["header"] = {{"omega", p.omega},
                   {"residual_norm", p.residual_norm},
                   {"q_prime", p.q_prime}};
    auto realfield = [&](const std::vector<double>& v) {
        LatticeField f(p.window);
        for (std::size_t i = 0; i < v.size(); ++i) f.values[i] = complexd{v[i], 0.0};
        return field_to_json(f);
    };
    j["phi"] = realfield(p.phi);
    j["dphi"] = realfield(p.dphi);
    j["d2phi"] = realfield(p.d2phi);
    return j;
}

inline SolitonProfile profile_from_json(const nlohmann::json& j) {
    SolitonProfile p;
    p.omega = j.at("header").at("omega").get<double>();
    p.residual_norm = j.at("header").at("residual_norm").get<double>();
    p.q_prime = j.at("header").at("q_prime").get<double>();
    const LatticeField phi = field_from_json(j.at("phi"));
    const LatticeField dphi = field_from_json(j.at("dphi"));
    const LatticeField d2phi = field_from_json(j.at("d2phi"));
    p.window = phi.window;
    p.phi.resize(phi.size());
    p.dphi.resize(phi.size());
    p.d2phi.resize(phi.size());
    for (int i = 0; i < phi.size(); ++i) {
        p.phi[i] = phi.values[i].real();
        p.dphi[i] = dphi.values[i].real();
        p.d2phi[i] = d2phi.values[i].real();
    }
    return p;
}

} // namespace dnls
