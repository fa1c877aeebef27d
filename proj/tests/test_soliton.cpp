#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "dnls/dnls.hpp"

using namespace dnls;
using Catch::Approx;

namespace {
const Window W40(40, Boundary::dirichlet);

double residual_of(const SolitonProfile& p) {
    // recompute -Delta phi + omega phi - phi^7 independently of the solver
    LatticeField f = p.field(0.0);
    LatticeField lap = laplacian(f);
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        const double v = f.values[i].real();
        const double r = -lap.values[i].real() + p.omega * v - std::pow(v, 7);
        s += r * r;
    }
    return std::sqrt(s);
}
} // namespace

TEST_CASE("profile at omega = 100: residual, symmetry, positivity") {
    const SolitonProfile p = solve_profile(100.0, W40);
    CHECK(p.residual_norm <= 1e-12);
    CHECK(residual_of(p) <= 1e-12);
    for (int x = 0; x <= 40; ++x) {
        CHECK(p.at(x) == p.at(-x)); // exact, the solve runs on the even subspace
        CHECK(p.at(x) > 0.0);
    }
    CHECK(p.q_prime > 0.0);
}

TEST_CASE("anti-continuous origin correction: phi(0)/omega^{1/6} - 1 ~ 1/(3 omega)") {
    const SolitonProfile p = solve_profile(1000.0, W40, 1e-10);
    const double lhs = p.at(0) / std::pow(1000.0, 1.0 / 6.0) - 1.0;
    const double ref = 1.0 / 3000.0;
    CHECK(std::abs(lhs - ref) <= 0.2 * ref);
}

TEST_CASE("dphi matches centered differences with O(h^2) convergence") {
    const double om = 100.0, h = 1e-2;
    const SolitonProfile p = solve_profile(om, W40);
    auto fd_error = [&](double hh) {
        const SolitonProfile pp = solve_profile(om + hh, W40);
        const SolitonProfile pm = solve_profile(om - hh, W40);
        double s = 0.0;
        for (int i = 0; i < p.window.size(); ++i) {
            const double fd = (pp.phi[i] - pm.phi[i]) / (2.0 * hh);
            s += (p.dphi[i] - fd) * (p.dphi[i] - fd);
        }
        return std::sqrt(s);
    };
    const double e1 = fd_error(h), e2 = fd_error(h / 2.0);
    const double ratio = e1 / e2;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("d2phi matches centered differences of dphi") {
    const double om = 100.0, h = 1e-2;
    const SolitonProfile p = solve_profile(om, W40);
    const SolitonProfile pp = solve_profile(om + h, W40);
    const SolitonProfile pm = solve_profile(om - h, W40);
    double s = 0.0, scale = 0.0;
    for (int i = 0; i < p.window.size(); ++i) {
        const double fd = (pp.dphi[i] - pm.dphi[i]) / (2.0 * h);
        s += (p.d2phi[i] - fd) * (p.d2phi[i] - fd);
        scale += p.d2phi[i] * p.d2phi[i];
    }
    CHECK(std::sqrt(s) <= 1e-3 * std::sqrt(scale));
}

TEST_CASE("gauge family satisfies the rotating-frame stationary identity") {
    const SolitonProfile p = solve_profile(100.0, W40);
    for (double theta : {0.0, 1.3, 4.0}) {
        // i omega d_theta phi[theta] = -Delta phi - |phi|^6 phi up to the solver residual
        const LatticeField f = p.field(theta);
        const LatticeField lap = laplacian(f);
        double s = 0.0;
        for (int i = 0; i < f.size(); ++i) {
            const complexd dtheta = complexd{0.0, 1.0} * f.values[i];
            const complexd r = complexd{0.0, 1.0} * p.omega * dtheta + lap.values[i] +
                               std::pow(std::abs(f.values[i]), 6) * f.values[i];
            s += std::norm(r);
        }
        CHECK(std::sqrt(s) <= 2.0 * std::max(p.residual_norm, 1e-13));
    }
}

TEST_CASE("solver guards") {
    CHECK_THROWS_AS(solve_profile(3.0, W40), PreconditionViolation); // below omega_min
    CHECK_THROWS_AS(solve_profile(100.0, W40, 1e-3), PreconditionViolation);
    CHECK_THROWS_AS(solve_profile(-5.0, W40), NonpositiveOmega);
}

TEST_CASE("series root at a = 0 is exactly (1/3, 1, 1, ...)") {
    const SeriesSolution s = series_solve(0.0, 12);
    CHECK(s.psi[0] == 1.0 / 3.0);
    for (int j = 1; j <= 12; ++j) CHECK(s.psi[j] == 1.0);
    CHECK(s.residual_norm <= 1e-14); // exact root; the float evaluation is not exactly zero
}

TEST_CASE("series Jacobian at a = 0 acts as -6(e0,.)e0 + sum (ej,.)ej - sum (ej,.)e_{j+1}") {
    const int J = 9;
    Eigen::VectorXd psi(J + 1);
    psi(0) = 1.0 / 3.0;
    for (int j = 1; j <= J; ++j) psi(j) = 1.0;
    const Eigen::MatrixXd M = dnls::detail::series_jacobian(psi, 0.0);
    Eigen::VectorXd v(J + 1);
    for (int j = 0; j <= J; ++j) v(j) = std::sin(1.0 + j);
    const Eigen::VectorXd out = M * v;
    CHECK(out(0) == Approx(-6.0 * v(0)));
    CHECK(out(1) == Approx(v(1)));
    for (int j = 2; j <= J; ++j) CHECK(out(j) == Approx(v(j) - v(j - 1)));
}

TEST_CASE("cross-oracle: series assembly against the Newton profile") {
    const SeriesSolution s = series_solve(0.01, 10);
    const LatticeField assembled = assemble_from_series(s, W40);
    const SolitonProfile p = solve_profile(100.0, W40);
    for (int x = -5; x <= 5; ++x) {
        const double a = assembled.at(x).real();
        const double b = p.at(x);
        CHECK(std::abs(a - b) <= 1e-8 * std::abs(b));
    }
}

TEST_CASE("assemble_from_series direct substitution") {
    SeriesSolution s;
    s.a = 0.1;
    s.truncation = 1;
    s.psi = {1.0 / 3.0, 1.0};
    const LatticeField f = assemble_from_series(s, Window(6, Boundary::dirichlet));
    const double om16 = std::pow(10.0, 1.0 / 6.0);
    CHECK(f.at(0).real() == Approx(om16 * (1.0 + 0.1 / 3.0)).epsilon(1e-15));
    CHECK(f.at(1).real() == Approx(om16 * 0.1).epsilon(1e-15));
    CHECK(f.at(-1) == f.at(1));

    const SeriesSolution s2 = series_solve(0.02, 8);
    const LatticeField g = assemble_from_series(s2, Window(12, Boundary::dirichlet));
    for (int x = 0; x <= 12; ++x) CHECK(g.at(x) == g.at(-x));
}

TEST_CASE("series guards") {
    CHECK_THROWS_AS(series_solve(0.15, 3, 1e-12), ClosureDominant);
    CHECK_THROWS_AS(series_solve(0.5, 10), PreconditionViolation);
    CHECK_THROWS_AS(series_solve(0.01, 2), PreconditionViolation);
}

TEST_CASE("asymptotics report: bounded ratios and unit decay slope") {
    const AsymptoticsReport rep = verify_asymptotics({50.0, 100.0, 200.0, 400.0}, 1.0, W40);
    REQUIRE(rep.rows.size() == 4);
    double rmin = 1e300, rmax = 0.0;
    for (const auto& r : rep.rows) {
        rmin = std::min({rmin, r.r1, r.r2});
        rmax = std::max({rmax, r.r1, r.r2});
        CHECK(std::abs(r.slope - 1.0) <= 0.1);
    }
    CHECK(rmax / rmin <= 3.0);
}

TEST_CASE("asymptotics with the large weight needs huge omega but stays finite") {
    CHECK_THROWS_AS(verify_asymptotics({100.0}, 10.0, W40), WeightTooLarge);
    const AsymptoticsReport rep = verify_asymptotics({5e4}, 10.0, W40);
    CHECK(std::isfinite(rep.rows[0].r1));
    CHECK(std::isfinite(rep.rows[0].r2));
    CHECK(rep.rows[0].r1 > 0.0);
}

TEST_CASE("q' scan: positive, scaled limit 1/6, bounded spread") {
    const auto rows = q_prime_scan({100.0, 1000.0, 10000.0}, W40);
    double lo = 1e300, hi = 0.0;
    for (const auto& [om, v] : rows) {
        CHECK(v > 0.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo <= 1.5);
    CHECK(std::abs(rows.back().second - 1.0 / 6.0) <= 0.01);
}

TEST_CASE("profile serialization round-trip") {
    const SolitonProfile p = solve_profile(100.0, Window(12, Boundary::dirichlet));
    const SolitonProfile q = profile_from_json(profile_to_json(p));
    CHECK(q.omega == p.omega);
    CHECK(q.q_prime == p.q_prime);
    CHECK(q.residual_norm == p.residual_norm);
    for (int i = 0; i < p.window.size(); ++i) {
        CHECK(q.phi[i] == p.phi[i]);
        CHECK(q.dphi[i] == p.dphi[i]);
        CHECK(q.d2phi[i] == p.d2phi[i]);
    }
}

TEST_CASE("embedding keeps the residual below tolerance") {
    const SolitonProfile p = solve_profile(100.0, W40);
    const SolitonProfile big = embed_profile(p, Window(100, Boundary::periodic));
    CHECK(big.residual_norm <= 1e-12);
    CHECK(big.at(0) == p.at(0));
    CHECK(big.at(100) == 0.0);
}
