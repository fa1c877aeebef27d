#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dnls/errors.hpp"

namespace dnls {

using complexd = std::complex<double>;

enum class Boundary { dirichlet, periodic };

inline std::string to_string(Boundary b) {
    return b == Boundary::dirichlet ? "dirichlet" : "periodic";
}

inline Boundary boundary_from_string(const std::string& s) {
    if (s == "dirichlet") return Boundary::dirichlet;
    if (s == "periodic") return Boundary::periodic;
    throw Error("unknown boundary rule: " + s);
}

// Symmetric truncation of the lattice: sites x in {-N, ..., N}.
struct Window {
    int half_width = 2;
    Boundary boundary = Boundary::dirichlet;

    Window() = default;
    Window(int n, Boundary b) : half_width(n), boundary(b) {
        if (n < 2) throw Error("window half_width must be >= 2");
    }
    int size() const { return 2 * half_width + 1; }
    bool operator==(const Window& o) const {
        return half_width == o.half_width && boundary == o.boundary;
    }
    bool operator!=(const Window& o) const { return !(*this == o); }
};

// Complex field on a window, origin at the array center.
struct LatticeField {
    Window window;
    std::vector<complexd> values;

    LatticeField() = default;
    explicit LatticeField(const Window& w) : window(w), values(w.size(), complexd{0.0, 0.0}) {}

    int half_width() const { return window.half_width; }
    int size() const { return window.size(); }

    complexd& at(int x) { return values[x + window.half_width]; }
    const complexd& at(int x) const { return values[x + window.half_width]; }

    // value with the window's rule applied beyond the edge
    complexd beyond(int x) const {
        const int n = window.half_width;
        if (x >= -n && x <= n) return at(x);
        if (window.boundary == Boundary::dirichlet) return complexd{0.0, 0.0};
        const int m = window.size();
        int i = (x + n) % m;
        if (i < 0) i += m;
        return values[i];
    }
};

inline LatticeField delta(const Window& w, int site, complexd amp = complexd{1.0, 0.0}) {
    LatticeField f(w);
    f.at(site) = amp;
    return f;
}

inline void require_same_window(const LatticeField& u, const LatticeField& v) {
    if (u.window != v.window) throw WindowMismatch("fields live on different windows");
}

inline void require_finite(const LatticeField& u) {
    for (const auto& z : u.values)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NonFinite("field contains NaN/Inf");
}

inline double linf_norm(const LatticeField& u) {
    double m = 0.0;
    for (const auto& z : u.values) m = std::max(m, std::abs(z));
    return m;
}

inline double l2_norm(const LatticeField& u) {
    double s = 0.0;
    for (const auto& z : u.values) s += std::norm(z);
    return std::sqrt(s);
}

// Delta_d f(x) = f(x+1) - 2 f(x) + f(x-1)
inline LatticeField laplacian(const LatticeField& u) {
    LatticeField out(u.window);
    const int n = u.half_width();
    for (int x = -n; x <= n; ++x)
        out.at(x) = u.beyond(x + 1) - 2.0 * u.at(x) + u.beyond(x - 1);
    return out;
}

// P0perp u: zero at the origin, untouched elsewhere (Eq. of the origin projection).
inline LatticeField project_out_origin(const LatticeField& u) {
    LatticeField out = u;
    out.at(0) = complexd{0.0, 0.0};
    return out;
}

inline void require_vanishes_at_origin(const LatticeField& u, const char* who) {
    const double scale = linf_norm(u);
    if (std::abs(u.at(0)) > 1e-14 * std::max(scale, 1e-300))
        throw PreconditionViolation(std::string(who) + ": u(0) must vanish");
}

// Delta_0 = P0perp Delta_d on fields with u(0) = 0; rows at x = +-1 read u(+-2) - 2 u(+-1).
inline LatticeField laplacian_origin_removed(const LatticeField& u) {
    require_vanishes_at_origin(u, "laplacian_origin_removed");
    return project_out_origin(laplacian(u));
}

// ||u||_{l^p_a} = ||e^{a|x|} u||_{l^p},  p in {1, 2, inf}
struct WeightSpec {
    int p = 2;      // 1, 2, or 0 meaning infinity
    double a = 0.0; // weight rate per site

    WeightSpec() = default;
    WeightSpec(int p_, double a_) : p(p_), a(a_) {
        if (p != 1 && p != 2 && p != 0) throw Error("WeightSpec: p must be 1, 2 or 0 (=inf)");
        if (!std::isfinite(a)) throw Error("WeightSpec: weight rate must be finite");
    }
    static WeightSpec linf(double a_) { return WeightSpec(0, a_); }
};

// Log-domain accumulation so a*N up to ~700 does not overflow; overflow of the
// final value is reported, never returned as Inf.
inline double weighted_norm(const LatticeField& u, const WeightSpec& w) {
    const int n = u.half_width();
    const double log_max = std::log(std::numeric_limits<double>::max());

    if (w.p == 0) {
        double best = -std::numeric_limits<double>::infinity();
        for (int x = -n; x <= n; ++x) {
            const double m = std::abs(u.at(x));
            if (m == 0.0) continue;
            best = std::max(best, w.a * std::abs(double(x)) + std::log(m));
        }
        if (best == -std::numeric_limits<double>::infinity()) return 0.0;
        if (best > log_max) throw OverflowError("weighted linf norm exceeds double range");
        return std::exp(best);
    }

    const double p = double(w.p);
    // collect log |e^{a|x|} u(x)|^p, then log-sum-exp
    double shift = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    logs.reserve(u.size());
    for (int x = -n; x <= n; ++x) {
        const double m = std::abs(u.at(x));
        if (m == 0.0) continue;
        const double lg = p * (w.a * std::abs(double(x)) + std::log(m));
        logs.push_back(lg);
        shift = std::max(shift, lg);
    }
    if (logs.empty()) return 0.0;
    double acc = 0.0;
    for (double lg : logs) acc += std::exp(lg - shift);
    const double log_norm = (shift + std::log(acc)) / p;
    if (log_norm > log_max) throw OverflowError("weighted norm exceeds double range");
    return std::exp(log_norm);
}

// (u, v) = sum u(x) conj(v(x));  <u, v> = Re (u, v);  Omega(u, v) = <i u, v>
inline complexd inner(const LatticeField& u, const LatticeField& v) {
    require_same_window(u, v);
    complexd s{0.0, 0.0};
    for (std::size_t i = 0; i < u.values.size(); ++i) s += u.values[i] * std::conj(v.values[i]);
    return s;
}

inline double real_inner(const LatticeField& u, const LatticeField& v) {
    return inner(u, v).real();
}

inline double symplectic(const LatticeField& u, const LatticeField& v) {
    require_same_window(u, v);
    // Re(i u conj(v)) = -Im(u conj(v))
    double s = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        s -= (u.values[i] * std::conj(v.values[i])).imag();
    return s;
}

// P+- u: restriction to strictly positive / negative sites.
inline std::pair<LatticeField, LatticeField> odd_parts(const LatticeField& u) {
    require_vanishes_at_origin(u, "odd_parts");
    LatticeField up(u.window), um(u.window);
    const int n = u.half_width();
    for (int x = 1; x <= n; ++x) up.at(x) = u.at(x);
    for (int x = -n; x <= -1; ++x) um.at(x) = u.at(x);
    return {up, um};
}

// T: half-line data (sites x >= 1 of w) to the odd field Tw(-x) = -Tw(x), Tw(0) = 0.
inline LatticeField odd_extend(const LatticeField& w) {
    LatticeField out(w.window);
    const int n = w.half_width();
    for (int x = 1; x <= n; ++x) {
        out.at(x) = w.at(x);
        out.at(-x) = -w.at(x);
    }
    return out;
}

// mirror of odd_extend for the negative half-line
inline LatticeField odd_extend_negative(const LatticeField& w) {
    LatticeField out(w.window);
    const int n = w.half_width();
    for (int x = 1; x <= n; ++x) {
        out.at(-x) = w.at(-x);
        out.at(x) = -w.at(-x);
    }
    return out;
}

// u(t, x) = omega^{1/6} v(omega t, x): lab-frame field to the rescaled frame.
inline std::pair<LatticeField, double> rescale_to_acl(const LatticeField& u, double omega, double t) {
    if (!(omega > 0.0)) throw NonpositiveOmega("rescale_to_acl: omega must be positive");
    LatticeField v = u;
    const double c = std::pow(omega, -1.0 / 6.0);
    for (auto& z : v.values) z *= c;
    return {v, omega * t};
}

inline std::pair<LatticeField, double> rescale_from_acl(const LatticeField& v, double omega, double s) {
    if (!(omega > 0.0)) throw NonpositiveOmega("rescale_from_acl: omega must be positive");
    LatticeField u = v;
    const double c = std::pow(omega, 1.0 / 6.0);
    for (auto& z : u.values) z *= c;
    return {u, s / omega};
}

// ---------------------------------------------------------------------------
// deterministic random fields (splitmix-seeded xorshift + Box-Muller, so runs
// are reproducible across platforms independent of libstdc++ distributions)

namespace detail {

struct SplitMix64 {
    std::uint64_t s;
    explicit SplitMix64(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform01() { // in (0, 1)
        return (double(next() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }
};

inline double gaussian(SplitMix64& rng) {
    const double u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace detail

// complex Gaussian entries on |x| <= support (whole window if support < 0)
inline LatticeField gaussian_field(const Window& w, std::uint64_t seed, int support = -1) {
    detail::SplitMix64 rng(seed);
    LatticeField f(w);
    const int n = w.half_width;
    const int s = support < 0 ? n : std::min(support, n);
    for (int x = -s; x <= s; ++x) {
        const double re = detail::gaussian(rng);
        const double im = detail::gaussian(rng);
        f.at(x) = complexd{re, im} / std::sqrt(2.0);
    }
    return f;
}

// ---------------------------------------------------------------------------
// serialization: column CSV (x, re, im) and compact JSON {N, boundary, re[], im[]}
// with 17-significant-digit round-trip

namespace detail {
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace detail

inline void field_to_csv(const LatticeField& u, std::ostream& os) {
    os << "x,re,im\n";
    const int n = u.half_width();
    for (int x = -n; x <= n; ++x)
        os << x << ',' << detail::fmt17(u.at(x).real()) << ',' << detail::fmt17(u.at(x).imag()) << '\n';
}

inline LatticeField field_from_csv(std::istream& is, Boundary b = Boundary::dirichlet) {
    std::string line;
    std::getline(is, line); // header
    std::vector<std::pair<int, complexd>> rows;
    int max_x = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::getline(ls, tok, ',');
        const int x = std::stoi(tok);
        std::getline(ls, tok, ',');
        const double re = std::stod(tok);
        std::getline(ls, tok, ',');
        const double im = std::stod(tok);
        rows.emplace_back(x, complexd{re, im});
        max_x = std::max(max_x, std::abs(x));
    }
    LatticeField u(Window(std::max(max_x, 2), b));
    for (auto& [x, z] : rows) u.at(x) = z;
    return u;
}

inline nlohmann::json field_to_json(const LatticeField& u) {
    nlohmann::json j;
    j["N"] = u.half_width();
    j["boundary"] = to_string(u.window.boundary);
    std::vector<double> re(u.size()), im(u.size());
    for (int i = 0; i < u.size(); ++i) {
        re[i] = u.values[i].real();
        im[i] = u.values[i].imag();
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

inline LatticeField field_from_json(const nlohmann::json& j) {
    const int n = j.at("N").get<int>();
    LatticeField u(Window(n, boundary_from_string(j.at("boundary").get<std::string>())));
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if ((int)re.size() != u.size() || (int)im.size() != u.size())
        throw Error("field_from_json: array length does not match window");
    for (int i = 0; i < u.size(); ++i) u.values[i] = complexd{re[i], im[i]};
    return u;
}

} // namespace dnls
