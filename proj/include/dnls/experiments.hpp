#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnls/dynamics.hpp"
#include "dnls/errors.hpp"
#include "dnls/io.hpp"
#include "dnls/lattice.hpp"
#include "dnls/linear.hpp"
#include "dnls/modulation.hpp"
#include "dnls/soliton.hpp"

namespace dnls {

inline constexpr const char* kVersion = "0.1.0";

enum class Scenario { soliton_build, asymptotics, linear_estimates, stability_run, scattering, evolve_only };

inline Scenario scenario_from_string(const std::string& s) {
    if (s == "soliton_build") return Scenario::soliton_build;
    if (s == "asymptotics") return Scenario::asymptotics;
    if (s == "linear_estimates") return Scenario::linear_estimates;
    if (s == "stability_run") return Scenario::stability_run;
    if (s == "scattering") return Scenario::scattering;
    if (s == "evolve") return Scenario::evolve_only;
    throw ConfigError("scenario", "unknown scenario '" + s + "'");
}

inline std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::soliton_build: return "soliton_build";
        case Scenario::asymptotics: return "asymptotics";
        case Scenario::linear_estimates: return "linear_estimates";
        case Scenario::stability_run: return "stability_run";
        case Scenario::scattering: return "scattering";
        default: return "evolve";
    }
}

// perturbation: seeded random on |x| <= support, or explicit site amplitudes;
// either way the shape is normalized to unit l2 and scaled by epsilon.
struct PerturbationSpec {
    bool random = true;
    int support = 5;
    std::vector<std::array<double, 3>> sites; // (x, re, im)
};

struct RunConfig {
    Scenario scenario = Scenario::stability_run;
    double omega_star = 50.0;
    double epsilon = 1e-3;
    PerturbationSpec perturbation;
    double horizon = 100.0;
    double dt = 0.01;
    int stride = 5;
    bool window_auto = true;
    Window window{16, Boundary::periodic};
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    // scenario extras
    double a_weight = 1.0;
    std::vector<double> omega_grid = {50.0, 100.0, 200.0, 400.0};
    std::vector<double> qprime_grid = {100.0, 300.0, 1000.0, 3000.0, 10000.0};
    int samples = 50;
    std::vector<double> t_list = {50.0, 200.0};
    double survey_dt = 0.05;
    double lambda_min = -1.0, lambda_max = 5.0;
    int lambda_points = 61;
    int scan_half_width = 80;
    AbsorbingMask mask;

    nlohmann::json resolved; // the fully-defaulted document (for the manifest)
};

namespace detail {

inline int auto_half_width(double horizon, int core) {
    return core + int(std::ceil(2.0 * horizon)) + 10;
}

template <typename T>
T get_as(const nlohmann::json& j, const std::string& key, const char* type_name) {
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(key, std::string("expected ") + type_name);
    }
}

} // namespace detail

// Fills defaults, applies the auto-window margin rule, rejects unknown keys.
inline RunConfig validate_config(const nlohmann::json& raw) {
    if (!raw.is_object()) throw ConfigError("<root>", "config must be a JSON object");

    static const std::set<std::string> known = {
        "scenario",   "omega_star", "epsilon",     "perturbation", "T",
        "dt",         "stride",     "window",      "seed",         "output_dir",
        "a_weight",   "omega_grid", "qprime_grid", "samples",      "T_list",
        "survey_dt",  "lambda_min", "lambda_max",  "lambda_points","scan_half_width",
        "mask_active","mask_width", "mask_strength"};
    for (auto it = raw.begin(); it != raw.end(); ++it)
        if (!known.count(it.key())) throw ConfigError(it.key(), "unknown key");

    RunConfig cfg;
    if (!raw.contains("scenario")) throw ConfigError("scenario", "missing");
    cfg.scenario = scenario_from_string(detail::get_as<std::string>(raw, "scenario", "string"));

    if (raw.contains("omega_star")) cfg.omega_star = detail::get_as<double>(raw, "omega_star", "number");
    if (!(cfg.omega_star > 0)) throw ConfigError("omega_star", "must be positive");
    if (raw.contains("epsilon")) cfg.epsilon = detail::get_as<double>(raw, "epsilon", "number");
    if (cfg.epsilon < 0) throw ConfigError("epsilon", "must be nonnegative");
    if (raw.contains("T")) cfg.horizon = detail::get_as<double>(raw, "T", "number");
    if (!(cfg.horizon > 0)) throw ConfigError("T", "must be positive");
    if (raw.contains("dt")) cfg.dt = detail::get_as<double>(raw, "dt", "number");
    if (!(cfg.dt > 0) || cfg.dt > 0.05) throw ConfigError("dt", "must lie in (0, 0.05]");
    if (raw.contains("stride")) cfg.stride = detail::get_as<int>(raw, "stride", "integer");
    else cfg.stride = std::max(1, int(std::llround(0.05 / cfg.dt)));
    if (cfg.stride < 1) throw ConfigError("stride", "must be >= 1");
    if (raw.contains("seed")) cfg.seed = detail::get_as<std::uint64_t>(raw, "seed", "integer");
    if (raw.contains("output_dir")) cfg.output_dir = detail::get_as<std::string>(raw, "output_dir", "string");
    if (raw.contains("a_weight")) cfg.a_weight = detail::get_as<double>(raw, "a_weight", "number");
    if (raw.contains("omega_grid")) cfg.omega_grid = detail::get_as<std::vector<double>>(raw, "omega_grid", "number array");
    if (raw.contains("qprime_grid")) cfg.qprime_grid = detail::get_as<std::vector<double>>(raw, "qprime_grid", "number array");
    if (raw.contains("samples")) cfg.samples = detail::get_as<int>(raw, "samples", "integer");
    if (cfg.samples < 1) throw ConfigError("samples", "must be >= 1");
    if (raw.contains("T_list")) cfg.t_list = detail::get_as<std::vector<double>>(raw, "T_list", "number array");
    if (raw.contains("survey_dt")) cfg.survey_dt = detail::get_as<double>(raw, "survey_dt", "number");
    if (!(cfg.survey_dt > 0) || cfg.survey_dt > 0.1) throw ConfigError("survey_dt", "must lie in (0, 0.1]");
    if (raw.contains("lambda_min")) cfg.lambda_min = detail::get_as<double>(raw, "lambda_min", "number");
    if (raw.contains("lambda_max")) cfg.lambda_max = detail::get_as<double>(raw, "lambda_max", "number");
    if (raw.contains("lambda_points")) cfg.lambda_points = detail::get_as<int>(raw, "lambda_points", "integer");
    if (cfg.lambda_points < 2) throw ConfigError("lambda_points", "must be >= 2");
    if (raw.contains("scan_half_width")) cfg.scan_half_width = detail::get_as<int>(raw, "scan_half_width", "integer");
    if (raw.contains("mask_active")) cfg.mask.active = detail::get_as<bool>(raw, "mask_active", "boolean");
    if (raw.contains("mask_width")) cfg.mask.width = detail::get_as<int>(raw, "mask_width", "integer");
    if (raw.contains("mask_strength")) cfg.mask.strength = detail::get_as<double>(raw, "mask_strength", "number");

    if (raw.contains("perturbation")) {
        const auto& p = raw.at("perturbation");
        if (!p.is_object()) throw ConfigError("perturbation", "must be an object");
        for (auto it = p.begin(); it != p.end(); ++it)
            if (it.key() != "type" && it.key() != "support" && it.key() != "sites")
                throw ConfigError("perturbation." + it.key(), "unknown key");
        const std::string type = p.contains("type") ? p.at("type").get<std::string>() : "random";
        if (type == "random") {
            cfg.perturbation.random = true;
            if (p.contains("support")) cfg.perturbation.support = p.at("support").get<int>();
            if (cfg.perturbation.support < 0) throw ConfigError("perturbation.support", "must be >= 0");
        } else if (type == "sites") {
            cfg.perturbation.random = false;
            if (!p.contains("sites")) throw ConfigError("perturbation.sites", "missing");
            for (const auto& row : p.at("sites")) {
                if (!row.is_array() || row.size() != 3)
                    throw ConfigError("perturbation.sites", "each entry must be [x, re, im]");
                cfg.perturbation.sites.push_back(
                    {row[0].get<double>(), row[1].get<double>(), row[2].get<double>()});
            }
        } else {
            throw ConfigError("perturbation.type", "must be 'random' or 'sites'");
        }
    }

    // window: "auto" or an explicit half-width (periodic, per the margin rule)
    int pert_extent = cfg.perturbation.random ? cfg.perturbation.support : 0;
    for (const auto& s : cfg.perturbation.sites)
        pert_extent = std::max(pert_extent, int(std::abs(s[0])));
    const int core = std::max(16, pert_extent + 6);
    if (raw.contains("window") && !raw.at("window").is_string()) {
        const int n = detail::get_as<int>(raw, "window", "integer or 'auto'");
        if (n < 2) throw ConfigError("window", "half-width must be >= 2");
        cfg.window = Window(n, Boundary::periodic);
        cfg.window_auto = false;
    } else {
        if (raw.contains("window") && raw.at("window").get<std::string>() != "auto")
            throw ConfigError("window", "must be 'auto' or an integer half-width");
        cfg.window = Window(detail::auto_half_width(cfg.horizon, core), Boundary::periodic);
        cfg.window_auto = true;
    }

    // resolved document (defaults filled) for the manifest
    nlohmann::json r = raw;
    r["scenario"] = to_string(cfg.scenario);
    r["omega_star"] = cfg.omega_star;
    r["epsilon"] = cfg.epsilon;
    r["T"] = cfg.horizon;
    r["dt"] = cfg.dt;
    r["stride"] = cfg.stride;
    r["window"] = cfg.window.half_width;
    r["window_auto"] = cfg.window_auto;
    r["seed"] = cfg.seed;
    r["output_dir"] = cfg.output_dir;
    r["mask_active"] = cfg.mask.active;
    cfg.resolved = r;
    return cfg;
}

// ---------------------------------------------------------------------------
// report bundle + manifest

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct ReportBundle {
    std::string dir;
    std::vector<std::string> files; // relative names, manifest excluded
    nlohmann::json summary;
};

namespace detail {

inline void write_file(ReportBundle& b, const std::string& name, const std::string& content) {
    std::ofstream os(std::filesystem::path(b.dir) / name, std::ios::binary);
    if (!os) throw Error("cannot write " + name);
    os << content;
    os.close();
    b.files.push_back(name);
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline void write_manifest(ReportBundle& b, const nlohmann::json& resolved_cfg,
                           const std::string& status) {
    nlohmann::json m;
    m["version"] = kVersion;
    m["status"] = status;
    m["config"] = resolved_cfg;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& name : b.files) {
        const std::string bytes = slurp(std::filesystem::path(b.dir) / name);
        files.push_back({{"name", name},
                         {"bytes", bytes.size()},
                         {"fnv1a64", fnv1a64(bytes)}});
    }
    m["files"] = files;
    std::ofstream os(std::filesystem::path(b.dir) / "manifest.json", std::ios::binary);
    os << m.dump(2) << '\n';
}

// true when every listed file still matches its checksum
inline bool verify_manifest(const std::string& dir) {
    const auto mp = std::filesystem::path(dir) / "manifest.json";
    if (!std::filesystem::exists(mp)) return false;
    const nlohmann::json m = nlohmann::json::parse(slurp(mp));
    for (const auto& f : m.at("files")) {
        const std::string bytes = slurp(std::filesystem::path(dir) / f.at("name").get<std::string>());
        if (fnv1a64(bytes) != f.at("fnv1a64").get<std::uint64_t>()) return false;
    }
    return true;
}

inline LatticeField make_initial(const RunConfig& cfg, const SolitonProfile& core_profile) {
    const SolitonProfile big = embed_profile(core_profile, cfg.window);
    LatticeField u = big.field(0.0);
    if (cfg.epsilon > 0.0) {
        LatticeField pert(cfg.window);
        if (cfg.perturbation.random) {
            pert = gaussian_field(cfg.window, cfg.seed, cfg.perturbation.support);
        } else {
            for (const auto& s : cfg.perturbation.sites)
                pert.at(int(s[0])) += complexd{s[1], s[2]};
        }
        const double nn = l2_norm(pert);
        if (nn == 0.0) throw ConfigError("perturbation", "perturbation shape is identically zero");
        for (int i = 0; i < u.size(); ++i) u.values[i] += cfg.epsilon * pert.values[i] / nn;
    }
    return u;
}

} // namespace detail

// ---------------------------------------------------------------------------
// scenarios

namespace detail {

inline void run_soliton_build(const RunConfig& cfg, ReportBundle& b) {
    const Window w(std::min(40, cfg.window.half_width), Boundary::dirichlet);
    const SolitonProfile p = solve_profile(cfg.omega_star, w);
    write_file(b, "profile.json", profile_to_json(p).dump(2) + "\n");
    std::ostringstream csv;
    field_to_csv(p.field(0.0), csv);
    write_file(b, "phi.csv", csv.str());
    b.summary["omega"] = p.omega;
    b.summary["residual_norm"] = p.residual_norm;
    b.summary["q_prime"] = p.q_prime;
    b.summary["phi_origin"] = p.at(0);
}

inline void run_asymptotics(const RunConfig& cfg, ReportBundle& b) {
    const Window w(40, Boundary::dirichlet);
    const AsymptoticsReport rep = verify_asymptotics(cfg.omega_grid, cfg.a_weight, w);
    NormTrace t;
    t.columns = {"omega", "r1", "r2", "slope"};
    for (const auto& r : rep.rows) t.push({r.omega, r.r1, r.r2, r.slope});
    std::ostringstream os;
    t.to_csv(os);
    write_file(b, "asymptotics.csv", os.str());

    NormTrace q;
    q.columns = {"omega", "qprime_scaled"};
    for (const auto& [om, v] : q_prime_scan(cfg.qprime_grid, w)) q.push({om, v});
    std::ostringstream qs;
    q.to_csv(qs);
    write_file(b, "qprime.csv", qs.str());

    write_file(b, "profile.json",
               profile_to_json(solve_profile(cfg.omega_grid.back(), w)).dump(2) + "\n");

    double rmin = rep.rows.front().r1, rmax = rmin;
    for (const auto& r : rep.rows) {
        rmin = std::min({rmin, r.r1, r.r2});
        rmax = std::max({rmax, r.r1, r.r2});
    }
    b.summary["r_ratio_spread"] = rmax / rmin;
    b.summary["slope_first"] = rep.rows.front().slope;
    b.summary["slope_last"] = rep.rows.back().slope;
}

inline void run_linear_estimates(const RunConfig& cfg, ReportBundle& b) {
    // resolvent scan on a midpoint grid (avoids the exact band edges)
    std::vector<double> grid(cfg.lambda_points);
    const double step = (cfg.lambda_max - cfg.lambda_min) / cfg.lambda_points;
    for (int i = 0; i < cfg.lambda_points; ++i) grid[i] = cfg.lambda_min + (i + 0.5) * step;
    const auto rows = resolvent_bound_scan(grid, cfg.scan_half_width);
    NormTrace rs;
    rs.columns = {"lambda", "side", "odd_norm", "full_norm"};
    for (const auto& r : rows)
        rs.push({r.lambda, r.side == SpectralSide::plus_i0 ? 1.0 : -1.0, r.odd_norm, r.full_norm});
    std::ostringstream ros;
    rs.to_csv(ros);
    write_file(b, "resolvent_scan.csv", ros.str());

    // Strichartz / Kato survey for the origin-removed flow
    const double t_max = *std::max_element(cfg.t_list.begin(), cfg.t_list.end());
    const Window sw(detail::auto_half_width(t_max, 26), Boundary::periodic);
    const auto reports = strichartz_survey(cfg.samples, cfg.t_list, cfg.survey_dt, cfg.seed, sw, 20);
    NormTrace st;
    st.columns = {"T", "sample", "stz_ratio", "kato_ratio"};
    for (const auto& rep : reports)
        for (std::size_t s = 0; s < rep.ratios.size(); ++s)
            st.push({rep.horizon, double(s), rep.ratios[s].first, rep.ratios[s].second});
    std::ostringstream sos;
    st.to_csv(sos);
    write_file(b, "strichartz.csv", sos.str());

    // contrast: plain free flow of delta_0 (edge resonance is even, so Kato fails)
    const auto free_rep = free_flow_trace(delta(sw, 0), cfg.t_list, cfg.survey_dt);
    NormTrace ft;
    ft.columns = {"T", "stz_ratio", "kato_ratio"};
    for (const auto& rep : free_rep)
        ft.push({rep.horizon, rep.ratios[0].first, rep.ratios[0].second});
    std::ostringstream fos;
    ft.to_csv(fos);
    write_file(b, "free_kato.csv", fos.str());

    double max_stz = 0.0, max_kato = 0.0;
    for (const auto& r : reports.back().ratios) {
        max_stz = std::max(max_stz, r.first);
        max_kato = std::max(max_kato, r.second);
    }
    b.summary["survey_max_stz_ratio"] = max_stz;
    b.summary["survey_max_kato_ratio"] = max_kato;
    b.summary["free_kato_first"] = free_rep.front().ratios[0].second;
    b.summary["free_kato_last"] = free_rep.back().ratios[0].second;
}

inline void run_stability(const RunConfig& cfg, ReportBundle& b, bool with_scattering) {
    const Window core(std::min(40, cfg.window.half_width), Boundary::dirichlet);
    const SolitonProfile prof = solve_profile(cfg.omega_star, core);
    const LatticeField u0 = make_initial(cfg, prof);

    EvolveOptions eopts;
    eopts.horizon = cfg.horizon;
    eopts.dt = cfg.dt;
    eopts.stride = cfg.stride;
    eopts.mask = cfg.mask;
    const EvolveResult ev = evolve(u0, eopts);
    std::ostringstream tos;
    ev.trace.to_csv(tos);
    write_file(b, "trace.csv", tos.str());

    TrackOptions topts;
    topts.core = core;
    const TrackResult tr = track(ev.trajectory, 0.0, cfg.omega_star, topts);
    std::ostringstream kos;
    tr.trace.to_csv(kos);
    write_file(b, "track.csv", kos.str());
    if (tr.exit_index) b.summary["tube_exit_index"] = *tr.exit_index;

    const std::size_t nsamp = tr.trace.rows.size();
    if (nsamp == 0) throw Error("stability run produced no tracked samples");

    // omega_+ estimator: mean over the final 10% of the horizon, with its std
    const std::size_t tail_start = nsamp - std::max<std::size_t>(2, nsamp / 10);
    double mean = 0.0, count = 0.0;
    for (std::size_t i = tail_start; i < nsamp; ++i) {
        mean += tr.trace.rows[i][2];
        count += 1.0;
    }
    mean /= count;
    double var = 0.0;
    for (std::size_t i = tail_start; i < nsamp; ++i) {
        const double d = tr.trace.rows[i][2] - mean;
        var += d * d;
    }
    const double om_std = std::sqrt(var / count);

    b.summary["omega_star"] = cfg.omega_star;
    b.summary["epsilon"] = cfg.epsilon;
    b.summary["omega_plus"] = mean;
    b.summary["omega_plus_std"] = om_std;
    b.summary["log_omega_defect"] = std::abs(std::log(cfg.omega_star) - std::log(mean));

    if (with_scattering && !tr.states.empty()) {
        const double T = cfg.horizon;
        const std::vector<double> t_ext = {T / 8.0, T / 4.0, T / 2.0, T};
        const ScatteringReport sc = scattering_extract(tr, t_ext);
        write_file(b, "scattering.json", scattering_to_json(sc).dump(2) + "\n");
        b.summary["xi_plus_norm"] = sc.xi_plus_norm;

        // max_t || xi(t) - e^{i t Delta} xi_+ || over the tail window
        double tail_defect = 0.0;
        for (std::size_t i = tail_start; i < tr.states.size(); ++i) {
            const LatticeField back = free_propagate(tr.states[i].xi, -tr.trace.rows[i][0]);
            double s = 0.0;
            for (int k = 0; k < back.size(); ++k)
                s += std::norm(back.values[k] - sc.xi_plus.values[k]);
            tail_defect = std::max(tail_defect, std::sqrt(s));
        }
        b.summary["tail_defect_max"] = tail_defect;
    }
}

inline void run_evolve_only(const RunConfig& cfg, ReportBundle& b) {
    const Window core(std::min(40, cfg.window.half_width), Boundary::dirichlet);
    const SolitonProfile prof = solve_profile(cfg.omega_star, core);
    const LatticeField u0 = make_initial(cfg, prof);
    EvolveOptions eopts;
    eopts.horizon = cfg.horizon;
    eopts.dt = cfg.dt;
    eopts.stride = cfg.stride;
    eopts.mask = cfg.mask;
    const EvolveResult ev = evolve(u0, eopts);
    std::ostringstream tos;
    ev.trace.to_csv(tos);
    write_file(b, "trace.csv", tos.str());
    const double m0 = ev.trace.rows.front()[1], m1 = ev.trace.rows.back()[1];
    const double e0 = ev.trace.rows.front()[2], e1 = ev.trace.rows.back()[2];
    b.summary["mass_drift_rel"] = std::abs(m1 - m0) / m0;
    b.summary["energy_drift_rel"] = std::abs(e1 - e0) / std::max(std::abs(e0), 1e-300);
}

} // namespace detail

// Deterministic given (cfg, seed): writes all traces, a summary and a checksum
// manifest into cfg.output_dir. Failures leave a FAILED marker in the manifest.
inline ReportBundle run_scenario(const RunConfig& cfg) {
    ReportBundle b;
    b.dir = cfg.output_dir;
    std::filesystem::create_directories(b.dir);
    try {
        switch (cfg.scenario) {
            case Scenario::soliton_build: detail::run_soliton_build(cfg, b); break;
            case Scenario::asymptotics: detail::run_asymptotics(cfg, b); break;
            case Scenario::linear_estimates: detail::run_linear_estimates(cfg, b); break;
            case Scenario::stability_run: detail::run_stability(cfg, b, true); break;
            case Scenario::scattering: detail::run_stability(cfg, b, true); break;
            case Scenario::evolve_only: detail::run_evolve_only(cfg, b); break;
        }
        detail::write_file(b, "summary.json", b.summary.dump(2) + "\n");
        detail::write_manifest(b, cfg.resolved, "ok");
    } catch (const std::exception& e) {
        detail::write_manifest(b, cfg.resolved, std::string("FAILED: ") + e.what());
        throw;
    }
    return b;
}

// one tidy CSV per figure class, derived from whatever the bundle contains
inline std::vector<std::string> emit_plot_data(const ReportBundle& b) {
    namespace fs = std::filesystem;
    std::vector<std::string> written;
    auto have = [&](const std::string& name) {
        return std::find(b.files.begin(), b.files.end(), name) != b.files.end();
    };
    auto load_csv = [&](const std::string& name) {
        std::ifstream is(fs::path(b.dir) / name);
        std::string line;
        std::getline(is, line);
        std::vector<std::string> cols;
        std::istringstream hs(line);
        std::string tok;
        while (std::getline(hs, tok, ',')) cols.push_back(tok);
        std::vector<std::vector<double>> rows;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::vector<double> r;
            while (std::getline(ls, tok, ',')) r.push_back(std::stod(tok));
            rows.push_back(std::move(r));
        }
        return std::make_pair(cols, rows);
    };
    auto emit = [&](const std::string& name, const NormTrace& t) {
        std::ofstream os(fs::path(b.dir) / name);
        t.to_csv(os);
        written.push_back(name);
    };

    if (have("track.csv")) {
        auto [cols, rows] = load_csv("track.csv");
        NormTrace om{{"t", "omega"}, {}};
        NormTrace xi{{"t", "xi_l2", "xi_l2wm1"}, {}};
        for (const auto& r : rows) {
            om.push({r[0], r[2]});
            xi.push({r[0], r[3], r[4]});
        }
        emit("omega_vs_t.csv", om);
        emit("xi_norms_vs_t.csv", xi);
    }
    if (have("strichartz.csv")) {
        auto [cols, rows] = load_csv("strichartz.csv");
        std::map<double, std::pair<double, double>> per_t;
        for (const auto& r : rows) {
            auto& e = per_t[r[0]];
            e.first = std::max(e.first, r[2]);
            e.second = std::max(e.second, r[3]);
        }
        NormTrace t{{"T", "max_stz_ratio", "max_kato_ratio"}, {}};
        for (const auto& [T, v] : per_t) t.push({T, v.first, v.second});
        emit("strichartz_ratio_vs_T.csv", t);
    }
    if (have("resolvent_scan.csv")) {
        auto [cols, rows] = load_csv("resolvent_scan.csv");
        NormTrace t{{"lambda", "side", "odd_norm", "full_norm"}, {}};
        for (const auto& r : rows) t.push(r);
        emit("resolvent_norm_vs_lambda.csv", t);
    }
    if (have("profile.json")) {
        const nlohmann::json pj = nlohmann::json::parse(detail::slurp(fs::path(b.dir) / "profile.json"));
        const SolitonProfile p = profile_from_json(pj);
        const int n = p.window.half_width;
        double slope = 0.0;
        int terms = 0;
        for (int x = 1; x <= std::min(8, n - 1); ++x)
            if (p.at(x) > 0 && p.at(x + 1) > 0) {
                slope += std::log(p.at(x) / p.at(x + 1));
                ++terms;
            }
        slope = terms ? slope / (terms * std::log(p.omega)) : 0.0;
        NormTrace t{{"x", "log_phi", "fit_slope"}, {}};
        for (int x = 0; x <= n; ++x)
            if (p.at(x) > 0) t.push({double(x), std::log(p.at(x)), slope});
        emit("profile_decay_vs_x.csv", t);
    }
    return written;
}

} // namespace dnls
