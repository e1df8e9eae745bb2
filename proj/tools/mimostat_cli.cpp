// Command-line front end: analytic curve tables (CSV/JSON) and Monte Carlo
// validation runs driven by scenario files.

#include "CLI11.hpp"
#include "json.hpp"

#include "mimostat/channel.hpp"
#include "mimostat/eigenstats.hpp"
#include "mimostat/imistats.hpp"
#include "mimostat/montecarlo.hpp"
#include "mimostat/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

using nlohmann::ordered_json;
using namespace mimostat;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// flat table: cells are numbers, strings or bools; rendered as CSV or a JSON
// array of objects
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<ordered_json>> rows;
};

std::string render_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out += ',';
        out += t.columns[c];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            const ordered_json& cell = row[c];
            if (cell.is_string())
                out += '"' + cell.get<std::string>() + '"';
            else if (cell.is_boolean())
                out += cell.get<bool>() ? "true" : "false";
            else
                out += fmt(cell.get<double>());
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Table& t) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json obj;
        for (std::size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = row[c];
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

void write_table(const std::string& out_dir, const std::string& stem, const std::string& format,
                 const Table& t) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path path = std::filesystem::path(out_dir) / (stem + "." + format);
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << (format == "json" ? render_json(t) : render_csv(t));
    std::printf("wrote %s\n", path.string().c_str());
}

// dB-valued grid to linear eta, paired with the original label
struct SnrPoint {
    double db = 0.0;
    SnrConfig snr;
};

std::vector<SnrPoint> snr_points(const Scenario& s) {
    std::vector<SnrPoint> out;
    for (double db : s.snr_db) out.push_back({db, SnrConfig{std::pow(10.0, db / 10.0), s.mimo}});
    return out;
}

Table channel_corr_table(const Scenario& s) {
    Table t;
    t.columns = {"lag", "normalized_lag", "re_rho_h", "im_rho_h", "corr_mag"};
    const double fdts = s.scattering.doppler_hz * s.scattering.symbol_time_s;
    for (long lag : s.lags) {
        const std::complex<double> rho = corr_coeff_h(s.scattering, lag);
        t.rows.push_back(
            {double(lag), fdts * lag, rho.real(), rho.imag(), std::abs(rho)});
    }
    return t;
}

Table eigen_corr_table(const Scenario& s) {
    Table t;
    t.columns = {"lag",        "normalized_lag",  "corr_mag",        "coeff_same_mode",
                 "coeff_cross_mode", "normalized_same_mode", "normalized_cross_mode"};
    const double fdts = s.scattering.doppler_hz * s.scattering.symbol_time_s;
    for (long lag : s.lags) {
        const double rho = corr_mag(s.scattering, lag);
        const EigenCorrResult same = eigen_corr(s.mimo, lag, rho, true);
        const EigenCorrResult cross = eigen_corr(s.mimo, lag, rho, false);
        t.rows.push_back({double(lag), fdts * lag, rho, same.corr_coeff, cross.corr_coeff,
                          same.normalized_corr, cross.normalized_corr});
    }
    return t;
}

Table eigen_levels_table(const Scenario& s) {
    Table t;
    t.columns = {"threshold", "exceed_prob", "joint_exceed", "lcr_per_s", "afd_s"};
    const EigenPdfContext ctx(s.mimo);
    const double rho1 = corr_mag(s.scattering, 1);
    for (double th : s.eigen_thresholds) {
        const LevelStats ls = eigen_level_stats(ctx, th, rho1, s.scattering.symbol_time_s);
        t.rows.push_back({ls.threshold, ls.exceed_prob, ls.joint_exceed, ls.lcr_per_s, ls.afd_s});
    }
    return t;
}

Table imi_corr_table(const Scenario& s) {
    Table t;
    t.columns = {"snr_db", "lag",           "normalized_lag", "corr_mag",
                 "coeff_exact", "coeff_low_snr", "coeff_high_snr"};
    const double fdts = s.scattering.doppler_hz * s.scattering.symbol_time_s;
    for (const SnrPoint& p : snr_points(s))
        for (long lag : s.lags) {
            const double rho = corr_mag(s.scattering, lag);
            t.rows.push_back({p.db, double(lag), fdts * lag, rho,
                              imi_corr(p.snr, lag, rho, ImiRegime::exact).coeff,
                              imi_corr(p.snr, lag, rho, ImiRegime::low_snr).coeff,
                              imi_corr(p.snr, lag, rho, ImiRegime::high_snr).coeff});
        }
    return t;
}

Table imi_levels_table(const Scenario& s) {
    Table t;
    t.columns = {"snr_db",      "sigma_offset", "threshold_nats", "exceed_prob",
                 "exceed_se",   "joint_exceed", "joint_se",       "lcr_per_s",
                 "aod_s"};
    const double rho1 = corr_mag(s.scattering, 1);
    for (const SnrPoint& p : snr_points(s)) {
        const ImiMoments mom = imi_moments(p.snr);
        const double sigma = std::sqrt(mom.variance);
        for (double off : s.imi_sigma_offsets) {
            const double th = mom.mean + off * sigma;
            const ImiLevelStats ls =
                imi_level_stats(p.snr, th, rho1, s.scattering.symbol_time_s, ImiRegime::exact);
            t.rows.push_back({p.db, off, ls.threshold, ls.exceed.value, ls.exceed.standard_error,
                              ls.joint_exceed.value, ls.joint_exceed.standard_error, ls.lcr_per_s,
                              ls.aod_s});
        }
    }
    return t;
}

Table coeff_table() {
    Table t;
    t.columns = {"n_tx", "n_rx", "taylor_c2", "taylor_c4", "max_gap"};
    const std::vector<MimoConfig> configs = {{1, 1}, {2, 2}, {3, 3},  {4, 4},
                                             {4, 8}, {4, 12}, {4, 16}};
    for (const MimoConfig& mimo : configs) {
        const std::vector<double> c = imi_corr_taylor(mimo, 4);
        t.rows.push_back({double(mimo.n_tx), double(mimo.n_rx), c[0], c[1],
                          imi_corr_maxgap(mimo)});
    }
    return t;
}

Table validation_table(const ValidationReport& r) {
    Table t;
    t.columns = {"quantity", "analytic", "empirical", "tolerance",
                 "standard_error", "pass", "asserted"};
    for (const ValidationEntry& e : r.entries)
        t.rows.push_back(
            {e.quantity, e.analytic, e.empirical, e.tolerance, e.standard_error, e.pass, e.asserted});
    return t;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Second-order eigen-channel and mutual-information statistics "
                 "of time-varying MIMO Rayleigh channels"};
    app.require_subcommand(1);

    std::string scenario_file, out_dir = ".", format = "csv";
    std::uint64_t seed_override = 0;
    std::size_t samples_override = 0;
    bool have_seed = false, have_samples = false;

    const auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
        if (needs_scenario)
            cmd->add_option("--scenario", scenario_file, "scenario JSON file")
                ->required()
                ->check(CLI::ExistingFile);
        cmd->add_option("--out", out_dir, "output directory (created if missing)");
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    CLI::App* c_chan = app.add_subcommand(
        "channel-corr", "channel correlation coefficient vs lag for the scattering model");
    add_common(c_chan, true);

    CLI::App* c_eigen = app.add_subcommand(
        "eigen-stats",
        "analytic eigen-channel curves: correlation coefficient vs lag, LCR/AFD vs threshold");
    add_common(c_eigen, true);

    CLI::App* c_imi = app.add_subcommand(
        "imi-stats",
        "analytic mutual-information curves: correlation per regime vs lag, LCR/AOD vs level");
    add_common(c_imi, true);

    CLI::App* c_tab = app.add_subcommand(
        "table1", "high-SNR correlation Taylor coefficients and worst-case gap per antenna setup");
    add_common(c_tab, false);

    CLI::App* c_val = app.add_subcommand(
        "validate", "run the Monte Carlo validation suite for a scenario and write the report");
    add_common(c_val, true);
    c_val->add_option("--seed", seed_override, "override the scenario seed")
        ->each([&](const std::string&) { have_seed = true; });
    c_val->add_option("--samples", samples_override, "override the scenario path length")
        ->each([&](const std::string&) { have_samples = true; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_chan->parsed()) {
            const Scenario s = load_scenario(scenario_file);
            write_table(out_dir, s.name + "-channel-corr", format, channel_corr_table(s));
        } else if (c_eigen->parsed()) {
            const Scenario s = load_scenario(scenario_file);
            write_table(out_dir, s.name + "-eigen-corr", format, eigen_corr_table(s));
            write_table(out_dir, s.name + "-eigen-levels", format, eigen_levels_table(s));
        } else if (c_imi->parsed()) {
            const Scenario s = load_scenario(scenario_file);
            write_table(out_dir, s.name + "-imi-corr", format, imi_corr_table(s));
            write_table(out_dir, s.name + "-imi-levels", format, imi_levels_table(s));
        } else if (c_tab->parsed()) {
            write_table(out_dir, "table1", format, coeff_table());
        } else if (c_val->parsed()) {
            Scenario s = load_scenario(scenario_file);
            if (have_seed) s.seed = seed_override;
            if (have_samples) s.length = samples_override;
            s.validate();
            const ValidationReport r = run_validation(s);

            if (format == "json") {
                ordered_json doc;
                doc["scenario"] = r.scenario;
                doc["length"] = r.length;
                doc["seed"] = r.seed;
                doc["wall_time_s"] = r.wall_time_s;
                ordered_json entries = ordered_json::array();
                const Table t = validation_table(r);
                for (const auto& row : t.rows) {
                    ordered_json obj;
                    for (std::size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = row[c];
                    entries.push_back(std::move(obj));
                }
                doc["entries"] = std::move(entries);
                std::filesystem::create_directories(out_dir);
                const auto path =
                    std::filesystem::path(out_dir) / (s.name + "-validation.json");
                std::ofstream f(path);
                if (!f) throw std::runtime_error("cannot write " + path.string());
                f << doc.dump(2) << "\n";
                std::printf("wrote %s\n", path.string().c_str());
            } else {
                write_table(out_dir, s.name + "-validation", format, validation_table(r));
            }

            std::size_t asserted = 0, failed = 0;
            for (const ValidationEntry& e : r.entries) {
                if (!e.asserted) continue;
                ++asserted;
                if (!e.pass) {
                    ++failed;
                    std::fprintf(stderr, "FAIL %s: analytic=%.6g empirical=%.6g tol=%.3g\n",
                                 e.quantity.c_str(), e.analytic, e.empirical, e.tolerance);
                }
            }
            std::printf("%s: %zu entries, %zu asserted, %zu failed (L=%zu, %.2f s)\n",
                        r.scenario.c_str(), r.entries.size(), asserted, failed, r.length,
                        r.wall_time_s);
            return failed == 0 ? 0 : 1;
        }
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
