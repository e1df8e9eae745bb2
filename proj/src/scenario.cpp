#include "mimostat/scenario.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mimostat {

namespace {

using json = nlohmann::ordered_json;

constexpr double kPi = 3.141592653589793238462643383279502884;

} // namespace

void Scenario::validate() const {
    if (name.empty()) throw std::invalid_argument("Scenario: name must not be empty");
    scattering.validate();
    mimo.validate();
    if (snr_db.empty()) throw std::invalid_argument("Scenario: snr_db grid is empty");
    if (lags.empty()) throw std::invalid_argument("Scenario: lag grid is empty");
    if (eigen_thresholds.empty())
        throw std::invalid_argument("Scenario: eigen threshold grid is empty");
    if (imi_sigma_offsets.empty())
        throw std::invalid_argument("Scenario: imi sigma offset grid is empty");
    if (length < 2) throw std::invalid_argument("Scenario: length must be >= 2");
    for (double s : snr_db)
        if (!std::isfinite(s)) throw std::invalid_argument("Scenario: snr_db values must be finite");
    for (long i : lags)
        if (i < 0 || static_cast<std::size_t>(i) >= length)
            throw std::invalid_argument("Scenario: lags must lie in [0, length)");
    for (double t : eigen_thresholds)
        if (!(t > 0.0)) throw std::invalid_argument("Scenario: eigen thresholds must be > 0");
    for (double o : imi_sigma_offsets)
        if (!std::isfinite(o))
            throw std::invalid_argument("Scenario: imi sigma offsets must be finite");
}

Scenario scenario_from_json(const std::string& text) {
    const json j = json::parse(text);
    Scenario s;
    s.name = j.at("name").get<std::string>();
    const json& sc = j.at("scattering");
    s.scattering.doppler_hz = sc.at("doppler_hz").get<double>();
    s.scattering.symbol_time_s = sc.at("symbol_time_s").get<double>();
    for (const json& c : sc.at("clusters")) {
        ScatteringCluster cl;
        cl.weight = c.at("weight").get<double>();
        cl.concentration = c.at("concentration").get<double>();
        cl.mean_aoa = c.at("mean_aoa_rad").get<double>();
        s.scattering.clusters.push_back(cl);
    }
    s.mimo.n_tx = j.at("mimo").at("n_tx").get<int>();
    s.mimo.n_rx = j.at("mimo").at("n_rx").get<int>();
    s.snr_db = j.at("snr_db").get<std::vector<double>>();
    s.lags = j.at("lags").get<std::vector<long>>();
    s.eigen_thresholds = j.at("eigen_thresholds").get<std::vector<double>>();
    s.imi_sigma_offsets = j.at("imi_sigma_offsets").get<std::vector<double>>();
    s.length = j.at("length").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.validate();
    return s;
}

std::string scenario_to_json(const Scenario& s) {
    json clusters = json::array();
    for (const ScatteringCluster& c : s.scattering.clusters)
        clusters.push_back(json{{"weight", c.weight},
                                {"concentration", c.concentration},
                                {"mean_aoa_rad", c.mean_aoa}});
    const json j{{"name", s.name},
                 {"scattering", json{{"doppler_hz", s.scattering.doppler_hz},
                                     {"symbol_time_s", s.scattering.symbol_time_s},
                                     {"clusters", clusters}}},
                 {"mimo", json{{"n_tx", s.mimo.n_tx}, {"n_rx", s.mimo.n_rx}}},
                 {"snr_db", s.snr_db},
                 {"lags", s.lags},
                 {"eigen_thresholds", s.eigen_thresholds},
                 {"imi_sigma_offsets", s.imi_sigma_offsets},
                 {"length", s.length},
                 {"seed", s.seed}};
    return j.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_scenario: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_scenario: cannot open " + path);
    out << scenario_to_json(s);
}

ScatteringModel bundled_isotropic() {
    ScatteringModel m;
    m.clusters = {{1.0, 0.0, 0.0}};
    m.doppler_hz = 10.0;
    m.symbol_time_s = 0.005;
    return m;
}

ScatteringModel bundled_nonisotropic() {
    ScatteringModel m;
    m.clusters = {{1.0 / 3.0, 6.0, 0.0},
                  {1.0 / 2.0, 6.0, kPi / 4.0},
                  {1.0 / 6.0, 8.0, 25.0 * kPi / 18.0}};
    m.doppler_hz = 10.0;
    m.symbol_time_s = 0.005;
    return m;
}

} // namespace mimostat
