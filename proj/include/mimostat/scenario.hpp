#pragma once

#include "mimostat/channel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mimostat {

// One batch configuration: scattering environment, antenna setup, SNR points,
// lag/threshold grids, path length and seed. Serialized as JSON with explicit
// units in the field names.
struct Scenario {
    std::string name;
    ScatteringModel scattering;
    MimoConfig mimo;
    std::vector<double> snr_db;
    std::vector<long> lags;
    std::vector<double> eigen_thresholds;
    // IMI thresholds are expressed in standard deviations around the mean so one
    // grid serves every SNR point: I_th = mu_I + offset * sigma_I.
    std::vector<double> imi_sigma_offsets;
    std::size_t length = 1u << 20;
    std::uint64_t seed = 1;

    void validate() const; // std::invalid_argument on empty grids / bad config
};

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

// The two scattering environments used by the bundled scenarios.
ScatteringModel bundled_isotropic();    // single kappa = 0 cluster
ScatteringModel bundled_nonisotropic(); // three von Mises clusters

} // namespace mimostat
