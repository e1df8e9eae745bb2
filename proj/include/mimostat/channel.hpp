#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace mimostat {

// One von Mises angle-of-arrival cluster. kappa = 0 is the isotropic
// (uniform-angle) special case.
struct ScatteringCluster {
    double weight = 1.0;        // P, in (0,1]
    double concentration = 0.0; // kappa >= 0
    double mean_aoa = 0.0;      // theta, radians in [-pi, pi)
};

struct ScatteringModel {
    std::vector<ScatteringCluster> clusters;
    double doppler_hz = 0.0;    // f_D
    double symbol_time_s = 0.0; // T_s

    // throws std::invalid_argument unless weights sum to 1 within 1e-12,
    // all weights positive, concentrations nonnegative, f_D > 0, T_s > 0
    void validate() const;
};

ScatteringModel isotropic_scattering(double doppler_hz, double symbol_time_s);

struct MimoConfig {
    int n_tx = 1;
    int n_rx = 1;

    int m_small() const { return n_tx < n_rx ? n_tx : n_rx; }
    int n_large() const { return n_tx < n_rx ? n_rx : n_tx; }
    int nu() const { return n_large() - m_small(); }
    void validate() const; // throws std::invalid_argument unless both counts >= 1
};

// One fading realization: length L, step-major storage of N_R x N_T matrices.
struct ChannelPath {
    std::size_t length = 0;
    int n_rx = 0;
    int n_tx = 0;
    double spacing_s = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::complex<double>> samples; // length * n_rx * n_tx

    const std::complex<double>& at(std::size_t l, int r, int t) const {
        return samples[(l * n_rx + r) * n_tx + t];
    }
};

// Channel correlation coefficient rho_h(i) of the von Mises mixture;
// rho_h(-i) = conj(rho_h(i)), rho_h(0) = 1.
std::complex<double> corr_coeff_h(const ScatteringModel& model, long lag);

// varrho_i = |rho_h(i)|
double corr_mag(const ScatteringModel& model, long lag);

// Generates N_R*N_T mutually independent unit-power complex Gaussian sequences
// whose autocorrelation matches corr_coeff_h for |i| <= L/4 (the ACF tail is
// tapered beyond L/2 to keep the circulant spectrum nonnegative). Deterministic
// for a fixed seed. Throws std::runtime_error if the clipped negative spectral
// mass exceeds 1/sqrt(L) of the total, which would bias the realized ACF by
// more than ~10% of the 5/sqrt(L) statistical tolerance.
ChannelPath generate_path(const ScatteringModel& model, const MimoConfig& mimo,
                          std::size_t length, std::uint64_t seed);

// Diagnostics from the most recent spectrum construction are returned alongside
// when using this variant; both fields are relative to the total spectral mass
// (min_value is the most negative bin, fraction_clipped the |negative| sum).
struct SpectrumDiagnostics {
    double min_value = 0.0;
    double fraction_clipped = 0.0;
};
ChannelPath generate_path(const ScatteringModel& model, const MimoConfig& mimo,
                          std::size_t length, std::uint64_t seed, SpectrumDiagnostics& diag);

} // namespace mimostat
