#pragma once

#include "mimostat/channel.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace mimostat {

struct SnrConfig {
    double eta = 1.0; // linear average SNR per receive antenna
    MimoConfig mimo;

    double omega() const { return eta / mimo.n_tx; }
};

struct ImiMoments {
    double mean = 0.0;          // nats
    double second_moment = 0.0;
    double variance = 0.0;
};

enum class ImiRegime { exact, low_snr, high_snr };

struct ImiCorrResult {
    long lag = 0;
    double acf = 0.0;   // E[I_l I_{l-i}]
    double nacf = 0.0;  // acf / E[I^2]
    double coeff = 0.0; // (acf - mean^2) / variance
    ImiRegime regime = ImiRegime::exact;
};

// Value plus uncertainty for the exceedance integrals; standard_error is zero
// on the deterministic quadrature path and positive on the Monte Carlo path.
struct ExceedEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    bool monte_carlo = false;
};

struct ImiLevelStats {
    double threshold = 0.0;            // I_th, nats
    double normalized_threshold = 0.0; // (I_th - mean)/sigma
    ExceedEstimate exceed;             // P(I > I_th)
    ExceedEstimate joint_exceed;       // P(I_l > I_th, I_{l-1} > I_th)
    double lcr_per_s = 0.0;            // Gaussian-approximation crossing rate
    double aod_s = 0.0;                // Gaussian-approximation outage duration
};

// Mean of I_l = ln det(I + (eta/N_T) H H^dag), via the log-moment integrals.
double imi_mean(const SnrConfig& snr);

// Second moment E[I_l^2]; the cross-eigenvalue part follows the split into
// same-eigenvalue quadratic terms and squared cross moments.
double imi_second_moment(const SnrConfig& snr);

ImiMoments imi_moments(const SnrConfig& snr);

// ACF r_I(i) = E[I_l I_{l-i}] at channel correlation magnitude rho = varrho_i.
double imi_acf(const SnrConfig& snr, double rho);

// Correlation structure in the requested regime. exact evaluates the series;
// low_snr / high_snr use the closed-form limits.
ImiCorrResult imi_corr(const SnrConfig& snr, long lag, double rho, ImiRegime regime);

// Taylor coefficients of the high-SNR correlation coefficient in powers of
// rho^2: order 2 -> {c2}, order 4 -> {c2, c4}.
std::vector<double> imi_corr_taylor(const MimoConfig& mimo, int order);

// max over rho in [0,1] of |rho^2 - high-SNR coefficient| (grid + golden section).
double imi_corr_maxgap(const MimoConfig& mimo);

// Finite-M diagnostic -ln(1-rho^2)/H_M of the square (nu = 0) asymptotic limit.
double imi_asymptotic_coeff(double rho, int m_small);

// Exact exceedance P(I > I_th) and joint exceedance P(I_l > I_th, I_{l-1} > I_th).
// M = 1 uses the incomplete-gamma closed form / 2-D quadrature; M = 2 uses 2-D
// and 4-D quadrature over the region prod(1 + omega x_m) > e^{I_th}. Larger M,
// and the quadrature-hostile high-correlation corner, fall back to a
// deterministic Monte Carlo estimate (seeded, with standard error reported).
ExceedEstimate imi_exceed_exact(const SnrConfig& snr, double i_th,
                                std::uint64_t mc_seed = 0x5eedu, std::size_t mc_draws = 400000);
ExceedEstimate imi_joint_exceed_exact(const SnrConfig& snr, double i_th, double rho1,
                                      std::uint64_t mc_seed = 0x5eedu,
                                      std::size_t mc_draws = 400000);

// Gaussian-approximation level crossing rate and average outage duration.
// rho1_imi is the lag-1 IMI correlation coefficient rho_I(1) (regime of the
// caller's choice); moments may be supplied to pin mean/sigma, otherwise the
// exact moments are computed.
double imi_gaussian_lcr(const SnrConfig& snr, double i_th, double rho1_imi, double ts);
double imi_gaussian_aod(const SnrConfig& snr, double i_th, double rho1_imi, double ts);
double imi_gaussian_lcr(const ImiMoments& moments, double i_th, double rho1_imi, double ts);
double imi_gaussian_aod(const ImiMoments& moments, double i_th, double rho1_imi, double ts);

// (sum_m psi_{N-m}, sum_m zeta(2, N-m)): mean offset and variance of
// ln det(H H^dag) for the square/tall Wishart case.
std::pair<double, double> logdet_wishart_moments(const MimoConfig& mimo);

// Level statistics bundle used by the CLI: exact-moment normalization,
// regime-selected rho_I(1), exact exceedances where available.
ImiLevelStats imi_level_stats(const SnrConfig& snr, double i_th, double rho1_channel,
                              double ts, ImiRegime regime);

namespace detail {

// A[j-M][k] = int_0^inf psi_j(x) psi_k(x) ln(1+omega x) dx for j >= M, k < M;
// the cross-moment table behind the ACF series, independent of rho.
std::vector<std::vector<double>> imi_cross_moments(int m_small, int nu, double omega,
                                                   int jcount);

// High-SNR correlation coefficient at channel correlation rho (the 4F3 series form).
double high_snr_corr(const MimoConfig& mimo, double rho);

} // namespace detail

} // namespace mimostat
