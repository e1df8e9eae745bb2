#pragma once

#include "mimostat/channel.hpp"

#include <utility>
#include <vector>

namespace mimostat {

// Immutable per-configuration context: caches the log-factorial ratios and
// series truncation bookkeeping shared by the eigenvalue PDFs and level
// statistics. Cheap to construct; safe to share across threads.
class EigenPdfContext {
public:
    explicit EigenPdfContext(MimoConfig mimo);

    const MimoConfig& mimo() const { return mimo_; }
    int m_small() const { return m_; }
    int n_large() const { return n_; }
    int nu() const { return nu_; }

private:
    MimoConfig mimo_;
    int m_ = 1, n_ = 1, nu_ = 0;
};

struct EigenCorrResult {
    long lag = 0;
    double normalized_corr = 0.0; // branch values of the printed closed form
    double corr_coeff = 0.0;
    bool same_mode = true;
};

struct LevelStats {
    double threshold = 0.0;
    double exceed_prob = 0.0;   // phi
    double joint_exceed = 0.0;  // phi-phi at lag 1
    double lcr_per_s = 0.0;
    double afd_s = 0.0;
    // sandwich bounds phi^2 <= joint_exceed <= phi, exposed as a truncation check
    double joint_lower = 0.0;
    double joint_upper = 0.0;
    int series_terms = 0;       // truncation order J actually used
    double tail_bound = 0.0;    // bound on the discarded series tail
};

// Marginal eigenvalue PDF p(x) = (1/M) sum_m (m!/(m+nu)!) [L_m^nu(x)]^2 x^nu e^{-x}.
double marginal_pdf(const EigenPdfContext& ctx, double x);

// Bivariate eigenvalue PDF at channel correlation magnitude rho (same eigenvalue
// observed lag i apart), via the resummed orthonormal-Laguerre series.
// Throws std::runtime_error if the geometric tail bound cannot reach 1e-8.
double joint_pdf(const EigenPdfContext& ctx, double x, double y, double rho);

// Joint PDF of a randomly selected (unordered) pair of distinct eigenvalues at
// one time instant. Requires M >= 2 (std::domain_error otherwise).
double unordered_pair_pdf(const EigenPdfContext& ctx, double x1, double x2);

// (mean, second moment) of one unordered eigenvalue: (N, N(N+M)).
std::pair<double, double> eigen_moments(const MimoConfig& mimo);

// Closed-form normalized correlation and correlation coefficient between
// eigen-channels m and n at integer lag, given varrho_i = |rho_h(i)|.
EigenCorrResult eigen_corr(const MimoConfig& mimo, long lag, double rho, bool same_mode);

// Exceedance probability P(lambda > lambda_th) for one unordered eigenvalue
// (finite alternating sum over upper incomplete gammas, compensated accumulation).
double phi_lambda(const EigenPdfContext& ctx, double lambda_th);

// Joint exceedance P(lambda(l) > th, lambda(l-1) > th) at lag-1 channel
// correlation magnitude rho1; geometric-tail-truncated series on top of phi^2.
double varphi_lambda(const EigenPdfContext& ctx, double lambda_th, double rho1);

// Level crossing rate (phi - varphi)/T_s and average fade duration
// (1 - phi) T_s / (phi - varphi). eigen_afd returns +inf when phi == varphi.
double eigen_lcr(const EigenPdfContext& ctx, double lambda_th, double rho1, double ts);
double eigen_afd(const EigenPdfContext& ctx, double lambda_th, double rho1, double ts);

// All level quantities plus truncation diagnostics in one pass.
LevelStats eigen_level_stats(const EigenPdfContext& ctx, double lambda_th, double rho1, double ts);

// Closed forms of the two Laguerre cross-moment integrals:
// I1(j,k,nu) = int_0^inf x^{nu+1} e^{-x} L_j^nu L_k^nu dx (tridiagonal),
// I2(j,k,nu) = int_0^inf ln(x) x^nu e^{-x} L_j^nu L_k^nu dx for j != k.
double laguerre_integral_I1(int j, int k, int nu);
double laguerre_integral_I2(int j, int k, int nu);

namespace detail {

// Truncation order for series with term bound rho^{2(j-k)}, j >= M > k:
// smallest J with sum_{j>J} sum_{k<M} rho^{2(j-k)} < tol, capped at 4096.
// Throws std::runtime_error if the cap cannot meet tol.
int series_truncation_order(int m_small, double rho, double tol);

// B[j-M][k] = -int_0^{th} psi_j psi_k dx for j in [M, M+jcount), k in [0, M),
// which equals the exceed-region cross moment since distinct orders are orthogonal.
std::vector<std::vector<double>> level_cross_moments(int m_small, int nu, double lambda_th,
                                                     int jcount);

} // namespace detail

} // namespace mimostat
