#include "mimostat/eigenstats.hpp"

#include "mimostat/specfun.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace mimostat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr int kSeriesCap = 4096;

double clamp_prob(double p, const char* who) {
    if (p < 0.0) {
        if (p < -1e-8) std::fprintf(stderr, "%s: clamped probability %.3e to 0\n", who, p);
        return 0.0;
    }
    if (p > 1.0) {
        if (p > 1.0 + 1e-8) std::fprintf(stderr, "%s: clamped probability 1+%.3e to 1\n", who, p - 1.0);
        return 1.0;
    }
    return p;
}

} // namespace

namespace detail {

int series_truncation_order(int m_small, double rho, double tol) {
    if (rho <= 0.0) return m_small - 1; // series vanishes, zero j-terms
    const double r2 = rho * rho;
    // tail(J) = sum_{j>J} sum_{k<M} r2^{j-k} = r2^{J+2-M} (1-r2^M) / (1-r2)^2
    double tail = std::pow(r2, 2.0) * (1.0 - std::pow(r2, m_small)) / ((1.0 - r2) * (1.0 - r2));
    int j = m_small;
    while (tail >= tol) {
        tail *= r2;
        if (++j > kSeriesCap)
            throw std::runtime_error("series_truncation_order: 4096 terms insufficient");
    }
    return j;
}

std::vector<std::vector<double>> level_cross_moments(int m_small, int nu, double lambda_th,
                                                     int jcount) {
    std::vector<std::vector<double>> b(jcount, std::vector<double>(m_small, 0.0));
    if (jcount == 0) return b;
    const int jmax = m_small + jcount - 1;
    // panel count follows the oscillation count ~ sqrt(J x) of the highest order
    const int npanel =
        std::max(8, static_cast<int>(2.0 * std::sqrt((jmax + 1.0) * lambda_th) / kPi) + 6);
    const QuadratureRule rule = gauss_legendre_panels(0.0, lambda_th, npanel);
    std::vector<double> psi(jmax + 1);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        orthonormal_laguerre_row(jmax, nu, rule.nodes[q], psi.data());
        for (int jj = 0; jj < jcount; ++jj)
            for (int k = 0; k < m_small; ++k)
                b[jj][k] -= rule.weights[q] * psi[m_small + jj] * psi[k];
    }
    return b;
}

} // namespace detail

EigenPdfContext::EigenPdfContext(MimoConfig mimo) : mimo_(mimo) {
    mimo_.validate();
    m_ = mimo_.m_small();
    n_ = mimo_.n_large();
    nu_ = mimo_.nu();
}

double marginal_pdf(const EigenPdfContext& ctx, double x) {
    if (x < 0.0) throw std::domain_error("marginal_pdf: x must be >= 0");
    const int m = ctx.m_small();
    std::vector<double> psi(m);
    orthonormal_laguerre_row(m - 1, ctx.nu(), x, psi.data());
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += psi[j] * psi[j];
    return acc / m;
}

double joint_pdf(const EigenPdfContext& ctx, double x, double y, double rho) {
    if (x < 0.0 || y < 0.0) throw std::domain_error("joint_pdf: x,y must be >= 0");
    if (rho < 0.0 || rho >= 1.0) throw std::domain_error("joint_pdf: rho must be in [0,1)");
    const int m = ctx.m_small();
    const double independent = marginal_pdf(ctx, x) * marginal_pdf(ctx, y);
    if (rho == 0.0) return independent;

    const int jmax = detail::series_truncation_order(m, rho, 1e-8 * m * m);
    std::vector<double> px(jmax + 1), py(jmax + 1);
    orthonormal_laguerre_row(jmax, ctx.nu(), x, px.data());
    orthonormal_laguerre_row(jmax, ctx.nu(), y, py.data());
    const double r2 = rho * rho;
    detail::KahanSum acc;
    for (int j = m; j <= jmax; ++j)
        for (int k = 0; k < m; ++k)
            acc.add(std::pow(r2, j - k) * px[j] * py[j] * px[k] * py[k]);
    return independent + acc.value() / (m * m);
}

double unordered_pair_pdf(const EigenPdfContext& ctx, double x1, double x2) {
    const int m = ctx.m_small();
    if (m < 2) throw std::domain_error("unordered_pair_pdf: requires M >= 2");
    if (x1 < 0.0 || x2 < 0.0) throw std::domain_error("unordered_pair_pdf: x must be >= 0");
    std::vector<double> p1(m), p2(m);
    orthonormal_laguerre_row(m - 1, ctx.nu(), x1, p1.data());
    orthonormal_laguerre_row(m - 1, ctx.nu(), x2, p2.data());
    // the double sum over (j,k) of psi_j(x1)psi_k(x1)psi_j(x2)psi_k(x2) is the
    // squared cross overlap, so the whole density is exactly swap-symmetric
    double sq1 = 0.0, sq2 = 0.0, dot = 0.0;
    for (int j = 0; j < m; ++j) {
        sq1 += p1[j] * p1[j];
        sq2 += p2[j] * p2[j];
        dot += p1[j] * p2[j];
    }
    return (sq1 * sq2 - dot * dot) / (m * (m - 1.0));
}

std::pair<double, double> eigen_moments(const MimoConfig& mimo) {
    mimo.validate();
    const double m = mimo.m_small(), n = mimo.n_large();
    return {n, n * (n + m)};
}

EigenCorrResult eigen_corr(const MimoConfig& mimo, long lag, double rho, bool same_mode) {
    mimo.validate();
    if (rho < 0.0 || rho > 1.0) throw std::domain_error("eigen_corr: rho must be in [0,1]");
    const double m = mimo.m_small(), n = mimo.n_large();
    EigenCorrResult out;
    out.lag = lag;
    out.same_mode = same_mode;
    if (lag == 0) {
        out.normalized_corr = same_mode ? m / (n + m) : -1.0 / (n + m);
        out.corr_coeff = same_mode ? 1.0 : 1.0 - (m + 1.0) / m;
    } else {
        out.normalized_corr = (m * n + rho * rho) / (m * n + m * m);
        out.corr_coeff = rho * rho / (m * m);
    }
    return out;
}

double phi_lambda(const EigenPdfContext& ctx, double lambda_th) {
    if (!(lambda_th > 0.0)) throw std::domain_error("phi_lambda: lambda_th must be > 0");
    const int m_small = ctx.m_small();
    const int nu = ctx.nu();
    using detail::log_factorial;
    detail::KahanSum acc;
    for (int m = 0; m < m_small; ++m) {
        const double head = log_factorial(m) + log_factorial(m + nu);
        // ascending p+q keeps the alternating partial sums small
        for (int s = 0; s <= 2 * m; ++s) {
            for (int p = std::max(0, s - m); p <= std::min(m, s); ++p) {
                const int q = s - p;
                const double lg =
                    head - log_factorial(m - p) - log_factorial(nu + p) - log_factorial(m - q) -
                    log_factorial(nu + q) - log_factorial(p) - log_factorial(q) +
                    log_upper_gamma_int(p + q + nu + 1, lambda_th);
                acc.add((s % 2 ? -1.0 : 1.0) * std::exp(lg));
            }
        }
    }
    return clamp_prob(acc.value() / m_small, "phi_lambda");
}

double varphi_lambda(const EigenPdfContext& ctx, double lambda_th, double rho1) {
    return eigen_level_stats(ctx, lambda_th, rho1, 1.0).joint_exceed;
}

double eigen_lcr(const EigenPdfContext& ctx, double lambda_th, double rho1, double ts) {
    return eigen_level_stats(ctx, lambda_th, rho1, ts).lcr_per_s;
}

double eigen_afd(const EigenPdfContext& ctx, double lambda_th, double rho1, double ts) {
    return eigen_level_stats(ctx, lambda_th, rho1, ts).afd_s;
}

LevelStats eigen_level_stats(const EigenPdfContext& ctx, double lambda_th, double rho1,
                             double ts) {
    if (rho1 < 0.0 || rho1 >= 1.0)
        throw std::domain_error("eigen_level_stats: rho1 must be in [0,1)");
    if (!(ts > 0.0)) throw std::domain_error("eigen_level_stats: ts must be > 0");
    const int m = ctx.m_small();

    LevelStats out;
    out.threshold = lambda_th;
    out.exceed_prob = phi_lambda(ctx, lambda_th);
    out.joint_lower = out.exceed_prob * out.exceed_prob;
    out.joint_upper = out.exceed_prob;

    const double r2 = rho1 * rho1;
    const int jmax = detail::series_truncation_order(m, rho1, 1e-10);
    const int jcount = jmax - m + 1;
    out.series_terms = jcount;
    if (jcount > 0) {
        out.tail_bound = std::pow(r2, jmax + 2.0 - m) * (1.0 - std::pow(r2, m)) /
                         ((1.0 - r2) * (1.0 - r2) * m * m);
        const auto b = detail::level_cross_moments(m, ctx.nu(), lambda_th, jcount);
        detail::KahanSum acc;
        for (int jj = jcount - 1; jj >= 0; --jj)
            for (int k = 0; k < m; ++k)
                acc.add(std::pow(r2, m + jj - k) * b[jj][k] * b[jj][k]);
        out.joint_exceed = out.joint_lower + acc.value() / (m * m);
    } else {
        out.tail_bound = 0.0;
        out.joint_exceed = out.joint_lower;
    }
    out.joint_exceed = clamp_prob(out.joint_exceed, "varphi_lambda");
    if (out.joint_exceed > out.joint_upper) out.joint_exceed = out.joint_upper;

    out.lcr_per_s = (out.exceed_prob - out.joint_exceed) / ts;
    if (out.lcr_per_s < 0.0) out.lcr_per_s = 0.0;
    out.afd_s = out.lcr_per_s > 0.0
                    ? (1.0 - out.exceed_prob) / out.lcr_per_s
                    : std::numeric_limits<double>::infinity();
    return out;
}

double laguerre_integral_I1(int j, int k, int nu) {
    if (j < 0 || k < 0 || nu < 0) throw std::domain_error("laguerre_integral_I1: negative index");
    const int d = j > k ? j - k : k - j;
    if (d >= 2) return 0.0;
    using detail::log_factorial;
    const int lo = j < k ? j : k;
    if (d == 0)
        return (2.0 * k + nu + 1.0) * std::exp(log_factorial(k + nu) - log_factorial(k));
    return -std::exp(log_factorial(lo + nu + 1) - log_factorial(lo));
}

double laguerre_integral_I2(int j, int k, int nu) {
    if (j < 0 || k < 0 || nu < 0) throw std::domain_error("laguerre_integral_I2: negative index");
    if (j == k) throw std::domain_error("laguerre_integral_I2: requires j != k");
    const int lo = j < k ? j : k;
    const int hi = j < k ? k : j;
    return std::exp(detail::log_factorial(lo + nu) - detail::log_factorial(lo)) /
           static_cast<double>(lo - hi);
}

} // namespace mimostat
