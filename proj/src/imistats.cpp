#include "mimostat/imistats.hpp"

#include "mimostat/rng.hpp"
#include "mimostat/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace mimostat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr int kSeriesCap = 4096;

using detail::KahanSum;
using detail::log_factorial;

void check_snr(const SnrConfig& snr) {
    snr.mimo.validate();
    if (!(snr.eta > 0.0)) throw std::domain_error("SnrConfig: eta must be positive");
}

// sum_m m!/(m+nu)! sum_{p,q<=m} C(m+nu,m-p) C(m+nu,m-q) (-1)^{p+q}/(p!q!) F(p+q+nu)
// with F one of the two log-moment integrals; the alternating structure is the
// same as the eigenvalue level sum, evaluated in ascending p+q with compensation.
double alternating_log_moment_sum(int m_small, int nu, double omega, bool squared) {
    std::vector<double> f(2 * (m_small - 1) + 1);
    for (int k = 0; k <= 2 * (m_small - 1); ++k)
        f[k] = squared ? log2_moment_integral(k + nu, omega) : log_moment_integral(k + nu, omega);
    KahanSum total;
    for (int m = 0; m < m_small; ++m) {
        const double lead = log_factorial(m) + log_factorial(m + nu);
        for (int s = 0; s <= 2 * m; ++s) {
            const int plo = std::max(0, s - m);
            const int phi = std::min(m, s);
            for (int p = plo; p <= phi; ++p) {
                const int q = s - p;
                const double lc = lead - log_factorial(m - p) - log_factorial(nu + p) -
                                  log_factorial(m - q) - log_factorial(nu + q) -
                                  log_factorial(p) - log_factorial(q);
                const double term = std::exp(lc) * f[s];
                total.add((s % 2 == 0) ? term : -term);
            }
        }
    }
    return total.value();
}

// A~[j][k] = int_0^inf psi_j psi_k ln(1+omega x) dx for j = 0..jmax, k < M.
// x = u^2 removes the x^{nu/2} cusp at the origin; panel widths start at the
// ln(1+omega x) kink scale and grow geometrically to a quarter oscillation of
// psi_jmax, uniform from there.
std::vector<std::vector<double>> atilde_rows(int m_small, int nu, double omega, int jmax) {
    const double xmax = 8.0 * (m_small + nu) + 130.0;
    const double umax = std::sqrt(xmax);
    const double du = std::min(kPi / (2.0 * std::sqrt(jmax + 1.0)), umax / 8.0);
    std::vector<double> edges{0.0};
    double d = std::max(std::min(std::sqrt(1.0 / omega) / 4.0, du), 1e-9);
    double u = 0.0;
    while (u < umax) {
        u = std::min(u + d, umax);
        edges.push_back(u);
        d = std::min(2.0 * d, du);
    }
    const QuadratureRule rule = gauss_legendre_edges(edges);
    std::vector<std::vector<double>> a(jmax + 1, std::vector<double>(m_small, 0.0));
    std::vector<double> psi(jmax + 1);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double uu = rule.nodes[q];
        const double x = uu * uu;
        orthonormal_laguerre_row(jmax, nu, x, psi.data());
        const double fw = std::log1p(omega * x) * rule.weights[q] * 2.0 * uu;
        for (int j = 0; j <= jmax; ++j) {
            const double pj = psi[j] * fw;
            for (int k = 0; k < m_small; ++k) a[j][k] += pj * psi[k];
        }
    }
    return a;
}

double harmonic(int m) {
    double h = 0.0;
    for (int k = 1; k <= m; ++k) h += 1.0 / k;
    return h;
}

// ---- exceedance quadrature ----------------------------------------------

// nodes of {t1+t2 <= T} (complement) or {t1+t2 > T} clipped to [0,T']^2 in
// t = ln(1+omega x); two outer segments split where the inner interval changes
// form, composite 16-point Gauss-Legendre panels per direction.
struct RegionNodes {
    std::vector<double> x1, x2, w;
};

RegionNodes region_nodes(double omega, double t_th, double xmax, bool complement, int panels) {
    const double tp = std::log1p(omega * xmax);
    struct Seg {
        double a, b;
        int kind; // 0 full [0,T'], 1 inner [0, T-t1], 2 inner [T-t1, T']
    };
    std::vector<Seg> segs;
    if (complement) {
        const double to = std::min(t_th, tp);
        const double ts = std::min(std::max(t_th - tp, 0.0), to);
        segs = {{0.0, ts, 0}, {ts, to, 1}};
    } else {
        const double tc = std::max(std::min(t_th, tp), 0.0);
        segs = {{std::max(t_th - tp, 0.0), tc, 2}, {tc, tp, 0}};
    }
    RegionNodes out;
    for (const Seg& s : segs) {
        if (s.b - s.a < 1e-15 * std::max(tp, 1.0)) continue;
        const QuadratureRule outer = gauss_legendre_panels(s.a, s.b, panels);
        for (std::size_t i = 0; i < outer.nodes.size(); ++i) {
            const double t1 = outer.nodes[i];
            double lo = 0.0, hi = tp;
            if (s.kind == 1) hi = std::min(t_th - t1, tp);
            if (s.kind == 2) lo = std::max(t_th - t1, 0.0);
            if (hi - lo < 1e-300) continue;
            const QuadratureRule inner = gauss_legendre_panels(lo, hi, panels);
            const double j1 = outer.weights[i] * std::exp(t1) / omega;
            const double xa = std::expm1(t1) / omega;
            for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
                out.x1.push_back(xa);
                out.x2.push_back(std::expm1(inner.nodes[j]) / omega);
                out.w.push_back(j1 * inner.weights[j] * std::exp(inner.nodes[j]) / omega);
            }
        }
    }
    return out;
}

double box_xmax(int n_large) { return 8.0 * n_large + 130.0; }

// joint density of the two unordered eigenvalues at one instant, M = 2
double pair_density_m2(int n_large, double x1, double x2) {
    const int nu = n_large - 2;
    const double lcn = std::log(2.0) + log_factorial(nu) + log_factorial(1 + nu);
    const double d = x1 - x2;
    return std::pow(x1 * x2, nu) * d * d * std::exp(-x1 - x2 - lcn);
}

double region_mass_m2(int n_large, double omega, double t_th, bool complement, int panels) {
    const RegionNodes r = region_nodes(omega, t_th, box_xmax(n_large), complement, panels);
    KahanSum acc;
    for (std::size_t i = 0; i < r.w.size(); ++i)
        acc.add(pair_density_m2(n_large, r.x1[i], r.x2[i]) * r.w[i]);
    return acc.value();
}

// hybrid: the grid resolves whichever of the two regions excludes the bulk of
// the density, so integrate that one (linear cost, so 4 panels per direction)
double phi_quad_m2(int n_large, double omega, double t_th) {
    if (t_th <= 0.0) return 1.0;
    const double direct = region_mass_m2(n_large, omega, t_th, false, 4);
    if (direct <= 0.5) return direct;
    return 1.0 - region_mass_m2(n_large, omega, t_th, true, 4);
}

// correlated Wishart kernel (xy)^{nu/2} I_nu(2 rho sqrt(xy)/(1-rho^2)) scaled
// against the Gaussian envelope so nothing overflows
double corr_kernel(int nu, double rho, double e2, double x, double y) {
    const double z = 2.0 * rho * std::sqrt(x * y) / e2;
    return std::pow(x * y, 0.5 * nu) * bessel_i_scaled(nu, z) *
           std::exp(z - (x + y) / e2);
}

double phiphi_quad_m2(int n_large, double rho, double omega, double t_th) {
    if (t_th <= 0.0) return 1.0;
    const int nu = n_large - 2;
    const double e2 = 1.0 - rho * rho;
    const double xmax = box_xmax(n_large);
    const double phi = phi_quad_m2(n_large, omega, t_th);
    if (rho < 1e-3) return phi * phi;
    const bool complement = phi >= 0.5;
    const RegionNodes r = region_nodes(omega, t_th, xmax, complement, 2);
    const std::size_t n = r.w.size();
    const double lcn = 2.0 * std::log(2.0) + log_factorial(nu) + log_factorial(1 + nu) +
                       2.0 * (n_large - 1.0) * std::log(rho) + 2.0 * std::log(e2);
    const double inv_cn = std::exp(-lcn);
    // symmetric double sum over region nodes; diagonal handled once
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a1 = r.x1[i], a2 = r.x2[i];
        const double di = (a1 - a2) * r.w[i];
        KahanSum row;
        for (std::size_t j = 0; j <= i; ++j) {
            const double b1 = r.x1[j], b2 = r.x2[j];
            const double bracket = corr_kernel(nu, rho, e2, a1, b1) * corr_kernel(nu, rho, e2, a2, b2) -
                                   corr_kernel(nu, rho, e2, a1, b2) * corr_kernel(nu, rho, e2, a2, b1);
            const double v = di * (b1 - b2) * r.w[j] * bracket;
            row.add(j == i ? v : 2.0 * v);
        }
        total += row.value();
    }
    const double p = total * inv_cn;
    return complement ? 1.0 - 2.0 * (1.0 - phi) + p : p;
}

double phi_closed_m1(int n_large, double omega, double t_th) {
    if (t_th <= 0.0) return 1.0;
    const double xth = std::expm1(t_th) / omega;
    const double lg = log_upper_gamma_int(n_large, xth) - log_factorial(n_large - 1);
    return std::exp(lg);
}

// bivariate gamma density of the single eigenvalue pair at channel correlation
// rho, integrated over [xth, xmax]^2; the mass rides the x = y ridge at high
// rho, so the inner integral is seeded with edges at the ridge width.
double joint_quad_m1(int n_large, double rho, double omega, double t_th) {
    if (t_th <= 0.0) return 1.0;
    const double phi = phi_closed_m1(n_large, omega, t_th);
    if (rho < 1e-3) return phi * phi;
    const int nu = n_large - 1;
    const double e2 = 1.0 - rho * rho;
    const double xth = std::expm1(t_th) / omega;
    double xmax = box_xmax(n_large);
    if (xth >= xmax) xmax = 2.0 * xth + 200.0;
    const double lnorm = log_factorial(nu) + nu * std::log(rho) + std::log(e2);
    auto inner = [&](double x) {
        const double width = std::sqrt(2.0 * x * e2 / rho) + 1e-8;
        std::vector<double> edges{xth};
        for (double e : {x - 5.0 * width, x - width, x + width, x + 5.0 * width})
            if (e > edges.back() && e < xmax) edges.push_back(e);
        edges.push_back(xmax);
        double acc = 0.0;
        for (std::size_t s = 0; s + 1 < edges.size(); ++s)
            acc += adaptive_quad(
                [&](double y) { return corr_kernel(nu, rho, e2, x, y) * std::exp(-lnorm); },
                edges[s], edges[s + 1], 1e-10, 400);
        return acc;
    };
    return adaptive_quad(inner, xth, xmax, 1e-8, 200);
}

// ---- Monte Carlo fallback -------------------------------------------------

// ln det(I + omega H H^dag) through the Cholesky factor of the M x M Gram
// matrix; avoids any eigensolver dependency.
double logdet_gram(const std::vector<std::complex<double>>& h, int m, int n, double omega,
                   std::vector<std::complex<double>>& gram) {
    for (int i = 0; i < m; ++i)
        for (int j = 0; j <= i; ++j) {
            std::complex<double> s = 0.0;
            for (int t = 0; t < n; ++t) s += h[i * n + t] * std::conj(h[j * n + t]);
            gram[i * m + j] = omega * s + ((i == j) ? 1.0 : 0.0);
        }
    double ld = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < i; ++j) {
            std::complex<double> s = gram[i * m + j];
            for (int k = 0; k < j; ++k) s -= gram[i * m + k] * std::conj(gram[j * m + k]);
            gram[i * m + j] = s / gram[j * m + j].real();
        }
        double d = gram[i * m + i].real();
        for (int k = 0; k < i; ++k) d -= std::norm(gram[i * m + k]);
        gram[i * m + i] = std::sqrt(d);
        ld += std::log(d);
    }
    return ld;
}

// pair-sampled exceedance estimate; blocks with derived seeds merge
// deterministically in index order, so a parallel split would reproduce this.
ExceedEstimate mc_exceed(const MimoConfig& mimo, double omega, double t_th, double rho,
                         bool joint, std::uint64_t seed, std::size_t draws) {
    const int m = mimo.m_small(), n = mimo.n_large();
    constexpr std::size_t kBlock = 16384;
    const double c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    std::vector<std::complex<double>> ha(m * n), hb(m * n), gram(m * m);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::size_t hits = 0, done = 0;
    for (std::uint64_t block = 0; done < draws; ++block) {
        Rng rng(derive_seed(seed, block));
        const std::size_t count = std::min(kBlock, draws - done);
        for (std::size_t d = 0; d < count; ++d) {
            for (int i = 0; i < m * n; ++i)
                ha[i] = {rng.next_gaussian() * inv_sqrt2, rng.next_gaussian() * inv_sqrt2};
            bool hit = logdet_gram(ha, m, n, omega, gram) > t_th;
            if (joint && hit) {
                for (int i = 0; i < m * n; ++i) {
                    const std::complex<double> g{rng.next_gaussian() * inv_sqrt2,
                                                 rng.next_gaussian() * inv_sqrt2};
                    hb[i] = rho * ha[i] + c * g;
                }
                hit = logdet_gram(hb, m, n, omega, gram) > t_th;
            } else if (joint) {
                // burn the partner draw so the stream layout is hit-independent
                for (int i = 0; i < 2 * m * n; ++i) (void)rng.next_gaussian();
            }
            hits += hit ? 1 : 0;
        }
        done += count;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(draws);
    ExceedEstimate est;
    est.value = p;
    est.standard_error = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(draws));
    est.monte_carlo = true;
    return est;
}

} // namespace

namespace detail {

std::vector<std::vector<double>> imi_cross_moments(int m_small, int nu, double omega,
                                                   int jcount) {
    if (m_small < 1 || nu < 0) throw std::domain_error("imi_cross_moments: bad dimensions");
    if (!(omega > 0.0)) throw std::domain_error("imi_cross_moments: omega must be positive");
    if (jcount <= 0) return {};
    const auto rows = atilde_rows(m_small, nu, omega, m_small + jcount - 1);
    return {rows.begin() + m_small, rows.end()};
}

double high_snr_corr(const MimoConfig& mimo, double rho) {
    mimo.validate();
    if (rho < 0.0 || rho > 1.0) throw std::domain_error("high_snr_corr: rho must be in [0,1]");
    const int m = mimo.m_small(), n = mimo.n_large();
    const int nu = n - m;
    double den = 0.0;
    for (int k = 0; k < m; ++k) den += zeta2(n - k);
    if (rho == 0.0) return 0.0;
    if (rho == 1.0) return 1.0;
    double num = 0.0;
    for (int k = 0; k < m; ++k) {
        const double mk = m - k;
        const double lc = log_factorial(m) + log_factorial(k + nu) - log_factorial(n) -
                          log_factorial(k) + 2.0 * mk * std::log(rho);
        num += std::exp(lc) / (mk * mk) *
               hyper_4f3({mk, mk, m + 1.0, 1.0}, {mk + 1.0, mk + 1.0, n + 1.0}, rho * rho);
    }
    return num / den;
}

} // namespace detail

double imi_mean(const SnrConfig& snr) {
    check_snr(snr);
    return alternating_log_moment_sum(snr.mimo.m_small(), snr.mimo.nu(), snr.omega(), false);
}

double imi_second_moment(const SnrConfig& snr) {
    check_snr(snr);
    const int m = snr.mimo.m_small(), nu = snr.mimo.nu();
    const double quadratic = alternating_log_moment_sum(m, nu, snr.omega(), true);
    if (m == 1) return quadratic;
    // cross part over the unordered pair density: mean^2 minus the squared
    // small-index cross moments
    const auto a = atilde_rows(m, nu, snr.omega(), m - 1);
    const double mu = imi_mean(snr);
    KahanSum cross;
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) cross.add(a[j][k] * a[j][k]);
    return quadratic + mu * mu - cross.value();
}

ImiMoments imi_moments(const SnrConfig& snr) {
    ImiMoments mom;
    mom.mean = imi_mean(snr);
    mom.second_moment = imi_second_moment(snr);
    mom.variance = mom.second_moment - mom.mean * mom.mean;
    return mom;
}

double imi_acf(const SnrConfig& snr, double rho) {
    check_snr(snr);
    if (rho < 0.0 || rho >= 1.0) throw std::domain_error("imi_acf: rho must be in [0,1)");
    const double mu = imi_mean(snr);
    if (rho == 0.0) return mu * mu;
    const int m = snr.mimo.m_small(), nu = snr.mimo.nu();
    const double omega = snr.omega();
    const double r2 = rho * rho;
    // a priori order from the geometric tail with the flat cross-moment bound;
    // the bound ignores the decay of the coefficients themselves, so hitting
    // the cap is not yet a failure (the empirical check below decides)
    const double lg2 = std::pow(std::log1p(omega * (4.0 * 80.0 + 2.0 * nu + 2.0)) + 2.0, 2.0);
    const auto tail_bound = [&](int top) {
        double geo = 0.0;
        for (int k = 0; k < m; ++k) geo += std::pow(r2, top + 1 - k);
        return lg2 * geo / (1.0 - r2);
    };
    int jmax = m;
    while (tail_bound(jmax) > 1e-10 && jmax < kSeriesCap) jmax += 16;
    const auto a = atilde_rows(m, nu, omega, jmax);
    KahanSum series;
    double last_row = 0.0;
    for (int j = m; j <= jmax; ++j) {
        last_row = 0.0;
        for (int k = 0; k < m; ++k) last_row += std::pow(r2, j - k) * a[j][k] * a[j][k];
        series.add(last_row);
    }
    const double acf = mu * mu + series.value();
    if (jmax >= kSeriesCap) {
        const double tail_est = last_row * r2 / (1.0 - r2);
        if (tail_est > 1e-5 * std::max(std::abs(acf), 1.0))
            throw std::runtime_error("imi_acf: correlation series did not converge in 4096 terms");
    }
    return acf;
}

ImiCorrResult imi_corr(const SnrConfig& snr, long lag, double rho, ImiRegime regime) {
    check_snr(snr);
    if (rho < 0.0 || rho > 1.0) throw std::domain_error("imi_corr: rho must be in [0,1]");
    if (lag == 0) rho = 1.0;
    ImiCorrResult out;
    out.lag = lag;
    out.regime = regime;
    switch (regime) {
    case ImiRegime::exact: {
        const ImiMoments mom = imi_moments(snr);
        out.acf = (rho == 1.0) ? mom.second_moment : imi_acf(snr, rho);
        out.nacf = out.acf / mom.second_moment;
        out.coeff = (out.acf - mom.mean * mom.mean) / mom.variance;
        break;
    }
    case ImiRegime::low_snr: {
        const double nrnt = static_cast<double>(snr.mimo.n_rx) * snr.mimo.n_tx;
        const double mu = snr.eta * snr.mimo.n_rx;
        const double var = snr.eta * snr.eta * snr.mimo.n_rx / snr.mimo.n_tx;
        out.coeff = rho * rho;
        out.nacf = (nrnt + rho * rho) / (nrnt + 1.0);
        out.acf = mu * mu + var * rho * rho;
        break;
    }
    case ImiRegime::high_snr: {
        const int m = snr.mimo.m_small(), n = snr.mimo.n_large();
        double var = 0.0;
        for (int k = 0; k < m; ++k) var += zeta2(n - k);
        double mu = m * std::log(snr.omega());
        for (int k = 0; k < m; ++k) mu += digamma_int(n - k);
        out.coeff = detail::high_snr_corr(snr.mimo, rho);
        out.acf = out.coeff * var + mu * mu;
        out.nacf = out.acf / (var + mu * mu);
        break;
    }
    }
    return out;
}

std::vector<double> imi_corr_taylor(const MimoConfig& mimo, int order) {
    mimo.validate();
    if (mimo.m_small() > 8 || mimo.n_large() > 32)
        throw std::domain_error("imi_corr_taylor: supported up to M = 8, N = 32");
    if (order != 2 && order != 4) throw std::invalid_argument("imi_corr_taylor: order is 2 or 4");
    const double m = mimo.m_small(), n = mimo.n_large();
    double den = 0.0;
    for (int k = 0; k < mimo.m_small(); ++k) den += zeta2(mimo.n_large() - k);
    std::vector<double> c{(m / n) / den};
    if (order == 4) {
        double c4 = (m / n) * (m + 1.0) / (4.0 * (n + 1.0));
        if (m >= 2.0) c4 += m * (m - 1.0) / (4.0 * n * (n - 1.0));
        c.push_back(c4 / den);
    }
    return c;
}

double imi_corr_maxgap(const MimoConfig& mimo) {
    mimo.validate();
    if (mimo.m_small() > 8 || mimo.n_large() > 32)
        throw std::domain_error("imi_corr_maxgap: supported up to M = 8, N = 32");
    auto gap = [&](double r) { return std::abs(r * r - detail::high_snr_corr(mimo, r)); };
    // 256-point scan, then golden-section refinement around the best cell
    constexpr int kGrid = 256;
    const double lo = 1e-4, hi = 0.999;
    int best = 0;
    double best_val = -1.0;
    std::vector<double> xs(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        xs[i] = lo + (hi - lo) * i / (kGrid - 1.0);
        const double v = gap(xs[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = xs[std::max(0, best - 1)], b = xs[std::min(kGrid - 1, best + 1)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = gap(c), fd = gap(d);
    for (int it = 0; it < 60; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = gap(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = gap(d);
        }
    }
    return std::max(fc, fd);
}

double imi_asymptotic_coeff(double rho, int m_small) {
    if (rho < 0.0 || rho >= 1.0) throw std::domain_error("imi_asymptotic_coeff: rho must be in [0,1)");
    if (m_small < 1) throw std::domain_error("imi_asymptotic_coeff: M must be positive");
    if (rho == 0.0) return 0.0;
    return -std::log1p(-rho * rho) / harmonic(m_small);
}

ExceedEstimate imi_exceed_exact(const SnrConfig& snr, double i_th, std::uint64_t mc_seed,
                                std::size_t mc_draws) {
    check_snr(snr);
    ExceedEstimate est;
    if (i_th <= 0.0) {
        est.value = 1.0;
        return est;
    }
    const int m = snr.mimo.m_small();
    if (m == 1) {
        est.value = phi_closed_m1(snr.mimo.n_large(), snr.omega(), i_th);
        return est;
    }
    if (m == 2) {
        est.value = phi_quad_m2(snr.mimo.n_large(), snr.omega(), i_th);
        return est;
    }
    return mc_exceed(snr.mimo, snr.omega(), i_th, 0.0, false, mc_seed, mc_draws);
}

ExceedEstimate imi_joint_exceed_exact(const SnrConfig& snr, double i_th, double rho1,
                                      std::uint64_t mc_seed, std::size_t mc_draws) {
    check_snr(snr);
    if (rho1 < 0.0 || rho1 > 1.0)
        throw std::domain_error("imi_joint_exceed_exact: rho1 must be in [0,1]");
    ExceedEstimate est;
    if (i_th <= 0.0) {
        est.value = 1.0;
        return est;
    }
    if (rho1 == 1.0) return imi_exceed_exact(snr, i_th, mc_seed, mc_draws);
    const int m = snr.mimo.m_small(), n = snr.mimo.n_large();
    const double omega = snr.omega();
    if (m == 1) {
        est.value = joint_quad_m1(n, rho1, omega, i_th);
        return est;
    }
    if (m == 2) {
        // the quadrature grid cannot resolve the near-degenerate kernel once a
        // wide box, high correlation, and a mid-range level coincide
        const double phi = phi_quad_m2(n, omega, i_th);
        const bool hostile = rho1 > 0.95 && std::log1p(omega * box_xmax(n)) > 8.0 &&
                             phi > 1e-3 && phi < 0.999;
        if (!hostile) {
            est.value = phiphi_quad_m2(n, rho1, omega, i_th);
            return est;
        }
    }
    return mc_exceed(snr.mimo, omega, i_th, rho1, true, mc_seed, mc_draws);
}

double imi_gaussian_lcr(const ImiMoments& moments, double i_th, double rho1_imi, double ts) {
    if (!(moments.variance > 0.0)) throw std::domain_error("imi_gaussian_lcr: sigma must be positive");
    if (std::abs(rho1_imi) > 1.0) throw std::domain_error("imi_gaussian_lcr: |rho_I(1)| <= 1");
    if (!(ts > 0.0)) throw std::domain_error("imi_gaussian_lcr: ts must be positive");
    const double itil = (i_th - moments.mean) / std::sqrt(moments.variance);
    const double lower = kPi / 4.0 + std::asin(rho1_imi) / 2.0;
    const double upper = kPi / 2.0;
    if (lower >= upper) return 0.0;
    const double half_it2 = 0.5 * itil * itil;
    const double integral = adaptive_quad(
        [&](double th) {
            const double s = std::sin(th);
            return std::exp(-half_it2 / (s * s));
        },
        lower, upper, 1e-11, 400);
    return integral / (kPi * ts);
}

double imi_gaussian_aod(const ImiMoments& moments, double i_th, double rho1_imi, double ts) {
    const double lcr = imi_gaussian_lcr(moments, i_th, rho1_imi, ts);
    if (lcr == 0.0) return std::numeric_limits<double>::infinity();
    const double itil = (i_th - moments.mean) / std::sqrt(moments.variance);
    return (1.0 - gaussian_q(itil)) / lcr;
}

double imi_gaussian_lcr(const SnrConfig& snr, double i_th, double rho1_imi, double ts) {
    return imi_gaussian_lcr(imi_moments(snr), i_th, rho1_imi, ts);
}

double imi_gaussian_aod(const SnrConfig& snr, double i_th, double rho1_imi, double ts) {
    return imi_gaussian_aod(imi_moments(snr), i_th, rho1_imi, ts);
}

std::pair<double, double> logdet_wishart_moments(const MimoConfig& mimo) {
    mimo.validate();
    const int m = mimo.m_small(), n = mimo.n_large();
    double mean = 0.0, var = 0.0;
    for (int k = 0; k < m; ++k) {
        mean += digamma_int(n - k);
        var += zeta2(n - k);
    }
    return {mean, var};
}

ImiLevelStats imi_level_stats(const SnrConfig& snr, double i_th, double rho1_channel,
                              double ts, ImiRegime regime) {
    const ImiMoments mom = imi_moments(snr);
    ImiLevelStats out;
    out.threshold = i_th;
    out.normalized_threshold = (i_th - mom.mean) / std::sqrt(mom.variance);
    const double rho1_imi = imi_corr(snr, 1, rho1_channel, regime).coeff;
    out.exceed = imi_exceed_exact(snr, i_th);
    out.joint_exceed = imi_joint_exceed_exact(snr, i_th, rho1_channel);
    out.lcr_per_s = imi_gaussian_lcr(mom, i_th, rho1_imi, ts);
    out.aod_s = imi_gaussian_aod(mom, i_th, rho1_imi, ts);
    return out;
}

} // namespace mimostat
