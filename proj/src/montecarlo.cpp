#include "mimostat/montecarlo.hpp"

#include "mimostat/eigenstats.hpp"
#include "mimostat/rng.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace mimostat {

namespace {

std::string strf(const char* fmt, ...) {
    char buf[128];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> rows_total(const std::vector<std::vector<double>>& rows) {
    std::vector<double> total(rows.empty() ? 0 : rows[0].size(), 0.0);
    for (const std::vector<double>& row : rows)
        for (std::size_t j = 0; j < total.size(); ++j) total[j] += row[j];
    return total;
}

} // namespace

std::vector<double> eig_hermitian(const std::vector<std::complex<double>>& a, int n) {
    if (n < 1 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw std::invalid_argument("eig_hermitian: need an n x n matrix with n >= 1");
    double amax = 0.0;
    for (const std::complex<double>& z : a) amax = std::max(amax, std::abs(z));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            if (std::abs(a[i * n + j] - std::conj(a[j * n + i])) > 1e-12 * std::max(1.0, amax))
                throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
    if (n == 1) return {a[0].real()};

    std::vector<std::complex<double>> w(a);
    double fro2 = 0.0;
    for (const std::complex<double>& z : w) fro2 += std::norm(z);
    const double stop = 1e-13 * std::max(std::sqrt(fro2), 1e-300);

    bool converged = false;
    for (int sweep = 0; sweep < 64 && !converged; ++sweep) {
        double off2 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off2 += std::norm(w[i * n + j]);
        if (std::sqrt(2.0 * off2) <= stop) {
            converged = true;
            break;
        }
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                const std::complex<double> apq = w[p * n + q];
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const std::complex<double> g = apq / mag;
                const double zeta = (w[p * n + p].real() - w[q * n + q].real()) / (2.0 * mag);
                const double t =
                    (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const std::complex<double> kp = w[k * n + p], kq = w[k * n + q];
                    w[k * n + p] = c * kp + s * std::conj(g) * kq;
                    w[k * n + q] = c * kq - s * g * kp;
                }
                for (int k = 0; k < n; ++k) {
                    const std::complex<double> pk = w[p * n + k], qk = w[q * n + k];
                    w[p * n + k] = c * pk + s * g * qk;
                    w[q * n + k] = c * qk - s * std::conj(g) * pk;
                }
                w[p * n + q] = 0.0;
                w[q * n + p] = 0.0;
                w[p * n + p] = w[p * n + p].real();
                w[q * n + q] = w[q * n + q].real();
            }
    }
    if (!converged) {
        double off2 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off2 += std::norm(w[i * n + j]);
        if (std::sqrt(2.0 * off2) > stop)
            throw std::runtime_error("eig_hermitian: no convergence in 64 sweeps");
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = w[i * n + i].real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

TrajectoryBundle extract_trajectories(const ChannelPath& path, const SnrConfig& snr) {
    snr.mimo.validate();
    if (snr.mimo.n_rx != path.n_rx || snr.mimo.n_tx != path.n_tx)
        throw std::invalid_argument("extract_trajectories: path and config antenna counts differ");
    if (path.length == 0) throw std::invalid_argument("extract_trajectories: empty path");
    if (!(snr.eta > 0.0)) throw std::domain_error("extract_trajectories: eta must be > 0");

    const int nr = path.n_rx, nt = path.n_tx;
    const int m = snr.mimo.m_small();
    const bool rx_side = nr <= nt;
    const double omega = snr.omega();

    TrajectoryBundle b;
    b.seed = path.seed;
    b.mimo = snr.mimo;
    b.eta = snr.eta;
    b.eigen_series.assign(m, ScalarSeries{std::vector<double>(path.length), path.spacing_s});
    b.imi_series = ScalarSeries{std::vector<double>(path.length), path.spacing_s};

    std::vector<std::complex<double>> gram(static_cast<std::size_t>(m) * m);
    for (std::size_t l = 0; l < path.length; ++l) {
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) {
                std::complex<double> acc = 0.0;
                if (rx_side)
                    for (int t = 0; t < nt; ++t) acc += path.at(l, i, t) * std::conj(path.at(l, j, t));
                else
                    for (int r = 0; r < nr; ++r) acc += std::conj(path.at(l, r, i)) * path.at(l, r, j);
                gram[i * m + j] = acc;
                gram[j * m + i] = std::conj(acc);
            }
        const std::vector<double> eig = eig_hermitian(gram, m);
        double imi = 0.0;
        for (int k = 0; k < m; ++k) {
            b.eigen_series[k].values[l] = eig[k];
            imi += std::log1p(omega * eig[k]);
        }
        b.imi_series.values[l] = imi;
    }
    return b;
}

double empirical_corr(const TrajectoryBundle& bundle, long lag, CorrMode mode) {
    if (mode == CorrMode::imi) {
        const std::vector<double>& x = bundle.imi_series.values;
        const std::size_t len = x.size();
        if (len == 0) throw std::invalid_argument("empirical_corr: empty imi series");
        if (lag < 0 || static_cast<std::size_t>(lag) >= len)
            throw std::invalid_argument("empirical_corr: lag out of range");
        double sx = 0.0, sxx = 0.0;
        for (double v : x) {
            sx += v;
            sxx += v * v;
        }
        const double mu = sx / static_cast<double>(len);
        const double e2 = sxx / static_cast<double>(len);
        const double var = e2 - mu * mu;
        if (!(var > 1e-12 * std::max(1.0, e2)))
            throw std::runtime_error("empirical_corr: degenerate variance");
        if (lag == 0) return 1.0;
        double sp = 0.0;
        for (std::size_t l = lag; l < len; ++l) sp += x[l] * x[l - lag];
        const double r = sp / static_cast<double>(len - lag);
        return (r - mu * mu) / var;
    }

    const int m = static_cast<int>(bundle.eigen_series.size());
    if (m == 0) throw std::invalid_argument("empirical_corr: empty eigen series");
    const std::size_t len = bundle.eigen_series[0].values.size();
    if (len == 0) throw std::invalid_argument("empirical_corr: empty eigen series");
    if (lag < 0 || static_cast<std::size_t>(lag) >= len)
        throw std::invalid_argument("empirical_corr: lag out of range");

    std::vector<double> sum(len, 0.0);
    double ss = 0.0, st = 0.0;
    for (int k = 0; k < m; ++k)
        for (std::size_t l = 0; l < len; ++l) {
            const double v = bundle.eigen_series[k].values[l];
            sum[l] += v;
            st += v * v;
        }
    for (double v : sum) ss += v;
    const double denom = static_cast<double>(len) * m;
    const double mu = ss / denom;
    const double e2 = st / denom;
    const double var = e2 - mu * mu;
    if (!(var > 1e-12 * std::max(1.0, e2)))
        throw std::runtime_error("empirical_corr: degenerate variance");

    if (lag == 0) {
        if (mode == CorrMode::same_mode_eigen) return 1.0;
        if (m < 2) throw std::invalid_argument("empirical_corr: cross mode needs M >= 2");
        double sc = 0.0;
        for (std::size_t l = 0; l < len; ++l) sc += sum[l] * sum[l];
        const double r = (sc - st) / (static_cast<double>(len) * m * (m - 1));
        return (r - mu * mu) / var;
    }
    double sp = 0.0;
    for (std::size_t l = lag; l < len; ++l) sp += sum[l] * sum[l - lag];
    const double r = sp / (static_cast<double>(len - lag) * m * m);
    return (r - mu * mu) / var;
}

double empirical_lcr(const ScalarSeries& series, double threshold) {
    const std::size_t len = series.values.size();
    if (len < 2) throw std::invalid_argument("empirical_lcr: need at least two samples");
    if (!(series.spacing_s > 0.0)) throw std::invalid_argument("empirical_lcr: spacing must be > 0");
    std::size_t changes = 0;
    bool prev = series.values[0] >= threshold;
    for (std::size_t l = 1; l < len; ++l) {
        const bool cur = series.values[l] >= threshold;
        changes += (cur != prev);
        prev = cur;
    }
    return 0.5 * static_cast<double>(changes) /
           (static_cast<double>(len - 1) * series.spacing_s);
}

std::optional<double> empirical_afd(const ScalarSeries& series, double threshold) {
    const std::size_t len = series.values.size();
    if (len < 2) throw std::invalid_argument("empirical_afd: need at least two samples");
    if (!(series.spacing_s > 0.0)) throw std::invalid_argument("empirical_afd: spacing must be > 0");
    std::size_t below = 0, downs = 0;
    bool prev = series.values[0] >= threshold;
    below += !prev;
    for (std::size_t l = 1; l < len; ++l) {
        const bool cur = series.values[l] >= threshold;
        below += !cur;
        downs += (prev && !cur);
        prev = cur;
    }
    if (downs == 0) return std::nullopt;
    return static_cast<double>(below) * series.spacing_s / static_cast<double>(downs);
}

double empirical_lcr(const TrajectoryBundle& bundle, double threshold) {
    const int m = static_cast<int>(bundle.eigen_series.size());
    if (m == 0) throw std::invalid_argument("empirical_lcr: empty bundle");
    const std::size_t len = bundle.eigen_series[0].values.size();
    if (len < 2) throw std::invalid_argument("empirical_lcr: need at least two samples");
    const double ts = bundle.eigen_series[0].spacing_s;
    if (!(ts > 0.0)) throw std::invalid_argument("empirical_lcr: spacing must be > 0");
    double ends = 0.0, joint = 0.0;
    int prev = 0;
    for (int k = 0; k < m; ++k) prev += (bundle.eigen_series[k].values[0] >= threshold);
    for (std::size_t l = 1; l < len; ++l) {
        int cur = 0;
        for (int k = 0; k < m; ++k) cur += (bundle.eigen_series[k].values[l] >= threshold);
        ends += cur + prev;
        joint += static_cast<double>(cur) * prev;
        prev = cur;
    }
    return 0.5 * (ends - 2.0 * joint / m) / (m * static_cast<double>(len - 1) * ts);
}

std::optional<double> empirical_afd(const TrajectoryBundle& bundle, double threshold) {
    const int m = static_cast<int>(bundle.eigen_series.size());
    if (m == 0) throw std::invalid_argument("empirical_afd: empty bundle");
    const std::size_t len = bundle.eigen_series[0].values.size();
    if (len < 2) throw std::invalid_argument("empirical_afd: need at least two samples");
    const double ts = bundle.eigen_series[0].spacing_s;
    if (!(ts > 0.0)) throw std::invalid_argument("empirical_afd: spacing must be > 0");
    double below = 0.0, downs = 0.0;
    int prev = 0;
    for (int k = 0; k < m; ++k) prev += (bundle.eigen_series[k].values[0] >= threshold);
    below += m - prev;
    for (std::size_t l = 1; l < len; ++l) {
        int cur = 0;
        for (int k = 0; k < m; ++k) cur += (bundle.eigen_series[k].values[l] >= threshold);
        below += m - cur;
        downs += prev - static_cast<double>(cur) * prev / m;
        prev = cur;
    }
    if (!(downs > 0.0)) return std::nullopt;
    return below * ts / downs;
}

bool ValidationReport::all_asserted_pass() const {
    for (const ValidationEntry& e : entries)
        if (e.asserted && !e.pass) return false;
    return true;
}

namespace detail {

double block_bootstrap_se(const std::vector<std::vector<double>>& block_stats,
                          const std::function<double(const std::vector<double>&)>& finalize,
                          int resamples, std::uint64_t seed) {
    const std::size_t nb = block_stats.size();
    if (nb < 2 || resamples < 2) return 0.0;
    const std::size_t cols = block_stats[0].size();
    Rng rng(seed);
    std::vector<double> acc(cols);
    std::vector<double> est;
    est.reserve(resamples);
    for (int r = 0; r < resamples; ++r) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t b = 0; b < nb; ++b) {
            const std::vector<double>& row = block_stats[rng.next_index(nb)];
            for (std::size_t j = 0; j < cols; ++j) acc[j] += row[j];
        }
        const double e = finalize(acc);
        if (std::isfinite(e)) est.push_back(e);
    }
    if (est.size() < 2) return std::numeric_limits<double>::infinity();
    double mean = 0.0;
    for (double e : est) mean += e;
    mean /= static_cast<double>(est.size());
    double ss = 0.0;
    for (double e : est) ss += (e - mean) * (e - mean);
    return std::sqrt(ss / (static_cast<double>(est.size()) - 1.0));
}

} // namespace detail

ValidationReport run_validation(const Scenario& scenario) {
    scenario.validate();
    const auto t0 = std::chrono::steady_clock::now();

    const MimoConfig& mimo = scenario.mimo;
    const int m = mimo.m_small();
    const double md = m;
    const double ts = scenario.scattering.symbol_time_s;
    const std::size_t len = scenario.length;

    ValidationReport report;
    report.scenario = scenario.name;
    report.length = len;
    report.seed = scenario.seed;

    TrajectoryBundle bundle;
    {
        const ChannelPath path = generate_path(scenario.scattering, mimo, len, scenario.seed);
        bundle = extract_trajectories(path, SnrConfig{1.0, mimo});
    }

    const std::size_t nblocks = std::min<std::size_t>(64, len);
    const auto block_of = [&](std::size_t l) { return l * nblocks / len; };
    std::uint64_t boot_counter = 0;
    const auto se_of = [&](const std::vector<std::vector<double>>& rows,
                           const std::function<double(const std::vector<double>&)>& fin) {
        return detail::block_bootstrap_se(rows, fin, 400, derive_seed(scenario.seed, ++boot_counter));
    };
    const auto push = [&](std::string quantity, double analytic, double empirical, double tol,
                          double se, bool asserted) {
        ValidationEntry e;
        e.quantity = std::move(quantity);
        e.analytic = analytic;
        e.empirical = empirical;
        e.tolerance = tol;
        e.standard_error = se;
        e.pass = std::isfinite(empirical) && std::abs(empirical - analytic) <= tol;
        e.asserted = asserted;
        report.entries.push_back(std::move(e));
    };

    // per-step mode sums and per-block base aggregates, shared by the eigen entries
    std::vector<double> esum(len, 0.0);
    double st_all = 0.0;
    std::vector<std::array<double, 3>> eig_base(nblocks, {0.0, 0.0, 0.0});
    for (std::size_t l = 0; l < len; ++l) {
        double s = 0.0, t = 0.0;
        for (int k = 0; k < m; ++k) {
            const double v = bundle.eigen_series[k].values[l];
            s += v;
            t += v * v;
        }
        esum[l] = s;
        st_all += t;
        auto& row = eig_base[block_of(l)];
        row[0] += s;
        row[1] += t;
        row[2] += 1.0;
    }

    const auto eig_base_rows = [&]() {
        std::vector<std::vector<double>> rows(nblocks, std::vector<double>(3, 0.0));
        for (std::size_t b = 0; b < nblocks; ++b)
            rows[b] = {eig_base[b][0], eig_base[b][1], eig_base[b][2]};
        return rows;
    };

    {
        const auto [mean_an, e2_an] = eigen_moments(mimo);
        const auto rows = eig_base_rows();
        const auto fin_mean = [md](const std::vector<double>& v) { return v[0] / (md * v[2]); };
        const auto fin_e2 = [md](const std::vector<double>& v) { return v[1] / (md * v[2]); };
        double se = se_of(rows, fin_mean);
        push("eigen mean", mean_an, fin_mean(rows_total(rows)), 3.0 * se, se, true);
        se = se_of(rows, fin_e2);
        push("eigen second moment", e2_an, fin_e2(rows_total(rows)), 3.0 * se, se, true);
    }

    EigenPdfContext ctx(mimo);
    const double rho1 = corr_mag(scenario.scattering, 1);

    for (long lag : scenario.lags) {
        const double rho_i = corr_mag(scenario.scattering, lag);
        if (lag == 0) {
            push("eigen corr coeff, lag 0", 1.0, empirical_corr(bundle, 0, CorrMode::same_mode_eigen),
                 0.0, 0.0, true);
            if (m >= 2) {
                const double an = eigen_corr(mimo, 0, rho_i, false).corr_coeff;
                const double emp = empirical_corr(bundle, 0, CorrMode::cross_mode_eigen);
                std::vector<std::vector<double>> rows(nblocks, std::vector<double>(4, 0.0));
                for (std::size_t l = 0; l < len; ++l) {
                    auto& r = rows[block_of(l)];
                    r[0] += esum[l] * esum[l];
                    r[1] += 1.0;
                }
                for (std::size_t b = 0; b < nblocks; ++b) {
                    rows[b][2] = eig_base[b][0];
                    rows[b][3] = eig_base[b][1];
                }
                const auto fin = [md](const std::vector<double>& v) {
                    const double mu = v[2] / (md * v[1]);
                    const double var = v[3] / (md * v[1]) - mu * mu;
                    const double r = (v[0] - v[3]) / (v[1] * md * (md - 1.0));
                    return (r - mu * mu) / var;
                };
                const double se = se_of(rows, fin);
                push("eigen corr coeff (cross), lag 0", an, emp, std::min(3.0 * se, 0.02), se, true);
            }
            continue;
        }
        const double an = eigen_corr(mimo, lag, rho_i, true).corr_coeff;
        const double emp = empirical_corr(bundle, lag, CorrMode::same_mode_eigen);
        std::vector<std::vector<double>> rows(nblocks, std::vector<double>(5, 0.0));
        for (std::size_t l = lag; l < len; ++l) {
            auto& r = rows[block_of(l)];
            r[0] += esum[l] * esum[l - lag];
            r[1] += 1.0;
        }
        for (std::size_t b = 0; b < nblocks; ++b) {
            rows[b][2] = eig_base[b][0];
            rows[b][3] = eig_base[b][1];
            rows[b][4] = eig_base[b][2];
        }
        const auto fin = [md](const std::vector<double>& v) {
            const double mu = v[2] / (md * v[4]);
            const double var = v[3] / (md * v[4]) - mu * mu;
            const double r = v[0] / (v[1] * md * md);
            return (r - mu * mu) / var;
        };
        const double se = se_of(rows, fin);
        push(strf("eigen corr coeff, lag %ld", lag), an, emp, std::min(3.0 * se, 0.02), se, true);
    }

    for (double th : scenario.eigen_thresholds) {
        const LevelStats ls = eigen_level_stats(ctx, th, rho1, ts);
        const double lcr_emp = empirical_lcr(bundle, th);
        const std::optional<double> afd_emp = empirical_afd(bundle, th);

        std::vector<std::vector<double>> rows(nblocks, std::vector<double>(6, 0.0));
        int prev = 0;
        for (int k = 0; k < m; ++k) prev += (bundle.eigen_series[k].values[0] >= th);
        rows[block_of(0)][0] += prev;
        rows[block_of(0)][1] += 1.0;
        for (std::size_t l = 1; l < len; ++l) {
            int cur = 0;
            for (int k = 0; k < m; ++k) cur += (bundle.eigen_series[k].values[l] >= th);
            auto& r = rows[block_of(l)];
            r[0] += cur;
            r[1] += 1.0;
            r[2] += static_cast<double>(cur) * prev;
            r[3] += cur;
            r[4] += prev;
            r[5] += 1.0;
            prev = cur;
        }
        const auto fin_lcr = [md, ts](const std::vector<double>& v) {
            return 0.5 * (v[3] + v[4] - 2.0 * v[2] / md) / (md * v[5] * ts);
        };
        const auto fin_afd = [md, ts](const std::vector<double>& v) {
            return ts * (v[1] * md - v[0]) / (v[4] - v[2] / md);
        };
        const double se_lcr = se_of(rows, fin_lcr);
        const double se_afd = se_of(rows, fin_afd);
        const bool measurable = ls.lcr_per_s >= 0.05 / ts * 1e-3;
        push(strf("eigen lcr, threshold %g", th), ls.lcr_per_s, lcr_emp, 0.05 * ls.lcr_per_s,
             se_lcr, measurable);
        push(strf("eigen afd, threshold %g", th), ls.afd_s, afd_emp ? *afd_emp : kNaN,
             0.05 * ls.afd_s, se_afd, measurable);
    }

    for (double snr_db : scenario.snr_db) {
        const double eta = std::pow(10.0, snr_db / 10.0);
        const SnrConfig sc{eta, mimo};
        const double omega = sc.omega();
        const ImiMoments mom = imi_moments(sc);
        const double mu2 = mom.mean * mom.mean;

        std::vector<double> x(len, 0.0);
        for (int k = 0; k < m; ++k)
            for (std::size_t l = 0; l < len; ++l)
                x[l] += std::log1p(omega * bundle.eigen_series[k].values[l]);

        std::vector<std::array<double, 3>> imi_base(nblocks, {0.0, 0.0, 0.0});
        for (std::size_t l = 0; l < len; ++l) {
            auto& row = imi_base[block_of(l)];
            row[0] += x[l];
            row[1] += x[l] * x[l];
            row[2] += 1.0;
        }
        {
            std::vector<std::vector<double>> rows(nblocks, std::vector<double>(3, 0.0));
            for (std::size_t b = 0; b < nblocks; ++b)
                rows[b] = {imi_base[b][0], imi_base[b][1], imi_base[b][2]};
            const auto fin_mean = [](const std::vector<double>& v) { return v[0] / v[2]; };
            const auto fin_var = [](const std::vector<double>& v) {
                const double mu = v[0] / v[2];
                return v[1] / v[2] - mu * mu;
            };
            double se = se_of(rows, fin_mean);
            push(strf("imi mean, snr %g dB", snr_db), mom.mean, fin_mean(rows_total(rows)),
                 3.0 * se, se, true);
            se = se_of(rows, fin_var);
            push(strf("imi variance, snr %g dB", snr_db), mom.variance, fin_var(rows_total(rows)),
                 3.0 * se, se, true);
        }

        // rho-independent cross-moment table, grown until the realized series
        // tail at the largest requested correlation is negligible
        double rho_hi = rho1;
        for (long lag : scenario.lags)
            if (lag > 0) rho_hi = std::max(rho_hi, corr_mag(scenario.scattering, lag));
        const double r2hi = rho_hi * rho_hi;
        int jcount = 64;
        std::vector<std::vector<double>> amat;
        for (;;) {
            amat = detail::imi_cross_moments(m, mimo.nu(), omega, jcount);
            double last = 0.0;
            for (int k = 0; k < m; ++k)
                last += std::pow(r2hi, m + jcount - 1 - k) * amat.back()[k] * amat.back()[k];
            if (last * r2hi / (1.0 - r2hi) <= 1e-11 * std::max(mu2, 1.0) || jcount >= 4096) break;
            jcount *= 2;
        }
        const auto coeff_of = [&](double rho) {
            if (rho == 0.0) return 0.0;
            const double r2 = rho * rho;
            double acc = 0.0;
            for (int jr = jcount - 1; jr >= 0; --jr)
                for (int k = m - 1; k >= 0; --k)
                    acc += std::pow(r2, m + jr - k) * amat[jr][k] * amat[jr][k];
            return acc / mom.variance;
        };

        for (long lag : scenario.lags) {
            if (lag == 0) {
                push(strf("imi corr coeff, lag 0, snr %g dB", snr_db), 1.0, 1.0, 0.0, 0.0, true);
                continue;
            }
            const double rho_i = corr_mag(scenario.scattering, lag);
            double emp = 0.0;
            std::vector<std::vector<double>> rows(nblocks, std::vector<double>(5, 0.0));
            for (std::size_t l = lag; l < len; ++l) {
                auto& r = rows[block_of(l)];
                r[0] += x[l] * x[l - lag];
                r[1] += 1.0;
            }
            for (std::size_t b = 0; b < nblocks; ++b) {
                rows[b][2] = imi_base[b][0];
                rows[b][3] = imi_base[b][1];
                rows[b][4] = imi_base[b][2];
            }
            const auto fin = [](const std::vector<double>& v) {
                const double mu = v[2] / v[4];
                const double var = v[3] / v[4] - mu * mu;
                return (v[0] / v[1] - mu * mu) / var;
            };
            emp = fin(rows_total(rows));
            const double se = se_of(rows, fin);
            push(strf("imi corr coeff (exact), lag %ld, snr %g dB", lag, snr_db), coeff_of(rho_i),
                 emp, 0.02, se, true);
            if (eta <= 0.1) {
                const double an = imi_corr(sc, lag, rho_i, ImiRegime::low_snr).coeff;
                push(strf("imi corr coeff (low snr), lag %ld, snr %g dB", lag, snr_db), an, emp,
                     0.02, se, true);
            } else if (eta >= 100.0) {
                const double an = imi_corr(sc, lag, rho_i, ImiRegime::high_snr).coeff;
                const double tol = mimo.nu() == 0 ? 0.05 : 0.03;
                push(strf("imi corr coeff (high snr), lag %ld, snr %g dB", lag, snr_db), an, emp,
                     tol, se, true);
            }
        }

        const double sigma = std::sqrt(mom.variance);
        const double rho1_imi = coeff_of(rho1);
        const ScalarSeries imi_xs{x, ts};
        // the Gaussian approximation degrades for square systems (few log terms,
        // visibly skewed IMI), so those rows are reported but not asserted
        const bool gaussian_ok = mimo.nu() > 0;
        for (double off : scenario.imi_sigma_offsets) {
            const double ith = mom.mean + off * sigma;
            const double lcr_an = imi_gaussian_lcr(mom, ith, rho1_imi, ts);
            const double aod_an = imi_gaussian_aod(mom, ith, rho1_imi, ts);
            const double lcr_emp = empirical_lcr(imi_xs, ith);
            const std::optional<double> aod_emp = empirical_afd(imi_xs, ith);

            std::vector<std::vector<double>> rows(nblocks, std::vector<double>(5, 0.0));
            bool prevz = x[0] >= ith;
            rows[block_of(0)][1] += !prevz;
            rows[block_of(0)][3] += 1.0;
            for (std::size_t l = 1; l < len; ++l) {
                const bool cur = x[l] >= ith;
                auto& r = rows[block_of(l)];
                r[0] += (cur != prevz);
                r[1] += !cur;
                r[2] += (prevz && !cur);
                r[3] += 1.0;
                r[4] += 1.0;
                prevz = cur;
            }
            const auto fin_lcr = [ts](const std::vector<double>& v) {
                return 0.5 * v[0] / (v[4] * ts);
            };
            const auto fin_afd = [ts](const std::vector<double>& v) { return v[1] * ts / v[2]; };
            const double se_lcr = se_of(rows, fin_lcr);
            const double se_afd = se_of(rows, fin_afd);
            push(strf("imi gaussian lcr, offset %+.2f sigma, snr %g dB", off, snr_db), lcr_an,
                 lcr_emp, 0.10 * lcr_an, se_lcr, gaussian_ok);
            push(strf("imi gaussian aod, offset %+.2f sigma, snr %g dB", off, snr_db), aod_an,
                 aod_emp ? *aod_emp : kNaN, 0.10 * aod_an, se_afd, false);
        }
    }

    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

} // namespace mimostat
