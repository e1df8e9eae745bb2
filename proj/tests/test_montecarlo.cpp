#include "doctest.h"

#include "mimostat/eigenstats.hpp"
#include "mimostat/imistats.hpp"
#include "mimostat/montecarlo.hpp"
#include "mimostat/rng.hpp"
#include "mimostat/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

using namespace mimostat;
using cplx = std::complex<double>;

namespace {

ChannelPath make_path(int n_rx, int n_tx, std::vector<cplx> samples, double ts = 0.005) {
    ChannelPath p;
    p.n_rx = n_rx;
    p.n_tx = n_tx;
    p.length = samples.size() / (static_cast<std::size_t>(n_rx) * n_tx);
    p.spacing_s = ts;
    p.seed = 77;
    p.samples = std::move(samples);
    return p;
}

std::vector<cplx> random_hermitian(Rng& rng, int n) {
    std::vector<cplx> a(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        a[i * n + i] = rng.next_gaussian();
        for (int j = i + 1; j < n; ++j) {
            a[i * n + j] = cplx(rng.next_gaussian(), rng.next_gaussian());
            a[j * n + i] = std::conj(a[i * n + j]);
        }
    }
    return a;
}

// ln det of a Hermitian positive definite matrix by complex Cholesky
double chol_logdet(std::vector<cplx> a, int n) {
    double ld = 0.0;
    for (int j = 0; j < n; ++j) {
        double d = a[j * n + j].real();
        for (int k = 0; k < j; ++k) d -= std::norm(a[j * n + k]);
        a[j * n + j] = std::sqrt(d);
        ld += std::log(d);
        for (int i = j + 1; i < n; ++i) {
            cplx v = a[i * n + j];
            for (int k = 0; k < j; ++k) v -= a[i * n + k] * std::conj(a[j * n + k]);
            a[i * n + j] = v / std::sqrt(d);
        }
    }
    return ld;
}

const ValidationEntry& find_entry(const ValidationReport& r, const std::string& quantity) {
    for (const ValidationEntry& e : r.entries)
        if (e.quantity == quantity) return e;
    REQUIRE_MESSAGE(false, "missing entry: " << quantity);
    static ValidationEntry dummy;
    return dummy;
}

} // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("hermitian eigensolver closed cases") {
    const std::vector<cplx> eye = {1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
    const std::vector<double> e1 = eig_hermitian(eye, 3);
    REQUIRE(e1.size() == 3);
    for (double v : e1) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

    const std::vector<cplx> diag = {5.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 9.0};
    const std::vector<double> e2 = eig_hermitian(diag, 3);
    CHECK(e2[0] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(e2[1] == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(e2[2] == doctest::Approx(9.0).epsilon(1e-14));

    const std::vector<double> e3 = eig_hermitian({cplx(-3.5, 0.0)}, 1);
    REQUIRE(e3.size() == 1);
    CHECK(e3[0] == -3.5);

    CHECK_THROWS_AS(eig_hermitian(eye, 2), std::invalid_argument);
    CHECK_THROWS_AS(eig_hermitian({1.0, cplx(0.0, 1.0), cplx(0.0, 1.0), 1.0}, 2),
                    std::invalid_argument);
}

TEST_CASE("hermitian eigensolver matches the characteristic quadratic") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<cplx> a = random_hermitian(rng, 2);
        const double tr = a[0].real() + a[3].real();
        const double det = a[0].real() * a[3].real() - std::norm(a[1]);
        const double disc = std::sqrt(tr * tr / 4.0 - det);
        const std::vector<double> eig = eig_hermitian(a, 2);
        CHECK(eig[0] == doctest::Approx(tr / 2.0 - disc).epsilon(1e-10));
        CHECK(eig[1] == doctest::Approx(tr / 2.0 + disc).epsilon(1e-10));
    }
}

TEST_CASE("hermitian eigensolver invariants") {
    Rng rng(7);
    for (int n : {3, 5, 6}) {
        const std::vector<cplx> a = random_hermitian(rng, n);
        double tr = 0.0, fro2 = 0.0;
        for (int i = 0; i < n; ++i) tr += a[i * n + i].real();
        for (const cplx& z : a) fro2 += std::norm(z);
        const std::vector<double> eig = eig_hermitian(a, n);
        REQUIRE(static_cast<int>(eig.size()) == n);
        CHECK(std::is_sorted(eig.begin(), eig.end()));
        const double esum = std::accumulate(eig.begin(), eig.end(), 0.0);
        const double e2sum =
            std::inner_product(eig.begin(), eig.end(), eig.begin(), 0.0);
        CHECK(esum == doctest::Approx(tr).epsilon(1e-12));
        CHECK(e2sum == doctest::Approx(fro2).epsilon(1e-11));
    }
}

TEST_CASE("trajectory extraction single antenna") {
    const std::vector<cplx> h = {cplx(1.0, 2.0), cplx(-0.5, 0.25), cplx(0.0, -3.0), cplx(2.0, 0.0)};
    const ChannelPath p = make_path(1, 1, h, 0.01);
    const SnrConfig snr{2.3, MimoConfig{1, 1}};
    const TrajectoryBundle b = extract_trajectories(p, snr);
    REQUIRE(b.eigen_series.size() == 1);
    REQUIRE(b.eigen_series[0].values.size() == 4);
    CHECK(b.imi_series.spacing_s == 0.01);
    CHECK(b.seed == p.seed);
    CHECK(b.eta == 2.3);
    for (std::size_t l = 0; l < 4; ++l) {
        CHECK(b.eigen_series[0].values[l] == doctest::Approx(std::norm(h[l])).epsilon(1e-14));
        CHECK(b.imi_series.values[l] ==
              doctest::Approx(std::log1p(2.3 * std::norm(h[l]))).epsilon(1e-14));
    }
}

TEST_CASE("trajectory extraction identity step") {
    // H = I_4 with omega = 1 gives unit eigenvalues and IMI = 4 ln 2
    std::vector<cplx> h(16, 0.0);
    for (int i = 0; i < 4; ++i) h[i * 4 + i] = 1.0;
    const ChannelPath p = make_path(4, 4, h);
    const TrajectoryBundle b = extract_trajectories(p, SnrConfig{4.0, MimoConfig{4, 4}});
    for (int m = 0; m < 4; ++m)
        CHECK(b.eigen_series[m].values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.imi_series.values[0] == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("trajectory extraction gram side selection") {
    // an (n_rx, n_tx) path and its conjugate-transposed counterpart share the
    // same Gram spectrum
    Rng rng(31);
    const std::size_t len = 5;
    std::vector<cplx> tall(len * 3 * 2), wide(len * 2 * 3);
    for (std::size_t l = 0; l < len; ++l)
        for (int r = 0; r < 3; ++r)
            for (int t = 0; t < 2; ++t) {
                const cplx v(rng.next_gaussian(), rng.next_gaussian());
                tall[(l * 3 + r) * 2 + t] = v;
                wide[(l * 2 + t) * 3 + r] = std::conj(v);
            }
    const double w = 0.7;
    const TrajectoryBundle bt =
        extract_trajectories(make_path(3, 2, tall), SnrConfig{2.0 * w, MimoConfig{2, 3}});
    const TrajectoryBundle bw =
        extract_trajectories(make_path(2, 3, wide), SnrConfig{3.0 * w, MimoConfig{3, 2}});
    REQUIRE(bt.eigen_series.size() == 2);
    REQUIRE(bw.eigen_series.size() == 2);
    for (int m = 0; m < 2; ++m)
        for (std::size_t l = 0; l < len; ++l)
            CHECK(bt.eigen_series[m].values[l] ==
                  doctest::Approx(bw.eigen_series[m].values[l]).epsilon(1e-12));
    for (std::size_t l = 0; l < len; ++l)
        CHECK(bt.imi_series.values[l] == doctest::Approx(bw.imi_series.values[l]).epsilon(1e-12));
}

TEST_CASE("trajectory invariants on a generated path") {
    const MimoConfig mimo{4, 4};
    const ChannelPath path = generate_path(bundled_isotropic(), mimo, 1u << 12, 3);
    const SnrConfig snr{1.0, mimo};
    const TrajectoryBundle b = extract_trajectories(path, snr);
    for (std::size_t l = 0; l < path.length; ++l) {
        double fro2 = 0.0;
        for (int r = 0; r < 4; ++r)
            for (int t = 0; t < 4; ++t) fro2 += std::norm(path.at(l, r, t));
        double esum = 0.0;
        for (int m = 0; m < 4; ++m) {
            const double v = b.eigen_series[m].values[l];
            CHECK(v >= -1e-10 * fro2);
            esum += v;
        }
        CHECK(esum == doctest::Approx(fro2).epsilon(1e-9));
        CHECK(std::is_sorted(b.eigen_series.begin(), b.eigen_series.end(),
                             [l](const ScalarSeries& a, const ScalarSeries& c) {
                                 return a.values[l] < c.values[l];
                             }));
    }
    // IMI against an independent log-det of I + omega H H^dag
    for (std::size_t l = 0; l < 128; ++l) {
        std::vector<cplx> g(16, 0.0);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                cplx acc = 0.0;
                for (int t = 0; t < 4; ++t) acc += path.at(l, i, t) * std::conj(path.at(l, j, t));
                g[i * 4 + j] = snr.omega() * acc;
            }
            g[i * 4 + i] += 1.0;
        }
        CHECK(b.imi_series.values[l] == doctest::Approx(chol_logdet(g, 4)).epsilon(1e-9));
    }
}

TEST_CASE("trajectory extraction input validation") {
    const ChannelPath p = make_path(1, 1, {cplx(1.0, 0.0)});
    CHECK_THROWS_AS(extract_trajectories(p, SnrConfig{1.0, MimoConfig{2, 2}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(extract_trajectories(p, SnrConfig{0.0, MimoConfig{1, 1}}), std::domain_error);
    ChannelPath empty;
    empty.n_rx = empty.n_tx = 1;
    CHECK_THROWS_AS(extract_trajectories(empty, SnrConfig{1.0, MimoConfig{1, 1}}),
                    std::invalid_argument);
}

TEST_CASE("correlation estimator basics") {
    Rng rng(123);
    const std::size_t len = 1u << 14;
    TrajectoryBundle white;
    white.mimo = MimoConfig{2, 2};
    white.eigen_series.assign(2, ScalarSeries{std::vector<double>(len), 0.005});
    white.imi_series = ScalarSeries{std::vector<double>(len), 0.005};
    for (std::size_t l = 0; l < len; ++l) {
        white.eigen_series[0].values[l] = rng.next_gaussian();
        white.eigen_series[1].values[l] = rng.next_gaussian();
        white.imi_series.values[l] = rng.next_gaussian();
    }
    const double band = 4.0 / std::sqrt(static_cast<double>(len));
    CHECK(empirical_corr(white, 0, CorrMode::imi) == 1.0);
    CHECK(empirical_corr(white, 0, CorrMode::same_mode_eigen) == 1.0);
    for (long lag : {1L, 3L, 7L}) {
        CHECK(std::abs(empirical_corr(white, lag, CorrMode::imi)) <= band);
        CHECK(std::abs(empirical_corr(white, lag, CorrMode::same_mode_eigen)) <= band);
        CHECK(std::abs(empirical_corr(white, lag, CorrMode::cross_mode_eigen)) <= band);
    }
    CHECK(empirical_corr(white, 5, CorrMode::same_mode_eigen) ==
          empirical_corr(white, 5, CorrMode::cross_mode_eigen));

    CHECK_THROWS_AS(empirical_corr(white, -1, CorrMode::imi), std::invalid_argument);
    CHECK_THROWS_AS(empirical_corr(white, static_cast<long>(len), CorrMode::imi),
                    std::invalid_argument);

    TrajectoryBundle flat = white;
    std::fill(flat.imi_series.values.begin(), flat.imi_series.values.end(), 2.5);
    CHECK_THROWS_AS(empirical_corr(flat, 1, CorrMode::imi), std::runtime_error);

    TrajectoryBundle single;
    single.eigen_series.assign(1, white.eigen_series[0]);
    single.imi_series = white.imi_series;
    CHECK_THROWS_AS(empirical_corr(single, 0, CorrMode::cross_mode_eigen), std::invalid_argument);
}

TEST_CASE("correlation estimator matches the closed form on a simulated path") {
    const ScatteringModel iso = bundled_isotropic();
    const MimoConfig mimo{4, 4};
    const ChannelPath path = generate_path(iso, mimo, 1u << 16, 11);
    const TrajectoryBundle b = extract_trajectories(path, SnrConfig{1.0, mimo});
    for (long lag : {1L, 3L, 8L, 20L}) {
        const double rho = corr_mag(iso, lag);
        const double analytic = rho * rho / 16.0;
        CHECK(std::abs(empirical_corr(b, lag, CorrMode::same_mode_eigen) - analytic) < 0.005);
        CHECK(std::abs(empirical_corr(b, lag, CorrMode::cross_mode_eigen) - analytic) < 0.005);
    }
    CHECK(std::abs(empirical_corr(b, 0, CorrMode::cross_mode_eigen) + 0.25) < 0.005);
    // sorting makes each labeled series more persistent than the unordered law
    double sorted_corr = 0.0;
    {
        TrajectoryBundle one;
        one.eigen_series.assign(1, b.eigen_series[3]);
        one.imi_series = b.eigen_series[3];
        sorted_corr = empirical_corr(one, 1, CorrMode::imi);
    }
    CHECK(sorted_corr > corr_mag(iso, 1) * corr_mag(iso, 1) / 16.0);
}

TEST_CASE("crossing rate and fade duration closed cases") {
    const ScalarSeries constant{std::vector<double>(16, 1.0), 0.005};
    CHECK(empirical_lcr(constant, 2.0) == 0.0);
    CHECK(empirical_lcr(constant, 0.5) == 0.0);
    CHECK(!empirical_afd(constant, 0.5).has_value());

    std::vector<double> alt(10);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = (i % 2 == 0) ? 2.0 : 0.0;
    const ScalarSeries alternating{alt, 0.005};
    CHECK(empirical_lcr(alternating, 1.0) == doctest::Approx(1.0 / (2.0 * 0.005)).epsilon(1e-14));
    CHECK(*empirical_afd(alternating, 1.0) == doctest::Approx(0.005).epsilon(1e-14));

    const ScalarSeries ramp{{0.0, 3.0, 1.0, 4.0, 0.0, 5.0}, 0.01};
    // Z = 0 1 0 1 0 1: five changes, two completed down-crossings, three below
    CHECK(empirical_lcr(ramp, 2.0) == doctest::Approx(2.5 / (5.0 * 0.01)).epsilon(1e-14));
    CHECK(*empirical_afd(ramp, 2.0) == doctest::Approx(3.0 * 0.01 / 2.0).epsilon(1e-14));

    const ScalarSeries rising{{0.0, 0.0, 3.0, 3.0}, 0.005};
    CHECK(empirical_lcr(rising, 1.0) == doctest::Approx(0.5 / (3.0 * 0.005)).epsilon(1e-14));
    CHECK(!empirical_afd(rising, 1.0).has_value()); // fades but never down-crosses

    CHECK_THROWS_AS(empirical_lcr(ScalarSeries{{1.0}, 0.005}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(empirical_afd(ScalarSeries{{1.0}, 0.005}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(empirical_lcr(ScalarSeries{{1.0, 2.0}, 0.0}, 0.5), std::invalid_argument);
}

TEST_CASE("pooled level estimators over the eigen modes") {
    // M = 1 pooling reduces exactly to the scalar estimators
    Rng rng(55);
    TrajectoryBundle one;
    one.eigen_series.assign(1, ScalarSeries{std::vector<double>(512), 0.005});
    for (double& v : one.eigen_series[0].values) v = rng.next_gaussian();
    CHECK(empirical_lcr(one, 0.3) == empirical_lcr(one.eigen_series[0], 0.3));
    CHECK(*empirical_afd(one, 0.3) == *empirical_afd(one.eigen_series[0], 0.3));

    // two modes, hand-counted pair-averaged rates
    TrajectoryBundle two;
    two.eigen_series = {ScalarSeries{{5.0, 1.0, 5.0}, 0.5}, ScalarSeries{{3.0, 3.0, 0.0}, 0.5}};
    // n_l = 2, 1, 1 at threshold 2
    CHECK(empirical_lcr(two, 2.0) == doctest::Approx(0.25 / 0.5).epsilon(1e-14));
    CHECK(*empirical_afd(two, 2.0) == doctest::Approx(2.0 * 0.5 / 1.5).epsilon(1e-14));
}

TEST_CASE("level rates match the analytic forms on a simulated path") {
    const ScatteringModel non = bundled_nonisotropic();
    const MimoConfig mimo{3, 12};
    const ChannelPath path = generate_path(non, mimo, 1u << 17, 5);
    const TrajectoryBundle b = extract_trajectories(path, SnrConfig{1.0, mimo});
    EigenPdfContext ctx(mimo);
    const double rho1 = corr_mag(non, 1);
    for (double th : {6.0, 10.0, 16.0}) {
        const LevelStats ls = eigen_level_stats(ctx, th, rho1, 0.005);
        CHECK(empirical_lcr(b, th) == doctest::Approx(ls.lcr_per_s).epsilon(0.05));
        const std::optional<double> afd = empirical_afd(b, th);
        REQUIRE(afd.has_value());
        CHECK(*afd == doctest::Approx(ls.afd_s).epsilon(0.05));
    }
}

TEST_CASE("block bootstrap standard error") {
    Rng rng(99);
    const std::size_t len = 4096, nblocks = 64;
    std::vector<std::vector<double>> rows(nblocks, std::vector<double>(2, 0.0));
    for (std::size_t l = 0; l < len; ++l) {
        auto& r = rows[l * nblocks / len];
        r[0] += rng.next_gaussian();
        r[1] += 1.0;
    }
    const auto fin = [](const std::vector<double>& v) { return v[0] / v[1]; };
    const double se = detail::block_bootstrap_se(rows, fin, 400, 17);
    const double iid = 1.0 / std::sqrt(static_cast<double>(len));
    CHECK(se / iid > 0.7);
    CHECK(se / iid < 1.4);
    CHECK(se == detail::block_bootstrap_se(rows, fin, 400, 17));
    CHECK(se != detail::block_bootstrap_se(rows, fin, 400, 18));
    CHECK(detail::block_bootstrap_se({{1.0}}, fin, 400, 17) == 0.0);
}

TEST_CASE("validation report on a small scenario") {
    Scenario s;
    s.name = "unit-small";
    s.scattering = bundled_isotropic();
    s.mimo = {2, 2};
    s.snr_db = {-20.0, 30.0};
    s.lags = {0, 1, 4};
    s.eigen_thresholds = {1.0, 4.0};
    s.imi_sigma_offsets = {0.0, 0.5};
    s.length = 1u << 14;
    s.seed = 9;

    const ValidationReport r = run_validation(s);
    CHECK(r.scenario == "unit-small");
    CHECK(r.length == s.length);
    CHECK(r.seed == s.seed);
    CHECK(r.wall_time_s > 0.0);
    CHECK(r.entries.size() == 32);
    CHECK(r.all_asserted_pass());

    for (const ValidationEntry& e : r.entries) {
        CHECK(!e.quantity.empty());
        CHECK(e.tolerance >= 0.0);
        if (e.asserted) CHECK(std::isfinite(e.analytic));
    }

    const double rho1 = corr_mag(s.scattering, 1);
    CHECK(find_entry(r, "eigen mean").analytic == 2.0);
    CHECK(find_entry(r, "eigen corr coeff, lag 1").analytic ==
          doctest::Approx(rho1 * rho1 / 4.0).epsilon(1e-12));
    CHECK(find_entry(r, "eigen corr coeff (cross), lag 0").analytic == -0.5);

    const SnrConfig low{std::pow(10.0, -2.0), s.mimo};
    const SnrConfig high{std::pow(10.0, 3.0), s.mimo};
    CHECK(find_entry(r, "imi mean, snr -20 dB").analytic ==
          doctest::Approx(imi_mean(low)).epsilon(1e-12));
    CHECK(find_entry(r, "imi corr coeff (low snr), lag 1, snr -20 dB").analytic ==
          doctest::Approx(rho1 * rho1).epsilon(1e-12));
    // the cached series table agrees with the per-lag exact pipeline
    CHECK(find_entry(r, "imi corr coeff (exact), lag 1, snr 30 dB").analytic ==
          doctest::Approx(imi_corr(high, 1, rho1, ImiRegime::exact).coeff).epsilon(1e-6));
    CHECK(find_entry(r, "imi corr coeff (exact), lag 4, snr -20 dB").analytic ==
          doctest::Approx(imi_corr(low, 4, corr_mag(s.scattering, 4), ImiRegime::exact).coeff)
              .epsilon(1e-6));
    // square system: gaussian-approximation rows are reported, not asserted
    CHECK(!find_entry(r, "imi gaussian lcr, offset +0.00 sigma, snr 30 dB").asserted);
    CHECK(!find_entry(r, "imi gaussian aod, offset +0.00 sigma, snr 30 dB").asserted);

    // byte-identical reruns for a fixed seed
    const ValidationReport r2 = run_validation(s);
    REQUIRE(r2.entries.size() == r.entries.size());
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        CHECK(r2.entries[i].quantity == r.entries[i].quantity);
        CHECK(r2.entries[i].analytic == r.entries[i].analytic);
        CHECK(r2.entries[i].empirical == r.entries[i].empirical);
        CHECK(r2.entries[i].standard_error == r.entries[i].standard_error);
        CHECK(r2.entries[i].pass == r.entries[i].pass);
    }
}

TEST_CASE("validation survives a two-sample scenario") {
    Scenario d;
    d.name = "degenerate";
    d.scattering = bundled_isotropic();
    d.mimo = {2, 2};
    d.snr_db = {0.0};
    d.lags = {0, 1};
    d.eigen_thresholds = {1.0};
    d.imi_sigma_offsets = {0.0};
    d.length = 2;
    d.seed = 9;
    ValidationReport r;
    CHECK_NOTHROW(r = run_validation(d));
    CHECK(r.entries.size() >= 10);
    CHECK(r.length == 2);
}

} // TEST_SUITE
