#include "mimostat/channel.hpp"

#include "mimostat/rng.hpp"
#include "mimostat/specfun.hpp"

#include <fftw3.h>

#include <cmath>
#include <stdexcept>

namespace mimostat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

} // namespace

void ScatteringModel::validate() const {
    if (clusters.empty()) throw std::invalid_argument("ScatteringModel: no clusters");
    double wsum = 0.0;
    for (const ScatteringCluster& c : clusters) {
        if (!(c.weight > 0.0) || c.weight > 1.0)
            throw std::invalid_argument("ScatteringModel: cluster weight must be in (0,1]");
        if (!(c.concentration >= 0.0))
            throw std::invalid_argument("ScatteringModel: concentration must be >= 0");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw std::invalid_argument("ScatteringModel: cluster weights must sum to 1");
    if (!(doppler_hz > 0.0)) throw std::invalid_argument("ScatteringModel: doppler_hz must be > 0");
    if (!(symbol_time_s > 0.0))
        throw std::invalid_argument("ScatteringModel: symbol_time_s must be > 0");
}

ScatteringModel isotropic_scattering(double doppler_hz, double symbol_time_s) {
    ScatteringModel m;
    m.clusters.push_back({1.0, 0.0, 0.0});
    m.doppler_hz = doppler_hz;
    m.symbol_time_s = symbol_time_s;
    return m;
}

void MimoConfig::validate() const {
    if (n_tx < 1 || n_rx < 1)
        throw std::invalid_argument("MimoConfig: antenna counts must be >= 1");
}

std::complex<double> corr_coeff_h(const ScatteringModel& model, long lag) {
    if (lag == 0) return 1.0;
    const double b = 2.0 * kPi * model.doppler_hz * std::labs(lag) * model.symbol_time_s;
    std::complex<double> acc = 0.0;
    for (const ScatteringCluster& c : model.clusters) {
        const double k = c.concentration;
        const std::complex<double> inner(k * k - b * b, 2.0 * k * b * std::cos(c.mean_aoa));
        // I_0(sqrt(inner))/I_0(k) in e^{Re}-scaled form: the principal root has
        // 0 <= Re sqrt(inner) <= k, so the exponent never grows
        const std::complex<double> z = std::sqrt(inner);
        const std::complex<double> num = detail::bessel_i_scaled_cplx(0, z);
        const double den = bessel_i_scaled(0, k);
        acc += c.weight * num * std::exp(z.real() - k) / den;
    }
    return lag > 0 ? acc : std::conj(acc);
}

double corr_mag(const ScatteringModel& model, long lag) {
    return std::abs(corr_coeff_h(model, lag));
}

ChannelPath generate_path(const ScatteringModel& model, const MimoConfig& mimo,
                          std::size_t length, std::uint64_t seed, SpectrumDiagnostics& diag) {
    model.validate();
    mimo.validate();
    if (length < 2 || length > (std::size_t{1} << 26))
        throw std::invalid_argument("generate_path: length must be in [2, 2^26]");

    const std::size_t big_l = length;
    const std::size_t period = 2 * big_l;

    fftw_complex* buf = fftw_alloc_complex(period);
    if (!buf) throw std::bad_alloc();
    auto* cbuf = reinterpret_cast<std::complex<double>*>(buf);
    fftw_plan fwd = fftw_plan_dft_1d(static_cast<int>(period), buf, buf, FFTW_FORWARD,
                                     FFTW_ESTIMATE);
    fftw_plan bwd = fftw_plan_dft_1d(static_cast<int>(period), buf, buf, FFTW_BACKWARD,
                                     FFTW_ESTIMATE);

    // circulant extension of the ACF: exact for lags <= L/2, cosine^2 taper to
    // zero across (L/2, L] so the spectrum stays (almost) nonnegative
    const std::size_t exact = big_l / 2;
    cbuf[0] = 1.0;
    for (std::size_t i = 1; i <= big_l; ++i) {
        std::complex<double> c = corr_coeff_h(model, static_cast<long>(i));
        if (i > exact) {
            const double u = static_cast<double>(i - exact) / static_cast<double>(big_l - exact);
            const double w = std::cos(0.5 * kPi * u);
            c *= w * w;
        }
        cbuf[i] = c;
        if (i < big_l) cbuf[period - i] = std::conj(c);
    }
    fftw_execute(fwd);

    // clip negative bins, rescale so the synthesized power is exactly unity
    double neg_mass = 0.0, pos_mass = 0.0, min_value = 0.0;
    for (std::size_t k = 0; k < period; ++k) {
        const double v = cbuf[k].real();
        if (v < min_value) min_value = v;
        if (v < 0.0)
            neg_mass -= v;
        else
            pos_mass += v;
    }
    diag.min_value = min_value / static_cast<double>(period);
    diag.fraction_clipped = neg_mass / static_cast<double>(period);
    // the realized-ACF bias is about half the clipped fraction; keeping it under
    // 1/sqrt(L) holds the bias to ~10% of the 5/sqrt(L) statistical tolerance
    if (diag.fraction_clipped > 1.0 / std::sqrt(static_cast<double>(big_l))) {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
        throw std::runtime_error("generate_path: clipped spectral mass too large");
    }

    std::vector<double> amp(period);
    const double rescale = static_cast<double>(period) / pos_mass;
    for (std::size_t k = 0; k < period; ++k) {
        const double v = cbuf[k].real();
        amp[k] = v > 0.0 ? std::sqrt(v * rescale / static_cast<double>(period)) : 0.0;
    }

    ChannelPath path;
    path.length = big_l;
    path.n_rx = mimo.n_rx;
    path.n_tx = mimo.n_tx;
    path.spacing_s = model.symbol_time_s;
    path.seed = seed;
    path.samples.resize(big_l * static_cast<std::size_t>(mimo.n_rx) * mimo.n_tx);

    const int nsub = mimo.n_rx * mimo.n_tx;
    const double inv_sqrt2 = 0.70710678118654752440084436210484904;
    for (int s = 0; s < nsub; ++s) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        for (std::size_t k = 0; k < period; ++k) {
            const double re = rng.next_gaussian();
            const double im = rng.next_gaussian();
            cbuf[k] = amp[k] * inv_sqrt2 * std::complex<double>(re, im);
        }
        fftw_execute(bwd);
        const int r = s / mimo.n_tx;
        const int t = s % mimo.n_tx;
        for (std::size_t l = 0; l < big_l; ++l)
            path.samples[(l * mimo.n_rx + r) * mimo.n_tx + t] = cbuf[l];
    }

    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(buf);
    return path;
}

ChannelPath generate_path(const ScatteringModel& model, const MimoConfig& mimo,
                          std::size_t length, std::uint64_t seed) {
    SpectrumDiagnostics diag;
    return generate_path(model, mimo, length, seed, diag);
}

} // namespace mimostat
