#include "mimostat/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mimostat {

namespace detail {

double log_factorial(int n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(8193);
        t[0] = 0.0;
        long double acc = 0.0L;
        for (int k = 1; k < static_cast<int>(t.size()); ++k) {
            acc += std::log(static_cast<long double>(k));
            t[k] = static_cast<double>(acc);
        }
        return t;
    }();
    if (n < 0) throw std::domain_error("log_factorial: negative argument");
    if (n < static_cast<int>(table.size())) return table[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

} // namespace detail

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using cplx = std::complex<double>;
using lcplx = std::complex<long double>;

// ascending series sum_k (z/2)^{nu+2k} / (k! (k+nu)!), long double accumulation
cplx bessel_i_series(int nu, cplx z) {
    const lcplx half(static_cast<long double>(z.real()) / 2.0L,
                     static_cast<long double>(z.imag()) / 2.0L);
    const lcplx h2 = half * half;
    lcplx term = 1.0L;
    for (int k = 1; k <= nu; ++k) term *= half / static_cast<long double>(k);
    lcplx sum = term;
    for (int k = 1; k < 600; ++k) {
        term *= h2 / (static_cast<long double>(k) * static_cast<long double>(k + nu));
        sum += term;
        if (std::abs(term) < 1e-19L * std::abs(sum) && k > 4) break;
    }
    return cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
}

// large-argument expansion for Re z >= 0, Im z >= 0: both exponential terms,
// coefficients a_k(nu) = prod_m (4nu^2-(2m-1)^2) / (k! 8^k), truncated at the
// smallest term. When scaled, returns e^{-Re z} I_nu(z).
cplx bessel_i_asymptotic(int nu, cplx z, bool scaled) {
    const double fournu2 = 4.0 * nu * nu;
    cplx sum_plus = 1.0, sum_minus = 1.0;
    cplx zk = 1.0;
    double ak = 1.0;
    double smallest = std::numeric_limits<double>::max();
    for (int k = 1; k <= 40; ++k) {
        const double odd = 2.0 * k - 1.0;
        ak *= (fournu2 - odd * odd) / (8.0 * k);
        zk *= z;
        const double mag = std::abs(ak) / std::abs(zk);
        if (mag > smallest) break; // divergent tail reached
        smallest = mag;
        const cplx t = ak / zk;
        sum_minus += (k % 2 ? -t : t);
        sum_plus += t;
        if (mag < 1e-17) break;
    }
    // e^{+(nu+1/2) pi i} for 0 <= ph z <= pi/2
    const double phase = (nu + 0.5) * kPi;
    const cplx refl(std::cos(phase), std::sin(phase));
    const cplx pref = 1.0 / std::sqrt(2.0 * kPi * z);
    const cplx grow = scaled ? std::exp(cplx(0.0, z.imag())) : std::exp(z);
    const cplx decay = scaled ? std::exp(cplx(-2.0 * z.real(), -z.imag())) : std::exp(-z);
    return pref * (grow * sum_minus + refl * decay * sum_plus);
}

const double* gl16_nodes() {
    // Legendre P_16 roots on (-1,1), positive half, by Newton; mirrored by caller
    static const std::vector<double> half = [] {
        std::vector<double> x(8);
        const int n = 16;
        for (int i = 0; i < 8; ++i) {
            long double t = std::cos(kPi * (i + 0.75L) / (n + 0.5L));
            for (int it = 0; it < 100; ++it) {
                long double p0 = 1.0L, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    long double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const long double dp = n * (t * p1 - p0) / (t * t - 1.0L);
                const long double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-19L) break;
            }
            x[i] = static_cast<double>(t);
        }
        return x;
    }();
    return half.data();
}

const double* gl16_weights() {
    static const std::vector<double> w = [] {
        std::vector<double> wt(8);
        const double* xs = gl16_nodes();
        const int n = 16;
        for (int i = 0; i < 8; ++i) {
            const long double t = xs[i];
            long double p0 = 1.0L, p1 = t;
            for (int k = 2; k <= n; ++k) {
                long double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const long double dp = n * (t * p1 - p0) / (t * t - 1.0L);
            wt[i] = static_cast<double>(2.0L / ((1.0L - t * t) * dp * dp));
        }
        return wt;
    }();
    return w.data();
}

// Gauss-Kronrod (7,15) on [-1,1]
constexpr double kGkNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kGkWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GkResult {
    double integral;
    double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kGkNodes[i]);
        fv[14 - i] = f(c + h * kGkNodes[i]);
    }
    fv[7] = f(c);
    double kron = kGkWeights[7] * fv[7];
    for (int i = 0; i < 7; ++i) kron += kGkWeights[i] * (fv[i] + fv[14 - i]);
    double gauss = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 3; ++i) gauss += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    return {kron * h, std::abs(kron - gauss) * h};
}

double log_moment_core(int k, double omega, bool squared) {
    // normalized integrand exp(k ln x - x - ln k!); result rescaled by k!
    const double lf = detail::log_factorial(k);
    const double upper = k + 40.0 * std::sqrt(k + 1.0);
    auto f = [&](double x) -> double {
        if (x <= 0.0) return 0.0;
        const double lg = std::log1p(omega * x);
        return std::exp(k * std::log(x) - x - lf) * (squared ? lg * lg : lg);
    };
    // seed the adaptive pass with panels that straddle the ln kink at x ~ 1/omega
    // and the density peak at x ~ k
    std::vector<double> edges{0.0};
    const double kink = 1.0 / omega;
    if (kink < upper) {
        if (kink > 1e-12) edges.push_back(kink);
        if (10.0 * kink < upper) edges.push_back(10.0 * kink);
    }
    if (k > 0 && k < upper) edges.push_back(static_cast<double>(k));
    edges.push_back(upper);
    std::sort(edges.begin(), edges.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        total += adaptive_quad(f, edges[i], edges[i + 1], 1e-13, 4000);
    return total * std::exp(lf);
}

} // namespace

std::complex<double> bessel_i(int order, std::complex<double> z) {
    if (order < 0 || order > 64) throw std::domain_error("bessel_i: order must be in [0,64]");
    const double az = std::abs(z);
    if (az > 1e4) throw std::domain_error("bessel_i: |z| must be <= 1e4");
    if (az == 0.0) return order == 0 ? 1.0 : 0.0;

    // I_nu(-z) = (-1)^nu I_nu(z); I_nu(conj z) = conj I_nu(z). Fold into the
    // first quadrant so the asymptotic branch has a fixed reflection phase.
    bool negate = false, conjugate = false;
    if (z.real() < 0.0) {
        z = -z;
        negate = (order % 2) != 0;
    }
    if (z.imag() < 0.0) {
        z = std::conj(z);
        conjugate = true;
    }

    if (z.real() - 0.5 * std::log(2.0 * kPi * az) > 700.0)
        throw std::overflow_error("bessel_i: result exceeds double range");

    cplx r;
    // the ascending series cancels like e^{2 Im z}; past |z| ~ 22 it only has
    // enough digits left when the argument is close to the real axis
    if (az <= 22.0 || (az <= 30.0 && az - std::abs(z.real()) <= 1.0))
        r = bessel_i_series(order, z);
    else
        r = bessel_i_asymptotic(order, z, false);

    if (conjugate) r = std::conj(r);
    if (negate) r = -r;
    return r;
}

double bessel_i_scaled(int order, double x) {
    if (order < 0) throw std::domain_error("bessel_i_scaled: negative order");
    if (x < 0.0) throw std::domain_error("bessel_i_scaled: negative argument");
    if (x == 0.0) return order == 0 ? 1.0 : 0.0;
    if (x <= 30.0) {
        const long double half = static_cast<long double>(x) / 2.0L;
        const long double h2 = half * half;
        long double term = 1.0L;
        for (int k = 1; k <= order; ++k) term *= half / static_cast<long double>(k);
        long double sum = term;
        for (int k = 1; k < 200; ++k) {
            term *= h2 / (static_cast<long double>(k) * static_cast<long double>(k + order));
            sum += term;
            if (term < 1e-20L * sum) break;
        }
        return static_cast<double>(sum * std::exp(-static_cast<long double>(x)));
    }
    const double fournu2 = 4.0 * static_cast<double>(order) * order;
    double sum_minus = 1.0, sum_plus = 1.0, ak = 1.0, xk = 1.0;
    double smallest = std::numeric_limits<double>::max();
    for (int k = 1; k <= 40; ++k) {
        const double odd = 2.0 * k - 1.0;
        ak *= (fournu2 - odd * odd) / (8.0 * k);
        xk *= x;
        const double mag = std::abs(ak) / xk;
        if (mag > smallest) break;
        smallest = mag;
        sum_minus += (k % 2 ? -ak : ak) / xk;
        sum_plus += ak / xk;
        if (mag < 1e-18) break;
    }
    return (sum_minus + std::exp(-2.0 * x) * sum_plus) / std::sqrt(2.0 * kPi * x);
}

double laguerre(int n, int nu, double x) {
    if (n < 0 || n > 256) throw std::domain_error("laguerre: n must be in [0,256]");
    if (nu < 0) throw std::domain_error("laguerre: negative nu");
    if (n == 0) return 1.0;
    double lm1 = 1.0;
    double l = nu + 1.0 - x;
    for (int k = 1; k < n; ++k) {
        const double lp1 = ((2.0 * k + nu + 1.0 - x) * l - (k + nu) * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

void orthonormal_laguerre_row(int nmax, int nu, double x, double* out) {
    if (nmax < 0) return;
    double p0;
    if (x <= 0.0) {
        p0 = (nu == 0) ? 1.0 : 0.0;
    } else {
        p0 = std::exp(0.5 * (nu * std::log(x) - x - detail::log_factorial(nu)));
    }
    out[0] = p0;
    if (nmax == 0) return;
    double pm1 = 0.0, p = p0;
    for (int k = 0; k < nmax; ++k) {
        const double next = ((2.0 * k + nu + 1.0 - x) * p -
                             std::sqrt(static_cast<double>(k) * (k + nu)) * pm1) /
                            std::sqrt(static_cast<double>(k + 1) * (k + 1 + nu));
        pm1 = p;
        p = next;
        out[k + 1] = p;
    }
}

double orthonormal_laguerre(int n, int nu, double x) {
    std::vector<double> row(n + 1);
    orthonormal_laguerre_row(n, nu, x, row.data());
    return row[n];
}

double log_upper_gamma_int(int a, double z) {
    if (a < 1 || a > 512) throw std::domain_error("upper_gamma_int: a must be in [1,512]");
    if (z < 0.0) throw std::domain_error("upper_gamma_int: negative z");
    const double lfa = detail::log_factorial(a - 1);
    if (z == 0.0) return lfa;
    // log-sum-exp over k ln z - ln k!, normalized by the largest exponent
    const double lz = std::log(z);
    double emax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < a; ++k) emax = std::max(emax, k * lz - detail::log_factorial(k));
    double s = 0.0;
    for (int k = 0; k < a; ++k) s += std::exp(k * lz - detail::log_factorial(k) - emax);
    return lfa - z + emax + std::log(s);
}

double upper_gamma_int(int a, double z) { return std::exp(log_upper_gamma_int(a, z)); }

namespace detail {

std::complex<double> bessel_i_scaled_cplx(int order, std::complex<double> z) {
    if (order < 0 || order > 64)
        throw std::domain_error("bessel_i_scaled_cplx: order must be in [0,64]");
    if (std::abs(z) == 0.0) return order == 0 ? 1.0 : 0.0;
    bool negate = false, conjugate = false;
    double unscale = 0.0; // folding z -> -z changes the scale factor by e^{-2 Re z}
    if (z.real() < 0.0) {
        unscale = -2.0 * z.real();
        z = -z;
        negate = (order % 2) != 0;
    }
    if (z.imag() < 0.0) {
        z = std::conj(z);
        conjugate = true;
    }
    const double az = std::abs(z);
    cplx r;
    if (az <= 22.0 || (az <= 30.0 && az - std::abs(z.real()) <= 1.0))
        r = bessel_i_series(order, z) * std::exp(-z.real());
    else
        r = bessel_i_asymptotic(order, z, true);
    if (conjugate) r = std::conj(r);
    if (negate) r = -r;
    return r * std::exp(unscale);
}

} // namespace detail

double digamma_int(int k) {
    if (k < 1) throw std::domain_error("digamma_int: k must be >= 1");
    constexpr double euler_gamma = 0.57721566490153286060651209008240243;
    double h = 0.0;
    for (int j = 1; j < k; ++j) h += 1.0 / j;
    return h - euler_gamma;
}

double zeta2(int q) {
    if (q < 1) throw std::domain_error("zeta2: q must be >= 1");
    constexpr double zeta_2 = 1.64493406684822643647241516664602519;
    double s = 0.0;
    for (int k = q - 1; k >= 1; --k) s += 1.0 / (static_cast<double>(k) * k);
    return zeta_2 - s;
}

double hyper_4f3(const std::array<double, 4>& a, const std::array<double, 3>& b, double z) {
    if (z < 0.0 || z >= 1.0) throw std::domain_error("hyper_4f3: z must be in [0,1)");
    for (double bj : b)
        if (bj <= 0.0 && bj == std::floor(bj))
            throw std::domain_error("hyper_4f3: nonpositive integer b parameter");
    double term = 1.0, sum = 1.0;
    for (long p = 0; p < 1000000; ++p) {
        double num = 1.0, den = 1.0;
        for (double ai : a) num *= ai + p;
        for (double bj : b) den *= bj + p;
        term *= num / den * z / (p + 1.0);
        if (term == 0.0) return sum; // a terminating (negative-integer a) series
        sum += term;
        if (std::abs(term) < 1e-14 * std::abs(sum)) return sum;
    }
    if (z > 0.999) throw std::runtime_error("hyper_4f3: series did not converge");
    return sum;
}

double log_moment_integral(int k, double omega) {
    if (k < 0 || k > 256) throw std::domain_error("log_moment_integral: k must be in [0,256]");
    if (!(omega > 0.0)) throw std::domain_error("log_moment_integral: omega must be > 0");
    return log_moment_core(k, omega, false);
}

double log2_moment_integral(int k, double omega) {
    if (k < 0 || k > 256) throw std::domain_error("log2_moment_integral: k must be in [0,256]");
    if (!(omega > 0.0)) throw std::domain_error("log2_moment_integral: omega must be > 0");
    return log_moment_core(k, omega, true);
}

double gaussian_q(double x) {
    return 0.5 * std::erfc(x * 0.70710678118654752440084436210484904);
}

QuadratureRule gauss_laguerre_rule(int n) {
    if (n < 2 || n > 192) throw std::domain_error("gauss_laguerre_rule: n must be in [2,192]");
    QuadratureRule rule;
    rule.kind = QuadKind::gauss_laguerre;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    long double x = 0.0L;
    for (int i = 0; i < n; ++i) {
        // standard initial guesses, then Newton on the nu = 0 recurrence
        if (i == 0)
            x = 3.0L / (1.0L + 2.4L * n);
        else if (i == 1)
            x += 15.0L / (1.0L + 2.5L * n);
        else
            x += (1.0L + 2.55L * (i - 1)) / (1.9L * (i - 1)) * (x - rule.nodes[i - 2]);
        long double p = 0.0L, pm1 = 0.0L;
        for (int it = 0; it < 200; ++it) {
            p = 1.0L;
            pm1 = 0.0L;
            for (int k = 0; k < n; ++k) {
                const long double pp1 = ((2.0L * k + 1.0L - x) * p - k * pm1) / (k + 1.0L);
                pm1 = p;
                p = pp1;
            }
            const long double dp = n * (p - pm1) / x; // L_n' = n (L_n - L_{n-1}) / x
            const long double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-18L * std::max(x, 1.0L)) break;
        }
        // recompute L_{n-1} at the converged node for the weight
        // w_i = x_i / (n L_{n-1}(x_i))^2, from L_{n+1}(x_i) = -n L_{n-1}(x_i)/(n+1)
        p = 1.0L;
        pm1 = 0.0L;
        for (int k = 0; k < n; ++k) {
            const long double pp1 = ((2.0L * k + 1.0L - x) * p - k * pm1) / (k + 1.0L);
            pm1 = p;
            p = pp1;
        }
        rule.nodes[i] = static_cast<double>(x);
        rule.weights[i] = static_cast<double>(x / (static_cast<long double>(n) * n * pm1 * pm1));
    }
    return rule;
}

QuadratureRule gauss_legendre_edges(const std::vector<double>& edges) {
    if (edges.size() < 2) throw std::domain_error("gauss_legendre_edges: need >= 2 edges");
    QuadratureRule rule;
    rule.kind = QuadKind::adaptive_interval;
    const double* xs = gl16_nodes();
    const double* ws = gl16_weights();
    rule.nodes.reserve(16 * (edges.size() - 1));
    rule.weights.reserve(16 * (edges.size() - 1));
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double a = edges[e], b = edges[e + 1];
        if (!(b > a)) throw std::domain_error("gauss_legendre_edges: edges must increase");
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 7; i >= 0; --i) {
            rule.nodes.push_back(c - h * xs[i]);
            rule.weights.push_back(h * ws[i]);
        }
        for (int i = 0; i < 8; ++i) {
            rule.nodes.push_back(c + h * xs[i]);
            rule.weights.push_back(h * ws[i]);
        }
    }
    return rule;
}

QuadratureRule gauss_legendre_panels(double a, double b, int npanels) {
    if (npanels < 1) throw std::domain_error("gauss_legendre_panels: npanels must be >= 1");
    std::vector<double> edges(npanels + 1);
    for (int i = 0; i <= npanels; ++i)
        edges[i] = a + (b - a) * static_cast<double>(i) / npanels;
    return gauss_legendre_edges(edges);
}

double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, int max_subdiv) {
    struct Seg {
        double a, b, integral, error;
    };
    GkResult first = gk15(f, a, b);
    std::vector<Seg> segs{{a, b, first.integral, first.error}};
    double total = first.integral, toterr = first.error;
    int splits = 0;
    while (toterr > rel_tol * std::max(std::abs(total), 1e-300) && splits < max_subdiv) {
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        const Seg s = segs[worst];
        if (s.b - s.a < 1e-15 * (std::abs(s.a) + 1.0)) break;
        const double mid = 0.5 * (s.a + s.b);
        const GkResult left = gk15(f, s.a, mid);
        const GkResult right = gk15(f, mid, s.b);
        total += left.integral + right.integral - s.integral;
        toterr += left.error + right.error - s.error;
        segs[worst] = {s.a, mid, left.integral, left.error};
        segs.push_back({mid, s.b, right.integral, right.error});
        ++splits;
    }
    return total;
}

} // namespace mimostat
