#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace mimostat {

// Modified Bessel function of the first kind, integer order, complex argument.
// Ascending power series near the origin, uniform asymptotic expansion for
// large |z|. Throws std::overflow_error if the result is not representable,
// std::domain_error outside order <= 64, |z| <= 1e4.
std::complex<double> bessel_i(int order, std::complex<double> z);

// e^{-x} I_order(x) for real x >= 0; safe for arguments where I itself overflows.
double bessel_i_scaled(int order, double x);

// Associated Laguerre polynomial L_n^nu(x) by the three-term recurrence.
double laguerre(int n, int nu, double x);

// Orthonormal Laguerre function psi_n(x) = sqrt(n!/(n+nu)!) x^{nu/2} e^{-x/2} L_n^nu(x);
// the weighted recurrence keeps every iterate O(1) so n up to several thousand
// is stable. orthonormal_laguerre_row fills psi_0..psi_nmax at one abscissa.
double orthonormal_laguerre(int n, int nu, double x);
void orthonormal_laguerre_row(int nmax, int nu, double x, double* out);

// Upper incomplete gamma for positive integer a: (a-1)! e^{-z} sum_{k<a} z^k/k!.
double upper_gamma_int(int a, double z);

// log Gamma(a, z) for positive integer a, usable where the value overflows.
double log_upper_gamma_int(int a, double z);

// digamma at a positive integer: psi_k = H_{k-1} - euler_gamma.
double digamma_int(int k);

// Hurwitz zeta(2, q) for positive integer q: pi^2/6 - sum_{k<q} 1/k^2.
double zeta2(int q);

// Generalized hypergeometric 4F3(a; b; z) for z in [0,1) by term recurrence.
// Throws std::runtime_error if 1e6 terms do not converge with |z| > 0.999.
double hyper_4f3(const std::array<double, 4>& a, const std::array<double, 3>& b, double z);

// integral_0^inf x^k e^{-x} ln(1+omega x) dx   and the ln^2 variant.
double log_moment_integral(int k, double omega);
double log2_moment_integral(int k, double omega);

// Gaussian upper-tail probability Q(x).
double gaussian_q(double x);

enum class QuadKind { gauss_laguerre, adaptive_interval };

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    QuadKind kind = QuadKind::adaptive_interval;

    double integrate(const std::function<double(double)>& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

// n-point Gauss-Laguerre rule (weight e^{-x} on [0,inf)); weights sum to 1.
QuadratureRule gauss_laguerre_rule(int n);

// Composite 16-point Gauss-Legendre rule over [a,b] split into npanels panels.
QuadratureRule gauss_legendre_panels(double a, double b, int npanels);

// Same, with caller-chosen panel edges (edges.size() >= 2, strictly increasing).
QuadratureRule gauss_legendre_edges(const std::vector<double>& edges);

// Adaptive Gauss-Kronrod (7,15) integration of f over [a,b].
double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-12, int max_subdiv = 2000);

namespace detail {

// Neumaier compensated accumulator for the severely cancelling alternating sums.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

double log_factorial(int n);

// e^{-Re z} I_order(z) for complex z of any magnitude; never overflows for
// bounded order. Used where the |z| cap on bessel_i would bite (channel
// correlation at large lag) while only the e^{Re z}-scaled ratio is needed.
std::complex<double> bessel_i_scaled_cplx(int order, std::complex<double> z);

} // namespace detail

} // namespace mimostat
