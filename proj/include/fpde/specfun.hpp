#ifndef FPDE_SPECFUN_HPP
#define FPDE_SPECFUN_HPP

#include <functional>

#include "fpde/errors.hpp"

namespace fpde {

// Real gamma function, Lanczos approximation (g = 7, 9 coefficients) with the
// reflection formula for arguments below 1/2.  Throws PoleError at 0, -1, -2, ...
double gamma_real(double x);

// log|Gamma(x)| and the sign of Gamma(x); defined off the poles.
double log_abs_gamma(double x);
int gamma_sign(double x);

struct MLParams {
    double alpha;
    double beta;
    MLParams(double a, double b) : alpha(a), beta(b) {
        if (!(a > 0.0)) throw DomainError("Mittag-Leffler parameter alpha must be positive");
        if (!(b > 0.0)) throw DomainError("Mittag-Leffler parameter beta must be positive");
    }
};

// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) by direct summation
// with a running geometric tail bound.
double mittag_leffler(const MLParams& p, double z, double tol = 1e-14, int term_cap = 10000);

// n-th derivative of E_{alpha,beta} at z:
//   E^(n)(z) = sum_{k>=0} (k+n)!/k! * z^k / Gamma(alpha*(k+n)+beta)
double ml_derivative(const MLParams& p, int n, double z, double tol = 1e-14, int term_cap = 10000);

struct FracTrigParams {
    double gamma;
    double lambda;
    FracTrigParams(double g, double l) : gamma(g), lambda(l) {
        if (!(g > 0.0)) throw DomainError("fractional trig order must be positive");
    }
};

// Fractional cosine/sine of order gamma:
//   cos_g(lambda, t) = sum (-1)^k lambda^(2k)   t^(2k g)    / Gamma(2k g + 1)
//   sin_g(lambda, t) = sum (-1)^k lambda^(2k+1) t^((2k+1)g) / Gamma((2k+1)g + 1)
// Requires t >= 0.
double frac_cos(const FracTrigParams& p, double t, double tol = 1e-14);
double frac_sin(const FracTrigParams& p, double t, double tol = 1e-14);

// eps_n(t, a) = t^(alpha n + beta - 1) E^(n)_{alpha,beta}(sign * a * t^alpha),
// sign in {+1, -1}; requires t > 0.
double epsilon_fn(int n, double t, double a, const MLParams& p, int sign);

// Finite-horizon Laplace transform integral(0..T) exp(-s t) f(t) dt with
// geometric panel grading toward t = 0 (ratio 1/2, depth 40) so integrable
// power singularities at the origin are resolved.  Throws QuadratureError if
// the accumulated error estimate exceeds tol.
double laplace_numeric(const std::function<double(double)>& f, double s, double T,
                       double tol = 1e-9);

} // namespace fpde

#endif
