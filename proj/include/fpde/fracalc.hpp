#ifndef FPDE_FRACALC_HPP
#define FPDE_FRACALC_HPP

#include "fpde/series.hpp"

namespace fpde {

// Fractional order: symbolic form (affine in the declared parameters) plus
// the exact numeric value and the integer ceiling n used by the derivative
// branch rules.
struct FracOrder {
    ExponentVector sym;
    Rational mu; // > 0
    int n;       // smallest integer >= mu

    static FracOrder of(const ParamTable& p, const ExponentVector& sym);
    static FracOrder of(const ParamTable& p, const std::string& param_name);
    static FracOrder of(const ParamTable& p, const Rational& constant_order);
};

// Gamma(p)/Gamma(q) for exact rational arguments.  Pole handling:
//   - q at a pole, p regular: 0 (reciprocal-gamma convention);
//   - both at poles: finite limit value Gamma(q+d)/Gamma(q) = (q)_d, exact;
//   - p at a pole, q regular: PoleError (the ratio is genuinely infinite).
double gamma_ratio(const Rational& p, const Rational& q);

// Termwise Riemann-Liouville integral of order mu in `var`:
//   t^g -> Gamma(g+1)/Gamma(g+mu+1) t^{g+mu},  requires g > -1 on every term.
GenSeries rl_integral(const GenSeries& s, const std::string& var, const FracOrder& mu);

// Termwise Caputo derivative of order mu in `var`:
//   g in {0..n-1} integral     -> term annihilated;
//   g > n-1                    -> Gamma(g+1)/Gamma(g-mu+1) t^{g-mu};
//   otherwise                  -> UndefinedCaputoError.
GenSeries caputo_deriv(const GenSeries& s, const std::string& var, const FracOrder& mu);

// Termwise Riemann-Liouville derivative of order mu in `var`:
//   requires g > -1; t^g -> Gamma(g+1)/Gamma(g-mu+1) t^{g-mu}, where a pole
//   of Gamma(g-mu+1) kills the term.
GenSeries rl_deriv(const GenSeries& s, const std::string& var, const FracOrder& mu);

enum class DerivKind { Caputo, RiemannLiouville };

// folds-fold composition of the single derivative of order `base`.  This is
// NOT the single derivative of order folds*base: the composition annihilates
// every power any intermediate stage maps to an admissible integer, so e.g.
// (D^b)^2 x^b = 0 while D^{2b} x^b is undefined.
GenSeries sequential_deriv(const GenSeries& s, const std::string& var, const FracOrder& base,
                           int folds, DerivKind kind = DerivKind::Caputo);

} // namespace fpde

#endif
