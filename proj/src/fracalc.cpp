#include "fpde/fracalc.hpp"

#include <cmath>

#include "fpde/errors.hpp"
#include "fpde/specfun.hpp"

namespace fpde {

FracOrder FracOrder::of(const ParamTable& p, const ExponentVector& sym) {
    FracOrder o;
    o.sym = sym;
    o.mu = sym.value(p);
    if (!(o.mu > Rational(0)))
        throw DomainError("fractional order must be positive, got " + o.mu.str());
    o.n = static_cast<int>(o.mu.ceil());
    return o;
}

FracOrder FracOrder::of(const ParamTable& p, const std::string& param_name) {
    return of(p, ExponentVector::param(p, param_name));
}

FracOrder FracOrder::of(const ParamTable& p, const Rational& constant_order) {
    return of(p, ExponentVector::constant(p, constant_order));
}

double gamma_ratio(const Rational& p, const Rational& q) {
    bool pp = p.is_nonpos_integer();
    bool qp = q.is_nonpos_integer();
    if (pp && qp) {
        // Gamma(q+d)/Gamma(q) = q (q+1) ... (q+d-1) survives the double pole.
        std::int64_t d = (p - q).floor(); // both integers, difference exact
        Rational prod(1);
        if (d >= 0) {
            for (std::int64_t i = 0; i < d; ++i) prod = prod * (q + Rational(i));
            return prod.to_double();
        }
        for (std::int64_t i = 0; i < -d; ++i) prod = prod * (p + Rational(i));
        return 1.0 / prod.to_double();
    }
    if (qp) return 0.0;
    if (pp) throw PoleError("Gamma(" + p.str() + ") pole is not cancelled by Gamma(" + q.str() + ")");
    double pd = p.to_double(), qd = q.to_double();
    double sgn = static_cast<double>(gamma_sign(pd) * gamma_sign(qd));
    return sgn * std::exp(log_abs_gamma(pd) - log_abs_gamma(qd));
}

namespace {

int require_var(const GenSeries& s, const std::string& var) {
    int vi = s.var_index(var);
    if (vi < 0) throw VariableMismatchError("series has no variable " + var);
    return vi;
}

GenSeries like(const GenSeries& s) {
    GenSeries r = GenSeries::zero(s.params(), s.vars());
    for (std::size_t i = 0; i < s.vars().size(); ++i) {
        r.set_truncation(s.vars()[i], s.truncation()[i]);
        r.set_frontier(s.vars()[i], s.frontier()[i]);
    }
    if (s.truncated()) r.mark_truncated();
    return r;
}

} // namespace

GenSeries rl_integral(const GenSeries& s, const std::string& var, const FracOrder& mu) {
    int vi = require_var(s, var);
    const ParamTable& p = *s.params();
    GenSeries r = like(s);
    bool dropped = false;
    for (const auto& [k, c] : s.terms()) {
        Rational g = k[vi].value(p);
        if (!(g > Rational(-1)))
            throw DomainError("fractional integral needs exponent > -1, got " + var + "^{" +
                              k[vi].str(p) + "}");
        double ratio = gamma_ratio(g + Rational(1), g + mu.mu + Rational(1));
        ExpKey nk = k;
        nk[vi] = k[vi] + mu.sym;
        if (!r.within_truncation(nk)) {
            dropped = true;
            continue;
        }
        r.add_term(nk, c.scaled(ratio));
    }
    double f = s.frontier()[vi] + mu.mu.to_double();
    if (dropped) {
        f = std::min(f, s.truncation()[vi].to_double());
        r.mark_truncated();
    }
    r.set_frontier(var, f);
    return r;
}

GenSeries caputo_deriv(const GenSeries& s, const std::string& var, const FracOrder& mu) {
    int vi = require_var(s, var);
    const ParamTable& p = *s.params();
    GenSeries r = like(s);
    for (const auto& [k, c] : s.terms()) {
        Rational g = k[vi].value(p);
        if (g.is_integer() && g >= Rational(0) && g <= Rational(mu.n - 1)) continue;
        if (g > Rational(mu.n - 1)) {
            double ratio = gamma_ratio(g + Rational(1), g - mu.mu + Rational(1));
            ExpKey nk = k;
            nk[vi] = k[vi] - mu.sym;
            r.add_term(nk, c.scaled(ratio));
            continue;
        }
        throw UndefinedCaputoError("Caputo derivative of order " + mu.mu.str() +
                                   " undefined on " + var + "^{" + k[vi].str(p) + "}");
    }
    r.set_frontier(var, s.frontier()[vi] - mu.mu.to_double());
    return r;
}

GenSeries rl_deriv(const GenSeries& s, const std::string& var, const FracOrder& mu) {
    int vi = require_var(s, var);
    const ParamTable& p = *s.params();
    GenSeries r = like(s);
    for (const auto& [k, c] : s.terms()) {
        Rational g = k[vi].value(p);
        if (!(g > Rational(-1)))
            throw DomainError("Riemann-Liouville derivative needs exponent > -1, got " + var +
                              "^{" + k[vi].str(p) + "}");
        double ratio = gamma_ratio(g + Rational(1), g - mu.mu + Rational(1));
        if (ratio == 0.0) continue;
        ExpKey nk = k;
        nk[vi] = k[vi] - mu.sym;
        r.add_term(nk, c.scaled(ratio));
    }
    r.set_frontier(var, s.frontier()[vi] - mu.mu.to_double());
    return r;
}

GenSeries sequential_deriv(const GenSeries& s, const std::string& var, const FracOrder& base,
                           int folds, DerivKind kind) {
    if (folds < 0) throw DomainError("sequential derivative needs folds >= 0");
    GenSeries r = s;
    for (int i = 0; i < folds; ++i) {
        try {
            r = kind == DerivKind::Caputo ? caputo_deriv(r, var, base) : rl_deriv(r, var, base);
        } catch (const UndefinedCaputoError& e) {
            throw UndefinedCaputoError("stage " + std::to_string(i + 1) + " of " +
                                       std::to_string(folds) + ": " + e.what());
        } catch (const DomainError& e) {
            throw DomainError("stage " + std::to_string(i + 1) + " of " + std::to_string(folds) +
                              ": " + e.what());
        }
    }
    return r;
}

} // namespace fpde
