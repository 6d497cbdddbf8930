#include "fpde/fode.hpp"

#include "fpde/errors.hpp"
#include "fpde/fracalc.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <set>

namespace fpde {

namespace {

// Relative residual tolerance of the post-march consistency check.
constexpr double kMarchTol = 1e-9;
// Gauss-Newton settings for the power-law ansatz.
constexpr int kAnsatzStarts = 48;
constexpr int kAnsatzIters = 120;
constexpr unsigned kAnsatzSeed = 20260814u;

double coeff_at(const std::map<Rational, double>& d, const Rational& e) {
    auto it = d.find(e);
    return it == d.end() ? 0.0 : it->second;
}

// One Caputo stage on t^g: 0 when the stage annihilates the power, nullopt
// when the derivative is undefined there.
std::optional<double> caputo_stage(const Rational& g, const Rational& mu, int n) {
    if (g.is_integer() && g.num() >= 0 && g.num() <= n - 1) return 0.0;
    if (g > Rational(n - 1)) return gamma_ratio(g + Rational(1), g - mu + Rational(1));
    return std::nullopt;
}

std::optional<double> fold_ratio(Rational g, const Rational& mu, int n, int folds) {
    double r = 1.0;
    for (int i = 0; i < folds; ++i) {
        auto s = caputo_stage(g, mu, n);
        if (!s) return std::nullopt;
        if (*s == 0.0) return 0.0;
        r *= *s;
        g = g - mu;
    }
    return r;
}

struct LhsTerm {
    Rational total;
    double lambda = 0.0;
    Rational mu;
    int n = 1;
    int folds = 1;
};

// Preprocessed equation: dominant derivative, everything else below it, and
// the affine split c0 + lin.K of the polynomial right side.
struct EqScheme {
    LhsTerm top;
    std::vector<LhsTerm> lower;
    std::vector<Rational> free_exps; // annihilated by top: the IC slots
    std::vector<double> ic_scale;    // coefficient = IC value / scale
    double c0 = 0.0;
    std::vector<double> lin;
};

EqScheme build_scheme(const FODESystem& sys, const FODEEquation& eq, int k) {
    EqScheme sc;
    std::vector<LhsTerm> terms;
    for (const auto& t : eq.lhs) {
        if (t.lambda == 0.0) continue;
        if (t.kind != DerivKind::Caputo)
            throw DomainError("series marching handles Caputo left sides only (equation " +
                              std::to_string(k + 1) + ")");
        if (t.folds < 1) throw DomainError("time derivative needs folds >= 1");
        if (t.folds > 1 && t.base.n != 1)
            throw DomainError("sequential time orders need a base in (0,1]");
        terms.push_back({t.base.mu * Rational(t.folds), t.lambda, t.base.mu, t.base.n, t.folds});
    }
    if (terms.empty())
        throw DomainError("equation " + std::to_string(k + 1) + " has an empty left side");
    std::sort(terms.begin(), terms.end(),
              [](const LhsTerm& a, const LhsTerm& b) { return a.total < b.total; });
    sc.top = terms.back();
    terms.pop_back();
    for (const auto& t : terms) {
        if (t.total == sc.top.total)
            throw DomainError("two left-side terms of equal order " + std::to_string(k + 1));
        sc.lower.push_back(t);
    }
    for (const auto& rd : eq.rhs_derivs)
        if (rd.coef != 0.0 && !(rd.order.mu < sc.top.total))
            throw DomainError("right-side derivative order must sit below the top order");

    // IC slots: exponents the top derivative annihilates.
    if (sc.top.folds > 1) {
        for (int i = 0; i < sc.top.folds; ++i) {
            Rational e = sc.top.mu * Rational(i);
            sc.free_exps.push_back(e);
            sc.ic_scale.push_back(gamma_ratio(e + Rational(1), Rational(1)));
        }
    } else {
        double fact = 1.0;
        for (int i = 0; i < sc.top.n; ++i) {
            sc.free_exps.push_back(Rational(i));
            sc.ic_scale.push_back(fact);
            fact *= static_cast<double>(i + 1);
        }
    }

    sc.lin.assign(static_cast<std::size_t>(sys.unknown_count()), 0.0);
    for (const auto& [expo, c] : eq.psi.terms()) {
        int deg = 0, which = -1;
        for (std::size_t l = 0; l < expo.size(); ++l) {
            deg += expo[l];
            if (expo[l] > 0) which = static_cast<int>(l);
        }
        if (deg == 0)
            sc.c0 += c;
        else if (deg == 1)
            sc.lin[static_cast<std::size_t>(which)] += c;
        else
            throw DomainError("series marching needs an affine right side (equation " +
                              std::to_string(k + 1) + ")");
    }
    return sc;
}

std::set<Rational> build_lattice(const FODESystem& sys, const std::vector<EqScheme>& sch,
                                 const Rational& trunc) {
    std::set<Rational> lat;
    auto push = [&](const Rational& e) {
        if (e <= trunc && lat.insert(e).second) {
            if (static_cast<int>(lat.size()) > kLatticeCap)
                throw LatticeError("exponent lattice needs more than " +
                                   std::to_string(kLatticeCap) +
                                   " points below the truncation bound");
            return true;
        }
        return false;
    };
    std::vector<Rational> steps;
    for (std::size_t k = 0; k < sch.size(); ++k) {
        const EqScheme& sc = sch[k];
        bool affine = sc.c0 != 0.0 ||
                      std::any_of(sc.lin.begin(), sc.lin.end(), [](double v) { return v != 0.0; });
        if (affine) steps.push_back(sc.top.total);
        for (const auto& lt : sc.lower) steps.push_back(sc.top.total - lt.total);
        for (const auto& rd : sys.eqs[k].rhs_derivs)
            if (rd.coef != 0.0) steps.push_back(sc.top.total - rd.order.mu);
    }
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

    std::vector<Rational> work;
    auto seed = [&](const Rational& e) {
        if (push(e)) work.push_back(e);
    };
    seed(Rational(0));
    for (const auto& sc : sch)
        for (const auto& e : sc.free_exps) seed(e);
    while (!work.empty()) {
        Rational p = work.back();
        work.pop_back();
        for (const auto& st : steps)
            if (push(p + st)) work.push_back(p + st);
    }
    return lat;
}

} // namespace

FODESolution solve_series(const FODESystem& sys, const FODEInitialData& ics,
                          const Rational& truncation) {
    const int m = sys.unknown_count();
    if (m <= 0 || static_cast<int>(sys.eqs.size()) != m)
        throw DomainError("system must carry one equation per unknown");
    if (static_cast<int>(ics.values.size()) != m)
        throw DomainError("initial data must have one row per unknown");

    std::vector<EqScheme> sch;
    sch.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        sch.push_back(build_scheme(sys, sys.eqs[static_cast<std::size_t>(k)], k));
        if (ics.values[static_cast<std::size_t>(k)].size() != sch.back().free_exps.size())
            throw DomainError("unknown " + std::to_string(k + 1) + " needs " +
                              std::to_string(sch.back().free_exps.size()) + " initial values");
    }

    std::set<Rational> lattice = build_lattice(sys, sch, truncation);
    std::vector<std::map<Rational, double>> d(static_cast<std::size_t>(m));

    for (const Rational& nu : lattice) {
        for (int k = 0; k < m; ++k) {
            const EqScheme& sc = sch[static_cast<std::size_t>(k)];
            auto& dk = d[static_cast<std::size_t>(k)];
            auto slot = std::find(sc.free_exps.begin(), sc.free_exps.end(), nu);
            if (slot != sc.free_exps.end()) {
                std::size_t i = static_cast<std::size_t>(slot - sc.free_exps.begin());
                double v = ics.values[static_cast<std::size_t>(k)][i] / sc.ic_scale[i];
                if (v != 0.0) dk[nu] = v;
                continue;
            }
            auto rtop = fold_ratio(nu, sc.top.mu, sc.top.n, sc.top.folds);
            if (!rtop || *rtop == 0.0) continue; // no row determines this power
            Rational img = nu - sc.top.total;
            double rhs = img.is_zero() ? sc.c0 : 0.0;
            for (int l = 0; l < m; ++l)
                if (sc.lin[static_cast<std::size_t>(l)] != 0.0)
                    rhs += sc.lin[static_cast<std::size_t>(l)] *
                           coeff_at(d[static_cast<std::size_t>(l)], img);
            for (const auto& rd : sys.eqs[static_cast<std::size_t>(k)].rhs_derivs) {
                if (rd.coef == 0.0) continue;
                int flat = sys.unknown.at(static_cast<std::size_t>(rd.comp))
                               .at(static_cast<std::size_t>(rd.j));
                Rational src = img + rd.order.mu;
                double v = coeff_at(d[static_cast<std::size_t>(flat)], src);
                if (v == 0.0) continue;
                auto r = fold_ratio(src, rd.order.mu, rd.order.n, 1);
                if (!r)
                    throw InconsistentSystemError(
                        "right-side derivative undefined on a populated power t^" + src.str());
                rhs += rd.coef * *r * v;
            }
            double low = 0.0;
            for (const auto& lt : sc.lower) {
                Rational src = img + lt.total;
                double v = coeff_at(dk, src);
                if (v == 0.0) continue;
                auto r = fold_ratio(src, lt.mu, lt.n, lt.folds);
                if (!r)
                    throw InconsistentSystemError(
                        "left-side derivative undefined on a populated power t^" + src.str());
                low += lt.lambda * *r * v;
            }
            double val = (rhs - low) / (sc.top.lambda * *rtop);
            if (val != 0.0) dk[nu] = val;
        }
    }

    FODESolution out;
    const std::vector<std::string> tv{sys.time_var};
    for (int k = 0; k < m; ++k) {
        GenSeries s = GenSeries::zero(sys.params, tv);
        for (const auto& [e, v] : d[static_cast<std::size_t>(k)])
            s.add_term({ExponentVector::constant(*sys.params, e)}, Coeff(v));
        s.set_truncation(sys.time_var, truncation);
        s.set_frontier(sys.time_var, truncation.to_double());
        s.mark_truncated();
        out.K.push_back(std::move(s));
    }

    // Rows the march never enforced (annihilated or undefined top powers)
    // must still close; verify the full residual termwise.
    double scale = 1.0;
    for (const auto& s : out.K) scale = std::max(scale, s.max_abs_coeff());
    for (int k = 0; k < m; ++k) {
        const EqScheme& sc = sch[static_cast<std::size_t>(k)];
        scale = std::max(scale, std::abs(sc.c0));
        try {
            GenSeries lhs = GenSeries::zero(sys.params, tv);
            auto apply = [&](const LhsTerm& lt) {
                FracOrder base = FracOrder::of(*sys.params, lt.mu);
                lhs = lhs + sequential_deriv(out.K[static_cast<std::size_t>(k)], sys.time_var,
                                             base, lt.folds)
                                .scaled(lt.lambda);
            };
            apply(sc.top);
            for (const auto& lt : sc.lower) apply(lt);
            GenSeries rhs = GenSeries::constant(sys.params, tv, Coeff(sc.c0));
            for (int l = 0; l < m; ++l)
                if (sc.lin[static_cast<std::size_t>(l)] != 0.0)
                    rhs = rhs + out.K[static_cast<std::size_t>(l)].scaled(
                                    sc.lin[static_cast<std::size_t>(l)]);
            for (const auto& rd : sys.eqs[static_cast<std::size_t>(k)].rhs_derivs) {
                if (rd.coef == 0.0) continue;
                int flat = sys.unknown.at(static_cast<std::size_t>(rd.comp))
                               .at(static_cast<std::size_t>(rd.j));
                // Numeric order, like the left side above: the marched terms
                // carry constant exponents, so a symbolic order would land
                // the same power on a different exponent key.
                rhs = rhs + caputo_deriv(out.K[static_cast<std::size_t>(flat)], sys.time_var,
                                         FracOrder::of(*sys.params, rd.order.mu))
                                .scaled(rd.coef);
            }
            double worst = drop_beyond_frontier(lhs - rhs).max_abs_coeff();
            if (worst > kMarchTol * scale)
                throw InconsistentSystemError("equation " + std::to_string(k + 1) +
                                              " keeps a residual of " + std::to_string(worst) +
                                              " after the march");
        } catch (const UndefinedCaputoError& e) {
            throw InconsistentSystemError(
                std::string("marched solution leaves the derivative domain: ") + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Power-law ansatz.
// ---------------------------------------------------------------------------

namespace {

// Dense Gaussian elimination with partial pivoting; false on singular.
bool lin_solve(std::vector<std::vector<double>> A, std::vector<double> b,
               std::vector<double>& x) {
    const std::size_t n = A.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        if (std::abs(A[piv][c]) < 1e-300) return false;
        std::swap(A[piv], A[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = c + 1; r < n; ++r) {
            double f = A[r][c] / A[c][c];
            if (f == 0.0) continue;
            for (std::size_t j = c; j < n; ++j) A[r][j] -= f * A[c][j];
            b[r] -= f * b[c];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t j = r + 1; j < n; ++j) s -= A[r][j] * x[j];
        x[r] = s / A[r][r];
    }
    return true;
}

struct QuadTerm {
    int i, j;
    double c;
};

struct AnsatzProblem {
    int m = 0;
    double P = 0.0;
    std::vector<double> lambda;
    std::vector<std::vector<QuadTerm>> quad; // per equation
    std::vector<std::vector<double>> lin;    // linear rows that must vanish
    double coeff_scale = 1.0;

    // rows: m quadratic balances, then the collected linear rows
    std::vector<double> value(const std::vector<double>& x) const {
        std::vector<double> F;
        F.reserve(static_cast<std::size_t>(m) + lin.size());
        for (int k = 0; k < m; ++k) {
            double q = 0.0;
            for (const auto& t : quad[static_cast<std::size_t>(k)])
                q += t.c * x[static_cast<std::size_t>(t.i)] * x[static_cast<std::size_t>(t.j)];
            F.push_back(lambda[static_cast<std::size_t>(k)] * P * x[static_cast<std::size_t>(k)] -
                        q);
        }
        for (const auto& row : lin) {
            double s = 0.0;
            for (int l = 0; l < m; ++l) s += row[static_cast<std::size_t>(l)] * x[static_cast<std::size_t>(l)];
            F.push_back(s);
        }
        return F;
    }

    // Jacobian restricted to the free coordinates.
    std::vector<std::vector<double>> jacobian(const std::vector<double>& x,
                                              const std::vector<int>& free_idx) const {
        std::vector<std::vector<double>> J(static_cast<std::size_t>(m) + lin.size(),
                                           std::vector<double>(free_idx.size(), 0.0));
        for (std::size_t fc = 0; fc < free_idx.size(); ++fc) {
            int v = free_idx[fc];
            for (int k = 0; k < m; ++k) {
                double g = k == v ? lambda[static_cast<std::size_t>(k)] * P : 0.0;
                for (const auto& t : quad[static_cast<std::size_t>(k)]) {
                    if (t.i == v) g -= t.c * x[static_cast<std::size_t>(t.j)];
                    if (t.j == v) g -= t.c * x[static_cast<std::size_t>(t.i)];
                }
                J[static_cast<std::size_t>(k)][fc] = g;
            }
            for (std::size_t r = 0; r < lin.size(); ++r)
                J[static_cast<std::size_t>(m) + r][fc] = lin[r][static_cast<std::size_t>(v)];
        }
        return J;
    }
};

double max_abs(const std::vector<double>& v) {
    double w = 0.0;
    for (double x : v) w = std::max(w, std::abs(x));
    return w;
}

} // namespace

std::vector<FODESolution> solve_power_ansatz(const FODESystem& sys,
                                             const std::map<int, double>& pins) {
    const int m = sys.unknown_count();
    if (m <= 0 || static_cast<int>(sys.eqs.size()) != m)
        throw DomainError("system must carry one equation per unknown");

    AnsatzProblem pr;
    pr.m = m;
    pr.lambda.resize(static_cast<std::size_t>(m));
    pr.quad.resize(static_cast<std::size_t>(m));
    Rational a;
    for (int k = 0; k < m; ++k) {
        const FODEEquation& eq = sys.eqs[static_cast<std::size_t>(k)];
        if (eq.lhs.size() != 1 || eq.lhs[0].folds != 1 ||
            eq.lhs[0].kind != DerivKind::RiemannLiouville)
            throw DomainError(
                "power-law ansatz needs a single Riemann-Liouville derivative per equation");
        if (!eq.rhs_derivs.empty())
            throw DomainError("power-law ansatz takes no right-side derivative couplings");
        if (eq.lhs[0].lambda == 0.0) throw DomainError("zero left-side coefficient");
        if (k == 0)
            a = eq.lhs[0].base.mu;
        else if (!(eq.lhs[0].base.mu == a))
            throw DomainError("power-law ansatz needs one shared derivative order");
        pr.lambda[static_cast<std::size_t>(k)] = eq.lhs[0].lambda;
        pr.coeff_scale = std::max(pr.coeff_scale, std::abs(eq.lhs[0].lambda));

        std::vector<double> linrow(static_cast<std::size_t>(m), 0.0);
        bool has_lin = false;
        for (const auto& [expo, c] : eq.psi.terms()) {
            int deg = 0;
            for (int e : expo) deg += e;
            if (deg == 0)
                throw DomainError("power-law ansatz needs homogeneous right sides");
            if (deg == 1) {
                for (std::size_t l = 0; l < expo.size(); ++l)
                    if (expo[l] == 1) linrow[l] += c;
                has_lin = true;
            } else if (deg == 2) {
                int i = -1, j = -1;
                for (std::size_t l = 0; l < expo.size(); ++l) {
                    if (expo[l] == 2) i = j = static_cast<int>(l);
                    if (expo[l] == 1) (i < 0 ? i : j) = static_cast<int>(l);
                }
                pr.quad[static_cast<std::size_t>(k)].push_back({i, j, c});
                pr.coeff_scale = std::max(pr.coeff_scale, std::abs(c));
            } else {
                throw DomainError("power-law ansatz needs right sides of degree at most 2");
            }
        }
        if (has_lin) pr.lin.push_back(std::move(linrow));
    }
    if (a > Rational(1)) throw DomainError("power-law ansatz needs an order in (0,1]");

    pr.P = gamma_ratio(Rational(1) - a, Rational(1) - a - a);
    if (pr.P == 0.0)
        throw PoleError("t^{-a} lies in the kernel of the derivative at order " + a.str());
    pr.coeff_scale = std::max(pr.coeff_scale, std::abs(pr.P));

    std::vector<int> free_idx;
    for (int l = 0; l < m; ++l)
        if (!pins.count(l)) free_idx.push_back(l);
    for (const auto& [l, v] : pins) {
        (void)v;
        if (l < 0 || l >= m) throw DomainError("pinned index out of range");
    }

    auto base_point = [&] {
        std::vector<double> x(static_cast<std::size_t>(m), 0.0);
        for (const auto& [l, v] : pins) x[static_cast<std::size_t>(l)] = v;
        return x;
    };

    std::mt19937 rng(kAnsatzSeed);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    std::vector<std::vector<double>> roots;
    for (int s = 0; s < kAnsatzStarts; ++s) {
        std::vector<double> x = base_point();
        for (int f : free_idx) {
            double v = s == 0 ? 0.0 : (s == 1 ? 1.0 : (s == 2 ? -1.0 : dist(rng)));
            x[static_cast<std::size_t>(f)] = v;
        }
        std::vector<double> F = pr.value(x);
        bool ok = false;
        for (int it = 0; it < kAnsatzIters; ++it) {
            double tol = 1e-11 * pr.coeff_scale * (1.0 + max_abs(x)) * (1.0 + max_abs(x));
            if (max_abs(F) <= tol) {
                ok = true;
                break;
            }
            if (free_idx.empty()) break;
            auto J = pr.jacobian(x, free_idx);
            const std::size_t nf = free_idx.size(), nr = F.size();
            std::vector<std::vector<double>> JtJ(nf, std::vector<double>(nf, 0.0));
            std::vector<double> Jtf(nf, 0.0);
            for (std::size_t i = 0; i < nf; ++i) {
                for (std::size_t j = 0; j < nf; ++j)
                    for (std::size_t r = 0; r < nr; ++r) JtJ[i][j] += J[r][i] * J[r][j];
                JtJ[i][i] += 1e-14 * pr.coeff_scale;
                for (std::size_t r = 0; r < nr; ++r) Jtf[i] += J[r][i] * F[r];
            }
            std::vector<double> delta;
            if (!lin_solve(JtJ, Jtf, delta)) break;
            double f0 = max_abs(F), damp = 1.0;
            bool moved = false;
            for (int half = 0; half < 40; ++half) {
                std::vector<double> xn = x;
                for (std::size_t i = 0; i < nf; ++i)
                    xn[static_cast<std::size_t>(free_idx[i])] -= damp * delta[i];
                std::vector<double> Fn = pr.value(xn);
                if (max_abs(Fn) < f0) {
                    x = std::move(xn);
                    F = std::move(Fn);
                    moved = true;
                    break;
                }
                damp *= 0.5;
            }
            if (!moved) break;
        }
        double tol = 1e-11 * pr.coeff_scale * (1.0 + max_abs(x)) * (1.0 + max_abs(x));
        if (!(ok || max_abs(pr.value(x)) <= tol)) continue;
        bool dup = false;
        for (const auto& r : roots) {
            double dmax = 0.0;
            for (int l = 0; l < m; ++l)
                dmax = std::max(dmax, std::abs(r[static_cast<std::size_t>(l)] -
                                               x[static_cast<std::size_t>(l)]));
            if (dmax <= 1e-7 * (1.0 + max_abs(r))) {
                dup = true;
                break;
            }
        }
        if (!dup) roots.push_back(x);
    }
    if (roots.empty())
        throw NoPowerLawSolutionError("no real power-law branch from " +
                                      std::to_string(kAnsatzStarts) + " starts");
    std::sort(roots.begin(), roots.end());

    std::vector<FODESolution> out;
    const std::vector<std::string> tv{sys.time_var};
    ExponentVector expo = ExponentVector::constant(*sys.params, Rational(0) - a);
    for (const auto& r : roots) {
        FODESolution sol;
        sol.form = "power-law";
        for (int l = 0; l < m; ++l) {
            sol.K.push_back(GenSeries::monomial(sys.params, tv, sys.time_var, expo,
                                                Coeff(r[static_cast<std::size_t>(l)])));
            sol.constants[sys.symbols->names.at(static_cast<std::size_t>(l))] =
                r[static_cast<std::size_t>(l)];
        }
        out.push_back(std::move(sol));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Picard iterates for K = g0 + c I^a[K].
// ---------------------------------------------------------------------------

std::vector<GenSeries> nim_iterates(const GenSeries& g0, double c, const std::string& var,
                                    const FracOrder& a, int n) {
    if (n < 0) throw DomainError("iterate count must be nonnegative");
    if (g0.var_index(var) < 0)
        throw VariableMismatchError("series does not carry the variable " + var);
    std::vector<GenSeries> out{g0};
    if (c == 0.0) return out;
    for (int i = 1; i <= n; ++i) {
        const GenSeries& prev = out.back();
        if (prev.empty()) break;
        GenSeries next = rl_integral(prev, var, a).scaled(c);
        if (next.empty() || next.max_abs_coeff() == 0.0) {
            if (prev.truncated())
                throw TruncationStallError("iterate " + std::to_string(i) +
                                           " fell entirely past the truncation bound");
            break;
        }
        if (drop_beyond_frontier(next).empty())
            throw TruncationStallError("iterate " + std::to_string(i) +
                                       " has no terms inside the reliable frontier");
        out.push_back(std::move(next));
    }
    return out;
}

FODESolution nim_solve(const GenSeries& g0, double c, const std::string& var, const FracOrder& a,
                       int n) {
    std::vector<GenSeries> it = nim_iterates(g0, c, var, a, n);
    GenSeries sum = it.front();
    for (std::size_t i = 1; i < it.size(); ++i) sum = sum + it[i];
    FODESolution out;
    out.K.push_back(std::move(sum));
    return out;
}

// ---------------------------------------------------------------------------
// Fractional Adams-Bashforth-Moulton.
// ---------------------------------------------------------------------------

Trajectory adams_pece(const FODESystem& sys, const std::vector<double>& y0, double h,
                      double horizon) {
    if (!(h > 0.0) || !std::isfinite(h)) throw StepError("step size must be positive");
    if (!(horizon >= h) || !std::isfinite(horizon))
        throw StepError("horizon must cover at least one step");
    const int m = sys.unknown_count();
    if (m <= 0 || static_cast<int>(sys.eqs.size()) != m)
        throw DomainError("system must carry one equation per unknown");
    if (static_cast<int>(y0.size()) != m) throw DomainError("one initial value per unknown");

    Rational mu;
    std::vector<double> lam(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        const FODEEquation& eq = sys.eqs[static_cast<std::size_t>(k)];
        if (eq.lhs.size() != 1 || eq.lhs[0].folds != 1 || eq.lhs[0].kind != DerivKind::Caputo ||
            !eq.rhs_derivs.empty())
            throw DomainError("stepper needs a single Caputo derivative per equation");
        if (eq.lhs[0].lambda == 0.0) throw DomainError("zero left-side coefficient");
        if (k == 0)
            mu = eq.lhs[0].base.mu;
        else if (!(eq.lhs[0].base.mu == mu))
            throw DomainError("stepper needs one shared derivative order");
        lam[static_cast<std::size_t>(k)] = eq.lhs[0].lambda;
    }
    if (!(Rational(0) < mu) || mu > Rational(1))
        throw DomainError("stepper needs an order in (0,1]");
    const double al = mu.to_double();

    auto f = [&](const std::vector<double>& y) {
        std::vector<double> out(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k)
            out[static_cast<std::size_t>(k)] =
                sys.eqs[static_cast<std::size_t>(k)].psi.eval(y) /
                lam[static_cast<std::size_t>(k)];
        return out;
    };

    const int N = static_cast<int>(std::floor(horizon / h + 1e-12));
    Trajectory tr;
    tr.t.resize(static_cast<std::size_t>(N) + 1);
    tr.y.resize(static_cast<std::size_t>(N) + 1);
    tr.t[0] = 0.0;
    tr.y[0] = y0;
    std::vector<std::vector<double>> fs(static_cast<std::size_t>(N) + 1);
    fs[0] = f(y0);

    const double ga = std::tgamma(al);
    const double ga2 = std::tgamma(al + 2.0);
    const double ha = std::pow(h, al);
    for (int n = 0; n < N; ++n) {
        std::vector<double> yp = y0;
        for (int j = 0; j <= n; ++j) {
            double b = ha / al *
                       (std::pow(n + 1.0 - j, al) - std::pow(static_cast<double>(n - j), al));
            for (int k = 0; k < m; ++k)
                yp[static_cast<std::size_t>(k)] +=
                    b / ga * fs[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        }
        std::vector<double> fp = f(yp);
        std::vector<double> yn = y0;
        for (int j = 0; j <= n; ++j) {
            double w = j == 0 ? std::pow(static_cast<double>(n), al + 1.0) -
                                    (n - al) * std::pow(n + 1.0, al)
                              : std::pow(n - j + 2.0, al + 1.0) +
                                    std::pow(static_cast<double>(n - j), al + 1.0) -
                                    2.0 * std::pow(n - j + 1.0, al + 1.0);
            for (int k = 0; k < m; ++k)
                yn[static_cast<std::size_t>(k)] +=
                    ha / ga2 * w * fs[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        }
        for (int k = 0; k < m; ++k) {
            yn[static_cast<std::size_t>(k)] += ha / ga2 * fp[static_cast<std::size_t>(k)];
            if (!std::isfinite(yn[static_cast<std::size_t>(k)]) ||
                std::abs(yn[static_cast<std::size_t>(k)]) > 1e100)
                throw StepError("state is no longer finite at t = " +
                                std::to_string((n + 1.0) * h));
        }
        tr.t[static_cast<std::size_t>(n) + 1] = (n + 1.0) * h;
        tr.y[static_cast<std::size_t>(n) + 1] = yn;
        fs[static_cast<std::size_t>(n) + 1] = f(yn);
    }
    return tr;
}

} // namespace fpde
