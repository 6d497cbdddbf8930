#include "fpde/operators.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fpde/errors.hpp"

namespace fpde {

namespace {

// Fitted-coefficient noise floor: Gamma-ratio double rounding leaves
// ~1e-15-relative junk on images of expanded special-function bases, so the
// invariance decision cannot demand bitwise-zero residuals.
constexpr double kInvariantNoise = 1e-9;

// Relative floor below which a psi monomial is coefficient noise rather than
// a genuine coupling.
constexpr double kPsiNoiseFloor = 1e-11;

constexpr double kExpSlack = 1e-9; // frontier comparisons on double exponents

} // namespace

// --- builders ---------------------------------------------------------------

static OpRef make(OperatorExpr e) { return std::make_shared<const OperatorExpr>(std::move(e)); }

OpRef op_component(int p) {
    OperatorExpr e;
    e.kind = OperatorExpr::Kind::Component;
    e.component = p;
    return make(std::move(e));
}

OpRef op_sderiv(OpRef child, const std::string& var, const FracOrder& base, int folds) {
    if (folds < 1) throw DomainError("space derivative needs at least one stage");
    OperatorExpr e;
    e.kind = OperatorExpr::Kind::SpaceDeriv;
    e.sderiv = SpaceDerivSpec{var, base, folds};
    e.kids.push_back(std::move(child));
    return make(std::move(e));
}

OpRef op_mixed(OpRef child, const FracOrder& t_order, const std::string& var,
               const FracOrder& base, int folds) {
    if (folds < 0) throw DomainError("negative space stage count");
    OperatorExpr e;
    e.kind = OperatorExpr::Kind::MixedDeriv;
    e.t_order = t_order;
    e.sderiv = SpaceDerivSpec{var, base, folds};
    e.kids.push_back(std::move(child));
    return make(std::move(e));
}

OpRef op_coord(const std::string& var, const ExponentVector& expo) {
    OperatorExpr e;
    e.kind = OperatorExpr::Kind::CoordMonomial;
    e.var = var;
    e.expo = expo;
    return make(std::move(e));
}

OpRef op_const(double v) {
    OperatorExpr e;
    e.kind = OperatorExpr::Kind::Const;
    e.value = v;
    return make(std::move(e));
}

OpRef op_sum(std::vector<OpRef> kids) {
    if (kids.empty()) throw DomainError("empty operator sum");
    OperatorExpr e;
    e.kind = OperatorExpr::Kind::Sum;
    e.kids = std::move(kids);
    return make(std::move(e));
}

OpRef op_product(std::vector<OpRef> kids) {
    if (kids.empty()) throw DomainError("empty operator product");
    OperatorExpr e;
    e.kind = OperatorExpr::Kind::Product;
    e.kids = std::move(kids);
    return make(std::move(e));
}

OpRef op_scale(double c, OpRef child) {
    OperatorExpr e;
    e.kind = OperatorExpr::Kind::Scale;
    e.value = c;
    e.kids.push_back(std::move(child));
    return make(std::move(e));
}

OpRef op_power(OpRef child, int k) {
    if (k < 1) throw DomainError("operator power must be a positive integer");
    OperatorExpr e;
    e.kind = OperatorExpr::Kind::Power;
    e.power = k;
    e.kids.push_back(std::move(child));
    return make(std::move(e));
}

// --- marker environment ------------------------------------------------------

int MarkerEnv::marker(const std::string& order_text, int base) const {
    auto it = marker_of.find({order_text, base});
    return it == marker_of.end() ? -1 : it->second;
}

static void collect_mixed_orders(const OperatorExpr& n, std::vector<FracOrder>& out) {
    if (n.kind == OperatorExpr::Kind::MixedDeriv) out.push_back(n.t_order);
    for (const auto& k : n.kids) collect_mixed_orders(*k, out);
}

MarkerEnvRef build_marker_env(const ParamTable& params, const std::vector<std::string>& base_names,
                              const std::vector<OpRef>& trees) {
    auto env = std::make_shared<MarkerEnv>();
    env->n_base = static_cast<int>(base_names.size());

    std::vector<FracOrder> orders;
    for (const auto& t : trees) collect_mixed_orders(*t, orders);

    auto table = std::make_shared<SymbolTable>();
    table->names = base_names;
    for (const auto& ord : orders) {
        const std::string text = ord.sym.str(params);
        for (int b = 0; b < env->n_base; ++b) {
            if (env->marker_of.count({text, b})) continue;
            int idx = static_cast<int>(table->names.size());
            table->names.push_back("D^{" + text + "}" + base_names[static_cast<std::size_t>(b)]);
            env->marker_of[{text, b}] = idx;
            env->marker_base.push_back(b);
            env->marker_order.push_back(ord);
        }
    }
    env->syms = table;
    return env;
}

// --- op_apply ----------------------------------------------------------------

namespace {

// Replaces each coordinate symbol with its time-derivative marker.  Only
// coefficients linear in the coordinates admit a termwise time derivative.
Poly mark_time_deriv(const Poly& p, const MarkerEnv& env, const std::string& order_text,
                     const std::string& path) {
    Poly out(p.symbols());
    for (const auto& [mono, c] : p.terms()) {
        int sym = -1;
        int degree = 0;
        for (std::size_t i = 0; i < mono.size(); ++i) {
            if (mono[i] == 0) continue;
            degree += mono[i];
            sym = static_cast<int>(i);
        }
        if (degree == 0) continue; // time-constant part differentiates to zero
        if (degree > 1 || env.is_marker(sym))
            throw DomainError("mixed time derivative over a nonlinear coefficient at " + path);
        int m = env.marker(order_text, sym);
        if (m < 0) throw Error("marker table missing entry at " + path);
        std::vector<int> mm(mono.size(), 0);
        mm[static_cast<std::size_t>(m)] = 1;
        out = out + poly_term(p.symbols(), mm, c);
    }
    return out;
}

GenSeries apply_tree(const OperatorExpr& n, const std::vector<GenSeries>& f,
                     const ApplyContext& ctx, const std::string& path);

GenSeries apply_kids_product(const OperatorExpr& n, const std::vector<GenSeries>& f,
                             const ApplyContext& ctx, const std::string& path) {
    GenSeries acc = apply_tree(*n.kids[0], f, ctx, path + "[0]");
    for (std::size_t i = 1; i < n.kids.size(); ++i)
        acc = acc * apply_tree(*n.kids[i], f, ctx, path + "[" + std::to_string(i) + "]");
    return acc;
}

GenSeries apply_tree(const OperatorExpr& n, const std::vector<GenSeries>& f,
                     const ApplyContext& ctx, const std::string& path) {
    using K = OperatorExpr::Kind;
    const GenSeries& proto = f.front();
    try {
        switch (n.kind) {
        case K::Component: {
            if (n.component < 0 || n.component >= static_cast<int>(f.size()))
                throw DomainError("component index " + std::to_string(n.component) +
                                  " outside the field tuple");
            return f[static_cast<std::size_t>(n.component)];
        }
        case K::Const:
            return GenSeries::constant(proto.params(), proto.vars(), Coeff(n.value));
        case K::CoordMonomial:
            return GenSeries::monomial(proto.params(), proto.vars(), n.var, n.expo, Coeff(1.0));
        case K::Sum: {
            GenSeries acc = apply_tree(*n.kids[0], f, ctx, path + "[0]");
            for (std::size_t i = 1; i < n.kids.size(); ++i)
                acc = acc + apply_tree(*n.kids[i], f, ctx, path + "[" + std::to_string(i) + "]");
            return acc;
        }
        case K::Product:
            return apply_kids_product(n, f, ctx, path);
        case K::Scale:
            return apply_tree(*n.kids[0], f, ctx, path + "/scale").scaled(n.value);
        case K::Power: {
            GenSeries base = apply_tree(*n.kids[0], f, ctx, path + "/pow");
            GenSeries acc = base;
            for (int i = 1; i < n.power; ++i) acc = acc * base;
            return acc;
        }
        case K::SpaceDeriv: {
            GenSeries child = apply_tree(*n.kids[0], f, ctx, path + "/child");
            return sequential_deriv(child, n.sderiv.var, n.sderiv.base, n.sderiv.folds,
                                    DerivKind::Caputo);
        }
        case K::MixedDeriv: {
            GenSeries child = apply_tree(*n.kids[0], f, ctx, path + "/child");
            GenSeries sp = n.sderiv.folds > 0
                               ? sequential_deriv(child, n.sderiv.var, n.sderiv.base,
                                                  n.sderiv.folds, DerivKind::Caputo)
                               : child;
            if (!ctx.markers) return caputo_deriv(sp, ctx.time_var, n.t_order);
            // Generic mode: coordinates are formally time dependent.
            const std::string text = n.t_order.sym.str(*proto.params());
            GenSeries out = GenSeries::zero(sp.params(), sp.vars());
            for (const auto& [key, c] : sp.terms()) {
                if (c.is_scalar()) continue; // constant in the coordinates
                Poly marked = mark_time_deriv(c.poly(), *ctx.markers, text, path);
                if (!marked.is_zero()) out.add_term(key, Coeff(marked));
            }
            // inherit bounds from the operand
            for (std::size_t i = 0; i < sp.vars().size(); ++i) {
                out.set_truncation(sp.vars()[i], sp.truncation()[i]);
                out.set_frontier(sp.vars()[i], sp.frontier()[i]);
            }
            if (sp.truncated()) out.mark_truncated();
            return out;
        }
        }
        throw Error("unreachable operator kind");
    } catch (const UndefinedCaputoError& e) {
        throw UndefinedCaputoError(std::string(e.what()) + " [at " + path + "]");
    } catch (const DomainError& e) {
        throw DomainError(std::string(e.what()) + " [at " + path + "]");
    }
}

} // namespace

std::vector<GenSeries> op_apply(const std::vector<OpRef>& N, const std::vector<GenSeries>& f,
                                const ApplyContext& ctx) {
    if (f.empty()) throw DomainError("op_apply: empty field tuple");
    for (const auto& s : f)
        if (s.vars() != f.front().vars())
            throw VariableMismatchError("op_apply: fields disagree on variables");
    std::vector<GenSeries> out;
    out.reserve(N.size());
    for (std::size_t p = 0; p < N.size(); ++p) {
        if (!N[p]) throw DomainError("op_apply: null operator tree");
        out.push_back(apply_tree(*N[p], f, ctx, "N" + std::to_string(p + 1)));
    }
    return out;
}

// --- invariance --------------------------------------------------------------

std::vector<std::string> default_coord_names(const SubspaceBasis& I) {
    static const char letters[] = "KLMN";
    std::vector<std::string> names;
    for (int p = 0; p < I.components(); ++p)
        for (int j = 0; j < I.dim(p); ++j) {
            std::string stem = p < 4 ? std::string(1, letters[p]) : "C" + std::to_string(p + 1) + "_";
            names.push_back(stem + std::to_string(j + 1));
        }
    return names;
}

InvarianceReport check_invariant(const std::vector<OpRef>& N, const SubspaceBasis& I,
                                 const std::vector<std::string>& coord_names,
                                 const std::string& time_var) {
    if (I.components() == 0 || static_cast<int>(N.size()) != I.components())
        throw DomainError("check_invariant: operator/basis component mismatch");
    const GenSeries& proto = I.phi.front().front();

    std::vector<std::string> names = coord_names.empty() ? default_coord_names(I) : coord_names;
    int total = 0;
    for (int p = 0; p < I.components(); ++p) total += I.dim(p);
    if (static_cast<int>(names.size()) != total)
        throw DomainError("check_invariant: coordinate name count mismatch");

    InvarianceReport rep;
    rep.env = build_marker_env(*proto.params(), names, N);
    rep.coord.resize(static_cast<std::size_t>(I.components()));
    {
        int k = 0;
        for (int p = 0; p < I.components(); ++p)
            for (int j = 0; j < I.dim(p); ++j) rep.coord[static_cast<std::size_t>(p)].push_back(k++);
    }

    // Generic element per component, Poly coefficients in the coordinates.
    std::vector<GenSeries> g;
    for (int p = 0; p < I.components(); ++p) {
        GenSeries acc = GenSeries::zero(proto.params(), proto.vars());
        for (int j = 0; j < I.dim(p); ++j) {
            Poly kpj = Poly::symbol(rep.env->syms, rep.coord[static_cast<std::size_t>(p)]
                                                            [static_cast<std::size_t>(j)]);
            acc = acc + I.phi[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)].scaled(
                            Coeff(kpj));
        }
        g.push_back(std::move(acc));
    }

    ApplyContext ctx;
    ctx.time_var = time_var;
    ctx.markers = rep.env;
    std::vector<GenSeries> image = op_apply(N, g, ctx);

    rep.invariant = true;
    for (int p = 0; p < I.components(); ++p) {
        const GenSeries& im = image[static_cast<std::size_t>(p)];
        FitResult fit = fit_to_basis(im, I.phi[static_cast<std::size_t>(p)]);
        std::vector<Poly> psis;
        for (const auto& c : fit.coeffs)
            psis.push_back(c.is_scalar() ? Poly::constant(rep.env->syms, c.scalar()) : c.poly());
        rep.psi.push_back(std::move(psis));

        double genuine = 0.0, artifact = 0.0;
        const auto& frontier = fit.residual.frontier();
        for (const auto& [key, c] : fit.residual.terms()) {
            bool beyond = false;
            for (std::size_t i = 0; i < key.size(); ++i)
                if (key[i].value(*proto.params()).to_double() > frontier[i] + kExpSlack) {
                    beyond = true;
                    break;
                }
            (beyond ? artifact : genuine) = std::max(beyond ? artifact : genuine, c.max_abs());
        }
        rep.genuine_residual.push_back(genuine);
        rep.artifact_residual.push_back(artifact);
        rep.image_scale.push_back(im.max_abs_coeff());
        if (genuine > kInvariantNoise * std::max(1.0, im.max_abs_coeff())) rep.invariant = false;
    }

    rep.basis_truncation.assign(proto.vars().size(), Rational(1000000000));
    for (const auto& comp : I.phi)
        for (const auto& b : comp)
            for (std::size_t i = 0; i < b.truncation().size(); ++i)
                rep.basis_truncation[i] = std::min(rep.basis_truncation[i], b.truncation()[i]);
    return rep;
}

// --- reduce ------------------------------------------------------------------

int FODESystem::unknown_count() const {
    int n = 0;
    for (const auto& u : unknown) n += static_cast<int>(u.size());
    return n;
}

FODESystem reduce(const TimeOperator& T, const std::vector<OpRef>& N, const SubspaceBasis& I,
                  const std::vector<std::string>& coord_names, const std::string& time_var) {
    InvarianceReport rep = check_invariant(N, I, coord_names, time_var);
    if (!rep.invariant) {
        double worst = 0.0;
        for (double r : rep.genuine_residual) worst = std::max(worst, r);
        throw NotInvariantError("subspace is not invariant: image leaves the span (residual " +
                                std::to_string(worst) + ")");
    }
    if (static_cast<int>(T.terms.size()) != I.components())
        throw DomainError("time operator component count mismatch");

    const MarkerEnv& env = *rep.env;
    auto table = std::make_shared<SymbolTable>();
    table->names.assign(env.syms->names.begin(), env.syms->names.begin() + env.n_base);
    std::vector<int> identity(static_cast<std::size_t>(env.n_base));
    for (int i = 0; i < env.n_base; ++i) identity[static_cast<std::size_t>(i)] = i;

    // reverse map: base symbol -> (comp, j)
    std::vector<std::pair<int, int>> place(static_cast<std::size_t>(env.n_base));
    for (int p = 0; p < I.components(); ++p)
        for (int j = 0; j < I.dim(p); ++j)
            place[static_cast<std::size_t>(rep.coord[static_cast<std::size_t>(p)]
                                                    [static_cast<std::size_t>(j)])] = {p, j};

    FODESystem sys;
    sys.symbols = table;
    sys.params = I.phi.front().front().params();
    sys.time_var = time_var;
    sys.unknown = rep.coord;

    // Component-level coefficient scale for the noise floor.
    std::vector<double> scale(static_cast<std::size_t>(I.components()), 0.0);
    for (int p = 0; p < I.components(); ++p)
        for (const auto& psi : rep.psi[static_cast<std::size_t>(p)])
            scale[static_cast<std::size_t>(p)] =
                std::max(scale[static_cast<std::size_t>(p)], psi.max_abs_coeff());

    for (int p = 0; p < I.components(); ++p) {
        for (int j = 0; j < I.dim(p); ++j) {
            const Poly& full = rep.psi[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)];
            const double floor_abs = kPsiNoiseFloor * scale[static_cast<std::size_t>(p)];
            FODEEquation eq;
            eq.comp = p;
            eq.j = j;
            eq.lhs = T.terms[static_cast<std::size_t>(p)];
            Poly base_part(env.syms);
            for (const auto& [mono, c] : full.terms()) {
                int marker = -1, marker_deg = 0, base_deg = 0;
                for (std::size_t i = 0; i < mono.size(); ++i) {
                    if (mono[i] == 0) continue;
                    if (env.is_marker(static_cast<int>(i))) {
                        marker = static_cast<int>(i);
                        marker_deg += mono[i];
                    } else {
                        base_deg += mono[i];
                    }
                }
                if (marker_deg == 0) {
                    base_part = base_part + poly_term(env.syms, mono, c);
                    continue;
                }
                if (marker_deg > 1 || base_deg > 0)
                    throw DomainError("reduced right side has a nonlinear derivative term");
                if (std::fabs(c) <= floor_abs) continue;
                int mi = marker - env.n_base;
                RhsDerivTerm d;
                d.coef = c;
                d.comp = place[static_cast<std::size_t>(env.marker_base[static_cast<std::size_t>(
                                   mi)])].first;
                d.j = place[static_cast<std::size_t>(
                                env.marker_base[static_cast<std::size_t>(mi)])].second;
                d.order = env.marker_order[static_cast<std::size_t>(mi)];
                eq.rhs_derivs.push_back(d);
            }
            eq.psi = base_part.cleaned(floor_abs).remap(table, identity);
            sys.eqs.push_back(std::move(eq));
        }
    }
    return sys;
}

// --- residual ----------------------------------------------------------------

GenSeries drop_beyond_frontier(const GenSeries& s) {
    GenSeries out = GenSeries::zero(s.params(), s.vars());
    const auto& fr = s.frontier();
    for (const auto& [key, c] : s.terms()) {
        bool keep = true;
        for (std::size_t i = 0; i < key.size(); ++i)
            if (key[i].value(*s.params()).to_double() > fr[i] + kExpSlack) {
                keep = false;
                break;
            }
        if (keep) out.add_term(key, c);
    }
    for (std::size_t i = 0; i < s.vars().size(); ++i) {
        out.set_truncation(s.vars()[i], s.truncation()[i]);
        out.set_frontier(s.vars()[i], fr[i]);
    }
    if (s.truncated()) out.mark_truncated();
    return out;
}

std::vector<GenSeries> assemble(const SolutionForm& sol) {
    const GenSeries& proto = sol.basis.phi.front().front();
    std::vector<std::string> vars;
    vars.push_back(sol.time_var);
    for (const auto& v : proto.vars()) vars.push_back(v);

    std::vector<GenSeries> fields;
    for (int p = 0; p < sol.basis.components(); ++p) {
        GenSeries acc = GenSeries::zero(proto.params(), vars);
        for (int j = 0; j < sol.basis.dim(p); ++j) {
            const GenSeries& k = sol.K.at(static_cast<std::size_t>(p)).at(static_cast<std::size_t>(j));
            acc = acc + k.embedded(vars) *
                            sol.basis.phi[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)]
                                .embedded(vars);
        }
        fields.push_back(std::move(acc));
    }
    return fields;
}

double residual(const TimeOperator& T, const std::vector<OpRef>& N, const SolutionForm& sol,
                const std::vector<std::vector<double>>& grid) {
    if (static_cast<int>(T.terms.size()) != sol.basis.components())
        throw DomainError("residual: time operator component count mismatch");
    std::vector<GenSeries> fields = assemble(sol);

    ApplyContext ctx;
    ctx.time_var = sol.time_var;
    std::vector<GenSeries> rhs = op_apply(N, fields, ctx);

    double worst = 0.0, field_scale = 0.0;
    for (int p = 0; p < sol.basis.components(); ++p) {
        GenSeries lhs = GenSeries::zero(fields[static_cast<std::size_t>(p)].params(),
                                        fields[static_cast<std::size_t>(p)].vars());
        for (const auto& term : T.terms[static_cast<std::size_t>(p)])
            lhs = lhs + sequential_deriv(fields[static_cast<std::size_t>(p)], sol.time_var,
                                         term.base, term.folds, term.kind)
                            .scaled(term.lambda);
        GenSeries diff = drop_beyond_frontier(lhs - rhs[static_cast<std::size_t>(p)]);
        GenSeries fp = drop_beyond_frontier(fields[static_cast<std::size_t>(p)]);
        for (const auto& pt : grid) {
            worst = std::max(worst, std::fabs(diff.eval(pt)));
            field_scale = std::max(field_scale, std::fabs(fp.eval(pt)));
        }
    }
    return worst / (1.0 + field_scale);
}

// --- basis atoms -------------------------------------------------------------

namespace {

GenSeries finish_atom(GenSeries s, const std::string& var, const Rational& trunc) {
    s.set_truncation(var, trunc);
    s.set_frontier(var, trunc.to_double());
    s.mark_truncated();
    return s;
}

} // namespace

GenSeries ml_atom(ParamTableRef params, const std::vector<std::string>& vars,
                  const std::string& var, double lam, const ExponentVector& b,
                  const Rational& trunc) {
    ExponentVector zero = ExponentVector::constant(*params, Rational(0));
    return ml2_atom(params, vars, var, lam, b, ExponentVector::constant(*params, Rational(1)),
                    zero, trunc);
}

GenSeries sin_atom(ParamTableRef params, const std::vector<std::string>& vars,
                   const std::string& var, double lam, const ExponentVector& b,
                   const Rational& trunc) {
    GenSeries out = GenSeries::zero(params, vars);
    const Rational bval = b.value(*params);
    int vi = out.var_index(var);
    if (vi < 0) throw VariableMismatchError("sin_atom: unknown variable " + var);
    double lam_pow = lam;
    for (int k = 0;; ++k) {
        Rational e = bval * Rational(2 * k + 1);
        if (e > trunc) break;
        double coeff = lam_pow / gamma_ratio(e + Rational(1), Rational(1));
        if (coeff != 0.0) {
            ExpKey full(vars.size(), ExponentVector::constant(*params, Rational(0)));
            full[static_cast<std::size_t>(vi)] = b.scaled(Rational(2 * k + 1));
            out.add_term(full, Coeff(coeff));
        }
        lam_pow *= -lam * lam;
    }
    return finish_atom(std::move(out), var, trunc);
}

GenSeries cos_atom(ParamTableRef params, const std::vector<std::string>& vars,
                   const std::string& var, double lam, const ExponentVector& b,
                   const Rational& trunc) {
    GenSeries out = GenSeries::zero(params, vars);
    const Rational bval = b.value(*params);
    int vi = out.var_index(var);
    if (vi < 0) throw VariableMismatchError("cos_atom: unknown variable " + var);
    double lam_pow = 1.0;
    for (int k = 0;; ++k) {
        Rational e = bval * Rational(2 * k);
        if (e > trunc) break;
        double coeff = lam_pow / gamma_ratio(e + Rational(1), Rational(1));
        if (coeff != 0.0) {
            ExpKey full(vars.size(), ExponentVector::constant(*params, Rational(0)));
            full[static_cast<std::size_t>(vi)] = b.scaled(Rational(2 * k));
            out.add_term(full, Coeff(coeff));
        }
        lam_pow *= -lam * lam;
    }
    return finish_atom(std::move(out), var, trunc);
}

GenSeries ml2_atom(ParamTableRef params, const std::vector<std::string>& vars,
                   const std::string& var, double lam, const ExponentVector& a,
                   const ExponentVector& b, const ExponentVector& w, const Rational& trunc) {
    GenSeries out = GenSeries::zero(params, vars);
    int vi = out.var_index(var);
    if (vi < 0) throw VariableMismatchError("ml2_atom: unknown variable " + var);
    const Rational aval = a.value(*params);
    const Rational wval = w.value(*params);
    const Rational bval = b.value(*params);
    if (aval <= Rational(0)) throw DomainError("ml2_atom: step order must be positive");
    double lam_pow = 1.0;
    for (int k = 0;; ++k) {
        Rational e = aval * Rational(k) + wval;
        if (e > trunc) break;
        double coeff = lam_pow / gamma_ratio(aval * Rational(k) + bval, Rational(1));
        if (coeff != 0.0) {
            ExpKey full(vars.size(), ExponentVector::constant(*params, Rational(0)));
            full[static_cast<std::size_t>(vi)] = a.scaled(Rational(k)) + w;
            out.add_term(full, Coeff(coeff));
        }
        lam_pow *= lam;
    }
    return finish_atom(std::move(out), var, trunc);
}

GenSeries eps_atom(ParamTableRef params, const std::vector<std::string>& vars,
                   const std::string& var, int n, double lam, bool minus_sign,
                   const ExponentVector& a, const ExponentVector& b, const Rational& trunc) {
    if (n < 0) throw DomainError("eps_atom: derivative order must be nonnegative");
    GenSeries out = GenSeries::zero(params, vars);
    int vi = out.var_index(var);
    if (vi < 0) throw VariableMismatchError("eps_atom: unknown variable " + var);
    const Rational aval = a.value(*params);
    const Rational bval = b.value(*params);
    const double z = minus_sign ? -lam : lam;
    double z_pow = 1.0;
    for (int k = 0;; ++k) {
        Rational e = aval * Rational(k + n) + bval - Rational(1);
        if (e > trunc) break;
        double fall = 1.0; // (k+n)!/k!
        for (int i = 1; i <= n; ++i) fall *= static_cast<double>(k + i);
        double coeff = fall * z_pow / gamma_ratio(aval * Rational(k + n) + bval, Rational(1));
        if (coeff != 0.0) {
            ExpKey full(vars.size(), ExponentVector::constant(*params, Rational(0)));
            full[static_cast<std::size_t>(vi)] =
                a.scaled(Rational(k + n)) + b - ExponentVector::constant(*params, Rational(1));
            out.add_term(full, Coeff(coeff));
        }
        z_pow *= z;
    }
    return finish_atom(std::move(out), var, trunc);
}

} // namespace fpde
