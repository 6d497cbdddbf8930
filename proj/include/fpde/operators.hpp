#ifndef FPDE_OPERATORS_HPP
#define FPDE_OPERATORS_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fpde/fracalc.hpp"
#include "fpde/series.hpp"

namespace fpde {

// ---------------------------------------------------------------------------
// Operator expression trees.
//
// A nonlinear space-side operator is a finite tree over component references,
// Caputo space derivatives (sequential folds of a base order, so the 2b-order
// derivative means two b-order stages), mixed time-then-space derivatives,
// coordinate-monomial multipliers, constants, and the ring operations.
// ---------------------------------------------------------------------------

struct OperatorExpr;
using OpRef = std::shared_ptr<const OperatorExpr>;

// Space derivative spec: `folds` sequential Caputo stages of order `base`
// in variable `var`.
struct SpaceDerivSpec {
    std::string var;
    FracOrder base;
    int folds = 1;
};

struct OperatorExpr {
    enum class Kind {
        Component,     // f_p
        SpaceDeriv,    // sequential Caputo space derivative of the child
        MixedDeriv,    // Caputo time derivative of order t_order, then sderiv
        CoordMonomial, // multiplier var^expo
        Const,         // real constant
        Sum,           // sum of children
        Product,       // product of children
        Scale,         // value * child
        Power          // child^power, integer power >= 1
    };

    Kind kind;
    int component = -1;     // Component
    SpaceDerivSpec sderiv;  // SpaceDeriv / MixedDeriv (folds may be 0 = pure time)
    FracOrder t_order;      // MixedDeriv
    std::string var;        // CoordMonomial
    ExponentVector expo;    // CoordMonomial
    double value = 0.0;     // Const / Scale
    int power = 1;          // Power
    std::vector<OpRef> kids;
};

OpRef op_component(int p);
OpRef op_sderiv(OpRef child, const std::string& var, const FracOrder& base, int folds = 1);
OpRef op_mixed(OpRef child, const FracOrder& t_order, const std::string& var,
               const FracOrder& base, int folds);
OpRef op_coord(const std::string& var, const ExponentVector& expo);
OpRef op_const(double v);
OpRef op_sum(std::vector<OpRef> kids);
OpRef op_product(std::vector<OpRef> kids);
OpRef op_scale(double c, OpRef child);
OpRef op_power(OpRef child, int k);

// ---------------------------------------------------------------------------
// Time operator: per component, a weighted sum of time derivatives.  Each
// term is lambda * (D^base)^folds in the time variable; both order families
// in use (i*alpha as sequential folds, alpha+i-1 as single higher orders)
// are expressible.  Total symbolic order is folds*base.
// ---------------------------------------------------------------------------

struct TimeTerm {
    double lambda = 1.0;
    FracOrder base;
    int folds = 1;
    DerivKind kind = DerivKind::Caputo;
};

struct TimeOperator {
    std::vector<std::vector<TimeTerm>> terms; // per component
};

// Per component, the expanded basis functions of the trial subspace.  All
// series share a variable list (the space variables) and a ParamTable.
struct SubspaceBasis {
    std::vector<std::vector<GenSeries>> phi;

    int components() const { return static_cast<int>(phi.size()); }
    int dim(int p) const { return static_cast<int>(phi.at(p).size()); }
};

// ---------------------------------------------------------------------------
// Generic-coordinate environment.  Base symbols are the subspace coordinates
// k_pj; marker symbols stand for time derivatives D^g[k_pj] produced by
// mixed-derivative operators.  Markers must enter linearly.
// ---------------------------------------------------------------------------

struct MarkerEnv {
    SymbolTableRef syms;
    int n_base = 0;
    // marker bookkeeping, aligned: marker symbol index -> (base symbol, order)
    std::vector<int> marker_base;
    std::vector<FracOrder> marker_order;
    std::map<std::pair<std::string, int>, int> marker_of; // (order text, base) -> symbol

    bool is_marker(int sym) const { return sym >= n_base; }
    int marker(const std::string& order_text, int base) const;
};
using MarkerEnvRef = std::shared_ptr<const MarkerEnv>;

MarkerEnvRef build_marker_env(const ParamTable& params, const std::vector<std::string>& base_names,
                              const std::vector<OpRef>& trees);

// Evaluation context for op_apply.  `markers` null: numeric mode (fields are
// concrete series in time and space; mixed derivatives differentiate in
// `time_var`).  `markers` set: generic mode (fields are time-free subspace
// elements with Poly coefficients; mixed derivatives map coordinates
// linearly onto marker symbols).
struct ApplyContext {
    std::string time_var = "t";
    MarkerEnvRef markers;
};

// Applies one operator tree per component to the tuple of fields.  Errors
// from the derivative rules are rethrown with the offending subtree path.
std::vector<GenSeries> op_apply(const std::vector<OpRef>& N, const std::vector<GenSeries>& f,
                                const ApplyContext& ctx = {});

// ---------------------------------------------------------------------------
// Invariance decision.
// ---------------------------------------------------------------------------

struct InvarianceReport {
    bool invariant = false;
    // psi[p][j]: expansion coefficient of the p-th image on basis function j,
    // a polynomial over env->syms (markers only for mixed-derivative trees).
    std::vector<std::vector<Poly>> psi;
    // Per component: largest image coefficient left unexplained by the fit,
    // split at the reliable frontier.  Below-frontier residual is genuine
    // (the image leaves the span); beyond-frontier residual is a truncation
    // artifact of expanded special-function bases.
    std::vector<double> genuine_residual;
    std::vector<double> artifact_residual;
    std::vector<double> image_scale;
    MarkerEnvRef env;
    std::vector<std::vector<int>> coord; // symbol index of coordinate (p,j)
    std::vector<Rational> basis_truncation; // per space variable, min over basis
};

// Applies N to the generic element sum_j k_pj phi_pj and fits each component
// image back onto its basis.  Invariance requires every genuine residual to
// sit at the coefficient-noise floor relative to the image scale.
InvarianceReport check_invariant(const std::vector<OpRef>& N, const SubspaceBasis& I,
                                 const std::vector<std::string>& coord_names = {},
                                 const std::string& time_var = "t");

// Default coordinate names K1..,L1..,M1.. for components 0,1,2,...
std::vector<std::string> default_coord_names(const SubspaceBasis& I);

// ---------------------------------------------------------------------------
// Reduced systems of fractional ODEs in the expansion coefficients.
// ---------------------------------------------------------------------------

// One derivative term on the right side: coef * (D^order K_{comp,j}).
struct RhsDerivTerm {
    double coef = 0.0;
    int comp = -1;
    int j = -1;
    FracOrder order;
};

struct FODEEquation {
    int comp = -1; // unknown K_{comp,j} on the left side
    int j = -1;
    std::vector<TimeTerm> lhs; // sum_i lambda_i (D^base)^folds applied to it
    Poly psi;                  // polynomial right side over FODESystem::symbols
    std::vector<RhsDerivTerm> rhs_derivs;
};

struct FODESystem {
    SymbolTableRef symbols;                 // unknown names, marker-free
    std::vector<std::vector<int>> unknown;  // symbol index of (comp, j)
    std::vector<FODEEquation> eqs;          // one per unknown, same order
    ParamTableRef params;
    std::string time_var = "t";

    int unknown_count() const;
};

// Mechanical reduction: time operator on the left, fitted psi on the right.
// Throws NotInvariantError when the subspace is not invariant under N.
FODESystem reduce(const TimeOperator& T, const std::vector<OpRef>& N, const SubspaceBasis& I,
                  const std::vector<std::string>& coord_names = {},
                  const std::string& time_var = "t");

// ---------------------------------------------------------------------------
// Residual of a candidate solution in the original equations.
// ---------------------------------------------------------------------------

// Candidate in separated form: f_p(t,x) = sum_j K_pj(t) phi_pj(x).
struct SolutionForm {
    SubspaceBasis basis;
    std::vector<std::vector<GenSeries>> K; // per component, per j: series in time
    std::string time_var = "t";
};

// Assembles each field, applies both sides in the series algebra, drops
// beyond-frontier terms, and evaluates on the grid.  Grid points are ordered
// [t, space vars in basis order]; all coordinates must be positive.
// Returns max |LHS - RHS| / (1 + max |field value|).
double residual(const TimeOperator& T, const std::vector<OpRef>& N, const SolutionForm& sol,
                const std::vector<std::vector<double>>& grid);

// Assembled fields of a SolutionForm over [t, space vars].
std::vector<GenSeries> assemble(const SolutionForm& sol);

// Copy of s without terms beyond the reliable frontier of any variable.
GenSeries drop_beyond_frontier(const GenSeries& s);

// ---------------------------------------------------------------------------
// Truncated expansions of the basis atoms used by the catalog examples.
// All return series over `vars` in the single variable `var`, truncated and
// frontier-marked at `trunc`.
// ---------------------------------------------------------------------------

// E_b(lam x^b) = sum_k lam^k x^{kb} / Gamma(kb+1)
GenSeries ml_atom(ParamTableRef params, const std::vector<std::string>& vars,
                  const std::string& var, double lam, const ExponentVector& b,
                  const Rational& trunc);

// sin_b(lam x^b) = sum_k (-1)^k lam^{2k+1} x^{(2k+1)b} / Gamma((2k+1)b+1)
GenSeries sin_atom(ParamTableRef params, const std::vector<std::string>& vars,
                   const std::string& var, double lam, const ExponentVector& b,
                   const Rational& trunc);

// cos_b(lam x^b) = sum_k (-1)^k lam^{2k} x^{2kb} / Gamma(2kb+1)
GenSeries cos_atom(ParamTableRef params, const std::vector<std::string>& vars,
                   const std::string& var, double lam, const ExponentVector& b,
                   const Rational& trunc);

// x^w E_{a,b}(lam x^a) = sum_k lam^k x^{ak+w} / Gamma(a_v k + b_v)
GenSeries ml2_atom(ParamTableRef params, const std::vector<std::string>& vars,
                   const std::string& var, double lam, const ExponentVector& a,
                   const ExponentVector& b, const ExponentVector& w, const Rational& trunc);

// t^{na+b-1} E^{(n)}_{a,b}(sgn lam t^a)
//   = sum_k ((k+n)!/k!) (sgn lam)^k t^{a(k+n)+b-1} / Gamma(a(k+n)+b)
GenSeries eps_atom(ParamTableRef params, const std::vector<std::string>& vars,
                   const std::string& var, int n, double lam, bool minus_sign,
                   const ExponentVector& a, const ExponentVector& b, const Rational& trunc);

} // namespace fpde

#endif
