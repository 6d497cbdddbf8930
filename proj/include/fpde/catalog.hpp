#ifndef FPDE_CATALOG_HPP
#define FPDE_CATALOG_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpde/fode.hpp"
#include "fpde/operators.hpp"

namespace fpde {

// ---------------------------------------------------------------------------
// Problem catalog: machine-readable encodings of the ten study systems, each
// with its time operator, space operator trees, invariant subspace, reduced
// right-side targets, free-constant bindings, and closed-form solution.
// ---------------------------------------------------------------------------

// One axis of a rectangular grid: `count` evenly spaced nodes on [lo, hi]
// (just lo when count == 1).
struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;
};

std::vector<double> axis_nodes(const GridAxis& a);

// Serializable recipe for one additive piece of a basis function.
//   kind "mono": coeff * prod_i var^exponent  (exps as (var, exponent text))
//   kind "ml"  : coeff * E_order(lam var^order)
//   kind "sin" : coeff * sin_order(lam var^order)
//   kind "cos" : coeff * cos_order(lam var^order)
// Exponent/order texts use the ExponentVector::str grammar over the spec's
// parameter names ("beta", "2*beta", "beta + 1", "3/5").
struct BasisAtom {
    std::string kind;
    std::string var;
    double lam = 0.0;
    std::string order;
    double coeff = 1.0;
    std::vector<std::pair<std::string, std::string>> exps;
};
using BasisRecipe = std::vector<std::vector<std::vector<BasisAtom>>>;

struct ProblemSpec {
    std::string id;
    std::string title;
    ParamTableRef params;
    TimeOperator T;
    std::vector<OpRef> N;
    SubspaceBasis I;
    BasisRecipe recipe;                    // how I's functions were assembled
    std::vector<SubspaceBasis> alternates; // invariance-only extra subspaces
    std::vector<BasisRecipe> alternate_recipes;
    std::optional<FODEInitialData> ics;    // classical IC rows (Caputo systems)
    std::map<std::string, double> free_constants; // bound values incl. defaults
    std::vector<std::string> coord_names;  // flat, component-major: K1,K2,L1,...
    std::vector<std::string> field_names;  // f, g, ...
    std::vector<std::string> space_vars;
    std::string time_var = "t";
    std::vector<Poly> psi_target;          // expected reduced right sides, flat
    std::vector<std::vector<RhsDerivTerm>> rhs_target; // expected D^g[K] terms
    GridAxis verify_time;                  // default verification grid
    std::vector<GridAxis> verify_space;
    GridAxis sample_time;                  // default figure-data grid
    std::vector<GridAxis> sample_space;
    Rational truncation = Rational(12);
};

struct KnownSolution {
    SolutionForm sol;        // coefficient series at the bound constants
    std::string description; // closed-form family the coefficients came from
};

struct ExampleInfo {
    std::string id;
    std::string title;
};

// The ten problem ids in catalog order.
const std::vector<ExampleInfo>& catalog_index();

// Builds the fully bound spec and closed-form solution for one id.  `params`
// overrides fractional orders (plus the family size "n" for dispersive-kdv);
// `bindings` overrides free constants; `truncation` replaces the default
// series frontier (12).  Throws UnknownExampleError for ids not in the index
// and ParamOutOfRangeError when a value leaves its admissible range (the
// message cites the range, e.g. "gamma < alpha1, gamma < alpha2").
std::pair<ProblemSpec, KnownSolution> build(const std::string& id,
                                            const std::map<std::string, Rational>& params = {},
                                            const std::map<std::string, double>& bindings = {},
                                            std::optional<Rational> truncation = std::nullopt);

struct StageReport {
    bool ok = false;
    double value = 0.0; // stage magnitude: residual, worst delta, ...
    std::string note;
};

// Stage tolerances used by verify().
inline constexpr double kInvarianceTol = 1e-9;
inline constexpr double kPsiMatchTol = 1e-9;
inline constexpr double kResidualTol = 1e-8;
inline constexpr double kSeriesOracleTol = 1e-7;
inline constexpr double kNumericOracleTol = 1e-3;

struct VerificationReport {
    std::string id;
    StageReport invariance; // subspace (and alternates) closed under N
    StageReport reduction;  // reduce() matches psi_target / rhs_target
    StageReport residual;   // known solution in the original equations
    StageReport oracle;     // independent recomputation of the K series
    bool pass() const { return invariance.ok && reduction.ok && residual.ok && oracle.ok; }
};

// Replays the pipeline on one built problem.  `grid` points are [t, space...]
// rows; empty means the spec's default verification grid.  Failures are
// report entries, never exceptions.
VerificationReport verify(const ProblemSpec& ps, const KnownSolution& ks,
                          const std::vector<std::vector<double>>& grid = {});

// verify() for every id at default parameters and bindings; runs on a
// std::async worker per id and returns reports in catalog order.
std::vector<VerificationReport> verify_all();

// Sampled field values as CSV: header "t,<space vars>,<fields>", one row per
// node (time-major, then space axes left to right), 17 significant digits,
// LF line endings.
std::string sample_csv(const ProblemSpec& ps, const KnownSolution& ks, const GridAxis& time_axis,
                       const std::vector<GridAxis>& space_axes);
std::string sample_csv(const ProblemSpec& ps, const KnownSolution& ks); // default grids

// Versioned JSON encoding (schema "fpde.problem/1"); field names mirror
// ProblemSpec.  from_json re-reads id, params, and free_constants and
// rebuilds through build(), so round trips are structurally lossless.
std::string to_json(const ProblemSpec& ps);
std::pair<ProblemSpec, KnownSolution> from_json(const std::string& text);

} // namespace fpde

#endif
