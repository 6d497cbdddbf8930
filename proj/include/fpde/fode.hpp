#ifndef FPDE_FODE_HPP
#define FPDE_FODE_HPP

#include "fpde/operators.hpp"

#include <map>

namespace fpde {

// ---------------------------------------------------------------------------
// Solvers for the reduced systems in the time coefficients K_pj(t).
// ---------------------------------------------------------------------------

// Initial data for Caputo systems, one row per unknown in FODESystem order.
// For a sequential family (folds of one base order a) row k holds
// (D^a)^i K(0) for i = 0..folds-1; for single orders with top ceiling n it
// holds the classical K^(i)(0) for i = 0..n-1.
struct FODEInitialData {
    std::vector<std::vector<double>> values;
};

// One solved unknown per entry, as a generalized power series in the time
// variable.  `form` tags closed forms recognized by the caller ("" = plain
// series); `constants` records named free constants bound along the way.
struct FODESolution {
    std::vector<GenSeries> K;
    std::string form;
    std::map<std::string, double> constants;
};

// Exact-exponent power series marching for linear constant-coefficient
// Caputo systems.  Right sides must be affine in the unknowns (degree <= 1)
// plus the optional lower-order derivative couplings.  Per equation the top
// time order must strictly dominate every other order on either side.
// Exponents live on the lattice generated from the initial-data exponents
// and the downward steps {top - lower}; more than `kLatticeCap` points below
// the truncation raises LatticeError.  Coefficients at exponents annihilated
// by the top derivative are the initial-data slots; everything else marches
// ascending.  A nonzero residual after the march raises
// InconsistentSystemError.
FODESolution solve_series(const FODESystem& sys, const FODEInitialData& ics,
                          const Rational& truncation);

inline constexpr int kLatticeCap = 400;

// Power-law ansatz K_j = c_j t^{-a} for Riemann-Liouville systems
// D^a K = psi(K) with homogeneous right sides (degree 1 and 2 only).  The
// balance equations P c = psi_2(c), 0 = psi_1(c) with
// P = Gamma(1-a)/Gamma(1-2a) are solved by damped Gauss-Newton from a
// deterministic grid of starts; `pins` fixes chosen coordinates (by unknown
// index) to caller-supplied values.  Returns the distinct real branches
// sorted lexicographically; throws PoleError when P = 0 (a = 1/2 makes
// t^{-a} a kernel element) and NoPowerLawSolutionError when nothing
// converges.
std::vector<FODESolution> solve_power_ansatz(const FODESystem& sys,
                                             const std::map<int, double>& pins = {});

// Picard-type iterates for the fixed-point form K = g0 + c I^a[K]:
// K^0 = g0, K^{m+1} = c I^a[K^m].  Returns {K^0, ..., K^n}.  An iterate with
// every term beyond the truncation frontier while nonzero raises
// TruncationStallError; an exactly zero iterate ends the recursion early.
std::vector<GenSeries> nim_iterates(const GenSeries& g0, double c, const std::string& var,
                                    const FracOrder& a, int n);

// Partial sum K^0 + ... + K^n of the iterates above.
FODESolution nim_solve(const GenSeries& g0, double c, const std::string& var,
                       const FracOrder& a, int n);

// Numeric trajectory from the predictor-corrector scheme: y[i][k] is unknown
// k at t[i].
struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
};

// Fractional Adams-Bashforth-Moulton (PECE) for D^a K = psi(K) with one
// shared Caputo order 0 < a <= 1 and polynomial right sides.  Fixed step h
// from 0 to horizon; throws StepError for h <= 0, horizon < h, or a
// non-finite state.
Trajectory adams_pece(const FODESystem& sys, const std::vector<double>& y0, double h,
                      double horizon);

} // namespace fpde

#endif
