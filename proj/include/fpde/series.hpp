#ifndef FPDE_SERIES_HPP
#define FPDE_SERIES_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fpde/poly.hpp"
#include "fpde/rational.hpp"

namespace fpde {

// Admissible range for a parameter, with optional excluded points.
struct ParamRange {
    Rational lo;
    Rational hi;
    bool lo_open = true;
    bool hi_open = false;
    std::vector<Rational> excluded;
    std::string text; // human-readable description used in error messages

    bool admits(const Rational& v) const;
};

// Named real parameters (fractional orders and similar).  Values are exact
// rationals so exponent arithmetic downstream stays exact.
class ParamTable {
  public:
    ParamTable() = default;

    // Throws ParamOutOfRangeError when the value violates the declared range.
    void declare(const std::string& name, const Rational& value,
                 std::optional<ParamRange> range = std::nullopt);

    std::size_t size() const { return names_.size(); }
    int index(const std::string& name) const; // -1 if absent
    int require(const std::string& name) const;
    const std::string& name(int i) const { return names_.at(i); }
    const Rational& value(int i) const { return values_.at(i); }
    const Rational& value(const std::string& name) const { return values_.at(require(name)); }
    const std::optional<ParamRange>& range(int i) const { return ranges_.at(i); }
    const std::vector<std::string>& names() const { return names_; }

  private:
    std::vector<std::string> names_;
    std::vector<Rational> values_;
    std::vector<std::optional<ParamRange>> ranges_;
};
using ParamTableRef = std::shared_ptr<const ParamTable>;

// Exponent of one variable: an exact rational constant plus rational
// multiples of the declared parameters, e.g. 2*beta + 1.
struct ExponentVector {
    Rational c;
    std::vector<Rational> m; // aligned with the ParamTable

    static ExponentVector constant(const ParamTable& p, const Rational& v);
    static ExponentVector param(const ParamTable& p, const std::string& name,
                                const Rational& scale = Rational(1));

    Rational value(const ParamTable& p) const; // exact numeric value
    bool is_zero() const;
    ExponentVector operator+(const ExponentVector& o) const;
    ExponentVector operator-(const ExponentVector& o) const;
    ExponentVector scaled(const Rational& s) const;
    bool operator==(const ExponentVector& o) const { return c == o.c && m == o.m; }
    bool operator!=(const ExponentVector& o) const { return !(*this == o); }
    bool operator<(const ExponentVector& o) const;

    std::string str(const ParamTable& p) const;
};

using ExpKey = std::vector<ExponentVector>; // one exponent per variable

// Sparse multivariate generalized power series sum c_e * prod_v var^e_v with
// exact symbolic exponents and Scalar-or-Poly coefficients.
class GenSeries {
  public:
    GenSeries() = default;
    GenSeries(ParamTableRef params, std::vector<std::string> vars);

    static GenSeries zero(ParamTableRef params, std::vector<std::string> vars);
    static GenSeries constant(ParamTableRef params, std::vector<std::string> vars, Coeff c);
    // c * var^exp as a series over `vars`.
    static GenSeries monomial(ParamTableRef params, std::vector<std::string> vars,
                              const std::string& var, const ExponentVector& exp, Coeff c);

    const ParamTableRef& params() const { return params_; }
    const std::vector<std::string>& vars() const { return vars_; }
    int var_index(const std::string& v) const; // -1 if absent
    const std::map<ExpKey, Coeff>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    // Per-variable truncation bound: terms with exponent value > bound are
    // dropped by multiplicative/integrating operations.
    const std::vector<Rational>& truncation() const { return trunc_; }
    void set_truncation(const std::string& var, const Rational& bound);
    void set_truncation_all(const Rational& bound);
    bool truncated() const { return truncated_; }
    void mark_truncated() { truncated_ = true; }

    // Reliable frontier: the numeric exponent (per variable) up to which the
    // series is complete.  Infinity for exact finite expressions; expanding a
    // special function to the truncation bound sets it to that bound.
    const std::vector<double>& frontier() const { return frontier_; }
    void set_frontier(const std::string& var, double f);

    void add_term(const ExpKey& e, const Coeff& c); // accumulates
    GenSeries operator+(const GenSeries& o) const;
    GenSeries operator-(const GenSeries& o) const;
    GenSeries operator*(const GenSeries& o) const;
    GenSeries scaled(const Coeff& c) const;
    GenSeries scaled(double c) const { return scaled(Coeff(c)); }

    // Drop coefficients below 1e-12 relative to the largest coefficient.
    GenSeries normalized(double rel_floor = 1e-12) const;

    // Map this series into a superset variable list (new variables get
    // exponent zero in every term).
    GenSeries embedded(const std::vector<std::string>& vars) const;

    // Evaluate at a point (one positive value per variable).  Throws
    // UnspecializedPolyError if a coefficient is a non-constant polynomial,
    // DomainError for nonpositive bases with fractional or negative exponents.
    double eval(const std::vector<double>& point) const;

    double max_abs_coeff() const;
    std::string str(int precision = 12) const;

    // True when every exponent of the key sits at or below the truncation
    // bound of its variable.
    bool within_truncation(const ExpKey& e) const;

  private:
    ParamTableRef params_;
    std::vector<std::string> vars_;
    std::map<ExpKey, Coeff> terms_;
    std::vector<Rational> trunc_;
    std::vector<double> frontier_;
    bool truncated_ = false;
};

// Result of expressing a series in a finite basis.
struct FitResult {
    std::vector<Coeff> coeffs;  // one per basis element
    GenSeries residual;         // s - sum c_j b_j (all exponents)
    bool in_span = false;       // residual empty after normalization
};

// Least-structure exact fit: solves for c_j on the union of exponent keys.
// Basis elements must have scalar coefficients and be linearly independent
// (DependentBasisError otherwise).
FitResult fit_to_basis(const GenSeries& s, const std::vector<GenSeries>& basis);

bool series_equal(const GenSeries& a, const GenSeries& b, double rel_tol = 1e-10);

} // namespace fpde

#endif
