#ifndef FPDE_POLY_HPP
#define FPDE_POLY_HPP

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "fpde/errors.hpp"

namespace fpde {

// Ordered list of scalar symbols (the K-coefficients of a generic subspace
// element, plus any derivative markers).  Shared by every Poly in one
// computation so exponent vectors stay aligned.
struct SymbolTable {
    std::vector<std::string> names;
    int index(const std::string& n) const;
};
using SymbolTableRef = std::shared_ptr<const SymbolTable>;

// Graded-lex order on monomial exponent vectors: total degree first, then
// lexicographic.  This is the canonical term order used for printing and
// equality.
struct GradedLex {
    bool operator()(const std::vector<int>& a, const std::vector<int>& b) const;
};

// Multivariate polynomial with real coefficients over a shared symbol table.
class Poly {
  public:
    Poly() = default;
    explicit Poly(SymbolTableRef syms) : syms_(std::move(syms)) {}
    static Poly constant(SymbolTableRef syms, double v);
    static Poly symbol(SymbolTableRef syms, int idx, double scale = 1.0);

    const SymbolTableRef& symbols() const { return syms_; }
    const std::map<std::vector<int>, double, GradedLex>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    double constant_value() const; // requires is_constant()
    int degree() const;
    double max_abs_coeff() const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly scaled(double c) const;

    // Drop monomials with |coeff| <= floor.
    Poly cleaned(double floor_abs) const;

    double eval(const std::vector<double>& values) const;
    // Partial derivative with respect to symbol idx.
    Poly derivative(int idx) const;
    // Substitute: rename symbols into another table (by index map).
    Poly remap(SymbolTableRef target, const std::vector<int>& index_map) const;

    std::string str(int precision = 12) const;

  private:
    SymbolTableRef syms_;
    std::map<std::vector<int>, double, GradedLex> terms_;
    void set(const std::vector<int>& m, double v);
    friend Poly poly_term(SymbolTableRef, const std::vector<int>&, double);
};

Poly poly_term(SymbolTableRef syms, const std::vector<int>& mono, double coeff);

bool poly_equal(const Poly& a, const Poly& b, double rel_tol);

// Series coefficient: either a plain real or a polynomial in the symbols.
// Mixed arithmetic promotes the scalar side.
class Coeff {
  public:
    Coeff() : v_(0.0) {}
    Coeff(double d) : v_(d) {}
    Coeff(Poly p) : v_(std::move(p)) {}

    bool is_scalar() const { return std::holds_alternative<double>(v_); }
    double scalar() const; // throws unless scalar or constant poly
    const Poly& poly() const { return std::get<Poly>(v_); }

    bool is_zero() const;
    double max_abs() const;

    Coeff operator+(const Coeff& o) const;
    Coeff operator-(const Coeff& o) const;
    Coeff operator*(const Coeff& o) const;
    Coeff scaled(double c) const;
    Coeff cleaned(double floor_abs) const;
    double eval(const std::vector<double>& values) const;

    std::string str(int precision = 12) const;

  private:
    std::variant<double, Poly> v_;
};

} // namespace fpde

#endif
