#include "fpde/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fpde {

int SymbolTable::index(const std::string& n) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return static_cast<int>(i);
    throw DomainError("unknown symbol '" + n + "'");
}

bool GradedLex::operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    int da = std::accumulate(a.begin(), a.end(), 0);
    int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) return da < db;
    return a < b;
}

void Poly::set(const std::vector<int>& m, double v) {
    if (v == 0.0) return;
    terms_[m] = v;
}

Poly Poly::constant(SymbolTableRef syms, double v) {
    Poly p(std::move(syms));
    p.set(std::vector<int>(p.syms_ ? p.syms_->names.size() : 0, 0), v);
    return p;
}

Poly Poly::symbol(SymbolTableRef syms, int idx, double scale) {
    Poly p(syms);
    std::vector<int> m(syms->names.size(), 0);
    m.at(idx) = 1;
    p.set(m, scale);
    return p;
}

Poly poly_term(SymbolTableRef syms, const std::vector<int>& mono, double coeff) {
    Poly p(std::move(syms));
    p.set(mono, coeff);
    return p;
}

bool Poly::is_constant() const {
    for (const auto& [m, c] : terms_)
        if (std::accumulate(m.begin(), m.end(), 0) != 0) return false;
    return true;
}

double Poly::constant_value() const {
    double v = 0.0;
    for (const auto& [m, c] : terms_) {
        if (std::accumulate(m.begin(), m.end(), 0) != 0)
            throw UnspecializedPolyError("polynomial coefficient is not a constant: " + str());
        v += c;
    }
    return v;
}

int Poly::degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, std::accumulate(m.begin(), m.end(), 0));
    return d;
}

double Poly::max_abs_coeff() const {
    double v = 0.0;
    for (const auto& [m, c] : terms_) v = std::max(v, std::fabs(c));
    return v;
}

namespace {
void check_same_table(const Poly& a, const Poly& b) {
    if (a.symbols() && b.symbols() && a.symbols() != b.symbols() &&
        a.symbols()->names != b.symbols()->names)
        throw DomainError("polynomials over different symbol tables");
}
} // namespace

Poly Poly::operator+(const Poly& o) const {
    check_same_table(*this, o);
    Poly r(syms_ ? syms_ : o.syms_);
    r.terms_ = terms_;
    for (const auto& [m, c] : o.terms_) {
        auto it = r.terms_.find(m);
        if (it == r.terms_.end())
            r.terms_[m] = c;
        else {
            it->second += c;
            if (it->second == 0.0) r.terms_.erase(it);
        }
    }
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + o.scaled(-1.0); }

Poly Poly::operator*(const Poly& o) const {
    check_same_table(*this, o);
    Poly r(syms_ ? syms_ : o.syms_);
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) {
            std::vector<int> m(ma.size());
            for (std::size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
            r.terms_[m] += ca * cb;
        }
    for (auto it = r.terms_.begin(); it != r.terms_.end();)
        it = (it->second == 0.0) ? r.terms_.erase(it) : std::next(it);
    return r;
}

Poly Poly::scaled(double c) const {
    Poly r(syms_);
    if (c == 0.0) return r;
    for (const auto& [m, v] : terms_) r.terms_[m] = v * c;
    return r;
}

Poly Poly::cleaned(double floor_abs) const {
    Poly r(syms_);
    for (const auto& [m, v] : terms_)
        if (std::fabs(v) > floor_abs) r.terms_[m] = v;
    return r;
}

double Poly::eval(const std::vector<double>& values) const {
    if (syms_ && values.size() != syms_->names.size())
        throw DomainError("wrong number of values in polynomial evaluation");
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = c;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (int k = 0; k < m[i]; ++k) t *= values[i];
        sum += t;
    }
    return sum;
}

Poly Poly::derivative(int idx) const {
    Poly r(syms_);
    for (const auto& [m, c] : terms_) {
        if (m[idx] == 0) continue;
        std::vector<int> d = m;
        d[idx] -= 1;
        r.terms_[d] += c * m[idx];
    }
    return r;
}

Poly Poly::remap(SymbolTableRef target, const std::vector<int>& index_map) const {
    Poly r(target);
    for (const auto& [m, c] : terms_) {
        std::vector<int> t(target->names.size(), 0);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            t.at(index_map.at(i)) += m[i];
        }
        r.terms_[t] += c;
    }
    return r;
}

std::string Poly::str(int precision) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    out.precision(precision);
    bool first = true;
    // print highest degree first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        double c = it->second;
        if (!first) out << (c < 0 ? " - " : " + ");
        else if (c < 0) out << "-";
        first = false;
        double a = std::fabs(c);
        const auto& m = it->first;
        std::ostringstream cs;
        cs.precision(precision);
        cs << a;
        bool unit = cs.str() == "1"; // unit at display precision
        bool any_sym = std::accumulate(m.begin(), m.end(), 0) > 0;
        if (!unit || !any_sym) out << cs.str();
        bool star = !unit || !any_sym;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (star) out << "*";
            out << syms_->names[i];
            if (m[i] > 1) out << "^" << m[i];
            star = true;
        }
    }
    return out.str();
}

bool poly_equal(const Poly& a, const Poly& b, double rel_tol) {
    double scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
    double tol = rel_tol * std::max(scale, 1e-300);
    Poly d = a - b;
    for (const auto& [m, c] : d.terms())
        if (std::fabs(c) > tol) return false;
    return true;
}

double Coeff::scalar() const {
    if (is_scalar()) return std::get<double>(v_);
    return std::get<Poly>(v_).constant_value();
}

bool Coeff::is_zero() const {
    if (is_scalar()) return std::get<double>(v_) == 0.0;
    return std::get<Poly>(v_).is_zero();
}

double Coeff::max_abs() const {
    if (is_scalar()) return std::fabs(std::get<double>(v_));
    return std::get<Poly>(v_).max_abs_coeff();
}

namespace {
Poly promote(double d, const Poly& like) { return Poly::constant(like.symbols(), d); }
} // namespace

Coeff Coeff::operator+(const Coeff& o) const {
    if (is_scalar() && o.is_scalar()) return Coeff(scalar() + o.scalar());
    if (is_scalar()) return Coeff(promote(std::get<double>(v_), o.poly()) + o.poly());
    if (o.is_scalar()) return Coeff(poly() + promote(std::get<double>(o.v_), poly()));
    return Coeff(poly() + o.poly());
}

Coeff Coeff::operator-(const Coeff& o) const { return *this + o.scaled(-1.0); }

Coeff Coeff::operator*(const Coeff& o) const {
    if (is_scalar() && o.is_scalar()) return Coeff(std::get<double>(v_) * std::get<double>(o.v_));
    if (is_scalar()) return Coeff(o.poly().scaled(std::get<double>(v_)));
    if (o.is_scalar()) return Coeff(poly().scaled(std::get<double>(o.v_)));
    return Coeff(poly() * o.poly());
}

Coeff Coeff::scaled(double c) const {
    if (is_scalar()) return Coeff(std::get<double>(v_) * c);
    return Coeff(poly().scaled(c));
}

Coeff Coeff::cleaned(double floor_abs) const {
    if (is_scalar())
        return Coeff(std::fabs(std::get<double>(v_)) > floor_abs ? std::get<double>(v_) : 0.0);
    return Coeff(poly().cleaned(floor_abs));
}

double Coeff::eval(const std::vector<double>& values) const {
    if (is_scalar()) return std::get<double>(v_);
    return poly().eval(values);
}

std::string Coeff::str(int precision) const {
    if (is_scalar()) {
        std::ostringstream out;
        out.precision(precision);
        out << std::get<double>(v_);
        return out.str();
    }
    return poly().str(precision);
}

} // namespace fpde
