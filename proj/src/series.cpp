#include "fpde/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "fpde/errors.hpp"

namespace fpde {

namespace {
// Sentinel truncation bound: large enough to never clip honest algebra.
const Rational kNoTrunc(1000000000);
const double kInf = std::numeric_limits<double>::infinity();
} // namespace

bool ParamRange::admits(const Rational& v) const {
    if (lo_open ? !(v > lo) : !(v >= lo)) return false;
    if (hi_open ? !(v < hi) : !(v <= hi)) return false;
    for (const auto& x : excluded)
        if (v == x) return false;
    return true;
}

void ParamTable::declare(const std::string& name, const Rational& value,
                         std::optional<ParamRange> range) {
    if (index(name) >= 0) throw Error("parameter declared twice: " + name);
    if (range && !range->admits(value)) {
        std::string why = range->text.empty()
                              ? ("[" + range->lo.str() + ", " + range->hi.str() + "]")
                              : range->text;
        throw ParamOutOfRangeError("parameter " + name + " = " + value.str() +
                                   " outside admissible range " + why);
    }
    names_.push_back(name);
    values_.push_back(value);
    ranges_.push_back(std::move(range));
}

int ParamTable::index(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<int>(i);
    return -1;
}

int ParamTable::require(const std::string& name) const {
    int i = index(name);
    if (i < 0) throw Error("unknown parameter: " + name);
    return i;
}

ExponentVector ExponentVector::constant(const ParamTable& p, const Rational& v) {
    ExponentVector e;
    e.c = v;
    e.m.assign(p.size(), Rational(0));
    return e;
}

ExponentVector ExponentVector::param(const ParamTable& p, const std::string& name,
                                     const Rational& scale) {
    ExponentVector e = constant(p, Rational(0));
    e.m[p.require(name)] = scale;
    return e;
}

Rational ExponentVector::value(const ParamTable& p) const {
    if (m.size() != p.size()) throw Error("exponent vector does not match parameter table");
    Rational v = c;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!m[i].is_zero()) v = v + m[i] * p.value(static_cast<int>(i));
    return v;
}

bool ExponentVector::is_zero() const {
    if (!c.is_zero()) return false;
    for (const auto& x : m)
        if (!x.is_zero()) return false;
    return true;
}

ExponentVector ExponentVector::operator+(const ExponentVector& o) const {
    if (m.size() != o.m.size()) throw Error("exponent vector size mismatch");
    ExponentVector r;
    r.c = c + o.c;
    r.m.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) r.m[i] = m[i] + o.m[i];
    return r;
}

ExponentVector ExponentVector::operator-(const ExponentVector& o) const {
    return *this + o.scaled(Rational(-1));
}

ExponentVector ExponentVector::scaled(const Rational& s) const {
    ExponentVector r;
    r.c = c * s;
    r.m.resize(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) r.m[i] = m[i] * s;
    return r;
}

bool ExponentVector::operator<(const ExponentVector& o) const {
    if (c != o.c) return c < o.c;
    return std::lexicographical_compare(m.begin(), m.end(), o.m.begin(), o.m.end());
}

std::string ExponentVector::str(const ParamTable& p) const {
    std::string out;
    auto append = [&out](const Rational& coeff, const std::string& sym) {
        bool neg = coeff < Rational(0);
        Rational a = neg ? Rational(0) - coeff : coeff;
        if (out.empty()) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        if (sym.empty()) {
            out += a.str();
        } else {
            if (!(a == Rational(1))) out += a.str() + "*";
            out += sym;
        }
    };
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!m[i].is_zero()) append(m[i], p.name(static_cast<int>(i)));
    if (!c.is_zero() || out.empty()) append(c, "");
    return out;
}

GenSeries::GenSeries(ParamTableRef params, std::vector<std::string> vars)
    : params_(std::move(params)), vars_(std::move(vars)) {
    trunc_.assign(vars_.size(), kNoTrunc);
    frontier_.assign(vars_.size(), kInf);
}

GenSeries GenSeries::zero(ParamTableRef params, std::vector<std::string> vars) {
    return GenSeries(std::move(params), std::move(vars));
}

GenSeries GenSeries::constant(ParamTableRef params, std::vector<std::string> vars, Coeff c) {
    GenSeries s(std::move(params), std::move(vars));
    ExpKey key(s.vars_.size(), ExponentVector::constant(*s.params_, Rational(0)));
    s.add_term(key, c);
    return s;
}

GenSeries GenSeries::monomial(ParamTableRef params, std::vector<std::string> vars,
                              const std::string& var, const ExponentVector& exp, Coeff c) {
    GenSeries s(std::move(params), std::move(vars));
    int vi = s.var_index(var);
    if (vi < 0) throw VariableMismatchError("monomial variable not in series: " + var);
    ExpKey key(s.vars_.size(), ExponentVector::constant(*s.params_, Rational(0)));
    key[vi] = exp;
    s.add_term(key, c);
    return s;
}

int GenSeries::var_index(const std::string& v) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i] == v) return static_cast<int>(i);
    return -1;
}

void GenSeries::set_truncation(const std::string& var, const Rational& bound) {
    int vi = var_index(var);
    if (vi < 0) throw VariableMismatchError("truncation variable not in series: " + var);
    trunc_[vi] = bound;
}

void GenSeries::set_truncation_all(const Rational& bound) {
    for (auto& t : trunc_) t = bound;
}

void GenSeries::set_frontier(const std::string& var, double f) {
    int vi = var_index(var);
    if (vi < 0) throw VariableMismatchError("frontier variable not in series: " + var);
    frontier_[vi] = f;
}

void GenSeries::add_term(const ExpKey& e, const Coeff& c) {
    if (e.size() != vars_.size())
        throw VariableMismatchError("term key arity does not match variable list");
    if (c.is_zero()) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

namespace {
void check_compatible(const GenSeries& a, const GenSeries& b) {
    if (a.vars() != b.vars())
        throw VariableMismatchError("series variable lists differ; embed first");
    if (a.params() && b.params() && a.params()->size() != b.params()->size())
        throw Error("series parameter tables differ");
}
} // namespace

GenSeries GenSeries::operator+(const GenSeries& o) const {
    check_compatible(*this, o);
    GenSeries r(params_ ? params_ : o.params_, vars_);
    r.terms_ = terms_;
    for (const auto& [k, c] : o.terms_) r.add_term(k, c);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        r.trunc_[i] = std::min(trunc_[i], o.trunc_[i]);
        r.frontier_[i] = std::min(frontier_[i], o.frontier_[i]);
    }
    r.truncated_ = truncated_ || o.truncated_;
    return r;
}

GenSeries GenSeries::operator-(const GenSeries& o) const { return *this + o.scaled(-1.0); }

GenSeries GenSeries::operator*(const GenSeries& o) const {
    check_compatible(*this, o);
    GenSeries r(params_ ? params_ : o.params_, vars_);
    const ParamTable& p = *r.params_;
    const std::size_t nv = vars_.size();
    for (std::size_t i = 0; i < nv; ++i) r.trunc_[i] = std::min(trunc_[i], o.trunc_[i]);

    // Flatten each operand once, caching numeric exponent values per variable
    // so the pair loop below works on doubles.
    struct Flat {
        const ExpKey* key;
        const Coeff* coeff;
        std::vector<double> val;
    };
    auto flatten = [&p, nv](const GenSeries& s) {
        std::vector<Flat> out;
        out.reserve(s.terms_.size());
        for (const auto& [k, c] : s.terms_) {
            Flat f{&k, &c, std::vector<double>(nv)};
            for (std::size_t i = 0; i < nv; ++i) f.val[i] = k[i].value(p).to_double();
            out.push_back(std::move(f));
        }
        return out;
    };
    std::vector<Flat> fa = flatten(*this), fb = flatten(o);

    // Minimal exponent value per variable, needed for the reliable frontier
    // of the product: min(fa + min_exp(b), fb + min_exp(a)).
    auto min_exps = [nv](const std::vector<Flat>& fs) {
        std::vector<double> me(nv, 0.0);
        for (std::size_t t = 0; t < fs.size(); ++t)
            for (std::size_t i = 0; i < nv; ++i)
                me[i] = t == 0 ? fs[t].val[i] : std::min(me[i], fs[t].val[i]);
        return me;
    };
    std::vector<double> ma = min_exps(fa), mb = min_exps(fb);

    // Truncation filter: doubles decide away from the bound, exact rationals
    // decide inside the uncertainty band.
    std::vector<double> bound(nv);
    for (std::size_t i = 0; i < nv; ++i)
        bound[i] = r.trunc_[i] == kNoTrunc ? kInf : r.trunc_[i].to_double();
    constexpr double kBand = 1e-7;

    struct KeyHash {
        std::size_t operator()(const ExpKey& k) const {
            std::size_t h = 0;
            auto mix = [&h](std::int64_t v) {
                h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            };
            for (const auto& e : k) {
                mix(e.c.num());
                mix(e.c.den());
                for (const auto& s : e.m) {
                    mix(s.num());
                    mix(s.den());
                }
            }
            return h;
        }
    };
    std::unordered_map<ExpKey, Coeff, KeyHash> acc;
    acc.reserve(fa.size() + fb.size());

    bool dropped = false;
    ExpKey k(nv, ExponentVector::constant(p, Rational(0)));
    for (const auto& ta : fa) {
        for (const auto& tb : fb) {
            bool out = false, close = false;
            for (std::size_t i = 0; i < nv; ++i) {
                double v = ta.val[i] + tb.val[i];
                if (v > bound[i] + kBand) {
                    out = true;
                    break;
                }
                if (v > bound[i] - kBand) close = true;
            }
            if (!out) {
                for (std::size_t i = 0; i < nv; ++i) k[i] = (*ta.key)[i] + (*tb.key)[i];
                if (close && !r.within_truncation(k)) out = true;
            }
            if (out) {
                dropped = true;
                continue;
            }
            Coeff c = *ta.coeff * *tb.coeff;
            auto it = acc.find(k);
            if (it == acc.end())
                acc.emplace(k, std::move(c));
            else
                it->second = it->second + c;
        }
    }
    for (auto& [key, c] : acc)
        if (!c.is_zero()) r.terms_.emplace(key, std::move(c));

    for (std::size_t i = 0; i < vars_.size(); ++i) {
        double f = kInf;
        if (!o.terms_.empty()) f = std::min(f, frontier_[i] + mb[i]);
        if (!terms_.empty()) f = std::min(f, o.frontier_[i] + ma[i]);
        if (dropped) f = std::min(f, r.trunc_[i].to_double());
        r.frontier_[i] = f;
    }
    r.truncated_ = truncated_ || o.truncated_ || dropped;
    return r;
}

GenSeries GenSeries::scaled(const Coeff& c) const {
    GenSeries r(params_, vars_);
    r.trunc_ = trunc_;
    r.frontier_ = frontier_;
    r.truncated_ = truncated_;
    if (c.is_zero()) return r;
    for (const auto& [k, v] : terms_) {
        Coeff nc = v * c;
        if (!nc.is_zero()) r.terms_.emplace(k, nc);
    }
    return r;
}

GenSeries GenSeries::normalized(double rel_floor) const {
    GenSeries r(params_, vars_);
    r.trunc_ = trunc_;
    r.frontier_ = frontier_;
    r.truncated_ = truncated_;
    double floor_abs = rel_floor * max_abs_coeff();
    for (const auto& [k, v] : terms_) {
        Coeff nc = v.cleaned(floor_abs);
        if (!nc.is_zero()) r.terms_.emplace(k, nc);
    }
    return r;
}

GenSeries GenSeries::embedded(const std::vector<std::string>& vars) const {
    GenSeries r(params_, vars);
    std::vector<int> pos(vars_.size(), -1);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        for (std::size_t j = 0; j < vars.size(); ++j)
            if (vars[j] == vars_[i]) pos[i] = static_cast<int>(j);
        if (pos[i] < 0)
            throw VariableMismatchError("embedding drops variable: " + vars_[i]);
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        r.trunc_[pos[i]] = trunc_[i];
        r.frontier_[pos[i]] = frontier_[i];
    }
    r.truncated_ = truncated_;
    ExponentVector z = ExponentVector::constant(*params_, Rational(0));
    for (const auto& [k, c] : terms_) {
        ExpKey nk(vars.size(), z);
        for (std::size_t i = 0; i < vars_.size(); ++i) nk[pos[i]] = k[i];
        r.add_term(nk, c);
    }
    return r;
}

double GenSeries::eval(const std::vector<double>& point) const {
    if (point.size() != vars_.size())
        throw VariableMismatchError("evaluation point arity does not match variable list");
    double total = 0.0;
    for (const auto& [k, c] : terms_) {
        double term = c.scalar(); // throws UnspecializedPolyError on generic coefficients
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            Rational ev = k[i].value(*params_);
            if (ev.is_zero()) continue;
            double x = point[i];
            double e = ev.to_double();
            if (x > 0.0) {
                term *= std::pow(x, e);
            } else if (x == 0.0) {
                if (e > 0.0) {
                    term = 0.0;
                } else {
                    throw DomainError("evaluation at " + vars_[i] + " = 0 with exponent " +
                                      ev.str());
                }
            } else {
                if (!ev.is_integer())
                    throw DomainError("negative base " + vars_[i] + " with fractional exponent " +
                                      ev.str());
                term *= std::pow(x, e);
            }
        }
        total += term;
    }
    return total;
}

double GenSeries::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) {
        (void)k;
        m = std::max(m, c.max_abs());
    }
    return m;
}

std::string GenSeries::str(int precision) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    out.precision(precision);
    bool first = true;
    for (const auto& [k, c] : terms_) {
        std::string cs = c.str(precision);
        if (!first) {
            if (c.is_scalar() && !cs.empty() && cs[0] == '-') {
                out << " - ";
                cs = cs.substr(1);
            } else {
                out << " + ";
            }
        }
        first = false;
        bool unit = cs == "1";
        bool has_var = false;
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (!k[i].is_zero()) has_var = true;
        if (!unit || !has_var) {
            if (!c.is_scalar() && has_var)
                out << "(" << cs << ")";
            else
                out << cs;
            if (has_var) out << "*";
        }
        bool firstv = true;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (k[i].is_zero()) continue;
            if (!firstv) out << "*";
            firstv = false;
            out << vars_[i] << "^{" << k[i].str(*params_) << "}";
        }
    }
    return out.str();
}

bool GenSeries::within_truncation(const ExpKey& e) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (trunc_[i] == kNoTrunc) continue;
        if (e[i].value(*params_) > trunc_[i]) return false;
    }
    return true;
}

FitResult fit_to_basis(const GenSeries& s, const std::vector<GenSeries>& basis) {
    if (basis.empty()) throw Error("fit_to_basis: empty basis");
    for (const auto& b : basis)
        if (b.vars() != s.vars())
            throw VariableMismatchError("basis variable list differs from series; embed first");

    // Row space: union of exponent keys over target and basis.
    std::map<ExpKey, int> row_of;
    auto intern = [&row_of](const ExpKey& k) {
        auto it = row_of.find(k);
        if (it == row_of.end()) it = row_of.emplace(k, static_cast<int>(row_of.size())).first;
        return it->second;
    };
    for (const auto& [k, c] : s.terms()) (void)c, intern(k);
    for (const auto& b : basis)
        for (const auto& [k, c] : b.terms()) (void)c, intern(k);

    const int nrow = static_cast<int>(row_of.size());
    const int ncol = static_cast<int>(basis.size());
    std::vector<std::vector<double>> A(nrow, std::vector<double>(ncol, 0.0));
    std::vector<Coeff> rhs(nrow, Coeff(0.0));
    for (int j = 0; j < ncol; ++j)
        for (const auto& [k, c] : basis[j].terms()) {
            if (!c.is_scalar() && !c.poly().is_constant())
                throw Error("fit_to_basis: basis coefficients must be scalar");
            A[row_of[k]][j] = c.scalar();
        }
    for (const auto& [k, c] : s.terms()) rhs[row_of[k]] = c;

    std::vector<double> colmax(ncol, 0.0);
    for (int j = 0; j < ncol; ++j)
        for (int r = 0; r < nrow; ++r) colmax[j] = std::max(colmax[j], std::fabs(A[r][j]));

    // Gauss-Jordan with partial pivoting; rhs entries may be polynomials.
    std::vector<int> pivot_row(ncol, -1);
    std::vector<bool> used(nrow, false);
    for (int j = 0; j < ncol; ++j) {
        int piv = -1;
        double best = 0.0;
        for (int r = 0; r < nrow; ++r) {
            if (used[r]) continue;
            if (std::fabs(A[r][j]) > best) {
                best = std::fabs(A[r][j]);
                piv = r;
            }
        }
        if (piv < 0 || best <= 1e-10 * std::max(1.0, colmax[j]))
            throw DependentBasisError("basis element " + std::to_string(j) +
                                      " is linearly dependent on the preceding ones");
        used[piv] = true;
        pivot_row[j] = piv;
        for (int r = 0; r < nrow; ++r) {
            if (r == piv || A[r][j] == 0.0) continue;
            double f = A[r][j] / A[piv][j];
            for (int jj = 0; jj < ncol; ++jj) A[r][jj] -= f * A[piv][jj];
            A[r][j] = 0.0;
            rhs[r] = rhs[r] - rhs[piv].scaled(f);
        }
    }

    FitResult out;
    out.coeffs.reserve(ncol);
    for (int j = 0; j < ncol; ++j)
        out.coeffs.push_back(rhs[pivot_row[j]].scaled(1.0 / A[pivot_row[j]][j]));

    GenSeries recon = GenSeries::zero(s.params(), s.vars());
    for (int j = 0; j < ncol; ++j) recon = recon + basis[j].scaled(out.coeffs[j]);
    out.residual = s - recon;
    GenSeries resn = out.residual.normalized();
    out.in_span =
        resn.empty() || resn.max_abs_coeff() <= 1e-10 * std::max(1.0, s.max_abs_coeff());
    return out;
}

bool series_equal(const GenSeries& a, const GenSeries& b, double rel_tol) {
    GenSeries d = a - b;
    double scale = std::max({a.max_abs_coeff(), b.max_abs_coeff(), 1.0});
    if (d.max_abs_coeff() <= rel_tol * scale) return true;
    if (!d.params()) return false;
    // structurally different exponent keys may still share the same numeric
    // value under the pinned parameters; aggregate before judging
    std::map<std::vector<Rational>, Coeff> agg;
    for (const auto& [key, c] : d.terms()) {
        std::vector<Rational> v;
        v.reserve(key.size());
        for (const auto& e : key) v.push_back(e.value(*d.params()));
        auto it = agg.find(v);
        if (it == agg.end())
            agg.emplace(std::move(v), c);
        else
            it->second = it->second + c;
    }
    double worst = 0.0;
    for (const auto& [v, c] : agg) worst = std::max(worst, c.max_abs());
    return worst <= rel_tol * scale;
}

} // namespace fpde
