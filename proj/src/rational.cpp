#include "fpde/rational.hpp"

#include <cctype>
#include <cstdlib>
#include <numeric>

namespace fpde {

namespace {

std::int64_t checked_cast(__int128 v, const char* what) {
    if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
        throw DomainError(std::string("rational overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

} // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
    if (d == 0) throw DomainError("rational with zero denominator");
    normalize();
}

void Rational::normalize() {
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
    if (num_ == 0) den_ = 1;
}

Rational Rational::parse(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw DomainError("cannot parse empty rational");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational n = parse(s.substr(0, slash));
        Rational d = parse(s.substr(slash + 1));
        return n / d;
    }

    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    std::int64_t ip = 0, fp = 0, fden = 1;
    bool any = false;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
        ip = checked_cast(static_cast<__int128>(ip) * 10 + (s[i] - '0'), "parse");
        any = true;
    }
    if (i < s.size() && s[i] == '.') {
        ++i;
        for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
            fp = checked_cast(static_cast<__int128>(fp) * 10 + (s[i] - '0'), "parse");
            fden = checked_cast(static_cast<__int128>(fden) * 10, "parse");
            any = true;
        }
    }
    if (!any || i != s.size())
        throw DomainError("cannot parse rational from '" + text + "'");
    Rational r = Rational(ip) + Rational(fp, fden);
    return neg ? -r : r;
}

std::int64_t Rational::floor() const {
    if (num_ >= 0) return num_ / den_;
    return -((-num_ + den_ - 1) / den_);
}

std::int64_t Rational::ceil() const { return -(-*this).floor(); }

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator+(const Rational& o) const {
    std::int64_t g = std::gcd(den_, o.den_);
    __int128 n = static_cast<__int128>(num_) * (o.den_ / g) + static_cast<__int128>(o.num_) * (den_ / g);
    __int128 d = static_cast<__int128>(den_) * (o.den_ / g);
    return Rational(checked_cast(n, "add"), checked_cast(d, "add"));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
    // cross-cancel first to keep intermediates small
    std::int64_t g1 = std::gcd(num_ < 0 ? -num_ : num_, o.den_);
    std::int64_t g2 = std::gcd(o.num_ < 0 ? -o.num_ : o.num_, den_);
    __int128 n = static_cast<__int128>(num_ / g1) * (o.num_ / g2);
    __int128 d = static_cast<__int128>(den_ / g2) * (o.den_ / g1);
    return Rational(checked_cast(n, "mul"), checked_cast(d, "mul"));
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw DomainError("rational division by zero");
    return *this * Rational(o.den_, o.num_);
}

int Rational::cmp(const Rational& o) const {
    __int128 l = static_cast<__int128>(num_) * o.den_;
    __int128 r = static_cast<__int128>(o.num_) * den_;
    if (l < r) return -1;
    if (l > r) return 1;
    return 0;
}

} // namespace fpde
