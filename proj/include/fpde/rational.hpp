#ifndef FPDE_RATIONAL_HPP
#define FPDE_RATIONAL_HPP

#include <cstdint>
#include <string>

#include "fpde/errors.hpp"

namespace fpde {

// Exact rational arithmetic for exponents and parameter values.  Keeping
// exponents rational means pole tests (is this a nonpositive integer?) are
// decided exactly instead of through floating-point fuzz.
class Rational {
  public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d);

    static Rational parse(const std::string& text); // "3", "-1/2", "0.3"

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    // nonpositive integer <=> gamma pole at this argument
    bool is_nonpos_integer() const { return den_ == 1 && num_ <= 0; }

    std::int64_t floor() const;
    std::int64_t ceil() const;

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    Rational operator-() const { return Rational(-num_, den_); }
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    int cmp(const Rational& o) const;
    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const { return cmp(o) < 0; }
    bool operator<=(const Rational& o) const { return cmp(o) <= 0; }
    bool operator>(const Rational& o) const { return cmp(o) > 0; }
    bool operator>=(const Rational& o) const { return cmp(o) >= 0; }

  private:
    std::int64_t num_;
    std::int64_t den_; // always > 0
    void normalize();
};

} // namespace fpde

#endif
