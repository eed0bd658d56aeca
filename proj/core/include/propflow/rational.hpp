#ifndef PROPFLOW_RATIONAL_HPP
#define PROPFLOW_RATIONAL_HPP

#include <cstdint>
#include <string>

namespace propflow {

// Exact rational on int64 with overflow-checked arithmetic. Capacities and
// impression counts live in this type on the oracle path; the weight
// algorithms convert to double. Overflow throws Error(CapacityOverflow).
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d);

    static Rational parse(const std::string& text);  // "3", "7/2"

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    bool is_negative() const { return num_ < 0; }
    bool is_zero() const { return num_ == 0; }

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

private:
    std::int64_t num_;
    std::int64_t den_;  // always > 0, gcd(|num|, den) == 1
};

std::int64_t checked_lcm(std::int64_t a, std::int64_t b);

}  // namespace propflow

#endif
