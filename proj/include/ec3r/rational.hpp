#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ec3r {

// Exact rational on 64-bit integers, always normalized (gcd 1, positive
// denominator). Clause probabilities are ratios of satisfying counts and
// must never pass through floating point.
class Rational {
public:
    Rational() = default;
    Rational(long long num, long long den = 1) : num_(num), den_(den) { normalize(); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator*(const Rational& o) const {
        // cross-reduce before multiplying to keep intermediates small
        long long g1 = std::gcd(num_, o.den_);
        long long g2 = std::gcd(o.num_, den_);
        return Rational(checked_mul(num_ / g1, o.num_ / g2), checked_mul(den_ / g2, o.den_ / g1));
    }

    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw std::domain_error("rational division by zero");
        return *this * Rational(o.den_, o.num_);
    }

    Rational operator+(const Rational& o) const {
        long long g = std::gcd(den_, o.den_);
        long long l = checked_mul(den_ / g, o.den_);
        return Rational(checked_add(checked_mul(num_, o.den_ / g), checked_mul(o.num_, den_ / g)), l);
    }

    Rational operator-(const Rational& o) const { return *this + Rational(-o.num_, o.den_); }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
    }
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Accepts "a" or "a/b".
    static Rational parse(std::string_view text) {
        auto slash = text.find('/');
        try {
            if (slash == std::string_view::npos)
                return Rational(std::stoll(std::string(text)));
            long long n = std::stoll(std::string(text.substr(0, slash)));
            long long d = std::stoll(std::string(text.substr(slash + 1)));
            return Rational(n, d);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("not a rational: '" + std::string(text) + "'");
        }
    }

private:
    void normalize() {
        if (den_ == 0) throw std::domain_error("rational with zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        long long g = std::gcd(num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
        if (num_ == 0) den_ = 1;
    }

    static long long checked_mul(long long a, long long b) {
        __int128 r = static_cast<__int128>(a) * b;
        if (r > INT64_MAX || r < INT64_MIN) throw std::overflow_error("rational overflow");
        return static_cast<long long>(r);
    }

    static long long checked_add(long long a, long long b) {
        __int128 r = static_cast<__int128>(a) + b;
        if (r > INT64_MAX || r < INT64_MIN) throw std::overflow_error("rational overflow");
        return static_cast<long long>(r);
    }

    long long num_ = 0;
    long long den_ = 1;
};

} // namespace ec3r
