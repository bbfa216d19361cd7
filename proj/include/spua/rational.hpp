#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spua {

// Exact rational arithmetic on 64-bit words.  Intermediates run through
// 128-bit integers so products of binomial coefficients up to C(62,31) stay
// exact; anything that cannot be reduced back into 64 bits throws.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long num) : num_(num), den_(1) {}
    Rational(long long num, long long den) { assign(num, den); }

    long long num() const { return num_; }
    long long den() const { return den_; }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    Rational operator+(const Rational& o) const {
        __int128 n = i128(num_) * o.den_ + i128(o.num_) * den_;
        __int128 d = i128(den_) * o.den_;
        return reduced(n, d);
    }
    Rational operator-(const Rational& o) const {
        __int128 n = i128(num_) * o.den_ - i128(o.num_) * den_;
        __int128 d = i128(den_) * o.den_;
        return reduced(n, d);
    }
    Rational operator*(const Rational& o) const {
        // Cross-reduce first to keep intermediates small.
        long long g1 = gcd64(num_, o.den_);
        long long g2 = gcd64(o.num_, den_);
        __int128 n = i128(num_ / g1) * (o.num_ / g2);
        __int128 d = i128(den_ / g2) * (o.den_ / g1);
        return reduced(n, d);
    }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
        return *this * Rational(o.den_, o.num_);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    bool operator==(const Rational& o) const {
        return num_ == o.num_ && den_ == o.den_;
    }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        return i128(num_) * o.den_ < i128(o.num_) * den_;
    }
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return !(*this < o); }

    std::string str() const {
        return den_ == 1 ? std::to_string(num_)
                         : std::to_string(num_) + "/" + std::to_string(den_);
    }

private:
    static __int128 i128(long long v) { return static_cast<__int128>(v); }

    static long long gcd64(long long a, long long b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            long long t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    static Rational reduced(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd128(n, d);
        n /= g;
        d /= g;
        Rational r;
        r.num_ = narrow(n);
        r.den_ = narrow(d);
        return r;
    }

    static long long narrow(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN)
            throw std::overflow_error("Rational: value exceeds 64 bits");
        return static_cast<long long>(v);
    }

    void assign(long long num, long long den) {
        Rational r = reduced(num, den);
        num_ = r.num_;
        den_ = r.den_;
    }

    long long num_;
    long long den_;
};

}  // namespace spua
