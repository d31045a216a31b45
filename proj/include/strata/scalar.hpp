#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace strata {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Coefficient field of the whole computation: the rationals, or a prime
/// field F_p.  Everything downstream is exact; there is no floating point
/// anywhere in the library.
struct FieldSpec {
    enum class Kind { rationals, prime };
    Kind kind = Kind::rationals;
    std::uint32_t p = 0;

    static FieldSpec rationals() { return FieldSpec{Kind::rationals, 0}; }
    static FieldSpec prime(std::uint32_t p);

    bool is_prime_field() const { return kind == Kind::prime; }
    bool operator==(const FieldSpec& o) const { return kind == o.kind && p == o.p; }
    bool operator!=(const FieldSpec& o) const { return !(*this == o); }
    std::string to_string() const;
};

bool is_prime_u32(std::uint32_t n);

/// An exact field element.  Rational mode stores an arbitrary-precision
/// fraction; prime mode stores the canonical representative in [0, p).
class Scalar {
  public:
    Scalar() = default;
    Scalar(const FieldSpec& f, long n) : p_(f.p) { set_int(n); }
    Scalar(const FieldSpec& f, const BigRat& v) : p_(f.p) { set_rat(v); }

    static Scalar zero(const FieldSpec& f) { return Scalar(f, 0); }
    static Scalar one(const FieldSpec& f) { return Scalar(f, 1); }
    static Scalar from_string(const FieldSpec& f, const std::string& s);

    const FieldSpec field() const {
        return p_ ? FieldSpec{FieldSpec::Kind::prime, p_} : FieldSpec::rationals();
    }
    std::uint32_t char_p() const { return p_; }

    bool is_zero() const { return v_.is_zero(); }
    bool is_one() const { return v_ == 1; }

    Scalar operator-() const;
    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;
    Scalar inverse() const;
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    bool operator==(const Scalar& o) const { return p_ == o.p_ && v_ == o.v_; }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    /// Value as a rational (for prime fields, the representative in [0,p)).
    const BigRat& value() const { return v_; }
    std::string to_string() const;

  private:
    BigRat v_ = 0;
    std::uint32_t p_ = 0;  // 0 = rationals

    void set_int(long n);
    void set_rat(const BigRat& v);
    void check_same(const Scalar& o) const;
};

}  // namespace strata
