#include "strata/scalar.hpp"

namespace strata {

bool is_prime_u32(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

FieldSpec FieldSpec::prime(std::uint32_t p) {
    if (!is_prime_u32(p)) throw std::invalid_argument("FieldSpec: modulus " + std::to_string(p) + " is not prime");
    return FieldSpec{Kind::prime, p};
}

std::string FieldSpec::to_string() const {
    return is_prime_field() ? "F_" + std::to_string(p) : "Q";
}

namespace {
BigInt mod_p(const BigInt& n, std::uint32_t p) {
    BigInt r = n % p;
    if (r < 0) r += p;
    return r;
}
}  // namespace

void Scalar::set_int(long n) {
    v_ = n;
    if (p_) v_ = BigRat(mod_p(BigInt(n), p_));
}

void Scalar::set_rat(const BigRat& v) {
    if (!p_) {
        v_ = v;
        return;
    }
    BigInt num = mod_p(numerator(v), p_);
    BigInt den = mod_p(denominator(v), p_);
    if (den == 0) throw std::domain_error("Scalar: denominator divisible by " + std::to_string(p_));
    Scalar d;
    d.p_ = p_;
    d.v_ = BigRat(den);
    v_ = BigRat(mod_p(num * numerator(d.inverse().v_), p_));
}

void Scalar::check_same(const Scalar& o) const {
    if (p_ != o.p_) throw std::logic_error("Scalar: mixed fields in arithmetic");
}

Scalar Scalar::operator-() const {
    Scalar r = *this;
    r.v_ = p_ ? BigRat(mod_p(-numerator(v_), p_)) : -v_;
    return r;
}

Scalar Scalar::operator+(const Scalar& o) const {
    check_same(o);
    Scalar r = *this;
    r.v_ = p_ ? BigRat(mod_p(numerator(v_) + numerator(o.v_), p_)) : v_ + o.v_;
    return r;
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator*(const Scalar& o) const {
    check_same(o);
    Scalar r = *this;
    r.v_ = p_ ? BigRat(mod_p(numerator(v_) * numerator(o.v_), p_)) : v_ * o.v_;
    return r;
}

Scalar Scalar::inverse() const {
    if (is_zero()) throw std::domain_error("Scalar: division by zero");
    Scalar r = *this;
    if (!p_) {
        r.v_ = 1 / v_;
        return r;
    }
    // extended Euclid on the representative
    long long a = static_cast<long long>(numerator(v_)), m = p_;
    long long t0 = 0, t1 = 1, r0 = m, r1 = a;
    while (r1 != 0) {
        long long q = r0 / r1;
        t0 -= q * t1;
        std::swap(t0, t1);
        r0 -= q * r1;
        std::swap(r0, r1);
    }
    long long inv = t0 % m;
    if (inv < 0) inv += m;
    r.v_ = BigRat(inv);
    return r;
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.inverse(); }

Scalar Scalar::from_string(const FieldSpec& f, const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Scalar(f, BigRat(BigInt(s)));
        BigInt num(s.substr(0, slash)), den(s.substr(slash + 1));
        if (den == 0) throw std::domain_error("zero denominator");
        return Scalar(f, BigRat(num, den));
    } catch (const std::exception&) {
        throw std::invalid_argument("Scalar: cannot parse '" + s + "'");
    }
}

std::string Scalar::to_string() const {
    if (denominator(v_) == 1) return numerator(v_).str();
    return numerator(v_).str() + "/" + denominator(v_).str();
}

}  // namespace strata
