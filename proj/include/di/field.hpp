// Exact coefficient arithmetic: arbitrary-precision rationals (via GMP) or a
// prime field F_p with the modulus fixed per ring. Mixing characteristics is
// always an error, never a coercion.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace di {

class FieldMismatch : public std::runtime_error {
public:
    explicit FieldMismatch(const std::string& what) : std::runtime_error(what) {}
};

// An element of Q (characteristic 0) or of F_p for an odd prime p.
// Rationals are kept in lowest terms with positive denominator (mpq_class
// canonicalization); prime-field residues are kept in [0, p).
class Coeff {
public:
    Coeff() : p_(0), r_(0), q_(0) {}

    static Coeff rational(const mpq_class& q) {
        Coeff c;
        c.q_ = q;
        c.q_.canonicalize();
        return c;
    }

    static Coeff rational(long num, long den = 1) {
        return rational(mpq_class(num, den));
    }

    static Coeff mod_p(long p, long value) {
        Coeff c;
        c.p_ = p;
        c.r_ = value % p;
        if (c.r_ < 0) c.r_ += p;
        return c;
    }

    static Coeff zero(long characteristic) {
        return characteristic == 0 ? rational(0) : mod_p(characteristic, 0);
    }

    static Coeff one(long characteristic) {
        return characteristic == 0 ? rational(1) : mod_p(characteristic, 1);
    }

    static Coeff from_int(long characteristic, long v) {
        return characteristic == 0 ? rational(v) : mod_p(characteristic, v);
    }

    long characteristic() const { return p_; }
    bool is_zero() const { return p_ == 0 ? q_ == 0 : r_ == 0; }
    bool is_one() const { return p_ == 0 ? q_ == 1 : r_ == 1; }

    const mpq_class& rat() const { return q_; }
    long residue() const { return r_; }

    Coeff operator-() const {
        if (p_ == 0) return rational(-q_);
        return mod_p(p_, p_ - r_);
    }

    Coeff operator+(const Coeff& o) const {
        check(o);
        if (p_ == 0) return rational(q_ + o.q_);
        return mod_p(p_, r_ + o.r_);
    }

    Coeff operator-(const Coeff& o) const { return *this + (-o); }

    Coeff operator*(const Coeff& o) const {
        check(o);
        if (p_ == 0) return rational(q_ * o.q_);
        return mod_p(p_, mulmod(r_, o.r_, p_));
    }

    Coeff inv() const {
        if (is_zero()) throw std::domain_error("division by zero coefficient");
        if (p_ == 0) return rational(1 / q_);
        return mod_p(p_, invmod(r_, p_));
    }

    Coeff operator/(const Coeff& o) const { return *this * o.inv(); }

    bool operator==(const Coeff& o) const {
        check(o);
        return p_ == 0 ? q_ == o.q_ : r_ == o.r_;
    }
    bool operator!=(const Coeff& o) const { return !(*this == o); }

    // Canonical text form: "a" or "a/b" for rationals, the residue for F_p.
    std::string str() const {
        if (p_ == 0) return q_.get_str();
        return std::to_string(r_);
    }

private:
    void check(const Coeff& o) const {
        if (p_ != o.p_)
            throw FieldMismatch("coefficient fields differ: char " +
                                std::to_string(p_) + " vs " + std::to_string(o.p_));
    }

    static long mulmod(long a, long b, long p) {
        return static_cast<long>((static_cast<__int128>(a) * b) % p);
    }

    static long invmod(long a, long p) {
        long t = 0, nt = 1, r = p, nr = a % p;
        while (nr != 0) {
            long quot = r / nr;
            t -= quot * nt; std::swap(t, nt);
            r -= quot * nr; std::swap(r, nr);
        }
        if (r != 1) throw std::domain_error("not invertible mod p");
        return t < 0 ? t + p : t;
    }

    long p_;
    long r_;
    mpq_class q_;
};

}  // namespace di
