#ifndef SRCOORD_RATIONAL_HPP
#define SRCOORD_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

namespace srcoord {

using Integer = mpz_class;

// Exact rational with an inline int64 fast path; values that outgrow it are
// promoted to GMP. The small form is kept canonical (gcd 1, positive
// denominator) so equality is structural.
class Rational {
public:
    Rational() = default;
    Rational(int v) : n_(v) {}
    Rational(long v) : n_(v) {}
    Rational(long long v) : n_(v) {}
    explicit Rational(const Integer& v)
    {
        if (v.fits_slong_p())
            n_ = v.get_si();
        else
            big_ = std::make_unique<mpq_class>(v);
    }

    Rational(const Rational& o) : n_(o.n_), d_(o.d_)
    {
        if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
    }
    Rational(Rational&&) noexcept = default;
    Rational& operator=(const Rational& o)
    {
        n_ = o.n_;
        d_ = o.d_;
        big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
        return *this;
    }
    Rational& operator=(Rational&&) noexcept = default;

    static Rational from_fraction(const Integer& num, const Integer& den)
    {
        if (den == 0)
            throw std::invalid_argument("rational with zero denominator");
        mpq_class q(num, den);
        q.canonicalize();
        Rational r;
        r.adopt(q);
        return r;
    }

    bool is_small() const { return !big_; }

    mpq_class to_mpq() const
    {
        if (big_) return *big_;
        mpq_class q(static_cast<long>(n_), static_cast<long>(d_));
        return q;
    }

    // --- arithmetic ---------------------------------------------------------

    Rational operator-() const
    {
        Rational r(*this);
        r.negate();
        return r;
    }

    void negate()
    {
        if (big_) {
            *big_ = -*big_;
        } else {
            n_ = -n_;
        }
    }

    Rational& operator+=(const Rational& o) { return combine(o, +1); }
    Rational& operator-=(const Rational& o) { return combine(o, -1); }

    Rational& operator*=(const Rational& o)
    {
        if (!big_ && !o.big_) {
            // cross-reduce before multiplying to keep products small
            int64_t g1 = gcd64(abs64(n_), o.d_);
            int64_t g2 = gcd64(abs64(o.n_), d_);
            __int128 n = static_cast<__int128>(n_ / g1) * (o.n_ / g2);
            __int128 d = static_cast<__int128>(d_ / g2) * (o.d_ / g1);
            if (fits(n) && fits(d)) {
                n_ = static_cast<int64_t>(n);
                d_ = static_cast<int64_t>(d);
                return *this;
            }
        }
        mpq_class r = to_mpq();
        r *= o.to_mpq();
        adopt(r);
        return *this;
    }

    // *this += a * b, the accumulation kernel
    void addmul(const Rational& a, const Rational& b)
    {
        if (!big_ && !a.big_ && !b.big_) {
            if (a.d_ == 1 && b.d_ == 1 && d_ == 1) {
                __int128 t = static_cast<__int128>(a.n_) * b.n_ + n_;
                if (fits(t)) {
                    n_ = static_cast<int64_t>(t);
                    return;
                }
            } else {
                __int128 nn = static_cast<__int128>(a.n_) * b.n_;
                __int128 nd = static_cast<__int128>(a.d_) * b.d_;
                __int128 num = static_cast<__int128>(n_) * nd + nn * d_;
                __int128 den = static_cast<__int128>(d_) * nd;
                if (reduce_to_small(num, den)) return;
            }
        }
        mpq_class r = to_mpq();
        mpq_class m = a.to_mpq();
        m *= b.to_mpq();
        r += m;
        adopt(r);
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }

    friend Rational operator/(const Rational& a, const Rational& b)
    {
        if (b == 0)
            throw std::invalid_argument("division by zero rational");
        Rational inv;
        if (!b.big_) {
            inv.n_ = b.n_ < 0 ? -b.d_ : b.d_;
            inv.d_ = abs64(b.n_);
        } else {
            mpq_class q(1);
            q /= *b.big_;
            inv.adopt(q);
        }
        inv *= a;
        return inv;
    }

    // --- comparisons --------------------------------------------------------

    bool operator==(const Rational& o) const
    {
        if (!big_ && !o.big_) return n_ == o.n_ && d_ == o.d_;
        return cmp(o) == 0;
    }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const { return cmp(o) < 0; }
    bool operator>(const Rational& o) const { return cmp(o) > 0; }

    bool operator==(int v) const
    {
        if (!big_) return d_ == 1 && n_ == v;
        return mpq_cmp_si(big_->get_mpq_t(), v, 1) == 0;
    }
    bool operator!=(int v) const { return !(*this == v); }
    bool operator<(int v) const
    {
        if (!big_) return n_ < static_cast<__int128>(v) * d_;
        return mpq_cmp_si(big_->get_mpq_t(), v, 1) < 0;
    }

    std::string str() const
    {
        if (big_) return big_->get_str();
        std::string s = std::to_string(n_);
        if (d_ != 1) s += "/" + std::to_string(d_);
        return s;
    }

private:
    static int64_t abs64(int64_t v) { return v < 0 ? -v : v; }

    static int64_t gcd64(int64_t a, int64_t b)
    {
        while (b) {
            int64_t t = a % b;
            a = b;
            b = t;
        }
        return a < 0 ? -a : a;
    }

    static bool fits(__int128 v)
    {
        return v >= -static_cast<__int128>(INT64_MAX) && v <= static_cast<__int128>(INT64_MAX);
    }

    static __int128 gcd128(__int128 a, __int128 b)
    {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    bool reduce_to_small(__int128 num, __int128 den)
    {
        if (den < 0) {
            den = -den;
            num = -num;
        }
        __int128 g = gcd128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
        if (den == 0 || !fits(num) || !fits(den)) return false;
        n_ = static_cast<int64_t>(num);
        d_ = static_cast<int64_t>(den);
        big_.reset();
        return true;
    }

    Rational& combine(const Rational& o, int sign)
    {
        if (!big_ && !o.big_) {
            __int128 num = static_cast<__int128>(n_) * o.d_ +
                           static_cast<__int128>(sign) * o.n_ * d_;
            __int128 den = static_cast<__int128>(d_) * o.d_;
            if (reduce_to_small(num, den)) return *this;
        }
        mpq_class r = to_mpq();
        if (sign > 0)
            r += o.to_mpq();
        else
            r -= o.to_mpq();
        adopt(r);
        return *this;
    }

    int cmp(const Rational& o) const
    {
        if (!big_ && !o.big_) {
            __int128 l = static_cast<__int128>(n_) * o.d_;
            __int128 r = static_cast<__int128>(o.n_) * d_;
            return l < r ? -1 : (l > r ? 1 : 0);
        }
        mpq_class a = to_mpq(), b = o.to_mpq();
        return mpq_cmp(a.get_mpq_t(), b.get_mpq_t());
    }

    // take the value of q, demoting to the small form when possible
    void adopt(const mpq_class& q)
    {
        if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p()) {
            n_ = q.get_num().get_si();
            d_ = q.get_den().get_si();
            big_.reset();
        } else {
            big_ = std::make_unique<mpq_class>(q);
        }
    }

    int64_t n_ = 0;
    int64_t d_ = 1;
    std::unique_ptr<mpq_class> big_;
};

inline std::string to_string(const Rational& q) { return q.str(); }

// Exact fraction in lowest terms.
inline Rational fraction(const Integer& num, const Integer& den)
{
    return Rational::from_fraction(num, den);
}

inline Rational fraction(long num, long den) { return fraction(Integer(num), Integer(den)); }

// Accepts "a" or "a/b"; b must be nonzero.
inline Rational parse_rational(const std::string& s)
{
    auto slash = s.find('/');
    if (slash == std::string::npos)
        return Rational(Integer(s));
    return fraction(Integer(s.substr(0, slash)), Integer(s.substr(slash + 1)));
}

} // namespace srcoord

#endif
