#ifndef SRCOORD_WEIGHTS_HPP
#define SRCOORD_WEIGHTS_HPP

#include "srcoord/poly.hpp"

#include <vector>

namespace srcoord {

enum class Cmp { Less, Equal, Greater, Incomparable };

// Weight vector tau on the z-variables. Entries are integers; most operations
// require the "natural" (all >= 0) range, rho(tau) may transiently leave it.
struct WeightVector {
    std::vector<long> t;

    WeightVector() = default;
    explicit WeightVector(std::vector<long> v) : t(std::move(v)) {}

    static WeightVector zeros(int n) { return WeightVector(std::vector<long>(n, 0)); }

    static WeightVector basis(int n, int k, long amount = 1)
    {
        WeightVector w = zeros(n);
        w.t[k] = amount;
        return w;
    }

    size_t size() const { return t.size(); }
    long operator[](size_t i) const { return t[i]; }
    long& operator[](size_t i) { return t[i]; }

    bool natural() const
    {
        for (long v : t)
            if (v < 0) return false;
        return true;
    }

    bool is_zero() const
    {
        for (long v : t)
            if (v != 0) return false;
        return true;
    }

    bool operator==(const WeightVector&) const = default;

    WeightVector operator+(const WeightVector& o) const
    {
        WeightVector r = *this;
        for (size_t i = 0; i < t.size(); ++i) r.t[i] += o.t[i];
        return r;
    }

    WeightVector operator-(const WeightVector& o) const
    {
        WeightVector r = *this;
        for (size_t i = 0; i < t.size(); ++i) r.t[i] -= o.t[i];
        return r;
    }

    WeightVector negated() const
    {
        WeightVector r = *this;
        for (auto& v : r.t) v = -v;
        return r;
    }

    Cmp compare(const WeightVector& o) const
    {
        bool le = true, ge = true;
        for (size_t i = 0; i < t.size(); ++i) {
            if (t[i] < o.t[i]) ge = false;
            if (t[i] > o.t[i]) le = false;
        }
        if (le && ge) return Cmp::Equal;
        if (le) return Cmp::Less;
        if (ge) return Cmp::Greater;
        return Cmp::Incomparable;
    }

    bool leq(const WeightVector& o) const
    {
        Cmp c = compare(o);
        return c == Cmp::Less || c == Cmp::Equal;
    }

    bool geq(const WeightVector& o) const
    {
        Cmp c = compare(o);
        return c == Cmp::Greater || c == Cmp::Equal;
    }

    std::string render() const
    {
        std::string s = "(";
        for (size_t i = 0; i < t.size(); ++i)
            s += (i ? "," : "") + std::to_string(t[i]);
        return s + ")";
    }
};

// Monomial criterion for membership in A_tau = R^[m][x^{t_1}z_1,...,x^{t_n}z_n]:
// each term x^a * (u,y-part) * z^b needs a >= sum_k t_k b_k. Entries of tau may
// be any integers here; callers that need tau natural check it themselves.
inline bool a_tau_member(const Poly& p, const WeightVector& tau)
{
    const auto& ctx = p.ctx();
    if (static_cast<int>(tau.size()) != ctx->n)
        fail("BadWeight", "weight length does not match context");
    bool ok = true;
    p.for_each([&](const Term& t, const Rational&) {
        long need = 0;
        for (int k = 0; k < ctx->n; ++k)
            need += tau[k] * t.e[ctx->p + ctx->m + k];
        if (t.xe < need) ok = false;
    });
    return ok;
}

// Minimal d >= 0 with x^d * p in A_tau. Errors on the zero polynomial.
inline long a_tau_deficiency(const Poly& p, const WeightVector& tau)
{
    if (p.is_zero())
        fail("ZeroInput", "deficiency of the zero polynomial is undefined");
    const auto& ctx = p.ctx();
    long worst = 0;
    p.for_each([&](const Term& t, const Rational&) {
        long need = 0;
        for (int k = 0; k < ctx->n; ++k)
            need += tau[k] * t.e[ctx->p + ctx->m + k];
        worst = std::max(worst, need - t.xe);
    });
    return worst;
}

// Substitutes z_k -> x^{t_k} z_k, an exact monomial shift.
inline Poly scale_z(const Poly& p, const WeightVector& tau)
{
    const auto& ctx = p.ctx();
    Poly out(ctx);
    p.for_each([&](const Term& t, const Rational& c) {
        int xe = t.xe;
        for (int k = 0; k < ctx->n; ++k)
            xe += static_cast<int>(tau[k]) * t.e[ctx->p + ctx->m + k];
        out.add_term(xe, t.e.data(), c);
    });
    out.normalize();
    return out;
}

class Endo;
class GeneratorWord;
struct GenPerm;

// t_k = max(0, -x_order(e(z_k))); requires every e(y_j) over R.
WeightVector minimal_tau(const Endo& e);

// Minimal backward weight chain for a word of z-elementaries over S.
// Returns sigma_0 .. sigma_q (sigma_{q+1} = 0 is implicit).
std::vector<WeightVector> sigma_sequence(const GeneratorWord& w);

// rho(tau)_k = t_{sigma^{-1}(k)} + r_k; may have negative entries.
WeightVector rho_apply_tau(const GenPerm& rho, const WeightVector& tau);

} // namespace srcoord

#endif
