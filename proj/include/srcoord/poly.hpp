#ifndef SRCOORD_POLY_HPP
#define SRCOORD_POLY_HPP

#include "srcoord/context.hpp"
#include "srcoord/rational.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

namespace srcoord {

// Monomials are packed into one 128-bit key:
//   [total (u,y,z)-degree : 16][e_0 : 16]...[e_{nv-1} : 16][x-exponent + bias : 16]
// so ascending keys run in graded-lex order with the x-exponent as final tie
// break, and multiplication of monomials is key addition (minus one bias).
// This caps a context at 6 non-x variables, plenty for the sizes here.
using MonoKey = unsigned __int128;

constexpr int kMaxPackedVars = 6;
constexpr int kXeBias = 1 << 15;
constexpr int kFieldBits = 16;
constexpr int kFieldMask = (1 << kFieldBits) - 1;

// Decoded view of one term.
struct Term {
    int xe = 0;
    std::array<int, kMaxPackedVars> e{};
    int deg = 0;
    Rational coeff;

    int degree() const { return deg; }
};

inline MonoKey pack_mono(int nvars, int xe, const int* e)
{
    long deg = 0;
    MonoKey key = 0;
    for (int i = 0; i < nvars; ++i) {
        if (e[i] < 0 || e[i] > kFieldMask)
            fail("ExponentOverflow", "monomial exponent out of packed range");
        deg += e[i];
        key = (key << kFieldBits) | static_cast<unsigned>(e[i]);
    }
    if (deg > kFieldMask)
        fail("ExponentOverflow", "total degree out of packed range");
    long xb = static_cast<long>(xe) + kXeBias;
    if (xb < 0 || xb > kFieldMask)
        fail("ExponentOverflow", "x-exponent out of packed range");
    key |= static_cast<MonoKey>(deg) << (kFieldBits * (nvars + 1));
    key = (key << kFieldBits) | static_cast<unsigned>(xb);
    return key;
}

inline void unpack_mono(int nvars, MonoKey key, Term& out)
{
    out.xe = static_cast<int>(key & kFieldMask) - kXeBias;
    key >>= kFieldBits;
    for (int i = nvars - 1; i >= 0; --i) {
        out.e[i] = static_cast<int>(key & kFieldMask);
        key >>= kFieldBits;
    }
    out.deg = static_cast<int>(key & kFieldMask);
}

struct MonoKeyHash {
    size_t operator()(MonoKey k) const
    {
        uint64_t lo = static_cast<uint64_t>(k);
        uint64_t hi = static_cast<uint64_t>(k >> 64);
        uint64_t h = lo * 0x9e3779b97f4a7c15ull ^ (hi + 0x517cc1b727220a95ull);
        h ^= h >> 31;
        return static_cast<size_t>(h * 0xbf58476d1ce4e5b9ull);
    }
};

// Open-addressing accumulator for coefficient sums keyed by packed monomials;
// node-based maps dominate the profile otherwise.
class KeyAccumulator {
public:
    explicit KeyAccumulator(size_t expected) { rehash(table_size_for(expected)); }

    // slot += a * b
    void add_product(MonoKey k, const Rational& a, const Rational& b)
    {
        locate(k).addmul(a, b);
    }

    void add(MonoKey k, const Rational& c) { locate(k) += c; }

    std::vector<std::pair<MonoKey, Rational>> extract_sorted()
    {
        std::vector<std::pair<MonoKey, Rational>> out;
        out.reserve(count_);
        for (size_t i = 0; i < keys_.size(); ++i)
            if (used_[i] && vals_[i] != 0)
                out.emplace_back(keys_[i], std::move(vals_[i]));
        std::sort(out.begin(), out.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        return out;
    }

private:
    static size_t table_size_for(size_t expected)
    {
        size_t n = 16;
        while (n < expected * 2)
            n <<= 1;
        return n;
    }

    Rational& locate(MonoKey k)
    {
        if (count_ * 10 >= keys_.size() * 7)
            rehash(keys_.size() * 2);
        size_t mask = keys_.size() - 1;
        size_t i = MonoKeyHash{}(k) & mask;
        while (used_[i]) {
            if (keys_[i] == k) return vals_[i];
            i = (i + 1) & mask;
        }
        used_[i] = true;
        keys_[i] = k;
        vals_[i] = 0;
        ++count_;
        return vals_[i];
    }

    void rehash(size_t n)
    {
        std::vector<MonoKey> keys(n);
        std::vector<Rational> vals(n);
        std::vector<char> used(n, 0);
        size_t mask = n - 1;
        for (size_t i = 0; i < keys_.size(); ++i) {
            if (!used_[i]) continue;
            size_t j = MonoKeyHash{}(keys_[i]) & mask;
            while (used[j])
                j = (j + 1) & mask;
            used[j] = true;
            keys[j] = keys_[i];
            vals[j] = std::move(vals_[i]);
        }
        keys_ = std::move(keys);
        vals_ = std::move(vals);
        used_ = std::move(used);
    }

    std::vector<MonoKey> keys_;
    std::vector<Rational> vals_;
    std::vector<char> used_;
    size_t count_ = 0;
};

class Poly;
Poly operator*(const Poly& a, const Poly& b);

// Exact sparse polynomial: sorted (key, coefficient) pairs, Laurent in x only.
class Poly {
public:
    using Entry = std::pair<MonoKey, Rational>;

    Poly() = default;
    explicit Poly(CtxPtr ctx) : ctx_(std::move(ctx)) {}

    static Poly zero(const CtxPtr& ctx) { return Poly(ctx); }

    static Poly constant(const CtxPtr& ctx, const Rational& c)
    {
        Poly r(ctx);
        if (c != 0)
            r.entries_.emplace_back(r.const_key(), c);
        return r;
    }

    static Poly one(const CtxPtr& ctx) { return constant(ctx, 1); }

    static Poly variable(const CtxPtr& ctx, VarRef v, int power = 1)
    {
        Poly r(ctx);
        std::array<int, kMaxPackedVars> e{};
        e[ctx->slot(v)] = power;
        r.entries_.emplace_back(pack_mono(ctx->nvars(), 0, e.data()), 1);
        return r;
    }

    static Poly x_power(const CtxPtr& ctx, int k)
    {
        Poly r(ctx);
        std::array<int, kMaxPackedVars> e{};
        r.entries_.emplace_back(pack_mono(ctx->nvars(), k, e.data()), 1);
        return r;
    }

    const CtxPtr& ctx() const { return ctx_; }
    bool is_zero() const { return entries_.empty(); }
    size_t term_count() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }

    // Decoded terms in canonical (ascending graded-lex) order.
    std::vector<Term> terms() const
    {
        std::vector<Term> out(entries_.size());
        for (size_t i = 0; i < entries_.size(); ++i) {
            unpack_mono(ctx_->nvars(), entries_[i].first, out[i]);
            out[i].coeff = entries_[i].second;
        }
        return out;
    }

    // Allocation-free iteration; f receives (const Term&, const Rational&).
    template <class F>
    void for_each(F&& f) const
    {
        Term t;
        for (const auto& [key, c] : entries_) {
            unpack_mono(ctx_->nvars(), key, t);
            f(t, c);
        }
    }

    bool operator==(const Poly& o) const
    {
        require_same_context(ctx_, o.ctx_);
        return entries_ == o.entries_;
    }

    Poly& operator+=(const Poly& o) { return merge_with(o, 1); }
    Poly& operator-=(const Poly& o) { return merge_with(o, -1); }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    Poly operator-() const
    {
        Poly r(ctx_);
        r.entries_.reserve(entries_.size());
        for (const auto& [k, c] : entries_)
            r.entries_.emplace_back(k, -c);
        return r;
    }

    Poly scaled(const Rational& c) const
    {
        Poly r(ctx_);
        if (c == 0) return r;
        r.entries_.reserve(entries_.size());
        for (const auto& [k, q] : entries_)
            r.entries_.emplace_back(k, q * c);
        return r;
    }

    // Multiply by x^k (exact Laurent shift).
    Poly shifted_x(int k) const
    {
        if (k == 0) return *this;
        Poly r(ctx_);
        r.entries_.reserve(entries_.size());
        for (const auto& [key, c] : entries_) {
            long xb = static_cast<long>(key & kFieldMask) + k;
            if (xb < 0 || xb > kFieldMask)
                fail("ExponentOverflow", "x-exponent out of packed range");
            r.entries_.emplace_back((key & ~static_cast<MonoKey>(kFieldMask)) |
                                        static_cast<unsigned>(xb),
                                    c);
        }
        return r;
    }

    Poly pow(int k) const
    {
        if (k < 0) fail("NegativePower", "poly pow with negative exponent");
        if (k == 0) return one(ctx_);
        Poly acc = *this;
        // square-and-multiply, highest bit first
        int top = 31 - __builtin_clz(static_cast<unsigned>(k));
        for (int bit = top - 1; bit >= 0; --bit) {
            acc = acc * acc;
            if (k & (1 << bit)) acc = acc * *this;
        }
        return acc;
    }

    std::optional<int> x_order() const
    {
        if (entries_.empty()) return std::nullopt; // +infinity
        int best = std::numeric_limits<int>::max();
        for (const auto& [k, c] : entries_)
            best = std::min(best, static_cast<int>(k & kFieldMask) - kXeBias);
        return best;
    }

    bool is_over_r() const
    {
        auto o = x_order();
        return !o || *o >= 0;
    }

    Poly mod_x() const
    {
        auto o = x_order();
        if (o && *o < 0)
            fail("NegativeXOrder", "mod_x on an element outside R^[m+n]");
        Poly r(ctx_);
        for (const auto& [k, c] : entries_)
            if (static_cast<int>(k & kFieldMask) == kXeBias)
                r.entries_.emplace_back(k, c);
        return r;
    }

    Poly derivative(VarRef v) const
    {
        int s = ctx_->slot(v);
        Poly r(ctx_);
        Term t;
        for (const auto& [key, c] : entries_) {
            unpack_mono(ctx_->nvars(), key, t);
            if (t.e[s] == 0) continue;
            int k = t.e[s]--;
            r.add_term(t.xe, t.e.data(), c * k);
        }
        r.normalize();
        return r;
    }

    int degree_in(VarRef v) const
    {
        int s = ctx_->slot(v);
        int d = 0;
        Term t;
        for (const auto& [key, c] : entries_) {
            unpack_mono(ctx_->nvars(), key, t);
            d = std::max(d, t.e[s]);
        }
        return d;
    }

    // Total degree in the (y,z)-variables; -1 for the zero polynomial.
    int degree_yz() const
    {
        int d = -1;
        Term t;
        for (const auto& [key, c] : entries_) {
            unpack_mono(ctx_->nvars(), key, t);
            int sum = 0;
            for (int s = ctx_->p; s < ctx_->nvars(); ++s)
                sum += t.e[s];
            d = std::max(d, sum);
        }
        return d;
    }

    bool involves(VarRef v) const { return degree_in(v) > 0; }

    // Splits into (part free of v, remainder).
    std::pair<Poly, Poly> split_by(VarRef v) const
    {
        int s = ctx_->slot(v);
        Poly free_part(ctx_), rest(ctx_);
        Term t;
        for (const auto& [key, c] : entries_) {
            unpack_mono(ctx_->nvars(), key, t);
            (t.e[s] == 0 ? free_part : rest).entries_.emplace_back(key, c);
        }
        return {free_part, rest};
    }

    // Keeps only the terms with x-exponent exactly k.
    Poly x_slice(int k) const
    {
        Poly r(ctx_);
        for (const auto& [key, c] : entries_)
            if (static_cast<int>(key & kFieldMask) - kXeBias == k)
                r.entries_.emplace_back(key, c);
        return r;
    }

    std::optional<Rational> as_rational() const
    {
        if (entries_.empty()) return Rational(0);
        if (entries_.size() != 1) return std::nullopt;
        if (entries_[0].first != const_key()) return std::nullopt;
        return entries_[0].second;
    }

    void add_term(int xe, const int* e, const Rational& c)
    {
        if (c == 0) return;
        pending_.emplace_back(pack_mono(ctx_->nvars(), xe, e), c);
    }

    // Folds any pending add_term entries into the canonical form.
    void normalize()
    {
        if (pending_.empty()) return;
        for (auto& p : pending_)
            entries_.push_back(std::move(p));
        pending_.clear();
        std::sort(entries_.begin(), entries_.end(),
                  [](const Entry& a, const Entry& b) { return a.first < b.first; });
        std::vector<Entry> out;
        out.reserve(entries_.size());
        for (auto& e : entries_) {
            if (!out.empty() && out.back().first == e.first)
                out.back().second += e.second;
            else
                out.push_back(std::move(e));
        }
        out.erase(std::remove_if(out.begin(), out.end(),
                                 [](const Entry& e) { return e.second == 0; }),
                  out.end());
        entries_ = std::move(out);
    }

    std::string render() const;

    // internal: assumes ascending unique keys with nonzero coefficients
    static Poly from_sorted(CtxPtr ctx, std::vector<Entry> entries)
    {
        Poly r(std::move(ctx));
        r.entries_ = std::move(entries);
        return r;
    }

private:
    MonoKey const_key() const
    {
        std::array<int, kMaxPackedVars> e{};
        return pack_mono(ctx_->nvars(), 0, e.data());
    }

    Poly& merge_with(const Poly& o, int sign)
    {
        require_same_context(ctx_, o.ctx_);
        std::vector<Entry> out;
        out.reserve(entries_.size() + o.entries_.size());
        auto ia = entries_.begin(), ea = entries_.end();
        auto ib = o.entries_.begin(), eb = o.entries_.end();
        while (ia != ea && ib != eb) {
            if (ia->first < ib->first) {
                out.push_back(*ia++);
            } else if (ib->first < ia->first) {
                out.emplace_back(ib->first, sign > 0 ? ib->second : -ib->second);
                ++ib;
            } else {
                Rational c = sign > 0 ? Rational(ia->second + ib->second)
                                      : Rational(ia->second - ib->second);
                if (c != 0) out.emplace_back(ia->first, std::move(c));
                ++ia;
                ++ib;
            }
        }
        out.insert(out.end(), ia, ea);
        for (; ib != eb; ++ib)
            out.emplace_back(ib->first, sign > 0 ? ib->second : -ib->second);
        entries_ = std::move(out);
        return *this;
    }

    CtxPtr ctx_;
    std::vector<Entry> entries_;
    std::vector<Entry> pending_;
};

inline Poly operator*(const Poly& a, const Poly& b)
{
    require_same_context(a.ctx(), b.ctx());
    Poly r(a.ctx());
    if (a.is_zero() || b.is_zero()) return r;
    static const MonoKey bias = [] {
        std::array<int, kMaxPackedVars> e{};
        return pack_mono(0, 0, e.data()); // key with only the bias field set
    }();
    const auto& small = a.term_count() <= b.term_count() ? a : b;
    const auto& large = a.term_count() <= b.term_count() ? b : a;
    if (small.term_count() == 1) {
        // monomial shortcut: shift every key, order is preserved
        MonoKey delta = small.entries()[0].first - bias;
        const Rational& c = small.entries()[0].second;
        std::vector<Poly::Entry> out;
        out.reserve(large.term_count());
        for (const auto& [k, q] : large.entries())
            out.emplace_back(k + delta, q * c);
        return Poly::from_sorted(a.ctx(), std::move(out));
    }
    KeyAccumulator acc(large.term_count() * 2);
    for (const auto& [ka, ca] : small.entries()) {
        MonoKey delta = ka - bias;
        for (const auto& [kb, cb] : large.entries())
            acc.add_product(kb + delta, ca, cb);
    }
    return Poly::from_sorted(a.ctx(), acc.extract_sorted());
}

inline std::string Poly::render() const
{
    if (entries_.empty()) return "0";
    std::string out;
    Term t;
    // leading term first
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
        unpack_mono(ctx_->nvars(), it->first, t);
        Rational a = it->second;
        if (out.empty()) {
            if (a < 0) { out += "-"; a = -a; }
        } else {
            out += a < 0 ? " - " : " + ";
            if (a < 0) a = -a;
        }
        std::vector<std::string> factors;
        if (t.xe != 0)
            factors.push_back(t.xe == 1 ? ctx_->xname
                                        : ctx_->xname + "^" + std::to_string(t.xe));
        for (int s = 0; s < ctx_->nvars(); ++s) {
            if (t.e[s] == 0) continue;
            const std::string& nm = ctx_->name(ctx_->var_at(s));
            factors.push_back(t.e[s] == 1 ? nm : nm + "^" + std::to_string(t.e[s]));
        }
        if (factors.empty()) {
            out += to_string(a);
        } else {
            std::string body;
            for (const auto& f : factors)
                body += (body.empty() ? "" : "*") + f;
            out += (a == 1 ? body : to_string(a) + "*" + body);
        }
    }
    return out;
}

} // namespace srcoord

#endif
