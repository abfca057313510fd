#ifndef SRCOORD_SUBST_HPP
#define SRCOORD_SUBST_HPP

#include "srcoord/poly.hpp"

#include <vector>

namespace srcoord {

// Ring-map evaluation: every variable gets an image (defaults to itself),
// x always maps to x so Laurent terms stay exact monomial shifts.
class Substitution {
public:
    explicit Substitution(CtxPtr ctx) : ctx_(std::move(ctx)), images_(ctx_->nvars()) {}

    Substitution& set(VarRef v, Poly image)
    {
        require_same_context(ctx_, image.ctx());
        images_[ctx_->slot(v)] = std::move(image);
        return *this;
    }

    const CtxPtr& ctx() const { return ctx_; }

    Poly apply(const Poly& p) const
    {
        require_same_context(ctx_, p.ctx());
        std::vector<std::vector<Poly>> cache(images_.size()); // powers per slot
        int nv = ctx_->nvars();
        // accumulate all contributions in one hash pass, sort once at the end
        KeyAccumulator acc(p.term_count() * 2);
        p.for_each([&](const Term& t, const Rational& c) {
            const Poly* product = nullptr; // borrowed single power, common case
            Poly scratch(ctx_);
            std::array<int, kMaxPackedVars> passthrough{};
            for (int s = 0; s < nv; ++s) {
                int k = t.e[s];
                if (k == 0) continue;
                if (!images_[s]) {
                    passthrough[s] = k;
                    continue;
                }
                const Poly& pw = power_of(s, k, cache);
                if (!product) {
                    product = &pw;
                } else {
                    scratch = *product * pw;
                    product = &scratch;
                }
            }
            MonoKey shift = pack_mono(nv, t.xe, passthrough.data()) - pack_mono(nv, 0, zeros());
            if (!product) {
                acc.add(pack_mono(nv, t.xe, passthrough.data()), c);
                return;
            }
            for (const auto& [k2, c2] : product->entries())
                acc.add_product(k2 + shift, c, c2);
        });
        return Poly::from_sorted(ctx_, acc.extract_sorted());
    }

private:
    static const int* zeros()
    {
        static const std::array<int, kMaxPackedVars> z{};
        return z.data();
    }

    const Poly& power_of(int s, int k, std::vector<std::vector<Poly>>& cache) const
    {
        auto& powers = cache[s];
        if (powers.empty())
            powers.push_back(Poly::one(ctx_)); // powers[0]
        while (static_cast<int>(powers.size()) <= k)
            powers.push_back(powers.back() * *images_[s]);
        return powers[k];
    }

    CtxPtr ctx_;
    std::vector<std::optional<Poly>> images_;
};

// Termwise transport of a polynomial into another context. Every variable of
// the source context needs an image in the target context; x maps to x.
inline Poly transport(const Poly& p, const CtxPtr& target,
                      const std::vector<Poly>& images_by_slot)
{
    Poly out(target);
    int nv = p.ctx()->nvars();
    p.for_each([&](const Term& t, const Rational& c) {
        Poly term = Poly::constant(target, c).shifted_x(t.xe);
        for (int s = 0; s < nv; ++s)
            if (t.e[s] != 0)
                term = term * images_by_slot.at(s).pow(t.e[s]);
        out += term;
    });
    return out;
}

} // namespace srcoord

#endif
