#ifndef SRCOORD_GROUP_HPP
#define SRCOORD_GROUP_HPP

#include "srcoord/parse.hpp"
#include "srcoord/subst.hpp"
#include "srcoord/weights.hpp"

#include <variant>
#include <vector>

namespace srcoord {

// Tuple of image polynomials for (y_1..y_m, z_1..z_n); x and the u's are fixed.
class Endo {
public:
    Endo() = default;
    explicit Endo(CtxPtr ctx, std::vector<Poly> images)
        : ctx_(std::move(ctx)), images_(std::move(images))
    {
        if (static_cast<int>(images_.size()) != ctx_->m + ctx_->n)
            fail("BadEndo", "image count must be m+n");
        for (const auto& im : images_)
            require_same_context(ctx_, im.ctx());
    }

    static Endo identity(const CtxPtr& ctx);

    const CtxPtr& ctx() const { return ctx_; }
    const std::vector<Poly>& images() const { return images_; }

    const Poly& image_y(int j) const { return images_.at(j); }
    const Poly& image_z(int k) const { return images_.at(ctx_->m + k); }
    const Poly& image(VarRef v) const
    {
        if (v.kind == VarKind::Y) return image_y(v.index);
        if (v.kind == VarKind::Z) return image_z(v.index);
        fail("BadVarRef", "endomorphisms act on y/z variables only");
    }

    Substitution as_substitution() const
    {
        Substitution s(ctx_);
        for (int j = 0; j < ctx_->m; ++j)
            s.set({VarKind::Y, j}, images_[j]);
        for (int k = 0; k < ctx_->n; ++k)
            s.set({VarKind::Z, k}, images_[ctx_->m + k]);
        return s;
    }

    Poly apply(const Poly& p) const { return as_substitution().apply(p); }

    bool is_over_r() const
    {
        for (const auto& im : images_)
            if (!im.is_over_r()) return false;
        return true;
    }

    Endo mod_x() const
    {
        std::vector<Poly> ims;
        for (const auto& im : images_)
            ims.push_back(im.mod_x());
        return Endo(ctx_, std::move(ims));
    }

    bool is_identity() const;

    bool operator==(const Endo& o) const
    {
        require_same_context(ctx_, o.ctx_);
        return images_ == o.images_;
    }

private:
    CtxPtr ctx_;
    std::vector<Poly> images_;
};

inline bool endo_equal(const Endo& a, const Endo& b) { return a == b; }

// --- Generators -------------------------------------------------------------

// One variable gets P added; P never involves that variable.
struct Elementary {
    VarRef slot;
    Poly p;
};

// z_i -> sum_j mat[i][j] z_j; entries are x-free, z-free polynomials (base and
// y-variables only) and the determinant is a nonzero rational.
struct Linear {
    std::vector<std::vector<Poly>> mat;
};

// z_i -> lambda[sigma[i]] * x^{r[sigma[i]]} * z_{sigma[i]}; lambda/r are
// indexed by the target slot.
struct GenPerm {
    std::vector<int> sigma; // sigma[i] = target slot of z_i (0-based)
    std::vector<Rational> lambda;
    std::vector<int> r;

    int inverse_sigma(int k) const
    {
        for (size_t i = 0; i < sigma.size(); ++i)
            if (sigma[i] == k) return static_cast<int>(i);
        fail("BadGenPerm", "sigma is not a permutation");
    }

    static GenPerm identity(int n)
    {
        GenPerm g;
        for (int i = 0; i < n; ++i) {
            g.sigma.push_back(i);
            g.lambda.emplace_back(1);
            g.r.push_back(0);
        }
        return g;
    }

    bool is_identity() const
    {
        for (size_t i = 0; i < sigma.size(); ++i)
            if (sigma[i] != static_cast<int>(i) || lambda[i] != 1 || r[i] != 0)
                return false;
        return true;
    }
};

// A full image tuple with its exact inverse, for maps that are cheaper to
// store evaluated than as generator words.
struct ExplicitEndo {
    Endo fwd;
    Endo inv;
};

using Generator = std::variant<Elementary, Linear, GenPerm, ExplicitEndo>;

Generator invert_generator(const CtxPtr& ctx, const Generator& g);
Substitution generator_substitution(const CtxPtr& ctx, const Generator& g);
bool generator_fixes_y(const CtxPtr& ctx, const Generator& g);
bool generator_is_tame(const Generator& g);
void validate_generator(const CtxPtr& ctx, const Generator& g);

// Ordered composition g_1 o g_2 o ... o g_k; evaluating on a variable applies
// g_1's substitution first and g_k's last (word composition is
// anti-homomorphic to ring-map composition).
class GeneratorWord {
public:
    GeneratorWord() = default;
    explicit GeneratorWord(CtxPtr ctx, std::vector<Generator> gens = {})
        : ctx_(std::move(ctx)), gens_(std::move(gens))
    {
        for (const auto& g : gens_)
            validate_generator(ctx_, g);
    }

    const CtxPtr& ctx() const { return ctx_; }
    const std::vector<Generator>& generators() const { return gens_; }
    bool empty() const { return gens_.empty(); }
    size_t size() const { return gens_.size(); }

    GeneratorWord& append(Generator g)
    {
        validate_generator(ctx_, g);
        gens_.push_back(std::move(g));
        return *this;
    }

    GeneratorWord& append(const GeneratorWord& w)
    {
        require_same_context(ctx_, w.ctx_);
        gens_.insert(gens_.end(), w.gens_.begin(), w.gens_.end());
        return *this;
    }

    static GeneratorWord concat(const GeneratorWord& a, const GeneratorWord& b)
    {
        GeneratorWord w = a;
        w.append(b);
        return w;
    }

    bool all_tame() const
    {
        for (const auto& g : gens_)
            if (!generator_is_tame(g)) return false;
        return true;
    }

private:
    CtxPtr ctx_;
    std::vector<Generator> gens_;
};

Endo word_to_endo(const GeneratorWord& w);
GeneratorWord invert_word(const GeneratorWord& w);

// Applies a generator on the right of an evaluated endo: result(v) = g(e(v)).
Endo compose_endo_generator(const Endo& e, const Generator& g);
Endo compose_endos(const Endo& first, const Endo& second);

// The weighted conjugation tw^{-1} o phi o tw with tw = (x^{t_1}z_1, ...).
// Entries of tau may be negative. Linear generators expand into a
// genperm-sandwich because the twisted map leaves the stored-matrix form.
GeneratorWord conjugate_by_weights(const GeneratorWord& w, const WeightVector& tau);
Endo conjugate_by_weights(const Endo& e, const WeightVector& tau);

// Membership witness for IA_{m+n}^tau(R): e = (y_j + x F_j, z_k + x^{-t_k+1} G_k)
// with all F_j, G_k in A_tau.
struct IaWitness {
    std::vector<Poly> f; // per y-slot
    std::vector<Poly> g; // per z-slot
};

struct IaFormResult {
    bool ok = false;
    std::string error; // "WitnessNotInATau" etc. when !ok
    std::string detail;
    IaWitness witness;
};

IaFormResult canonical_ia_form(const Endo& e, const WeightVector& tau);
bool is_in_ia_tau(const Endo& e, const WeightVector& tau);

// True iff g = (z_k -> z_k + x^{-t_k} P(hat z_k)) with P in A_tau[hat z_k],
// i.e. g lies in EA_n^tau(R^[m]).
bool validate_elementary_tau(const Elementary& g, const CtxPtr& ctx, const WeightVector& tau);

// Membership of a word in GA_n^tau(R^[m]): fixes the y's, and both the word
// and its inverse are over R after untwisting by tau.
bool is_in_ga_tau(const GeneratorWord& w, const WeightVector& tau);

// Generalized permutations as words/endos.
GeneratorWord genperm_word(const CtxPtr& ctx, const GenPerm& g);
GenPerm genperm_inverse(const GenPerm& g);
GenPerm genperm_compose(const GenPerm& a, const GenPerm& b); // word order a o b

} // namespace srcoord

#endif
