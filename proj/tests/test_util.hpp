#ifndef SRCOORD_TEST_UTIL_HPP
#define SRCOORD_TEST_UTIL_HPP

#include "srcoord/group.hpp"

#include <random>

namespace srcoord::testutil {

inline CtxPtr ctx_yz() { return RingContext::create(1, 1, 0, {"y"}, {"z"}); }

// (y, z + y^2/x) o (y + x^2 z, z) o (y, z - y^2/x)
inline GeneratorWord nagata_word(const CtxPtr& ctx)
{
    GeneratorWord w(ctx);
    w.append(Elementary{{VarKind::Z, 0}, parse_poly("x^-1*y^2", ctx)});
    w.append(Elementary{{VarKind::Y, 0}, parse_poly("x^2*z", ctx)});
    w.append(Elementary{{VarKind::Z, 0}, parse_poly("-x^-1*y^2", ctx)});
    return w;
}

inline Endo nagata_endo(const CtxPtr& ctx)
{
    return Endo(ctx, {parse_poly("y + x*(x*z - y^2)", ctx),
                      parse_poly("z + 2*y*(x*z - y^2) + x*(x*z - y^2)^2", ctx)});
}

// Random polynomial supported on x-degrees >= xmin, total (y,z)-degree <= deg.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

    Rational rational()
    {
        int num = uniform(-4, 4);
        if (num == 0) num = 1;
        int den = uniform(1, 3);
        return Rational(num, den);
    }

    Poly poly(const CtxPtr& ctx, int deg, int terms, int xmin = 0, int xmax = 2)
    {
        Poly p(ctx);
        for (int t = 0; t < terms; ++t) {
            Poly mono = Poly::constant(ctx, rational()).shifted_x(uniform(xmin, xmax));
            int budget = uniform(0, deg);
            for (int d = 0; d < budget; ++d) {
                int s = uniform(0, ctx->nvars() - 1);
                mono = mono * Poly::variable(ctx, ctx->var_at(s));
            }
            p += mono;
        }
        return p;
    }

    // Random member of A_tau: sum of terms x^extra * (u,y)-part * prod (x^{t_k} z_k)^{b_k}.
    Poly a_tau_poly(const CtxPtr& ctx, const WeightVector& tau, int deg, int terms)
    {
        Poly p(ctx);
        for (int t = 0; t < terms; ++t) {
            Poly mono = Poly::constant(ctx, rational()).shifted_x(uniform(0, 2));
            int budget = uniform(0, deg);
            for (int d = 0; d < budget; ++d) {
                int s = uniform(0, ctx->nvars() - 1);
                VarRef v = ctx->var_at(s);
                mono = mono * Poly::variable(ctx, v);
                if (v.kind == VarKind::Z)
                    mono = mono.shifted_x(static_cast<int>(tau[v.index]));
            }
            p += mono;
        }
        return p;
    }

    // Random word in IA_{m+n}^tau(R): elementaries of the membership shape.
    GeneratorWord ia_word(const CtxPtr& ctx, const WeightVector& tau, int len, int deg = 2)
    {
        GeneratorWord w(ctx);
        for (int i = 0; i < len; ++i) {
            if (ctx->m > 0 && uniform(0, 1) == 0) {
                int j = uniform(0, ctx->m - 1);
                Poly f = a_tau_poly(ctx, tau, deg, 2);
                // strip any y_j-occurrences so the elementary is well formed
                f = f.split_by({VarKind::Y, j}).first;
                if (!f.is_zero())
                    w.append(Elementary{{VarKind::Y, j}, f.shifted_x(1)});
            } else {
                int k = uniform(0, ctx->n - 1);
                Poly g = a_tau_poly(ctx, tau, deg, 2);
                g = g.split_by({VarKind::Z, k}).first;
                if (!g.is_zero())
                    w.append(Elementary{{VarKind::Z, k},
                                        g.shifted_x(1 - static_cast<int>(tau[k]))});
            }
        }
        return w;
    }

    // Random z-elementary word over S (bounded Laurent depth).
    GeneratorWord s_elementary_word(const CtxPtr& ctx, int len, int deg = 2, int depth = 2)
    {
        GeneratorWord w(ctx);
        for (int i = 0; i < len; ++i) {
            int k = uniform(0, ctx->n - 1);
            Poly p = poly(ctx, deg, uniform(1, 2), -depth, 1);
            p = p.split_by({VarKind::Z, k}).first;
            if (!p.is_zero())
                w.append(Elementary{{VarKind::Z, k}, p});
        }
        return w;
    }

    GenPerm genperm(const CtxPtr& ctx, int rmax = 2)
    {
        int n = ctx->n;
        GenPerm g = GenPerm::identity(n);
        for (int i = n - 1; i > 0; --i)
            std::swap(g.sigma[i], g.sigma[uniform(0, i)]);
        for (int k = 0; k < n; ++k) {
            g.lambda[k] = rational();
            g.r[k] = uniform(-rmax, rmax);
        }
        return g;
    }

private:
    std::mt19937_64 eng_;
};

} // namespace srcoord::testutil

#endif
