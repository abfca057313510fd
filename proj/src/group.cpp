#include "srcoord/group.hpp"

#include "srcoord/jacobian.hpp"

namespace srcoord {

Endo Endo::identity(const CtxPtr& ctx)
{
    std::vector<Poly> ims;
    for (int j = 0; j < ctx->m; ++j)
        ims.push_back(Poly::variable(ctx, {VarKind::Y, j}));
    for (int k = 0; k < ctx->n; ++k)
        ims.push_back(Poly::variable(ctx, {VarKind::Z, k}));
    return Endo(ctx, std::move(ims));
}

bool Endo::is_identity() const { return *this == identity(ctx_); }

// --- generator helpers -------------------------------------------------------

namespace {

bool poly_is_base_coefficient(const Poly& p)
{
    // x-free and z-free: a coefficient from A^[m] = Q[u...][y...].
    const auto& ctx = p.ctx();
    bool ok = true;
    p.for_each([&](const Term& t, const Rational&) {
        if (t.xe != 0) ok = false;
        for (int k = 0; k < ctx->n; ++k)
            if (t.e[ctx->p + ctx->m + k] != 0) ok = false;
    });
    return ok;
}

} // namespace

void validate_generator(const CtxPtr& ctx, const Generator& g)
{
    if (const auto* e = std::get_if<Elementary>(&g)) {
        require_same_context(ctx, e->p.ctx());
        if (e->slot.kind == VarKind::U)
            fail("BadGenerator", "elementary slot must be a y- or z-variable");
        int limit = e->slot.kind == VarKind::Y ? ctx->m : ctx->n;
        if (e->slot.index < 0 || e->slot.index >= limit)
            fail("BadGenerator", "elementary slot out of range");
        if (e->p.involves(e->slot))
            fail("BadGenerator", "elementary addend may not involve its own slot");
        return;
    }
    if (const auto* l = std::get_if<Linear>(&g)) {
        if (static_cast<int>(l->mat.size()) != ctx->n)
            fail("BadGenerator", "linear matrix must be n x n over the z-slots");
        for (const auto& row : l->mat) {
            if (static_cast<int>(row.size()) != ctx->n)
                fail("BadGenerator", "linear matrix must be square");
            for (const auto& entry : row) {
                require_same_context(ctx, entry.ctx());
                if (!poly_is_base_coefficient(entry))
                    fail("BadGenerator", "linear entries must be x-free and z-free");
            }
        }
        auto det = poly_det(ctx, l->mat).as_rational();
        if (!det || *det == 0)
            fail("BadGenerator", "linear determinant must be a nonzero rational");
        return;
    }
    if (const auto* gp = std::get_if<GenPerm>(&g)) {
        int n = ctx->n;
        if (static_cast<int>(gp->sigma.size()) != n || static_cast<int>(gp->lambda.size()) != n ||
            static_cast<int>(gp->r.size()) != n)
            fail("BadGenerator", "genperm data must have length n");
        std::vector<bool> seen(n, false);
        for (int i = 0; i < n; ++i) {
            if (gp->sigma[i] < 0 || gp->sigma[i] >= n || seen[gp->sigma[i]])
                fail("BadGenerator", "genperm sigma is not a permutation");
            seen[gp->sigma[i]] = true;
            if (gp->lambda[i] == 0)
                fail("BadGenerator", "genperm scalars must be nonzero");
        }
        return;
    }
    const auto& ee = std::get<ExplicitEndo>(g);
    require_same_context(ctx, ee.fwd.ctx());
    require_same_context(ctx, ee.inv.ctx());
    Endo round1 = compose_endos(ee.fwd, ee.inv);
    Endo round2 = compose_endos(ee.inv, ee.fwd);
    if (!round1.is_identity() || !round2.is_identity())
        fail("BadGenerator", "explicit endo: stored inverse does not compose to identity");
}

Substitution generator_substitution(const CtxPtr& ctx, const Generator& g)
{
    Substitution s(ctx);
    if (const auto* e = std::get_if<Elementary>(&g)) {
        s.set(e->slot, Poly::variable(ctx, e->slot) + e->p);
        return s;
    }
    if (const auto* l = std::get_if<Linear>(&g)) {
        for (int i = 0; i < ctx->n; ++i) {
            Poly im(ctx);
            for (int j = 0; j < ctx->n; ++j)
                im += l->mat[i][j] * Poly::variable(ctx, {VarKind::Z, j});
            s.set({VarKind::Z, i}, im);
        }
        return s;
    }
    if (const auto* gp = std::get_if<GenPerm>(&g)) {
        for (int i = 0; i < ctx->n; ++i) {
            int k = gp->sigma[i];
            Poly im = Poly::variable(ctx, {VarKind::Z, k})
                          .scaled(gp->lambda[k])
                          .shifted_x(gp->r[k]);
            s.set({VarKind::Z, i}, im);
        }
        return s;
    }
    const auto& ee = std::get<ExplicitEndo>(g);
    return ee.fwd.as_substitution();
}

Generator invert_generator(const CtxPtr& ctx, const Generator& g)
{
    if (const auto* e = std::get_if<Elementary>(&g))
        return Elementary{e->slot, -e->p};
    if (const auto* l = std::get_if<Linear>(&g)) {
        int n = ctx->n;
        Rational det = *poly_det(ctx, l->mat).as_rational();
        std::vector<std::vector<Poly>> inv(n, std::vector<Poly>(n, Poly::zero(ctx)));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                // cofactor expansion: inv[i][j] = C_ji / det
                std::vector<std::vector<Poly>> minor;
                for (int a = 0; a < n; ++a) {
                    if (a == j) continue;
                    std::vector<Poly> row;
                    for (int b = 0; b < n; ++b)
                        if (b != i) row.push_back(l->mat[a][b]);
                    minor.push_back(std::move(row));
                }
                Poly c = poly_det(ctx, minor);
                if ((i + j) % 2 == 1) c = -c;
                inv[i][j] = c.scaled(Rational(1) / det);
            }
        }
        return Linear{std::move(inv)};
    }
    if (const auto* gp = std::get_if<GenPerm>(&g))
        return genperm_inverse(*gp);
    const auto& ee = std::get<ExplicitEndo>(g);
    return ExplicitEndo{ee.inv, ee.fwd};
}

bool generator_fixes_y(const CtxPtr& ctx, const Generator& g)
{
    if (const auto* e = std::get_if<Elementary>(&g))
        return e->slot.kind == VarKind::Z;
    if (std::holds_alternative<Linear>(g) || std::holds_alternative<GenPerm>(g))
        return true;
    const auto& ee = std::get<ExplicitEndo>(g);
    for (int j = 0; j < ctx->m; ++j)
        if (!(ee.fwd.image_y(j) == Poly::variable(ctx, {VarKind::Y, j})))
            return false;
    return true;
}

bool generator_is_tame(const Generator& g)
{
    return !std::holds_alternative<ExplicitEndo>(g);
}

// --- words -------------------------------------------------------------------

Endo word_to_endo(const GeneratorWord& w)
{
    Endo acc = Endo::identity(w.ctx());
    for (const auto& g : w.generators())
        acc = compose_endo_generator(acc, g);
    return acc;
}

GeneratorWord invert_word(const GeneratorWord& w)
{
    GeneratorWord out(w.ctx());
    const auto& gens = w.generators();
    for (auto it = gens.rbegin(); it != gens.rend(); ++it)
        out.append(invert_generator(w.ctx(), *it));
    return out;
}

Endo compose_endo_generator(const Endo& e, const Generator& g)
{
    Substitution s = generator_substitution(e.ctx(), g);
    std::vector<Poly> ims;
    ims.reserve(e.images().size());
    for (const auto& im : e.images())
        ims.push_back(s.apply(im));
    return Endo(e.ctx(), std::move(ims));
}

Endo compose_endos(const Endo& first, const Endo& second)
{
    require_same_context(first.ctx(), second.ctx());
    Substitution s = second.as_substitution();
    std::vector<Poly> ims;
    ims.reserve(first.images().size());
    for (const auto& im : first.images())
        ims.push_back(s.apply(im));
    return Endo(first.ctx(), std::move(ims));
}

// --- weighted conjugation -----------------------------------------------------

namespace {

GenPerm twist_genperm(int n, const WeightVector& tau, int sign)
{
    GenPerm g = GenPerm::identity(n);
    for (int k = 0; k < n; ++k)
        g.r[k] = sign * static_cast<int>(tau[k]);
    return g;
}

} // namespace

GeneratorWord conjugate_by_weights(const GeneratorWord& w, const WeightVector& tau)
{
    const auto& ctx = w.ctx();
    if (static_cast<int>(tau.size()) != ctx->n)
        fail("BadWeight", "weight length does not match context");
    GeneratorWord out(ctx);
    for (const auto& g : w.generators()) {
        if (const auto* e = std::get_if<Elementary>(&g)) {
            Poly p = scale_z(e->p, tau);
            if (e->slot.kind == VarKind::Z)
                p = p.shifted_x(-static_cast<int>(tau[e->slot.index]));
            out.append(Elementary{e->slot, std::move(p)});
        } else if (std::holds_alternative<Linear>(g)) {
            out.append(twist_genperm(ctx->n, tau, -1));
            out.append(g);
            out.append(twist_genperm(ctx->n, tau, +1));
        } else if (const auto* gp = std::get_if<GenPerm>(&g)) {
            GenPerm conj = *gp;
            for (int k = 0; k < ctx->n; ++k)
                conj.r[k] += static_cast<int>(tau[k] - tau[gp->inverse_sigma(k)]);
            out.append(std::move(conj));
        } else {
            const auto& ee = std::get<ExplicitEndo>(g);
            out.append(ExplicitEndo{conjugate_by_weights(ee.fwd, tau),
                                    conjugate_by_weights(ee.inv, tau)});
        }
    }
    return out;
}

Endo conjugate_by_weights(const Endo& e, const WeightVector& tau)
{
    const auto& ctx = e.ctx();
    std::vector<Poly> ims;
    for (int j = 0; j < ctx->m; ++j)
        ims.push_back(scale_z(e.image_y(j), tau));
    for (int k = 0; k < ctx->n; ++k)
        ims.push_back(scale_z(e.image_z(k), tau).shifted_x(-static_cast<int>(tau[k])));
    return Endo(ctx, std::move(ims));
}

// --- membership forms ----------------------------------------------------------

IaFormResult canonical_ia_form(const Endo& e, const WeightVector& tau)
{
    IaFormResult res;
    const auto& ctx = e.ctx();
    if (static_cast<int>(tau.size()) != ctx->n) {
        res.error = "ShapeMismatch";
        res.detail = "weight length does not match context";
        return res;
    }
    if (!tau.natural()) {
        res.error = "WeightNotNatural";
        res.detail = "tau must lie in N^n: " + tau.render();
        return res;
    }
    for (int j = 0; j < ctx->m; ++j) {
        Poly f = (e.image_y(j) - Poly::variable(ctx, {VarKind::Y, j})).shifted_x(-1);
        if (!a_tau_member(f, tau)) {
            res.error = "WitnessNotInATau";
            res.detail = "y-slot " + std::to_string(j + 1);
            return res;
        }
        res.witness.f.push_back(std::move(f));
    }
    for (int k = 0; k < ctx->n; ++k) {
        Poly g = (e.image_z(k) - Poly::variable(ctx, {VarKind::Z, k}))
                     .shifted_x(static_cast<int>(tau[k]) - 1);
        if (!a_tau_member(g, tau)) {
            res.error = "WitnessNotInATau";
            res.detail = "z-slot " + std::to_string(k + 1);
            return res;
        }
        res.witness.g.push_back(std::move(g));
    }
    res.ok = true;
    return res;
}

bool is_in_ia_tau(const Endo& e, const WeightVector& tau)
{
    return canonical_ia_form(e, tau).ok;
}

bool validate_elementary_tau(const Elementary& g, const CtxPtr& ctx, const WeightVector& tau)
{
    if (g.slot.kind != VarKind::Z) return false;
    Poly scaled = g.p.shifted_x(static_cast<int>(tau[g.slot.index]));
    return a_tau_member(scaled, tau);
}

bool is_in_ga_tau(const GeneratorWord& w, const WeightVector& tau)
{
    for (const auto& g : w.generators())
        if (!generator_fixes_y(w.ctx(), g)) return false;
    WeightVector neg = tau.negated();
    if (!word_to_endo(conjugate_by_weights(w, neg)).is_over_r()) return false;
    return word_to_endo(conjugate_by_weights(invert_word(w), neg)).is_over_r();
}

// --- generalized permutations ---------------------------------------------------

GeneratorWord genperm_word(const CtxPtr& ctx, const GenPerm& g)
{
    GeneratorWord w(ctx);
    w.append(g);
    return w;
}

GenPerm genperm_inverse(const GenPerm& g)
{
    int n = static_cast<int>(g.sigma.size());
    GenPerm inv = GenPerm::identity(n);
    for (int i = 0; i < n; ++i)
        inv.sigma[g.sigma[i]] = i;
    for (int k = 0; k < n; ++k) {
        // inverse target slot is k = old source; coefficients undo lambda/r at sigma(k)
        inv.lambda[k] = Rational(1) / g.lambda[g.sigma[k]];
        inv.r[k] = -g.r[g.sigma[k]];
    }
    return inv;
}

GenPerm genperm_compose(const GenPerm& a, const GenPerm& b)
{
    int n = static_cast<int>(a.sigma.size());
    GenPerm c = GenPerm::identity(n);
    for (int i = 0; i < n; ++i)
        c.sigma[i] = b.sigma[a.sigma[i]];
    for (int k = 0; k < n; ++k) {
        int j = b.inverse_sigma(k); // intermediate slot feeding target k
        c.lambda[k] = a.lambda[j] * b.lambda[k];
        c.r[k] = a.r[j] + b.r[k];
    }
    return c;
}

// --- word-level weight operations ------------------------------------------------

WeightVector minimal_tau(const Endo& e)
{
    const auto& ctx = e.ctx();
    for (int j = 0; j < ctx->m; ++j)
        if (!e.image_y(j).is_over_r())
            fail("YImageNotIntegral",
                 "image of " + ctx->ynames[j] + " is not in R^[m+n]; no tau exists");
    WeightVector tau = WeightVector::zeros(ctx->n);
    for (int k = 0; k < ctx->n; ++k) {
        auto ord = e.image_z(k).x_order();
        if (ord && *ord < 0)
            tau[k] = -*ord;
    }
    return tau;
}

std::vector<WeightVector> sigma_sequence(const GeneratorWord& w)
{
    const auto& ctx = w.ctx();
    const auto& gens = w.generators();
    std::vector<WeightVector> sigmas(gens.size() + 1, WeightVector::zeros(ctx->n));
    for (int i = static_cast<int>(gens.size()) - 1; i >= 0; --i) {
        const auto* e = std::get_if<Elementary>(&gens[i]);
        if (!e || e->slot.kind != VarKind::Z)
            fail("NonElementaryGenerator",
                 "sigma sequences need a word of z-elementaries (generator " +
                     std::to_string(i + 1) + ")");
        const WeightVector& next = sigmas[i + 1];
        WeightVector cur = next;
        if (!e->p.is_zero()) {
            int j = e->slot.index;
            long s = -*e->p.x_order();
            Poly pnorm = e->p.shifted_x(static_cast<int>(s));
            long d = a_tau_deficiency(pnorm, next);
            cur[j] = std::max(next[j], s + d);
        }
        sigmas[i] = std::move(cur);
    }
    sigmas.pop_back(); // drop the implicit trailing zero
    for (size_t i = 0; i + 1 < sigmas.size(); ++i)
        if (!sigmas[i].geq(sigmas[i + 1]))
            fail("InternalContradiction", "sigma sequence is not descending");
    return sigmas;
}

WeightVector rho_apply_tau(const GenPerm& rho, const WeightVector& tau)
{
    int n = static_cast<int>(tau.size());
    WeightVector out = WeightVector::zeros(n);
    for (int k = 0; k < n; ++k)
        out[k] = tau[rho.inverse_sigma(k)] + rho.r[k];
    return out;
}

} // namespace srcoord
