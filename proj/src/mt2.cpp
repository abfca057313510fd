#include "srcoord/mt2.hpp"

#include <algorithm>

namespace srcoord {

namespace {

Endo elementary_endo(const CtxPtr& ctx, const Elementary& g)
{
    GeneratorWord w(ctx);
    w.append(g);
    return word_to_endo(w);
}

Endo genperm_endo(const CtxPtr& ctx, const GenPerm& g)
{
    return word_to_endo(genperm_word(ctx, g));
}

bool over_r_not_div(const Poly& p)
{
    auto ord = p.x_order();
    return ord && *ord == 0;
}

bool in_x_ideal(const Poly& p)
{
    auto ord = p.x_order();
    return !ord || *ord >= 1;
}

// Re-extracts an elementary from an evaluated endo that moves one z-slot.
Elementary extract_z_elementary(const Endo& e)
{
    const auto& ctx = e.ctx();
    std::optional<int> moved;
    for (int j = 0; j < ctx->m; ++j)
        if (!(e.image_y(j) == Poly::variable(ctx, {VarKind::Y, j})))
            fail("InternalContradiction", "expected a z-elementary, but a y-image moved");
    for (int k = 0; k < ctx->n; ++k) {
        if (e.image_z(k) == Poly::variable(ctx, {VarKind::Z, k})) continue;
        if (moved)
            fail("InternalContradiction", "expected an elementary, but two z-images moved");
        moved = k;
    }
    if (!moved)
        return Elementary{{VarKind::Z, 0}, Poly::zero(ctx)};
    Poly addend = e.image_z(*moved) - Poly::variable(ctx, {VarKind::Z, *moved});
    if (addend.involves({VarKind::Z, *moved}))
        fail("InternalContradiction", "conjugated map is not elementary");
    return Elementary{{VarKind::Z, *moved}, addend};
}

// The coefficient mu when g acts as z_k -> z_k + mu x^{t_other - t_k} z_other
// with mu over the base; empty for anything else.
std::optional<Poly> linear_coefficient(const Elementary& g, const CtxPtr& ctx,
                                       const WeightVector& tau)
{
    if (ctx->n != 2 || g.slot.kind != VarKind::Z) return std::nullopt;
    int k = g.slot.index, o = 1 - k;
    if (g.p.is_zero()) return Poly::zero(ctx);
    Poly shifted = g.p.shifted_x(static_cast<int>(tau[k] - tau[o]));
    auto [free_part, rest] = shifted.split_by({VarKind::Z, o});
    if (!free_part.is_zero()) return std::nullopt;
    Poly mu(ctx);
    bool shape_ok = true;
    rest.for_each([&](const Term& t, const Rational& c) {
        Term t2 = t;
        int slot = ctx->p + ctx->m + o;
        if (t2.e[slot] != 1) { shape_ok = false; return; }
        t2.e[slot] = 0;
        mu.add_term(t2.xe, t2.e.data(), c);
    });
    if (!shape_ok) return std::nullopt;
    mu.normalize();
    // mu must be x-free and z-free
    mu.for_each([&](const Term& t, const Rational&) {
        if (t.xe != 0) shape_ok = false;
        for (int z = 0; z < ctx->n; ++z)
            if (t.e[ctx->p + ctx->m + z] != 0) shape_ok = false;
    });
    if (!shape_ok) return std::nullopt;
    return mu;
}

std::vector<std::vector<Poly>> mat_identity(const CtxPtr& ctx)
{
    return {{Poly::one(ctx), Poly::zero(ctx)}, {Poly::zero(ctx), Poly::one(ctx)}};
}

std::vector<std::vector<Poly>> mat_mul(const std::vector<std::vector<Poly>>& a,
                                       const std::vector<std::vector<Poly>>& b)
{
    const auto& ctx = a[0][0].ctx();
    auto out = mat_identity(ctx);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Poly s(ctx);
            for (int k = 0; k < 2; ++k)
                s += a[i][k] * b[k][j];
            out[i][j] = s;
        }
    return out;
}

std::vector<std::vector<Poly>> linear_elem_matrix(const CtxPtr& ctx, int slot, const Poly& mu)
{
    auto m = mat_identity(ctx);
    m[slot][1 - slot] = mu;
    return m;
}

Rational require_rational(const Poly& p, const char* who)
{
    auto q = p.as_rational();
    if (!q || *q == 0)
        fail("InternalContradiction", std::string(who) + " must be a nonzero rational");
    return *q;
}

GenPerm diag_genperm(const Rational& a, const Rational& d)
{
    GenPerm g = GenPerm::identity(2);
    g.lambda = {a, d};
    return g;
}

GenPerm antidiag_genperm(const Rational& b, const Rational& c, const WeightVector& tau)
{
    GenPerm g;
    g.sigma = {1, 0};
    g.lambda = {c, b};
    g.r = {static_cast<int>(tau[0] - tau[1]), static_cast<int>(tau[1] - tau[0])};
    return g;
}

long unclamped_depth(const Poly& p, const WeightVector& tau)
{
    // max over terms of (sum_k t_k b_k - a); very negative for zero input
    const auto& ctx = p.ctx();
    long worst = std::numeric_limits<long>::min();
    p.for_each([&](const Term& t, const Rational&) {
        long need = 0;
        for (int k = 0; k < ctx->n; ++k)
            need += tau[k] * t.e[ctx->p + ctx->m + k];
        worst = std::max(worst, need - t.xe);
    });
    return worst;
}

} // namespace

Elementary rho_push(const Elementary& g, const GenPerm& rho, const CtxPtr& ctx,
                    const WeightVector& tau)
{
    if (!validate_elementary_tau(g, ctx, tau))
        fail("PreconditionFailed", "generator is not in EA^" + tau.render());
    WeightVector image = rho_apply_tau(rho, tau);
    if (!image.natural())
        fail("RhoTauNotNatural", "rho(tau) = " + image.render());
    GeneratorWord conj(ctx);
    conj.append(genperm_inverse(rho));
    conj.append(g);
    conj.append(rho);
    Elementary pushed = extract_z_elementary(word_to_endo(conj));
    if (!validate_elementary_tau(pushed, ctx, image))
        fail("InternalContradiction", "pushed elementary left EA^" + image.render());
    return pushed;
}

GeneratorWord rho_push(const GeneratorWord& phi, const GenPerm& rho, const WeightVector& tau)
{
    const auto& ctx = phi.ctx();
    GeneratorWord out(ctx);
    for (const auto& g : phi.generators()) {
        const auto* e = std::get_if<Elementary>(&g);
        if (!e)
            fail("PreconditionFailed", "rho_push expects a word of elementaries");
        out.append(rho_push(*e, rho, ctx, tau));
    }
    // phi o rho = rho o phi'
    GeneratorWord lhs = phi;
    lhs.append(rho);
    GeneratorWord rhs(ctx);
    rhs.append(rho);
    rhs.append(out);
    if (!(word_to_endo(lhs) == word_to_endo(rhs)))
        fail("InternalContradiction", "push equation phi o rho = rho o phi' failed");
    return out;
}

bool phi_ea_tau_check(const Elementary& phi, const WeightVector& sigma,
                      const WeightVector& tau, const Endo& omega)
{
    const auto& ctx = omega.ctx();
    if (ctx->n != 2)
        fail("PreconditionFailed", "the escape certificate is n = 2 only");
    if (phi.slot.kind != VarKind::Z)
        fail("PreconditionFailed", "phi must be elementary in a z-variable");
    if (!tau.natural())
        fail("PreconditionFailed", "tau must be natural");
    if (!sigma.leq(tau))
        fail("PreconditionFailed", "need sigma <= tau");
    for (int k = 0; k < 2; ++k) {
        Poly w = omega.image_z(k).shifted_x(static_cast<int>(tau[k]));
        if (!over_r_not_div(w))
            fail("PreconditionFailed", "omega(x^{t_" + std::to_string(k + 1) + "} z_" +
                                           std::to_string(k + 1) + ") is not in R \\ xR");
    }
    Endo composite = compose_endos(elementary_endo(ctx, phi), omega);
    for (int j = 0; j < ctx->m; ++j)
        if (!composite.image_y(j).is_over_r())
            fail("PreconditionFailed", "composite moves a y-variable outside R");
    for (int k = 0; k < 2; ++k)
        if (!composite.image_z(k).shifted_x(static_cast<int>(sigma[k])).is_over_r())
            fail("PreconditionFailed", "(phi o omega)(A_sigma) is not contained in R");
    if (phi.p.is_zero()) return true;
    long r = unclamped_depth(phi.p, tau);
    return r <= tau[phi.slot.index];
}

LinearFactor factor_linear_map(const Linear& mat, const CtxPtr& ctx, const WeightVector& tau)
{
    const auto& m = mat.mat;
    if (m.size() != 2)
        fail("PreconditionFailed", "factorization works on 2 x 2 matrices");
    const Poly &a = m[0][0], &b = m[0][1], &c = m[1][0], &d = m[1][1];
    LinearFactor out{GenPerm::identity(2), GeneratorWord(ctx)};
    auto add_elem = [&](int slot, const Poly& mu, int shift) {
        if (mu.is_zero()) return;
        Poly addend = mu * Poly::variable(ctx, {VarKind::Z, 1 - slot}).shifted_x(shift);
        out.phi.append(Elementary{{VarKind::Z, slot}, addend});
    };
    int s12 = static_cast<int>(tau[1] - tau[0]);
    int s21 = -s12;
    if (c.is_zero()) {
        Rational aq = require_rational(a, "matrix entry a");
        Rational dq = require_rational(d, "matrix entry d");
        out.rho = diag_genperm(aq, dq);
        add_elem(0, b.scaled(Rational(1) / aq), s12);
    } else if (b.is_zero()) {
        Rational aq = require_rational(a, "matrix entry a");
        Rational dq = require_rational(d, "matrix entry d");
        out.rho = diag_genperm(aq, dq);
        add_elem(1, c.scaled(Rational(1) / dq), s21);
    } else if (a.is_zero()) {
        Rational bq = require_rational(b, "matrix entry b");
        Rational cq = require_rational(c, "matrix entry c");
        out.rho = antidiag_genperm(bq, cq, tau);
        add_elem(0, d.scaled(Rational(1) / cq), s12);
    } else if (d.is_zero()) {
        Rational bq = require_rational(b, "matrix entry b");
        Rational cq = require_rational(c, "matrix entry c");
        out.rho = antidiag_genperm(bq, cq, tau);
        add_elem(1, a.scaled(Rational(1) / bq), s21);
    } else {
        fail("PatternMismatch", "matrix has no vanishing entry");
    }
    GeneratorWord lin(ctx);
    lin.append(mat);
    GeneratorWord rhs(ctx);
    rhs.append(out.rho);
    rhs.append(out.phi);
    if (!(word_to_endo(conjugate_by_weights(lin, tau)) == word_to_endo(rhs)))
        fail("InternalContradiction", "linear factorization equation failed");
    return out;
}

ElemLinearFactor factor_elementary_linear(const Elementary& phi, const Linear& beta,
                                          const CtxPtr& ctx, const WeightVector& tau)
{
    if (ctx->n != 2)
        fail("PreconditionFailed", "factorization is n = 2 only");
    if (!validate_elementary_tau(phi, ctx, tau))
        fail("PreconditionFailed", "phi is not in EA^" + tau.render());
    const auto& m = beta.mat;
    if (m.size() != 2)
        fail("PreconditionFailed", "beta must be 2 x 2");
    const Poly &a = m[0][0], &b = m[0][1], &c = m[1][0], &d = m[1][1];
    int j = phi.slot.index;
    const Poly& e = phi.p;
    int s12 = static_cast<int>(tau[1] - tau[0]);
    int s21 = -s12;
    GenPerm rho;
    Elementary out{{VarKind::Z, 0}, Poly::zero(ctx)};
    const Poly z1 = Poly::variable(ctx, {VarKind::Z, 0});
    const Poly z2 = Poly::variable(ctx, {VarKind::Z, 1});
    if (j == 0) {
        if (c.is_zero()) {
            Rational aq = require_rational(a, "entry a");
            Rational dq = require_rational(d, "entry d");
            rho = diag_genperm(aq, dq);
            Substitution sub(ctx);
            sub.set({VarKind::Z, 1}, z2 * d);
            Poly addend = (b * z2.shifted_x(s12) + sub.apply(e)).scaled(Rational(1) / aq);
            out = Elementary{{VarKind::Z, 0}, addend};
        } else if (d.is_zero()) {
            Rational bq = require_rational(b, "entry b");
            Rational cq = require_rational(c, "entry c");
            rho = antidiag_genperm(bq, cq, tau);
            Substitution sub(ctx);
            sub.set({VarKind::Z, 1}, (z1 * c).shifted_x(s21));
            Poly addend = ((a * z1 + sub.apply(e)).scaled(Rational(1) / bq)).shifted_x(s21);
            out = Elementary{{VarKind::Z, 1}, addend};
        } else {
            fail("PatternMismatch", "phi acts on z1 but neither c nor d vanishes");
        }
    } else {
        if (a.is_zero()) {
            Rational bq = require_rational(b, "entry b");
            Rational cq = require_rational(c, "entry c");
            rho = antidiag_genperm(bq, cq, tau);
            Substitution sub(ctx);
            sub.set({VarKind::Z, 0}, (z2 * b).shifted_x(s12));
            Poly addend = ((d * z2 + sub.apply(e)).scaled(Rational(1) / cq)).shifted_x(s12);
            out = Elementary{{VarKind::Z, 0}, addend};
        } else if (b.is_zero()) {
            Rational aq = require_rational(a, "entry a");
            Rational dq = require_rational(d, "entry d");
            rho = diag_genperm(aq, dq);
            Substitution sub(ctx);
            sub.set({VarKind::Z, 0}, z1 * a);
            Poly addend = (c * z1.shifted_x(s21) + sub.apply(e)).scaled(Rational(1) / dq);
            out = Elementary{{VarKind::Z, 1}, addend};
        } else {
            fail("PatternMismatch", "phi acts on z2 but neither a nor b vanishes");
        }
    }
    if (!validate_elementary_tau(out, ctx, tau))
        fail("InternalContradiction", "factored elementary left EA^" + tau.render());
    // phi o beta^tau = rho o phi'
    GeneratorWord lin(ctx);
    lin.append(beta);
    GeneratorWord lhs(ctx);
    lhs.append(phi);
    lhs.append(conjugate_by_weights(lin, tau));
    GeneratorWord rhs(ctx);
    rhs.append(rho);
    rhs.append(out);
    if (!(word_to_endo(lhs) == word_to_endo(rhs)))
        fail("InternalContradiction", "factorization equation phi o beta = rho o phi' failed");
    return {rho, out};
}

BaseCoeffFactor factor_base_coefficients(const std::vector<Elementary>& ws, const CtxPtr& ctx,
                                         const WeightVector& tau)
{
    std::vector<Elementary> reduced;
    GeneratorWord prefix(ctx);
    IaElem alpha = IaElem::identity(ctx);
    for (const auto& g : ws) {
        if (!validate_elementary_tau(g, ctx, tau))
            fail("PreconditionFailed", "generator is not in EA^" + tau.render());
        int k = g.slot.index;
        // slack-zero part of the weighted coefficient polynomial
        Poly base(ctx);
        g.p.for_each([&](const Term& t, const Rational& cf) {
            long need = 0;
            for (int z = 0; z < ctx->n; ++z)
                need += tau[z] * t.e[ctx->p + ctx->m + z];
            if (t.xe + tau[k] == need)
                base.add_term(t.xe, t.e.data(), cf);
        });
        base.normalize();
        Elementary bar{g.slot, base};
        Elementary gap{g.slot, g.p - base};
        // conjugate the gap across the accumulated base prefix
        GeneratorWord conj(ctx);
        conj.append(prefix);
        conj.append(gap);
        conj.append(invert_word(prefix));
        Endo conj_endo = word_to_endo(conj);
        auto form = canonical_ia_form(conj_endo, tau);
        if (!form.ok)
            fail("InternalContradiction", "pushed gap left IA^" + tau.render());
        alpha.word.append(conj);
        alpha.endo = compose_endos(alpha.endo, conj_endo);
        prefix.append(bar);
        reduced.push_back(std::move(bar));
    }
    auto form = canonical_ia_form(alpha.endo, tau);
    if (!form.ok)
        fail("InternalContradiction", "assembled head left IA^" + tau.render());
    GeneratorWord lhs(ctx);
    for (const auto& g : ws)
        lhs.append(g);
    GeneratorWord rhs = alpha.word;
    rhs.append(prefix);
    if (!(word_to_endo(lhs) == word_to_endo(rhs)))
        fail("InternalContradiction", "base-coefficient factorization equation failed");
    return {alpha, reduced};
}

namespace {

std::vector<Elementary> merge_adjacent(const CtxPtr& ctx, std::vector<Elementary> gens)
{
    std::vector<Elementary> out;
    for (auto& g : gens) {
        if (g.p.is_zero()) continue;
        if (!out.empty() && out.back().slot == g.slot) {
            Poly sum = out.back().p + g.p;
            out.pop_back();
            if (!sum.is_zero())
                out.push_back(Elementary{g.slot, sum});
            continue;
        }
        out.push_back(std::move(g));
    }
    (void)ctx;
    return out;
}

} // namespace

CollapseResult collapse_elementary_word(const std::vector<Elementary>& ws, const CtxPtr& ctx,
                                        const WeightVector& tau, const Endo& omega)
{
    if (ctx->n != 2)
        fail("PreconditionFailed", "collapse works for n = 2 only");
    if (ws.empty())
        fail("PreconditionFailed", "empty word");
    for (const auto& g : ws)
        if (!validate_elementary_tau(g, ctx, tau))
            fail("PreconditionFailed", "generator is not in EA^" + tau.render());

    // assumption 1: exactly one of the weighted omega-images is divisible by x
    std::vector<Poly> w_img;
    for (int k = 0; k < 2; ++k) {
        Poly w = omega.image_z(k).shifted_x(static_cast<int>(tau[k]));
        if (!w.is_over_r())
            fail("PreconditionFailed", "assumption 1: omega image is not over R");
        w_img.push_back(std::move(w));
    }
    bool d1 = in_x_ideal(w_img[0]), d2 = in_x_ideal(w_img[1]);
    if (d1 == d2)
        fail("PreconditionFailed", "assumption 1: exactly one omega image must be divisible by x");

    // suffix maps: suffix[i] = Phi_{i+1} o ... o Phi_q o omega (0-based tail)
    size_t q = ws.size();
    std::vector<Endo> suffix(q + 1, omega);
    for (size_t i = q; i-- > 0;)
        suffix[i] = compose_endos(elementary_endo(ctx, ws[i]), suffix[i + 1]);
    for (size_t i = 1; i < q; ++i)
        for (int k = 0; k < 2; ++k) {
            Poly w = suffix[i].image_z(k).shifted_x(static_cast<int>(tau[k]));
            if (!over_r_not_div(w))
                fail("PreconditionFailed",
                     "assumption 2: intermediate image at position " + std::to_string(i + 1) +
                         " is not in R \\ xR");
        }
    {
        int j1 = ws.front().slot.index;
        Poly w = suffix[0].image_z(j1).shifted_x(static_cast<int>(tau[j1]));
        if (!(w.is_over_r() && in_x_ideal(w)))
            fail("PreconditionFailed", "assumption 3: leading image is not divisible by x");
    }

    CollapseResult res;
    bool all_same = true;
    for (const auto& g : ws)
        all_same = all_same && g.slot == ws.front().slot;
    if (all_same) {
        res.same_variable = true;
        res.merged = GeneratorWord(ctx);
        Poly sum(ctx);
        for (const auto& g : ws)
            sum += g.p;
        if (!sum.is_zero())
            res.merged.append(Elementary{ws.front().slot, sum});
        res.alpha = IaElem::identity(ctx);
        res.rho = GenPerm::identity(2);
        res.phi = GeneratorWord(ctx);
        return res;
    }

    auto factored = factor_base_coefficients(ws, ctx, tau);
    IaElem alpha = factored.alpha;
    std::vector<Elementary> gens = merge_adjacent(ctx, factored.reduced);
    GenPerm rho_acc = GenPerm::identity(2);

    // collapse linear runs whose composite matrix gains a vanishing entry
    for (bool changed = true; changed;) {
        changed = false;
        std::vector<std::optional<Poly>> lin(gens.size());
        for (size_t i = 0; i < gens.size(); ++i)
            lin[i] = linear_coefficient(gens[i], ctx, tau);
        for (size_t start = 0; start < gens.size() && !changed; ++start) {
            if (!lin[start]) continue;
            size_t stop = start;
            while (stop + 1 < gens.size() && lin[stop + 1]) ++stop;
            if (stop == start) { start = stop; continue; }
            auto m = mat_identity(ctx);
            for (size_t i = start; i <= stop; ++i)
                m = mat_mul(m, linear_elem_matrix(ctx, gens[i].slot.index, *lin[i]));
            bool has_zero = m[0][0].is_zero() || m[0][1].is_zero() || m[1][0].is_zero() ||
                            m[1][1].is_zero();
            if (!has_zero) { start = stop; continue; }
            LinearFactor lf = factor_linear_map(Linear{m}, ctx, tau);
            // bubble the permutation через the prefix
            std::vector<Elementary> prefix(gens.begin(), gens.begin() + start);
            for (size_t i = prefix.size(); i-- > 0;)
                prefix[i] = rho_push(prefix[i], lf.rho, ctx, tau);
            std::vector<Elementary> next;
            next.insert(next.end(), prefix.begin(), prefix.end());
            for (const auto& g : lf.phi.generators())
                next.push_back(std::get<Elementary>(g));
            next.insert(next.end(), gens.begin() + stop + 1, gens.end());
            rho_acc = genperm_compose(rho_acc, lf.rho);
            gens = merge_adjacent(ctx, std::move(next));
            changed = true;
        }
    }

    // with the assumptions verified, everything from position 2 on must be
    // linear now, and the leading generator must be linear as well
    std::vector<std::optional<Poly>> lin(gens.size());
    bool all_linear = true;
    std::string report;
    for (size_t i = 0; i < gens.size(); ++i) {
        lin[i] = linear_coefficient(gens[i], ctx, tau);
        if (!lin[i]) {
            all_linear = false;
            Endo tail = omega;
            for (size_t jj = gens.size(); jj-- > i;)
                tail = compose_endos(elementary_endo(ctx, gens[jj]), tail);
            Poly f = tail.image_z(0).shifted_x(static_cast<int>(tau[0]));
            Poly g = tail.image_z(1).shifted_x(static_cast<int>(tau[1]));
            report += " position " + std::to_string(i + 1) +
                      ": deg F = " + std::to_string(f.is_over_r() ? f.mod_x().degree_yz() : -2) +
                      ", deg G = " + std::to_string(g.is_over_r() ? g.mod_x().degree_yz() : -2) +
                      ";";
        }
    }
    if (!all_linear)
        fail("InternalContradiction",
             "nonlinear generators survive the degree bookkeeping:" + report);

    auto total = mat_identity(ctx);
    for (size_t i = 0; i < gens.size(); ++i)
        total = mat_mul(total, linear_elem_matrix(ctx, gens[i].slot.index, *lin[i]));
    LinearFactor lf = [&] {
        try {
            return factor_linear_map(Linear{total}, ctx, tau);
        } catch (const Error& e) {
            if (e.code == "PatternMismatch")
                fail("InternalContradiction",
                     "final linear composite has no vanishing entry");
            throw;
        }
    }();

    res.same_variable = false;
    res.alpha = alpha;
    res.rho = genperm_compose(rho_acc, lf.rho);
    res.phi = lf.phi;

    GeneratorWord lhs(ctx);
    for (const auto& g : ws)
        lhs.append(g);
    GeneratorWord rhs = res.alpha.word;
    rhs.append(res.rho);
    rhs.append(res.phi);
    if (!(word_to_endo(lhs) == word_to_endo(rhs)))
        fail("InternalContradiction", "collapse equation failed");
    return res;
}

ConsolidateResult consolidate_ia_perm(const CtxPtr& ctx,
                                      const std::vector<ConsolidateStage>& stages,
                                      const std::vector<WeightVector>& taus)
{
    if (stages.empty())
        fail("PreconditionFailed", "empty stage list");
    if (taus.size() != stages.size() + 1)
        fail("PreconditionFailed", "need one weight per stage plus the trailing weight");
    size_t q = stages.size();
    for (size_t i = 0; i + 1 < q; ++i)
        if (!rho_apply_tau(stages[i].rho, taus[i]).leq(taus[i + 1]))
            fail("HypothesisViolation", "need rho_i(tau_i) <= tau_{i+1} at stage " +
                                            std::to_string(i + 1));
    for (size_t i = 0; i < q; ++i) {
        auto form = canonical_ia_form(stages[i].alpha.endo, taus[i]);
        if (!form.ok)
            fail("HypothesisViolation",
                 "stage " + std::to_string(i + 1) + " alpha is not in IA^" + taus[i].render());
    }

    IaElem a = stages.back().alpha;
    GenPerm p = stages.back().rho;
    std::vector<GeneratorWord> ws{stages.back().phi};
    for (size_t i = q - 1; i-- > 0;) {
        const auto& st = stages[i];
        const WeightVector& tnext = taus[i + 1];
        // phi_i o A = A~ o phi_i
        GeneratorWord conj(ctx);
        conj.append(st.phi);
        conj.append(a.word);
        conj.append(invert_word(st.phi));
        IaElem a_tilde{conj, word_to_endo(conj)};
        auto form = canonical_ia_form(a_tilde.endo, tnext);
        if (!form.ok)
            fail("InternalContradiction", "pushed head left IA^" + tnext.render());
        // rho_i o A~ = A^ o rho_i
        IaElem a_hat = ia_rho_conjugate(a_tilde, genperm_inverse(st.rho), tnext);
        WeightVector lifted = rho_apply_tau(genperm_inverse(st.rho), tnext);
        // A^ = B o phi~ with B in IA^{tau_i}
        auto red = ia_reduce(a_hat, lifted, taus[i]);
        GeneratorWord merged_word = GeneratorWord::concat(st.alpha.word, red.beta.word);
        IaElem a_new{merged_word, compose_endos(st.alpha.endo, red.beta.endo)};
        // phi~ o rho_i = rho_i o phi~'
        GeneratorWord phi_t = rho_push(red.phi, st.rho, lifted);
        // (phi~' o phi_i) o P = P o phi_i''
        GeneratorWord combined = phi_t;
        combined.append(st.phi);
        GeneratorWord pushed = rho_push(combined, p, tnext);
        a = a_new;
        p = genperm_compose(st.rho, p);
        ws.insert(ws.begin(), pushed);
    }

    // verify the full consolidation
    GeneratorWord lhs(ctx);
    for (size_t i = 0; i < q; ++i) {
        lhs.append(stages[i].alpha.word);
        lhs.append(stages[i].rho);
        lhs.append(stages[i].phi);
    }
    GeneratorWord rhs = a.word;
    rhs.append(p);
    for (const auto& w : ws)
        rhs.append(w);
    if (!(word_to_endo(lhs) == word_to_endo(rhs)))
        fail("InternalContradiction", "consolidation equation failed");
    return {a, p, ws};
}

AlphaRhoMerge merge_alpha_rho(const IaElem& a1, const GenPerm& r1, const IaElem& a2,
                              const GenPerm& r2, const WeightVector& tau1,
                              const WeightVector& tau2)
{
    const auto& ctx = a1.endo.ctx();
    WeightVector gap = tau2 - rho_apply_tau(r1, tau1);
    int support = -1;
    for (size_t k = 0; k < gap.size(); ++k) {
        if (gap[k] == 0) continue;
        if (gap[k] < 0 || support >= 0)
            fail("GapNotRankOne", "tau_2 - rho_1(tau_1) = " + gap.render());
        support = static_cast<int>(k);
    }
    IaElem a_hat = ia_rho_conjugate(a2, genperm_inverse(r1), tau2);
    WeightVector lifted = rho_apply_tau(genperm_inverse(r1), tau2);
    auto red = ia_reduce(a_hat, lifted, tau1);
    if (red.phi.size() > 1)
        fail("InternalContradiction", "rank-one reduction emitted more than one elementary");
    AlphaRhoMerge out;
    out.alpha = IaElem{GeneratorWord::concat(a1.word, red.beta.word),
                       compose_endos(a1.endo, red.beta.endo)};
    auto form = canonical_ia_form(out.alpha.endo, tau1);
    if (!form.ok)
        fail("InternalContradiction", "merged head left IA^" + tau1.render());
    GenPerm both = genperm_compose(r1, r2);
    out.rho = both;
    out.phi = red.phi.empty() ? GeneratorWord(ctx) : rho_push(red.phi, both, lifted);

    GeneratorWord lhs = a1.word;
    lhs.append(r1);
    lhs.append(a2.word);
    lhs.append(r2);
    GeneratorWord rhs = out.alpha.word;
    rhs.append(out.rho);
    rhs.append(out.phi);
    if (!(word_to_endo(lhs) == word_to_endo(rhs)))
        fail("InternalContradiction", "alpha-rho merge equation failed");
    return out;
}

namespace {

// Minimal natural tau with rho(tau) >= the unclamped depth vector of e.
WeightVector minimal_tau_through(const Endo& e, const GenPerm& rho)
{
    const auto& ctx = e.ctx();
    for (int j = 0; j < ctx->m; ++j)
        if (!e.image_y(j).is_over_r())
            fail("YImageNotIntegral", "no weight makes the y-images integral");
    WeightVector tau = WeightVector::zeros(ctx->n);
    for (int j = 0; j < ctx->n; ++j) {
        int target = rho.sigma[j];
        auto ord = e.image_z(target).x_order();
        long nu = ord ? -*ord : std::numeric_limits<long>::min();
        tau[j] = std::max(0L, nu - rho.r[target]);
    }
    return tau;
}

} // namespace

MinimalityReport minimality_report(const CtxPtr& ctx, const std::vector<Mt2Stage>& stages)
{
    MinimalityReport rep;
    rep.all_equivalent = true;
    size_t q = stages.size();
    std::vector<Endo> suffix(q + 1, Endo::identity(ctx));
    for (size_t i = q; i-- > 0;) {
        Endo stage = word_to_endo(stages[i].alpha);
        stage = compose_endos(stage, genperm_endo(ctx, stages[i].rho));
        stage = compose_endos(stage, elementary_endo(ctx, stages[i].phi));
        suffix[i] = compose_endos(stage, suffix[i + 1]);
    }
    for (size_t i = 0; i < q; ++i) {
        MinimalityStageReport st;
        const auto& rho = stages[i].rho;
        Endo phi_endo = elementary_endo(ctx, stages[i].phi);
        Endo phi_next = compose_endos(phi_endo, suffix[i + 1]);
        Endo rho_phi_next = compose_endos(genperm_endo(ctx, rho), phi_next);
        st.tau_direct = minimal_tau(suffix[i]);
        st.tau_shifted = minimal_tau_through(phi_next, rho);
        st.tau_rho_phi = minimal_tau(rho_phi_next);
        GeneratorWord conj(ctx);
        conj.append(rho);
        conj.append(stages[i].phi);
        conj.append(genperm_inverse(rho));
        Endo phi_prime = word_to_endo(conj);
        Endo rho_next = compose_endos(genperm_endo(ctx, rho), suffix[i + 1]);
        st.tau_conj = minimal_tau(compose_endos(phi_prime, rho_next));
        st.equivalent = st.tau_direct == st.tau_shifted && st.tau_direct == st.tau_rho_phi &&
                        st.tau_direct == st.tau_conj;
        rep.all_equivalent = rep.all_equivalent && st.equivalent;

        WeightVector next = i + 1 < q ? minimal_tau(suffix[i + 1]) : WeightVector::zeros(ctx->n);
        WeightVector gap = rho_apply_tau(rho, st.tau_direct) - next;
        int slot = stages[i].phi.slot.index;
        st.gap_rank_one = true;
        st.gap_delta = gap[slot];
        for (size_t k = 0; k < gap.size(); ++k)
            if (static_cast<int>(k) != slot && gap[k] != 0)
                st.gap_rank_one = false;

        Elementary phi_prime_el = extract_z_elementary(phi_prime);
        st.complement_not_divisible = true;
        if (st.equivalent) {
            for (int k = 0; k < ctx->n; ++k) {
                if (k == phi_prime_el.slot.index) continue;
                Poly w = rho_next.image_z(k).shifted_x(static_cast<int>(st.tau_direct[k]));
                if (!over_r_not_div(w))
                    st.complement_not_divisible = false;
            }
        }
        rep.stages.push_back(std::move(st));
    }
    return rep;
}

Certificate mt2_pipeline(const CtxPtr& ctx, const std::vector<Mt2Stage>& stages_in)
{
    if (ctx->n != 2)
        fail("PreconditionFailed", "the staged rewriting pipeline is n = 2 only");
    std::vector<Mt2Stage> stages = stages_in;
    std::vector<std::string> trace;
    GeneratorWord original(ctx);
    for (const auto& st : stages) {
        original.append(st.alpha);
        if (!st.rho.is_identity())
            original.append(st.rho);
        original.append(st.phi);
    }
    Endo omega0 = word_to_endo(original);

    size_t guard = stages.size() + 2;
    for (;;) {
        if (guard-- == 0)
            fail("NonTermination", "stage count failed to decrease");
        size_t q = stages.size();
        if (q == 0)
            fail("PreconditionFailed", "empty stage list");
        // suffix endos and minimal weights
        std::vector<GeneratorWord> suffix_word(q + 1, GeneratorWord(ctx));
        for (size_t i = q; i-- > 0;) {
            GeneratorWord w(ctx);
            w.append(stages[i].alpha);
            w.append(stages[i].rho);
            w.append(stages[i].phi);
            w.append(suffix_word[i + 1]);
            suffix_word[i] = std::move(w);
        }
        std::vector<Endo> suffix;
        std::vector<WeightVector> taus;
        for (size_t i = 0; i <= q; ++i) {
            suffix.push_back(word_to_endo(suffix_word[i]));
            taus.push_back(minimal_tau(suffix.back()));
        }
        taus[q] = WeightVector::zeros(ctx->n); // trailing convention
        for (size_t i = 0; i < q; ++i) {
            auto form = canonical_ia_form(word_to_endo(stages[i].alpha), taus[i]);
            if (!form.ok)
                fail("HypothesisViolation", "stage " + std::to_string(i + 1) +
                                                " alpha is not in IA^" + taus[i].render());
        }

        // maximal index violating rho_i(tau_i) >= tau_{i+1}
        std::optional<size_t> a;
        for (size_t i = 0; i < q; ++i) {
            WeightVector next = i + 1 < q ? taus[i + 1] : WeightVector::zeros(ctx->n);
            if (!rho_apply_tau(stages[i].rho, taus[i]).geq(next))
                a = i;
        }
        if (!a) {
            // monotone: hand off to the staged reduction
            std::vector<Mt1Stage> mt1;
            for (size_t i = 0; i < q; ++i) {
                WeightVector level = rho_apply_tau(stages[i].rho, taus[i]);
                if (!validate_elementary_tau(stages[i].phi, ctx, level))
                    fail("InternalContradiction", "stage " + std::to_string(i + 1) +
                                                      " elementary escapes EA^" + level.render());
                Mt1Stage st;
                st.alpha = stages[i].alpha;
                st.rho = stages[i].rho;
                st.phi = GeneratorWord(ctx);
                st.phi.append(stages[i].phi);
                st.tau = taus[i];
                mt1.push_back(std::move(st));
            }
            trace.push_back("handoff: " + std::to_string(q) + " monotone stage(s)");
            Certificate cert = mt1_pipeline(ctx, mt1);
            cert.kind = "mt2";
            cert.rewrite_trace = std::move(trace);
            // the rewriting preserved the evaluated word exactly
            if (!(cert.psi == omega0))
                fail("InternalContradiction", "rewriting changed the evaluated word");
            cert.input_word = original;
            cert.psi = omega0;
            return cert;
        }

        size_t ai = *a;
        WeightVector next_a = ai + 1 < q ? taus[ai + 1] : WeightVector::zeros(ctx->n);
        WeightVector gap = next_a - rho_apply_tau(stages[ai].rho, taus[ai]);
        int jslot = stages[ai].phi.slot.index;
        for (size_t k = 0; k < gap.size(); ++k)
            if (static_cast<int>(k) != jslot && gap[k] != 0)
                fail("InternalContradiction",
                     "weight inversion is not rank-one on the acting slot: " + gap.render());
        if (ai + 1 >= q)
            fail("HypothesisViolation",
                 "weight inversion at the last stage is outside the rewriting's reach");
        // certify Phi_a at the higher level
        if (!phi_ea_tau_check(stages[ai].phi, rho_apply_tau(stages[ai].rho, taus[ai]),
                              taus[ai + 1], suffix[ai + 1]))
            fail("InternalContradiction", "escape certificate failed at stage " +
                                              std::to_string(ai + 1));

        // b = least index above a with a strict increase (q-1 as fallback)
        size_t b = q - 1;
        for (size_t i = ai + 1; i < q; ++i) {
            WeightVector next = i + 1 < q ? taus[i + 1] : WeightVector::zeros(ctx->n);
            WeightVector level = rho_apply_tau(stages[i].rho, taus[i]);
            if (level.geq(next) && !(level == next)) {
                b = i;
                break;
            }
        }
        trace.push_back("merge stages " + std::to_string(ai + 1) + ".." + std::to_string(b + 1) +
                        " (inversion gap " + gap.render() + ")");

        // consolidate stages a..b, collapse the elementary block, re-merge
        std::vector<ConsolidateStage> seg;
        std::vector<WeightVector> seg_taus;
        for (size_t i = ai; i <= b; ++i) {
            ConsolidateStage cs;
            cs.alpha = IaElem::from_word(stages[i].alpha);
            cs.rho = stages[i].rho;
            cs.phi = GeneratorWord(ctx);
            cs.phi.append(stages[i].phi);
            seg.push_back(std::move(cs));
            seg_taus.push_back(taus[i]);
        }
        seg_taus.push_back(b + 1 < q ? taus[b + 1] : WeightVector::zeros(ctx->n));
        auto cons = consolidate_ia_perm(ctx, seg, seg_taus);

        WeightVector level = rho_apply_tau(stages[b].rho, taus[b]);
        std::vector<Elementary> block;
        for (const auto& w : cons.phis)
            for (const auto& g : w.generators())
                block.push_back(std::get<Elementary>(g));
        auto collapsed = collapse_elementary_word(block, ctx, level, suffix[b + 1]);

        IaElem mid_alpha = collapsed.same_variable ? IaElem::identity(ctx) : collapsed.alpha;
        GenPerm mid_rho = collapsed.same_variable ? GenPerm::identity(2) : collapsed.rho;
        GeneratorWord mid_phi = collapsed.same_variable ? collapsed.merged : collapsed.phi;

        auto merged = merge_alpha_rho(cons.alpha, cons.rho, mid_alpha, mid_rho, taus[ai], level);
        // stitch the two elementary tails together
        GeneratorWord tail = merged.phi;
        tail.append(mid_phi);
        std::vector<Elementary> tail_gens;
        for (const auto& g : tail.generators())
            tail_gens.push_back(std::get<Elementary>(g));
        tail_gens = merge_adjacent(ctx, tail_gens);
        GenPerm new_rho = merged.rho;
        Elementary new_phi{{VarKind::Z, 0}, Poly::zero(ctx)};
        if (tail_gens.size() == 1) {
            new_phi = tail_gens[0];
        } else if (tail_gens.size() == 2) {
            auto mu = linear_coefficient(tail_gens[1], ctx, rho_apply_tau(mid_rho, level));
            if (!mu)
                fail("InternalContradiction",
                     "different-slot tails need a linear second factor");
            auto fac = factor_elementary_linear(tail_gens[0],
                                                Linear{linear_elem_matrix(
                                                    ctx, tail_gens[1].slot.index, *mu)},
                                                ctx, rho_apply_tau(mid_rho, level));
            new_rho = genperm_compose(new_rho, fac.rho);
            new_phi = fac.phi;
        } else if (!tail_gens.empty()) {
            fail("InternalContradiction", "tail failed to collapse to one elementary");
        }

        Mt2Stage replacement;
        replacement.alpha = merged.alpha.word;
        replacement.rho = new_rho;
        replacement.phi = new_phi;

        std::vector<Mt2Stage> next_stages(stages.begin(), stages.begin() + ai);
        next_stages.push_back(std::move(replacement));
        next_stages.insert(next_stages.end(), stages.begin() + b + 1, stages.end());
        if (next_stages.size() >= stages.size())
            fail("NonTermination", "stage count failed to decrease");
        // the rewrite must preserve the evaluated word exactly
        GeneratorWord rebuilt(ctx);
        for (const auto& st : next_stages) {
            rebuilt.append(st.alpha);
            rebuilt.append(st.rho);
            rebuilt.append(st.phi);
        }
        if (!(word_to_endo(rebuilt) == omega0))
            fail("InternalContradiction", "stage rewrite changed the evaluated word");
        stages = std::move(next_stages);
    }
}

} // namespace srcoord
