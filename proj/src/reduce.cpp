#include "srcoord/reduce.hpp"

#include <algorithm>
#include <random>

namespace srcoord {

namespace {

void require_ia(const Endo& e, const WeightVector& tau, const char* code, const char* who)
{
    auto res = canonical_ia_form(e, tau);
    if (!res.ok)
        fail(code, std::string(who) + " is not in IA^" + tau.render() + " (" + res.error +
                       (res.detail.empty() ? "" : ", " + res.detail) + ")");
}

// Membership of beta in IA^sigma for every sigma <= tau: exhaustive when the
// box is small, sampled interior plus all corners otherwise.
void verify_weight_box(const Endo& beta, const WeightVector& tau, const char* who)
{
    size_t n = tau.size();
    long points = 1;
    bool exhaustive = true;
    for (size_t k = 0; k < n; ++k) {
        points *= tau[k] + 1;
        if (points > 4096) {
            exhaustive = false;
            break;
        }
    }
    auto check = [&](const WeightVector& sigma) {
        if (!is_in_ia_tau(beta, sigma))
            fail("MembershipViolation", std::string(who) + " escapes IA^" + sigma.render() +
                                            " inside the box below " + tau.render());
    };
    if (exhaustive) {
        WeightVector sigma = WeightVector::zeros(static_cast<int>(n));
        for (;;) {
            check(sigma);
            size_t k = 0;
            while (k < n && sigma[k] == tau[k])
                sigma[k++] = 0;
            if (k == n) break;
            ++sigma[k];
        }
        return;
    }
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        WeightVector sigma = WeightVector::zeros(static_cast<int>(n));
        for (size_t k = 0; k < n; ++k)
            if (mask & (1u << k)) sigma[k] = tau[k];
        check(sigma);
    }
    std::mt19937_64 rng(0x5eedu);
    for (int s = 0; s < 64; ++s) {
        WeightVector sigma = WeightVector::zeros(static_cast<int>(n));
        for (size_t k = 0; k < n; ++k)
            sigma[k] = static_cast<long>(rng() % static_cast<unsigned long>(tau[k] + 1));
        check(sigma);
    }
}

// One induction step: removes the part of the z_k-free tail that blocks level
// s+1, i.e. the slack-zero slice of the level-s coefficient. Terms with
// positive slack already carry the extra x and stay put; negative slack means
// the claimed membership failed.
std::optional<Elementary> level_step(const Endo& beta, const WeightVector& tau, int k, long s)
{
    const auto& ctx = beta.ctx();
    VarRef zk{VarKind::Z, k};
    Poly tail = beta.image_z(k) - Poly::variable(ctx, zk);
    Poly free_part = tail.split_by(zk).first;
    if (free_part.is_zero()) return std::nullopt;
    Poly lifted = free_part.shifted_x(static_cast<int>(tau[k] - s - 1));
    Poly blocking(ctx);
    bool ok = true;
    lifted.for_each([&](const Term& t, const Rational& c) {
        long need = 0;
        for (int j = 0; j < ctx->n; ++j)
            need += tau[j] * t.e[ctx->p + ctx->m + j];
        if (t.xe < need) ok = false;
        if (t.xe == need) blocking.add_term(t.xe, t.e.data(), c);
    });
    if (!ok)
        fail("MembershipViolation", "level-" + std::to_string(s) + " tail of z" +
                                        std::to_string(k + 1) + " leaves A_" + tau.render());
    blocking.normalize();
    if (blocking.is_zero()) return std::nullopt;
    return Elementary{zk, (-blocking).shifted_x(static_cast<int>(-tau[k] + s + 1))};
}

// Walks slot k from level 0 up to `target`; each emitted elementary is
// prepended to both the carried word and the accumulated phi.
void walk_slot(IaElem& cur, GeneratorWord& phi, const WeightVector& tau, int k, long target)
{
    const auto& ctx = cur.endo.ctx();
    for (long s = 0; s < target; ++s) {
        auto step = level_step(cur.endo, tau, k, s);
        if (!step) continue;
        std::vector<Poly> ims = cur.endo.images();
        ims[ctx->m + k] = ims[ctx->m + k] + cur.endo.apply(step->p);
        cur.endo = Endo(ctx, std::move(ims));
        GeneratorWord head(ctx);
        head.append(*step);
        cur.word = GeneratorWord::concat(head, cur.word);
        phi = GeneratorWord::concat(head, phi);
    }
}

GeneratorWord merge_same_slot(const GeneratorWord& w)
{
    GeneratorWord out(w.ctx());
    std::vector<Generator> gens;
    for (const auto& g : w.generators()) {
        const auto* e = std::get_if<Elementary>(&g);
        if (e && !gens.empty()) {
            if (auto* prev = std::get_if<Elementary>(&gens.back());
                prev && prev->slot == e->slot) {
                Poly sum = prev->p + e->p;
                gens.pop_back();
                if (!sum.is_zero())
                    gens.push_back(Elementary{e->slot, sum});
                continue;
            }
        }
        gens.push_back(g);
    }
    for (auto& g : gens)
        out.append(std::move(g));
    return out;
}

} // namespace

Poly taylor_gap(const Endo& alpha, const Poly& p, const WeightVector& tau)
{
    require_ia(alpha, tau, "PreconditionFailed", "alpha");
    if (!a_tau_member(p, tau))
        fail("PreconditionFailed", "P is not in A_" + tau.render());
    Poly gap = (alpha.apply(p) - p).shifted_x(-1);
    if (!a_tau_member(gap, tau))
        fail("MembershipViolation", "(alpha(P)-P)/x left A_" + tau.render());
    return gap;
}

Endo alpha_push(const Endo& alpha, const GeneratorWord& phi, const WeightVector& tau)
{
    require_ia(alpha, tau, "NotInIATau", "alpha");
    if (!is_in_ga_tau(phi, tau))
        fail("PreconditionFailed", "phi is not in GA_n^" + tau.render());
    Endo phi_e = word_to_endo(phi);
    Endo conj = compose_endos(compose_endos(word_to_endo(invert_word(phi)), alpha), phi_e);
    require_ia(conj, tau, "ConjugateEscapesIATau", "phi^{-1} o alpha o phi");
    Endo lhs = compose_endos(alpha, phi_e);
    Endo rhs = compose_endos(phi_e, conj);
    if (!(lhs == rhs))
        fail("InternalContradiction", "push equation alpha o phi = phi o alpha' failed");
    return conj;
}

StrongIaResult strong_ia_reduce(const Endo& alpha, const WeightVector& tau,
                                std::vector<ReductionStep>* log)
{
    require_ia(alpha, tau, "PreconditionFailed", "alpha");
    if (!tau.natural())
        fail("PreconditionFailed", "tau must be natural");
    const auto& ctx = alpha.ctx();
    IaElem cur{GeneratorWord(ctx), alpha};
    GeneratorWord phi(ctx);
    for (int k = 0; k < ctx->n; ++k)
        walk_slot(cur, phi, tau, k, tau[k]);
    verify_weight_box(cur.endo, tau, "strengthened element");
    for (const auto& g : phi.generators()) {
        const auto& e = std::get<Elementary>(g);
        if (!validate_elementary_tau(e, ctx, tau))
            fail("InternalContradiction", "emitted elementary left EA^" + tau.render());
    }
    if (log)
        log->push_back({"strengthen", tau, GeneratorWord(ctx), GeneratorWord(ctx), cur.endo,
                        std::to_string(phi.size()) + " elementary step(s)"});
    return {phi, cur.endo};
}

IaReduceResult ia_reduce(const IaElem& alpha, const WeightVector& tau,
                         const WeightVector& sigma)
{
    if (!sigma.leq(tau))
        fail("IncomparableWeights",
             "need sigma <= tau, got sigma = " + sigma.render() + ", tau = " + tau.render());
    require_ia(alpha.endo, tau, "PreconditionFailed", "alpha");
    const auto& ctx = alpha.endo.ctx();

    GeneratorWord inv_word = invert_word(alpha.word);
    IaElem cur{inv_word, word_to_endo(inv_word)};
    require_ia(cur.endo, tau, "PreconditionFailed", "alpha^{-1}");
    GeneratorWord psi(ctx);
    for (int k = 0; k < ctx->n; ++k)
        walk_slot(cur, psi, tau, k, tau[k] - sigma[k]);
    psi = merge_same_slot(psi);
    require_ia(cur.endo, sigma, "MembershipViolation", "psi o alpha^{-1}");

    GeneratorWord beta_word = GeneratorWord::concat(alpha.word, invert_word(psi));
    IaElem beta{beta_word, word_to_endo(beta_word)};
    require_ia(beta.endo, sigma, "MembershipViolation", "beta");
    Endo recomposed = compose_endos(beta.endo, word_to_endo(psi));
    if (!(recomposed == alpha.endo))
        fail("InternalContradiction", "factorization alpha = beta o phi failed");
    return {beta, psi};
}

Endo ia_rho_conjugate(const Endo& alpha, const GenPerm& rho, const WeightVector& tau)
{
    const auto& ctx = alpha.ctx();
    WeightVector image = rho_apply_tau(rho, tau);
    if (!image.natural())
        fail("RhoTauNotNatural", "rho(tau) = " + image.render() + " has a negative entry");
    require_ia(alpha, tau, "PreconditionFailed", "alpha");
    Endo rho_e = word_to_endo(genperm_word(ctx, rho));
    Endo rho_i = word_to_endo(genperm_word(ctx, genperm_inverse(rho)));
    Endo conj = compose_endos(compose_endos(rho_i, alpha), rho_e);
    require_ia(conj, image, "MembershipViolation",
               "rho^{-1} o alpha o rho (expected in IA^{rho(tau)})");
    return conj;
}

IaElem ia_rho_conjugate(const IaElem& alpha, const GenPerm& rho, const WeightVector& tau)
{
    const auto& ctx = alpha.endo.ctx();
    Endo conj = ia_rho_conjugate(alpha.endo, rho, tau);
    GeneratorWord w(ctx);
    w.append(genperm_inverse(rho));
    w.append(alpha.word);
    w.append(rho);
    return {w, conj};
}

ConjugateReduceResult conjugate_reduce(const IaElem& alpha, const GeneratorWord& phi,
                                       const WeightVector& tau,
                                       std::vector<ReductionStep>* log)
{
    require_ia(alpha.endo, tau, "NotInIATau", "alpha");
    if (!is_in_ga_tau(phi, tau))
        fail("PreconditionFailed", "phi is not in GA_n^" + tau.render());
    const auto& ctx = alpha.endo.ctx();

    GeneratorWord conj_word(ctx);
    conj_word.append(invert_word(phi));
    conj_word.append(alpha.word);
    conj_word.append(phi);
    // word-level evaluation keeps every intermediate a genuine sub-composite
    Endo conj = word_to_endo(conj_word);
    require_ia(conj, tau, "ConjugateEscapesIATau", "phi^{-1} o alpha o phi");
    if (log) {
        GeneratorWord lhs = GeneratorWord::concat(alpha.word, phi);
        GeneratorWord rhs = phi;
        rhs.append(conj_word);
        log->push_back({"conjugate", tau, std::move(lhs), std::move(rhs), conj,
                        "phi^{-1} o alpha o phi"});
    }

    StrongIaResult strengthened = strong_ia_reduce(conj, tau, log);

    GeneratorWord theta_word(ctx);
    theta_word.append(strengthened.phi);
    theta_word.append(conj_word);
    IaElem theta{theta_word, strengthened.beta};
    return {theta, strengthened.phi, conj};
}

Certificate mt1_pipeline(const CtxPtr& ctx, const std::vector<Mt1Stage>& stages)
{
    Certificate cert;
    cert.ctx = ctx;
    cert.kind = "mt1";
    cert.input_word = GeneratorWord(ctx);

    size_t q = stages.size();
    for (size_t i = 0; i < q; ++i) {
        const auto& st = stages[i];
        if (static_cast<int>(st.tau.size()) != ctx->n)
            fail("HypothesisViolation", "stage " + std::to_string(i + 1) + ": bad weight length");
        if (!st.tau.natural())
            fail("HypothesisViolation", "stage " + std::to_string(i + 1) + ": tau not natural");
        WeightVector rt = rho_apply_tau(st.rho, st.tau);
        if (!rt.natural())
            fail("HypothesisViolation", "stage " + std::to_string(i + 1) + ": rho(tau) = " +
                                            rt.render() + " not natural");
        WeightVector next = i + 1 < q ? stages[i + 1].tau : WeightVector::zeros(ctx->n);
        if (!rt.geq(next))
            fail("HypothesisViolation", "stage " + std::to_string(i + 1) + ": rho(tau) = " +
                                            rt.render() + " is not >= " + next.render());
        require_ia(word_to_endo(st.alpha), st.tau, "HypothesisViolation", "stage alpha");
        if (!is_in_ga_tau(st.phi, rt))
            fail("HypothesisViolation",
                 "stage " + std::to_string(i + 1) + ": phi is not in GA_n^" + rt.render());
        cert.input_word.append(st.alpha);
        if (!st.rho.is_identity())
            cert.input_word.append(st.rho);
        cert.input_word.append(st.phi);
        cert.weights.push_back(st.tau);
    }
    cert.psi = word_to_endo(cert.input_word);

    IaElem theta = IaElem::identity(ctx);
    for (size_t i = 0; i < q; ++i) {
        const auto& st = stages[i];
        GeneratorWord a_word = GeneratorWord::concat(theta.word, st.alpha);
        Endo a_endo = theta.endo;
        for (const auto& g : st.alpha.generators())
            a_endo = compose_endo_generator(a_endo, g);
        IaElem a{a_word, std::move(a_endo)};
        require_ia(a.endo, st.tau, "MembershipViolation", "theta o alpha at stage entry");
        IaElem a_conj = ia_rho_conjugate(a, st.rho, st.tau);
        WeightVector rt = rho_apply_tau(st.rho, st.tau);
        auto red = conjugate_reduce(a_conj, st.phi, rt, &cert.steps);
        theta = red.theta;
        // A' o Phi = Phi o psi^{-1} o theta
        GeneratorWord lhs = GeneratorWord::concat(a_conj.word, st.phi);
        GeneratorWord rhs = st.phi;
        rhs.append(invert_word(red.psi));
        rhs.append(theta.word);
        cert.steps.push_back({"stage", st.tau, std::move(lhs), std::move(rhs), theta.endo,
                              "stage " + std::to_string(i + 1) + " of " + std::to_string(q)});
    }

    cert.theta = theta.endo;
    cert.theta_word = theta.word;
    cert.theta_inverse_word = invert_word(theta.word);
    cert.checks = run_certificate_checks(ctx, cert.input_word, cert.psi, cert.theta,
                                         cert.theta_word, cert.theta_inverse_word);
    if (!cert.checks.passed())
        fail("CertificateCheckFailed", "a guaranteed certificate check came out false");
    return cert;
}

Certificate at2_pipeline(const GeneratorWord& alpha, const GeneratorWord& w)
{
    const auto& ctx = w.ctx();
    require_same_context(ctx, alpha.ctx());
    auto sigmas = sigma_sequence(w);
    Endo alpha_endo = word_to_endo(alpha);
    WeightVector sigma0 = sigmas.empty() ? WeightVector::zeros(ctx->n) : sigmas[0];
    auto form = canonical_ia_form(alpha_endo, sigma0);
    if (!form.ok)
        fail("AlphaNotInIASigma0",
             "alpha is not in IA^" + sigma0.render() + " (" + form.error + ")");
    std::vector<Mt1Stage> stages;
    for (size_t i = 0; i < w.size(); ++i) {
        const auto& g = std::get<Elementary>(w.generators()[i]);
        if (!validate_elementary_tau(g, ctx, sigmas[i]))
            fail("ElementaryNotInEASigma", "generator " + std::to_string(i + 1) +
                                               " is not in EA^" + sigmas[i].render());
        Mt1Stage st;
        st.alpha = i == 0 ? alpha : GeneratorWord(ctx);
        st.rho = GenPerm::identity(ctx->n);
        st.phi = GeneratorWord(ctx);
        st.phi.append(g);
        st.tau = sigmas[i];
        stages.push_back(std::move(st));
    }
    if (stages.empty()) {
        Mt1Stage st;
        st.alpha = alpha;
        st.rho = GenPerm::identity(ctx->n);
        st.phi = GeneratorWord(ctx);
        st.tau = sigma0;
        stages.push_back(std::move(st));
    }
    Certificate cert = mt1_pipeline(ctx, stages);
    cert.kind = "at2";
    cert.weights = sigmas;
    return cert;
}

N2Result n2_reduce(const IaElem& phi)
{
    const auto& ctx = phi.endo.ctx();
    if (ctx->m != 1 || ctx->n != 1)
        fail("PreconditionFailed", "two-variable reduction needs m = 1, n = 1");
    auto detq = jacobian(phi.endo).det.as_rational();
    if (!detq || *detq == 0)
        fail("JacobianNotUnit", "Jacobian determinant is not a nonzero rational");
    const Poly y = Poly::variable(ctx, {VarKind::Y, 0});
    const Poly z = Poly::variable(ctx, {VarKind::Z, 0});
    if (!phi.endo.image_y(0).is_over_r() || !(phi.endo.image_y(0).mod_x() == y))
        fail("PreconditionFailed", "y-component must be of the shape y + xQ with Q over R");

    IaElem cur = phi;
    for (;;) {
        Poly tail = cur.endo.image_z(0) - z;
        auto ord = tail.x_order();
        if (!ord || *ord >= 0) break;
        long t = -*ord;
        Poly p = tail.shifted_x(static_cast<int>(t));
        Poly p0 = p.x_slice(0);
        if (p0.involves({VarKind::Z, 0}))
            fail("SplitFailure", "x-free part of the z-tail depends on z");
        Elementary g{{VarKind::Z, 0}, (-p0).shifted_x(static_cast<int>(-t))};
        std::vector<Poly> ims = cur.endo.images();
        ims[ctx->m] = ims[ctx->m] + cur.endo.apply(g.p);
        Endo next(ctx, std::move(ims));
        auto ord2 = (next.image_z(0) - z).x_order();
        if (ord2 && *ord2 <= -t)
            fail("NonTermination", "x-order of the z-tail failed to increase");
        GeneratorWord head(ctx);
        head.append(g);
        cur = IaElem{GeneratorWord::concat(head, cur.word), next};
    }
    if (!cur.endo.is_over_r())
        fail("InternalContradiction", "reduced map is not over R");
    if (!(cur.endo.image_y(0) == phi.endo.image_y(0)))
        fail("InternalContradiction", "y-component changed during reduction");
    return {cur.endo, cur.word};
}

WordJacobian word_jacobian_det(const GeneratorWord& w)
{
    const auto& ctx = w.ctx();
    WordJacobian out{Rational(1), 0};
    for (const auto& g : w.generators()) {
        if (std::holds_alternative<Elementary>(g))
            continue; // unit triangular
        if (const auto* l = std::get_if<Linear>(&g)) {
            out.scalar *= *poly_det(ctx, l->mat).as_rational();
            continue;
        }
        if (const auto* gp = std::get_if<GenPerm>(&g)) {
            // sign of the permutation times the product of the scalars, with
            // the x-twists joining the monomial part
            std::vector<int> sig = gp->sigma;
            int sign = 1;
            for (size_t i = 0; i < sig.size(); ++i)
                while (sig[i] != static_cast<int>(i)) {
                    std::swap(sig[i], sig[sig[i]]);
                    sign = -sign;
                }
            Rational lam(sign);
            for (size_t k = 0; k < gp->lambda.size(); ++k) {
                lam *= gp->lambda[k];
                out.x_power += gp->r[k];
            }
            out.scalar *= lam;
            continue;
        }
        const auto& ee = std::get<ExplicitEndo>(g);
        auto det = jacobian(ee.fwd).det;
        auto ord = det.x_order();
        Poly normalized = ord ? det.shifted_x(-*ord) : det;
        auto q = normalized.as_rational();
        if (!q || *q == 0)
            fail("JacobianNotUnit", "stored endo has a non-monomial Jacobian");
        out.scalar *= *q;
        out.x_power += ord ? *ord : 0;
    }
    return out;
}

CertificateChecks run_certificate_checks(const CtxPtr& ctx, const GeneratorWord& input_word,
                                         const Endo& psi, const Endo& theta,
                                         const GeneratorWord& theta_word,
                                         const GeneratorWord& theta_inverse_word)
{
    CertificateChecks c;
    c.over_r = theta.is_over_r();
    c.id_mod_x = c.over_r && theta.mod_x() == Endo::identity(ctx);
    Endo inv = word_to_endo(theta_inverse_word);
    Endo round = word_to_endo(GeneratorWord::concat(theta_word, theta_inverse_word));
    c.inverse_over_r = inv.is_over_r() && round == Endo::identity(ctx);
    c.y_match = true;
    for (int j = 0; j < ctx->m; ++j)
        c.y_match = c.y_match && theta.image_y(j) == psi.image_y(j);
    WordJacobian wj = word_jacobian_det(theta_word);
    c.jacobian_unit = wj.scalar != 0 && wj.x_power == 0;
    c.tame = input_word.all_tame() && theta_word.all_tame();
    return c;
}

} // namespace srcoord
