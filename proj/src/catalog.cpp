#include "srcoord/catalog.hpp"

namespace srcoord {

namespace {

GeneratorWord single(const CtxPtr& ctx, Generator g)
{
    GeneratorWord w(ctx);
    w.append(std::move(g));
    return w;
}

} // namespace

NamedExample nagata()
{
    NamedExample ex;
    ex.name = "nagata";
    ex.ctx = RingContext::create(1, 1, 0, {"y"}, {"z"});
    const auto& ctx = ex.ctx;

    Elementary up{{VarKind::Z, 0}, parse_poly("x^-1*y^2", ctx)};
    Elementary mid{{VarKind::Y, 0}, parse_poly("x^2*z", ctx)};
    Elementary down{{VarKind::Z, 0}, parse_poly("-x^-1*y^2", ctx)};

    ex.display_word = GeneratorWord(ctx);
    ex.display_word.append(up);
    ex.display_word.append(mid);
    ex.display_word.append(down);

    ex.alpha = single(ctx, mid);
    ex.word = single(ctx, down);

    Mt1Stage first;
    first.alpha = GeneratorWord(ctx);
    first.rho = GenPerm::identity(1);
    first.phi = single(ctx, up);
    first.tau = WeightVector({1});
    Mt1Stage second;
    second.alpha = single(ctx, mid);
    second.rho = GenPerm::identity(1);
    second.phi = single(ctx, down);
    second.tau = WeightVector({1});
    ex.stages = {first, second};

    ex.expected_theta_y = parse_poly("y + x*(x*z - y^2)", ctx);
    ex.expected_endo = Endo(
        ctx, {parse_poly("y + x*(x*z - y^2)", ctx),
              parse_poly("z + 2*y*(x*z - y^2) + x*(x*z - y^2)^2", ctx)});
    return ex;
}

NamedExample anick()
{
    NamedExample ex;
    ex.name = "anick";
    ex.ctx = RingContext::create(1, 1, 1, {"y"}, {"z"}, {"t"});
    const auto& ctx = ex.ctx;
    ex.alpha = single(ctx, Elementary{{VarKind::Y, 0}, parse_poly("x^2*z", ctx)});
    ex.word = single(ctx, Elementary{{VarKind::Z, 0}, parse_poly("x^-1*y*t", ctx)});
    ex.display_word = GeneratorWord::concat(ex.alpha, ex.word);
    ex.expected_theta_y = parse_poly("y + x*(x*z + y*t)", ctx);
    ex.expected_endo = Endo(ctx, {parse_poly("y + x*(x*z + y*t)", ctx),
                                  parse_poly("z - t*(x*z + y*t)", ctx)});
    return ex;
}

NamedExample venereau_type(const std::string& q_text)
{
    NamedExample ex;
    ex.name = "venereau-type";
    ex.ctx = RingContext::create(1, 3, 0, {"y"}, {"z", "u", "t"});
    const auto& ctx = ex.ctx;

    // Q lives in placeholder arguments w1, w2 over Q[x]
    auto qctx = RingContext::create(0, 2, 0, {}, {"w1", "w2"});
    Poly q = parse_poly(q_text, qctx);
    std::vector<Poly> images{parse_poly("x*z", ctx), parse_poly("x^2*u", ctx)};
    Poly q_filled = transport(q, ctx, images);

    ex.alpha = single(ctx, Elementary{{VarKind::Y, 0}, q_filled.shifted_x(1)});
    ex.word = GeneratorWord(ctx);
    ex.word.append(Elementary{{VarKind::Z, 0}, parse_poly("y*t", ctx)});
    ex.word.append(Elementary{{VarKind::Z, 1}, parse_poly("-2*z*t - y*t^2", ctx)});
    ex.word.append(Elementary{{VarKind::Z, 2}, parse_poly("x^-1*(y*u + z^2)", ctx)});
    ex.word.append(Elementary{{VarKind::Z, 0}, parse_poly("-y*t", ctx)});
    ex.word.append(Elementary{{VarKind::Z, 1}, parse_poly("2*z*t - y*t^2", ctx)});
    ex.display_word = GeneratorWord::concat(ex.alpha, ex.word);

    // the leading part must live at the head of the weight chain
    auto sigmas = sigma_sequence(ex.word);
    if (!q_filled.is_zero() && !a_tau_member(q_filled, sigmas.front()))
        fail("QNotInASigma0", "Q(xz, x^2u) escaped A_" + sigmas.front().render());

    Poly f1 = parse_poly("x*z + y*(y*u + z^2)", ctx);
    Poly f2 = parse_poly("x^2*u - 2*x*z*(y*u + z^2) - y*(y*u + z^2)^2", ctx);
    Poly q_final = transport(q, ctx, {f1, f2});
    ex.expected_theta_y = Poly::variable(ctx, {VarKind::Y, 0}) + q_final.shifted_x(1);
    return ex;
}

NamedExample russell(const std::string& f_text, int s, const Rational& lambda)
{
    if (lambda == 0)
        fail("BadInput", "lambda must be a nonzero rational");
    if (s < 0)
        fail("BadInput", "s must be a natural number");
    NamedExample ex;
    ex.name = "russell";
    ex.ctx = RingContext::create(1, 1, 0, {"y"}, {"z"});
    const auto& ctx = ex.ctx;
    Poly f = parse_poly(f_text, ctx);
    if (f.involves({VarKind::Z, 0}))
        fail("BadInput", "f must be a polynomial in x and y only");

    Poly z = Poly::variable(ctx, {VarKind::Z, 0});
    ex.alpha = single(ctx, Elementary{{VarKind::Y, 0}, z.scaled(lambda).shifted_x(s)});
    if (f.is_zero())
        ex.word = single(ctx, Elementary{{VarKind::Z, 0}, Poly::zero(ctx)});
    else
        ex.word = single(ctx, Elementary{{VarKind::Z, 0},
                                         f.scaled(Rational(1) / lambda).shifted_x(1 - s)});
    ex.display_word = GeneratorWord::concat(ex.alpha, ex.word);
    ex.expected_theta_y =
        Poly::variable(ctx, {VarKind::Y, 0}) + f.shifted_x(1) + z.scaled(lambda).shifted_x(s);
    return ex;
}

NamedExample crucial_difficulty_example()
{
    NamedExample ex;
    ex.name = "crucial-difficulty";
    ex.ctx = RingContext::create(1, 3, 0, {"y"}, {"z1", "z2", "z3"});
    const auto& ctx = ex.ctx;
    ex.tau = WeightVector({0, 1, 2});
    ex.omega = Endo(ctx, {parse_poly("y", ctx), parse_poly("z1", ctx),
                          parse_poly("z2 + x^-1*y*z1", ctx),
                          parse_poly("z3 - 2*x^-1*z2*z1 - x^-2*y*z1^2", ctx)});
    ex.obstruction_p = parse_poly("y*x^2*z3 + x^2*z2^2", ctx);
    ex.expected_value = parse_poly("x^2*(y*z3 + z2^2)", ctx);
    ex.expected_theta_y = Poly::variable(ctx, {VarKind::Y, 0});
    ex.display_word = GeneratorWord(ctx);
    ex.alpha = GeneratorWord(ctx);
    ex.word = GeneratorWord(ctx);
    return ex;
}

Certificate run_example(const NamedExample& ex)
{
    if (!ex.stages.empty())
        return mt1_pipeline(ex.ctx, ex.stages);
    return at2_pipeline(ex.alpha, ex.word);
}

} // namespace srcoord
