#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_util.hpp"

using namespace srcoord;
using namespace srcoord::testutil;

TEST_CASE("word_to_endo reproduces the classic three-elementary composite")
{
    auto ctx = ctx_yz();
    CHECK(word_to_endo(nagata_word(ctx)) == nagata_endo(ctx));
}

TEST_CASE("word_to_endo: empty word and parameter example")
{
    auto ctx = ctx_yz();
    CHECK(word_to_endo(GeneratorWord(ctx)) == Endo::identity(ctx));

    auto ctp = RingContext::create(1, 1, 1, {"y"}, {"z"}, {"t"});
    GeneratorWord w(ctp);
    w.append(Elementary{{VarKind::Y, 0}, parse_poly("x^2*z", ctp)});
    w.append(Elementary{{VarKind::Z, 0}, parse_poly("x^-1*y*t", ctp)});
    Endo e = word_to_endo(w);
    CHECK(e.image_y(0) == parse_poly("y + x*(x*z + y*t)", ctp));
    CHECK(e.image_z(0) == parse_poly("z + x^-1*y*t", ctp));

    // the displayed two-variable automorphism with the same y-component is the
    // conjugate of the first factor by the second
    GeneratorWord conj(ctp);
    conj.append(Elementary{{VarKind::Z, 0}, parse_poly("-x^-1*y*t", ctp)});
    conj.append(Elementary{{VarKind::Y, 0}, parse_poly("x^2*z", ctp)});
    conj.append(Elementary{{VarKind::Z, 0}, parse_poly("x^-1*y*t", ctp)});
    Endo beta = word_to_endo(conj);
    CHECK(beta.image_y(0) == parse_poly("y + x*(x*z + y*t)", ctp));
    CHECK(beta.image_z(0) == parse_poly("z - t*(x*z + y*t)", ctp));
}

TEST_CASE("invert_word")
{
    auto ctx = ctx_yz();
    Generator g = Elementary{{VarKind::Z, 0}, parse_poly("x^-1*y^2", ctx)};
    Generator gi = invert_generator(ctx, g);
    CHECK(std::get<Elementary>(gi).p == parse_poly("-x^-1*y^2", ctx));

    GeneratorWord w = nagata_word(ctx);
    CHECK(word_to_endo(GeneratorWord::concat(w, invert_word(w))) == Endo::identity(ctx));
    CHECK(word_to_endo(GeneratorWord::concat(invert_word(w), w)) == Endo::identity(ctx));
}

TEST_CASE("genperm inverse and composition")
{
    auto ctx = RingContext::create(0, 2, 0);
    GenPerm g;
    g.sigma = {1, 0};
    g.lambda = {Rational(1), Rational(1)};
    g.r = {1, -1};
    GeneratorWord w = genperm_word(ctx, g);
    CHECK(word_to_endo(GeneratorWord::concat(w, invert_word(w))) == Endo::identity(ctx));

    Rng rng(7);
    for (int i = 0; i < 10; ++i) {
        GenPerm a = rng.genperm(ctx), b = rng.genperm(ctx);
        GeneratorWord ab(ctx);
        ab.append(a);
        ab.append(b);
        CHECK(word_to_endo(genperm_word(ctx, genperm_compose(a, b))) == word_to_endo(ab));
    }
}

TEST_CASE("linear generators: inverse via adjugate, validation")
{
    auto ctx = RingContext::create(1, 2, 0);
    Linear l{{{parse_poly("1", ctx), parse_poly("y1", ctx)},
              {parse_poly("0", ctx), parse_poly("2", ctx)}}};
    GeneratorWord w(ctx);
    w.append(l);
    CHECK(word_to_endo(GeneratorWord::concat(w, invert_word(w))) == Endo::identity(ctx));

    Linear bad{{{parse_poly("1", ctx), parse_poly("1", ctx)},
                {parse_poly("1", ctx), parse_poly("1", ctx)}}};
    CHECK_THROWS_AS(GeneratorWord(ctx).append(bad), Error);
    Linear badx{{{parse_poly("x", ctx), parse_poly("0", ctx)},
                 {parse_poly("0", ctx), parse_poly("1", ctx)}}};
    CHECK_THROWS_AS(GeneratorWord(ctx).append(badx), Error);
}

TEST_CASE("conjugate_by_weights: twisted linear map")
{
    auto ctx = RingContext::create(0, 2, 0);
    Linear l{{{Poly::one(ctx), Poly::one(ctx)}, {Poly::zero(ctx), Poly::one(ctx)}}};
    GeneratorWord w(ctx);
    w.append(l);
    Endo conj = word_to_endo(conjugate_by_weights(w, WeightVector({1, 0})));
    CHECK(conj.image_z(0) == parse_poly("z1 + x^-1*z2", ctx));
    CHECK(conj.image_z(1) == parse_poly("z2", ctx));
}

TEST_CASE("conjugate_by_weights: zero weight is the identity operation")
{
    auto ctx = ctx_yz();
    GeneratorWord w = nagata_word(ctx);
    CHECK(word_to_endo(conjugate_by_weights(w, WeightVector({0}))) == word_to_endo(w));
}

TEST_CASE("conjugate_by_weights agrees between word and endo level")
{
    auto ctx = RingContext::create(1, 2, 0);
    Rng rng(11);
    for (int i = 0; i < 8; ++i) {
        GeneratorWord w = rng.s_elementary_word(ctx, 3);
        WeightVector tau({rng.uniform(0, 2), rng.uniform(0, 2)});
        CHECK(word_to_endo(conjugate_by_weights(w, tau)) ==
              conjugate_by_weights(word_to_endo(w), tau));
    }
}

TEST_CASE("conjugate_by_weights distributes over concatenation and inversion")
{
    auto ctx = RingContext::create(1, 2, 0);
    Rng rng(13);
    WeightVector tau({2, 1});
    GeneratorWord a = rng.s_elementary_word(ctx, 2);
    GeneratorWord b = rng.s_elementary_word(ctx, 2);
    CHECK(word_to_endo(conjugate_by_weights(GeneratorWord::concat(a, b), tau)) ==
          word_to_endo(GeneratorWord::concat(conjugate_by_weights(a, tau),
                                             conjugate_by_weights(b, tau))));
    CHECK(word_to_endo(conjugate_by_weights(invert_word(a), tau)) ==
          word_to_endo(invert_word(conjugate_by_weights(a, tau))));
}

TEST_CASE("canonical_ia_form extracts witnesses")
{
    auto ctx = ctx_yz();
    Endo alpha(ctx, {parse_poly("y + x^2*z", ctx), parse_poly("z", ctx)});
    auto res = canonical_ia_form(alpha, WeightVector({1}));
    REQUIRE(res.ok);
    CHECK(res.witness.f[0] == parse_poly("x*z", ctx));
    CHECK(res.witness.g[0].is_zero());

    auto id = canonical_ia_form(Endo::identity(ctx), WeightVector({1}));
    REQUIRE(id.ok);
    CHECK(id.witness.f[0].is_zero());
    CHECK(id.witness.g[0].is_zero());

    Endo a2(ctx, {parse_poly("y", ctx), parse_poly("z + x^-1*y", ctx)});
    auto r2 = canonical_ia_form(a2, WeightVector({2}));
    REQUIRE(r2.ok);
    CHECK(r2.witness.f[0].is_zero());
    CHECK(r2.witness.g[0] == parse_poly("y", ctx));

    // failure carries the reason
    auto r3 = canonical_ia_form(a2, WeightVector({0}));
    CHECK(!r3.ok);
    CHECK(r3.error == "WitnessNotInATau");
}

TEST_CASE("canonical_ia_form matches the untwist-and-reduce definition")
{
    auto ctx = RingContext::create(1, 2, 0);
    Rng rng(17);
    for (int i = 0; i < 12; ++i) {
        WeightVector tau({rng.uniform(0, 2), rng.uniform(0, 2)});
        GeneratorWord w = rng.ia_word(ctx, tau, 2);
        Endo e = word_to_endo(w);
        bool via_form = canonical_ia_form(e, tau).ok;
        Endo untw = conjugate_by_weights(e, tau.negated());
        bool via_def = untw.is_over_r() && untw.mod_x() == Endo::identity(ctx).mod_x();
        CHECK(via_form);
        CHECK(via_form == via_def);
    }
}

TEST_CASE("validate_elementary_tau")
{
    auto ctx = RingContext::create(1, 3, 0, {"y"}, {"z", "u", "t"});
    Elementary vphi2{{VarKind::Z, 2}, parse_poly("x^-1*(y*u + z^2)", ctx)};
    CHECK(validate_elementary_tau(vphi2, ctx, WeightVector({0, 0, 1})));

    auto c1 = ctx_yz();
    Elementary g{{VarKind::Z, 0}, parse_poly("x^-1*y^2", c1)};
    CHECK(!validate_elementary_tau(g, c1, WeightVector({0})));
    CHECK(validate_elementary_tau(g, c1, WeightVector({1})));

    Elementary idg{{VarKind::Z, 0}, Poly::zero(c1)};
    CHECK(validate_elementary_tau(idg, c1, WeightVector({3})));
}

TEST_CASE("endo_equal")
{
    auto ctx = ctx_yz();
    CHECK(endo_equal(word_to_endo(nagata_word(ctx)), nagata_endo(ctx)));
    CHECK(endo_equal(Endo::identity(ctx), word_to_endo(GeneratorWord(ctx))));
    Endo padded(ctx, {parse_poly("y", ctx), parse_poly("z + x*0", ctx)});
    CHECK(endo_equal(padded, Endo::identity(ctx)));

    auto other = RingContext::create(2, 1, 0);
    CHECK_THROWS_AS(endo_equal(Endo::identity(ctx), Endo::identity(other)), Error);
}

TEST_CASE("explicit endos store exact inverses")
{
    auto ctx = ctx_yz();
    Endo fwd = word_to_endo(nagata_word(ctx));
    Endo inv = word_to_endo(invert_word(nagata_word(ctx)));
    GeneratorWord w(ctx);
    w.append(ExplicitEndo{fwd, inv});
    CHECK(word_to_endo(w) == fwd);

    CHECK_THROWS_AS(GeneratorWord(ctx).append(ExplicitEndo{fwd, fwd}), Error);
}

TEST_CASE("semidirect splitting: word factors into IA part and mod-x part")
{
    auto ctx = RingContext::create(1, 2, 0);
    Rng rng(23);
    for (int iter = 0; iter < 8; ++iter) {
        // random word over R
        GeneratorWord w(ctx);
        for (int i = 0; i < 3; ++i) {
            int k = rng.uniform(0, ctx->n - 1);
            Poly pz = rng.poly(ctx, 2, 2, 0, 2).split_by({VarKind::Z, k}).first;
            if (!pz.is_zero()) w.append(Elementary{{VarKind::Z, k}, pz});
            Poly py = rng.poly(ctx, 2, 1, 0, 2).split_by({VarKind::Y, 0}).first;
            if (!py.is_zero()) w.append(Elementary{{VarKind::Y, 0}, py});
        }
        // lift of the mod-x image, generator by generator
        GeneratorWord bar(ctx);
        for (const auto& g : w.generators()) {
            const auto& e = std::get<Elementary>(g);
            bar.append(Elementary{e.slot, e.p.mod_x()});
        }
        Endo quotient = word_to_endo(GeneratorWord::concat(w, invert_word(bar)));
        CHECK(quotient.is_over_r());
        CHECK(quotient.mod_x() == Endo::identity(ctx));
    }
}
