#ifndef SRCOORD_CATALOG_HPP
#define SRCOORD_CATALOG_HPP

#include "srcoord/reduce.hpp"

#include <optional>

namespace srcoord {

// A ready-made construction: a generator word (or staged form), the exact
// values it must reproduce, and everything needed to run a pipeline on it.
struct NamedExample {
    std::string name;
    CtxPtr ctx;
    GeneratorWord alpha;            // leading IA part for the elementary pipeline
    GeneratorWord word;             // z-elementary tail
    std::vector<Mt1Stage> stages;   // staged form when the word mixes slots
    GeneratorWord display_word;     // the full composite as displayed
    Poly expected_theta_y;
    std::optional<Endo> expected_endo; // displayed automorphism, where given

    // obstruction data (three z-variables)
    std::optional<Endo> omega;
    std::optional<Poly> obstruction_p;
    std::optional<Poly> expected_value;
    WeightVector tau;
};

NamedExample nagata();
NamedExample anick();

// Q is a polynomial in two placeholder arguments w1, w2 with Q[x] coefficients;
// they are filled with xz and x^2 u.
NamedExample venereau_type(const std::string& q_text);
inline NamedExample venereau() { return venereau_type("w1"); }

NamedExample russell(const std::string& f_text, int s, const Rational& lambda);

NamedExample crucial_difficulty_example();

// Runs the example through its pipeline (staged when stages are present,
// elementary otherwise) and returns the certificate.
Certificate run_example(const NamedExample& ex);

} // namespace srcoord

#endif
