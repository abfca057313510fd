#ifndef SRCOORD_REDUCE_HPP
#define SRCOORD_REDUCE_HPP

#include "srcoord/jacobian.hpp"

#include <string>
#include <vector>

namespace srcoord {

// An IA-group element carried both evaluated and as an invertible word.
struct IaElem {
    GeneratorWord word;
    Endo endo;

    static IaElem from_word(const GeneratorWord& w) { return {w, word_to_endo(w)}; }
    static IaElem identity(const CtxPtr& ctx)
    {
        return {GeneratorWord(ctx), Endo::identity(ctx)};
    }
};

// One rewrite equation: the two stored words evaluate to the same
// endomorphism, and `witness` is the object the step produced (the conjugate,
// the strengthened element, the stage output). Words are kept unevaluated so
// logging stays cheap on large runs.
struct ReductionStep {
    std::string kind; // conjugate | strengthen | stage
    WeightVector tau;
    GeneratorWord lhs;
    GeneratorWord rhs;
    Endo witness;
    std::string note;
};

struct CertificateChecks {
    bool over_r = false;
    bool id_mod_x = false;
    bool inverse_over_r = false;
    bool y_match = false;
    bool jacobian_unit = false;
    bool tame = false; // informational flag, not a pass requirement

    bool passed() const { return over_r && id_mod_x && inverse_over_r && y_match && jacobian_unit; }
};

struct Certificate {
    CtxPtr ctx;
    std::string kind; // at2 | mt1 | mt2
    GeneratorWord input_word;
    std::vector<WeightVector> weights; // sigma- or tau-sequence
    Endo psi;                          // evaluated input word
    Endo theta;
    GeneratorWord theta_word;
    GeneratorWord theta_inverse_word;
    CertificateChecks checks;
    std::vector<ReductionStep> steps;
    std::vector<std::string> rewrite_trace; // filled by the n=2 rewriting pipeline
};

// (alpha(P) - P)/x for alpha in IA^tau and P in A_tau; the quotient stays in A_tau.
Poly taylor_gap(const Endo& alpha, const Poly& p, const WeightVector& tau);

// alpha' = phi^{-1} o alpha o phi for alpha in IA^tau and phi in GA_n^tau;
// membership of alpha' in IA^tau is re-verified.
Endo alpha_push(const Endo& alpha, const GeneratorWord& phi, const WeightVector& tau);

struct StrongIaResult {
    GeneratorWord phi; // word of z-elementaries in EA^tau \cap IA^tau
    Endo beta;         // phi o alpha, member of IA^sigma for every sigma <= tau
};

// Raises the membership level one basis vector at a time (left-to-right) until
// beta lies in the intersection of IA^sigma over the whole box 0 <= sigma <= tau.
// Box membership is verified exhaustively up to `box_limit` points, otherwise on
// sampled interior points plus all corners.
StrongIaResult strong_ia_reduce(const Endo& alpha, const WeightVector& tau,
                                std::vector<ReductionStep>* log = nullptr);

struct IaReduceResult {
    IaElem beta;       // member of IA^sigma
    GeneratorWord phi; // word in EA^tau with alpha = beta o phi
};

// Factors alpha = beta o phi with beta in IA^sigma and phi in EA^tau; when
// tau - sigma is supported on one slot, phi is a single elementary.
IaReduceResult ia_reduce(const IaElem& alpha, const WeightVector& tau,
                         const WeightVector& sigma);

// rho^{-1} o alpha o rho lands in IA^{rho(tau)}; the image weight must be natural.
IaElem ia_rho_conjugate(const IaElem& alpha, const GenPerm& rho, const WeightVector& tau);
Endo ia_rho_conjugate(const Endo& alpha, const GenPerm& rho, const WeightVector& tau);

struct ConjugateReduceResult {
    IaElem theta;      // psi o phi^{-1} o alpha o phi, in IA^sigma for all sigma <= tau
    GeneratorWord psi; // the strengthening word
    Endo conjugate;    // phi^{-1} o alpha o phi before strengthening
};

// The single-stage reduction: conjugate alpha across phi, then strengthen the
// result into the full weight box.
ConjugateReduceResult conjugate_reduce(const IaElem& alpha, const GeneratorWord& phi,
                                       const WeightVector& tau,
                                       std::vector<ReductionStep>* log = nullptr);

struct Mt1Stage {
    GeneratorWord alpha;
    GenPerm rho;
    GeneratorWord phi;
    WeightVector tau;
};

Certificate mt1_pipeline(const CtxPtr& ctx, const std::vector<Mt1Stage>& stages);

// Computes the sigma-sequence of w, checks the memberships, and delegates to
// the staged pipeline with trivial permutations.
Certificate at2_pipeline(const GeneratorWord& alpha, const GeneratorWord& w);

struct N2Result {
    Endo endo;          // automorphism over R with the same y-component
    GeneratorWord word; // prefix o input word
};

// Two-variable reduction: peels x^{-t} tails off the z-component until the map
// is over R. Requires m = 1, n = 1 and a nonzero rational Jacobian.
N2Result n2_reduce(const IaElem& phi);

// det J of the evaluated word, via the chain rule over the generators; always
// a rational times a power of x.
struct WordJacobian {
    Rational scalar;
    int x_power = 0;
};
WordJacobian word_jacobian_det(const GeneratorWord& w);

// Shared verification used by certificate emission and the standalone verifier.
CertificateChecks run_certificate_checks(const CtxPtr& ctx, const GeneratorWord& input_word,
                                         const Endo& psi, const Endo& theta,
                                         const GeneratorWord& theta_word,
                                         const GeneratorWord& theta_inverse_word);

} // namespace srcoord

#endif
