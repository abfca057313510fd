#ifndef SRCOORD_MT2_HPP
#define SRCOORD_MT2_HPP

#include "srcoord/reduce.hpp"

#include <optional>

namespace srcoord {

// phi' = rho^{-1} o phi o rho, generator by generator; every input generator
// must pass validate_elementary_tau at tau and every output at rho(tau).
// Satisfies phi o rho = rho o phi'; single elementaries stay single.
GeneratorWord rho_push(const GeneratorWord& phi, const GenPerm& rho, const WeightVector& tau);
Elementary rho_push(const Elementary& g, const GenPerm& rho, const CtxPtr& ctx,
                    const WeightVector& tau);

// Weight-escape certificate for an elementary against suffix data (n = 2 only):
// checks the preconditions exactly, then certifies membership in EA_2^tau by
// exhibiting the normalized x-depth r <= t_1. A false return means the
// guarantee itself failed on checked preconditions.
bool phi_ea_tau_check(const Elementary& phi, const WeightVector& sigma,
                      const WeightVector& tau, const Endo& omega);

// Factors (elementary o twisted-linear) as (genperm o elementary) when the
// linear map has the required vanishing entry. beta is the untwisted matrix.
struct ElemLinearFactor {
    GenPerm rho;
    Elementary phi;
};
ElemLinearFactor factor_elementary_linear(const Elementary& phi, const Linear& beta,
                                          const CtxPtr& ctx, const WeightVector& tau);

// Writes the tau-twist of an invertible base-coefficient matrix as
// genperm o (at most one linear elementary); needs a vanishing entry.
struct LinearFactor {
    GenPerm rho;
    GeneratorWord phi; // empty or a single linear elementary
};
LinearFactor factor_linear_map(const Linear& mat, const CtxPtr& ctx, const WeightVector& tau);

// Splits a word of weighted elementaries into an IA^tau head and a word whose
// coefficients live over the base (their weighted slack-zero parts).
struct BaseCoeffFactor {
    IaElem alpha;
    std::vector<Elementary> reduced;
};
BaseCoeffFactor factor_base_coefficients(const std::vector<Elementary>& ws, const CtxPtr& ctx,
                                         const WeightVector& tau);

// Collapses an alternating elementary word against suffix data: either all
// generators share a slot (merged into one elementary), or the word factors
// as alpha o rho o (linear elementary). Assumption violations throw
// PreconditionFailed; a surviving nonlinear generator throws
// InternalContradiction with the degree bookkeeping attached.
struct CollapseResult {
    bool same_variable = false;
    GeneratorWord merged; // same_variable case: one elementary (or empty)
    IaElem alpha;
    GenPerm rho;
    GeneratorWord phi; // empty or a single linear elementary
};
CollapseResult collapse_elementary_word(const std::vector<Elementary>& ws, const CtxPtr& ctx,
                                        const WeightVector& tau, const Endo& omega);

// Moves every IA factor to the front and merges the permutations, stage list
// (alpha_i, rho_i, phi_i) with weights tau_0..tau_{q+1}, rho_i(tau_i) <= tau_{i+1}.
struct ConsolidateStage {
    IaElem alpha;
    GenPerm rho;
    GeneratorWord phi;
};
struct ConsolidateResult {
    IaElem alpha;
    GenPerm rho;
    std::vector<GeneratorWord> phis;
};
ConsolidateResult consolidate_ia_perm(const CtxPtr& ctx, const std::vector<ConsolidateStage>& stages,
                                      const std::vector<WeightVector>& taus);

// alpha_1 o rho_1 o alpha_2 o rho_2 = alpha' o (rho_1 o rho_2) o Phi with a
// rank-one weight gap tau_2 - rho_1(tau_1) = delta e_k.
struct AlphaRhoMerge {
    IaElem alpha;
    GenPerm rho;
    GeneratorWord phi; // empty or a single elementary in EA^{rho_2(tau_2)}
};
AlphaRhoMerge merge_alpha_rho(const IaElem& a1, const GenPerm& r1, const IaElem& a2,
                              const GenPerm& r2, const WeightVector& tau1,
                              const WeightVector& tau2);

// Evaluates the four equivalent minimality formulations on staged data and
// reports the per-stage weight gaps.
struct MinimalityStageReport {
    WeightVector tau_direct;        // minimal for omega_i
    WeightVector tau_shifted;       // minimal with (phi_i o omega_{i+1})(A_{rho_i(tau)}) in R
    WeightVector tau_rho_phi;       // minimal for rho_i o phi_i o omega_{i+1}
    WeightVector tau_conj;          // minimal for (rho phi rho^{-1}) o rho o omega_{i+1}
    bool equivalent = false;
    bool gap_rank_one = false;      // rho_i(tau_i) - tau_{i+1} supported on phi_i's slot
    long gap_delta = 0;
    bool complement_not_divisible = true; // (rho_i o omega_{i+1})(x^{t_k} z_k) not in xR, k != slot
};
struct MinimalityReport {
    std::vector<MinimalityStageReport> stages;
    bool all_equivalent = false;
};

struct Mt2Stage {
    GeneratorWord alpha;
    GenPerm rho;
    Elementary phi;
};

MinimalityReport minimality_report(const CtxPtr& ctx, const std::vector<Mt2Stage>& stages);

// The n = 2 staged rewriting pipeline: repeatedly merges the maximal weight
// inversion into a single stage, then hands the monotone stage list to the
// staged reduction and emits its certificate.
Certificate mt2_pipeline(const CtxPtr& ctx, const std::vector<Mt2Stage>& stages);

} // namespace srcoord

#endif
