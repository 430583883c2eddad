#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nasbo/acquisition.hpp"
#include "nasbo/encodings.hpp"
#include "nasbo/search_space.hpp"
#include "nasbo/surrogates.hpp"

namespace nasbo {

enum class OptimizerKind { mut, rs, rs_plus };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view text);

struct ProposalBudget {
  OptimizerKind kind = OptimizerKind::mut;
  std::size_t n_candidates = 100;

  static ProposalBudget defaults(OptimizerKind kind);
};

struct Proposal {
  Architecture architecture;
  double acquisition_value;
  PosteriorPrediction prediction;
  std::size_t candidate_pool_size;
  OptimizerKind optimizer_kind;
};

/// Everything a proposal round scores candidates with.
struct ScoringContext {
  const SurrogateModel& surrogate;
  const Encoder& encoder;
  AcquisitionKind acquisition;
  AcquisitionContext acq;
};

/// Scores a pool and returns (index, value, prediction) of the first maximiser.
struct PoolArgmax {
  std::size_t index = 0;
  double value = 0.0;
  PosteriorPrediction prediction;
};
PoolArgmax score_pool(std::span<const Architecture> pool, const ScoringContext& scoring,
                      std::vector<double>* values = nullptr);

/// n_candidates independent single-edit mutants of the incumbent; argmax with
/// first-index tie-breaking.
Proposal propose_mut(const Architecture& incumbent, const ScoringContext& scoring,
                     const ProposalBudget& budget, Rng& rng);

/// n_candidates uniform samples; argmax with first-index tie-breaking.
/// Candidates are processed in fixed-size chunks so large budgets stay bounded
/// in memory.
Proposal propose_rs(const SpecPtr& spec, const ScoringContext& scoring, const ProposalBudget& budget,
                    Rng& rng);

Proposal propose(OptimizerKind kind, const Architecture& incumbent, const SpecPtr& spec,
                 const ScoringContext& scoring, const ProposalBudget& budget, Rng& rng);

/// Streams for the non-driving optimizers of one round.
struct ShadowStreams {
  Rng mut_candidates;
  Rng mut_acquisition;
  Rng rs_candidates;
  Rng rs_acquisition;
};

/// Mut and RS proposals against the same surrogate and incumbent as the driving
/// optimizer. Only the given streams are consumed.
std::vector<Proposal> shadow_propose(const Architecture& incumbent, const SpecPtr& spec,
                                     const SurrogateModel& surrogate, const Encoder& encoder,
                                     AcquisitionKind acquisition, double y_max, ShadowStreams& streams);

}  // namespace nasbo
