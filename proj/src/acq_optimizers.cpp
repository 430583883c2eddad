#include "nasbo/acq_optimizers.hpp"

#include <optional>
#include <stdexcept>

namespace nasbo {

namespace {
constexpr std::size_t kChunk = 4096;
}

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::mut:
      return "mut";
    case OptimizerKind::rs:
      return "rs";
    case OptimizerKind::rs_plus:
      return "rs_plus";
  }
  return "?";
}

OptimizerKind parse_optimizer_kind(std::string_view text) {
  if (text == "mut") return OptimizerKind::mut;
  if (text == "rs") return OptimizerKind::rs;
  if (text == "rs_plus" || text == "rs+") return OptimizerKind::rs_plus;
  throw std::invalid_argument("unknown acquisition optimizer '" + std::string(text) + "'");
}

ProposalBudget ProposalBudget::defaults(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::mut:
      return {kind, 100};
    case OptimizerKind::rs:
      return {kind, 1000};
    case OptimizerKind::rs_plus:
      return {kind, 100000};
  }
  throw std::logic_error("unhandled optimizer kind");
}

PoolArgmax score_pool(std::span<const Architecture> pool, const ScoringContext& scoring,
                      std::vector<double>* values) {
  if (pool.empty()) throw std::invalid_argument("score_pool: empty pool");
  const FeatureMatrix x = scoring.encoder.encode_all(pool);
  std::vector<PosteriorPrediction> preds(pool.size());
  scoring.surrogate.predict(x, preds);
  PoolArgmax best;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double v = evaluate_acquisition(scoring.acquisition, preds[i], scoring.acq);
    if (values != nullptr) values->push_back(v);
    if (i == 0 || v > best.value) best = {i, v, preds[i]};
  }
  return best;
}

Proposal propose_mut(const Architecture& incumbent, const ScoringContext& scoring,
                     const ProposalBudget& budget, Rng& rng) {
  if (budget.n_candidates < 1) throw std::invalid_argument("proposal budget must be positive");
  std::vector<Architecture> pool;
  pool.reserve(budget.n_candidates);
  for (std::size_t i = 0; i < budget.n_candidates; ++i) pool.push_back(mutate(incumbent, rng, 1));
  const PoolArgmax best = score_pool(pool, scoring);
  return {pool[best.index], best.value, best.prediction, pool.size(), OptimizerKind::mut};
}

Proposal propose_rs(const SpecPtr& spec, const ScoringContext& scoring, const ProposalBudget& budget,
                    Rng& rng) {
  if (budget.n_candidates < 1) throw std::invalid_argument("proposal budget must be positive");
  std::optional<Proposal> best;
  std::vector<Architecture> chunk;
  for (std::size_t start = 0; start < budget.n_candidates; start += kChunk) {
    const std::size_t count = std::min(kChunk, budget.n_candidates - start);
    chunk.clear();
    chunk.reserve(count);
    for (std::size_t i = 0; i < count; ++i) chunk.push_back(sample_uniform(spec, rng));
    const PoolArgmax local = score_pool(chunk, scoring);
    if (!best || local.value > best->acquisition_value) {
      best = Proposal{chunk[local.index], local.value, local.prediction, budget.n_candidates, budget.kind};
    }
  }
  return *best;
}

Proposal propose(OptimizerKind kind, const Architecture& incumbent, const SpecPtr& spec,
                 const ScoringContext& scoring, const ProposalBudget& budget, Rng& rng) {
  if (kind == OptimizerKind::mut) return propose_mut(incumbent, scoring, budget, rng);
  return propose_rs(spec, scoring, budget, rng);
}

std::vector<Proposal> shadow_propose(const Architecture& incumbent, const SpecPtr& spec,
                                     const SurrogateModel& surrogate, const Encoder& encoder,
                                     AcquisitionKind acquisition, double y_max, ShadowStreams& streams) {
  std::vector<Proposal> out;
  const ScoringContext mut_scoring{surrogate, encoder, acquisition, {y_max, &streams.mut_acquisition}};
  out.push_back(propose_mut(incumbent, mut_scoring, ProposalBudget::defaults(OptimizerKind::mut),
                            streams.mut_candidates));
  const ScoringContext rs_scoring{surrogate, encoder, acquisition, {y_max, &streams.rs_acquisition}};
  out.push_back(propose_rs(spec, rs_scoring, ProposalBudget::defaults(OptimizerKind::rs), streams.rs_candidates));
  return out;
}

}  // namespace nasbo
