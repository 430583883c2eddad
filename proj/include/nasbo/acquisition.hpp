#pragma once

#include <limits>
#include <string>
#include <string_view>

#include "nasbo/rng.hpp"
#include "nasbo/surrogates.hpp"

namespace nasbo {

enum class AcquisitionKind { its, ei, const_mean };

std::string to_string(AcquisitionKind kind);
AcquisitionKind parse_acquisition_kind(std::string_view text);

/// Standard deviations below this are treated as exactly zero.
inline constexpr double kMinSd = 1e-12;

/// State shared by the acquisition evaluations of one proposal round.
/// rng is only consumed by Thompson sampling and is not owned.
struct AcquisitionContext {
  double y_max = -std::numeric_limits<double>::infinity();
  Rng* rng = nullptr;
};

/// One draw from N(mean, sd^2); returns the mean exactly when sd is zero.
double acq_its(const PosteriorPrediction& pred, Rng& rng);

/// Closed-form Gaussian expected improvement over y_max (maximisation).
double acq_ei(const PosteriorPrediction& pred, double y_max);

/// Posterior mean, ignoring uncertainty.
double acq_const_mean(const PosteriorPrediction& pred);

double evaluate_acquisition(AcquisitionKind kind, const PosteriorPrediction& pred,
                            const AcquisitionContext& ctx);

double normal_pdf(double z);
double normal_cdf(double z);

}  // namespace nasbo
