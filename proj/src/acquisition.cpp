#include "nasbo/acquisition.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nasbo {

std::string to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::its:
      return "its";
    case AcquisitionKind::ei:
      return "ei";
    case AcquisitionKind::const_mean:
      return "const_mean";
  }
  return "?";
}

AcquisitionKind parse_acquisition_kind(std::string_view text) {
  if (text == "its") return AcquisitionKind::its;
  if (text == "ei") return AcquisitionKind::ei;
  if (text == "const_mean" || text == "mean") return AcquisitionKind::const_mean;
  throw std::invalid_argument("unknown acquisition '" + std::string(text) + "'");
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double acq_its(const PosteriorPrediction& pred, Rng& rng) {
  if (pred.sd < kMinSd) return pred.mean;
  return pred.mean + pred.sd * rng.normal();
}

double acq_ei(const PosteriorPrediction& pred, double y_max) {
  const double gap = pred.mean - y_max;
  if (pred.sd < kMinSd) return std::max(gap, 0.0);
  const double z = gap / pred.sd;
  return std::max(pred.sd * (z * normal_cdf(z) + normal_pdf(z)), 0.0);
}

double acq_const_mean(const PosteriorPrediction& pred) { return pred.mean; }

double evaluate_acquisition(AcquisitionKind kind, const PosteriorPrediction& pred,
                            const AcquisitionContext& ctx) {
  switch (kind) {
    case AcquisitionKind::its:
      if (ctx.rng == nullptr) throw std::invalid_argument("Thompson sampling needs a random stream");
      return acq_its(pred, *ctx.rng);
    case AcquisitionKind::ei:
      return acq_ei(pred, ctx.y_max);
    case AcquisitionKind::const_mean:
      return acq_const_mean(pred);
  }
  throw std::logic_error("unhandled acquisition kind");
}

}  // namespace nasbo
