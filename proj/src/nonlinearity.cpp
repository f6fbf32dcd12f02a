#include "sumalloc/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sumalloc {

NonlinearMap NonlinearMap::identity() {
  return NonlinearMap(MapKind::identity, 0.0, 0.0);
}

NonlinearMap NonlinearMap::saturation(double level) {
  if (!(level > 0.0)) throw std::invalid_argument("saturation level must be positive");
  return NonlinearMap(MapKind::saturation, level, 0.0);
}

NonlinearMap NonlinearMap::log_quantizer(double q) {
  if (!(q > 0.0)) throw std::invalid_argument("quantization level must be positive");
  return NonlinearMap(MapKind::log_quantizer, q, 0.0);
}

NonlinearMap NonlinearMap::uniform_quantizer(double q) {
  if (!(q > 0.0)) throw std::invalid_argument("quantization level must be positive");
  return NonlinearMap(MapKind::uniform_quantizer, q, 0.0);
}

NonlinearMap NonlinearMap::signpower_sum(double mu1, double mu2) {
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) {
    throw std::invalid_argument("signpower exponents must be positive");
  }
  return NonlinearMap(MapKind::signpower_sum, mu1, mu2);
}

double NonlinearMap::operator()(double z) const {
  // evaluate on |z| and restore the sign: keeps every map odd to the bit
  const double a = std::abs(z);
  const double sign = (z > 0.0) ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
  switch (kind_) {
    case MapKind::identity:
      return z;
    case MapKind::saturation:
      return sign * std::min(a, a_);
    case MapKind::log_quantizer:
      if (a == 0.0) return 0.0;
      return sign * std::exp(a_ * std::round(std::log(a) / a_));
    case MapKind::uniform_quantizer:
      return sign * (a_ * std::round(a / a_));
    case MapKind::signpower_sum:
      if (a == 0.0) return 0.0;
      return sign * (std::pow(a, a_) + std::pow(a, b_));
  }
  return z;
}

std::optional<SectorBounds> NonlinearMap::sector_bounds(double range) const {
  if (!(range > 0.0)) throw std::invalid_argument("sector range must be positive");
  switch (kind_) {
    case MapKind::identity:
      return SectorBounds{1.0, 1.0};
    case MapKind::saturation:
      // ratio is 1 inside the band and level/|z| beyond it
      return SectorBounds{std::min(1.0, a_ / range), 1.0};
    case MapKind::log_quantizer:
      return SectorBounds{std::exp(-a_ / 2.0), std::exp(a_ / 2.0)};
    case MapKind::uniform_quantizer:
      return std::nullopt;  // dead zone: h(z)/z = 0 for |z| < q/2
    case MapKind::signpower_sum: {
      // h(z)/z = |z|^(mu1-1) + |z|^(mu2-1) on (0, range]
      const double m1 = std::min(a_, b_);
      const double m2 = std::max(a_, b_);
      if (m1 < 1.0) return std::nullopt;  // unbounded ratio at the origin
      if (m1 > 1.0) return std::nullopt;  // ratio reaches 0 at the origin
      // m1 == 1: ratio = 1 + |z|^(m2-1), increasing
      return SectorBounds{1.0, 1.0 + std::pow(range, m2 - 1.0)};
    }
  }
  return std::nullopt;
}

std::string NonlinearMap::name() const {
  switch (kind_) {
    case MapKind::identity: return "identity";
    case MapKind::saturation: return "saturation(" + std::to_string(a_) + ")";
    case MapKind::log_quantizer: return "log_quantizer(" + std::to_string(a_) + ")";
    case MapKind::uniform_quantizer: return "uniform_quantizer(" + std::to_string(a_) + ")";
    case MapKind::signpower_sum:
      return "signpower_sum(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
  }
  return "unknown";
}

AssumptionReport verify_assumptions(const NonlinearMap& h, double lo, double hi,
                                    int count) {
  if (count < 100) throw std::invalid_argument("verify_assumptions: need at least 100 samples");
  if (!(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("verify_assumptions: need 0 < lo < hi");
  }

  AssumptionReport rep;
  rep.ratio_inf = std::numeric_limits<double>::infinity();
  rep.ratio_sup = -std::numeric_limits<double>::infinity();

  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  std::vector<double> zs;
  zs.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double f = (count == 1) ? 0.0 : static_cast<double>(i) / (count - 1);
    zs.push_back(std::exp(log_lo + f * (log_hi - log_lo)));
  }

  for (double z : zs) {
    const double hp = h(z);
    const double hm = h(-z);
    rep.oddness_defect = std::max(rep.oddness_defect, std::abs(hp + hm));
    const double ratio = hp / z;
    rep.ratio_inf = std::min(rep.ratio_inf, ratio);
    rep.ratio_sup = std::max(rep.ratio_sup, ratio);
  }

  // monotonicity over the signed sorted samples
  double prev_z = -zs.back();
  double prev_h = h(prev_z);
  for (auto it = zs.rbegin(); it != zs.rend(); ++it) {
    const double z = -*it;
    const double v = h(z);
    if (z > prev_z && v < prev_h) ++rep.monotonicity_violations;
    prev_z = z;
    prev_h = v;
  }
  for (double z : zs) {
    const double v = h(z);
    if (v < prev_h) ++rep.monotonicity_violations;
    prev_z = z;
    prev_h = v;
  }

  rep.sample_count = 2 * count;
  rep.sector = rep.ratio_inf > 0.0 && std::isfinite(rep.ratio_sup);
  return rep;
}

}  // namespace sumalloc
