#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "netlimits/core.hpp"
#include "netlimits/model_spec.hpp"

namespace netlimits {

// One evaluated non-recoverability condition: the parameter point is in the
// proven non-recoverable regime iff lhs <= rhs. Natural logs throughout.
struct ThresholdReport {
  std::string model;
  double lhs;
  double rhs;
  bool nonrecoverable;         // lhs <= rhs (the canonical comparison)
  bool nonrecoverable_strict;  // lhs < rhs
};

namespace detail {

constexpr double kLn2 = 0.6931471805599453094;

inline ThresholdReport make_report(const char* model, double lhs, double rhs) {
  return {model, lhs, rhs, lhs <= rhs, lhs < rhs};
}

inline void check_n(std::size_t n) {
  if (n < 2) throw RangeError("n >= 2 required");
}

}  // namespace detail

// KL(Bernoulli(p) || Bernoulli(q)) in nats.
inline double kl_bernoulli(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw RangeError("kl_bernoulli: p, q must lie strictly inside (0,1)");
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

// (p-q)^2 / (q(1-q)); dominates kl_bernoulli(p,q) whenever p > q.
inline double chi2_bound(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0))
    throw RangeError("chi2_bound: p, q must lie strictly inside (0,1)");
  return (p - q) * (p - q) / (q * (1.0 - q));
}

// (p-q)^2/(q(1-q)) <= 2 ln2 / n - 4 ln2 / n^2
inline ThresholdReport sbm_condition(double p, double q, std::size_t n) {
  detail::check_pq(p, q);
  detail::check_n(n);
  const double nn = static_cast<double>(n);
  const double rhs = 2.0 * detail::kLn2 / nn - 4.0 * detail::kLn2 / (nn * nn);
  return detail::make_report("sbm", chi2_bound(p, q), rhs);
}

// 2(cosh beta - 1) <= 2 ln2 / n - 4 ln2 / n^2
inline ThresholdReport ergm_condition(double beta, std::size_t n) {
  if (!(beta > 0.0)) throw RangeError("beta > 0 required");
  detail::check_n(n);
  const double nn = static_cast<double>(n);
  const double rhs = 2.0 * detail::kLn2 / nn - 4.0 * detail::kLn2 / (nn * nn);
  return detail::make_report("ergm", 2.0 * (std::cosh(beta) - 1.0), rhs);
}

// (4 sigma^2 + 1)^{-1-d/2} ||mu||^2 <= ln2 / (2n) - ln2 / n^2
inline ThresholdReport lsm_condition(std::size_t d, const std::vector<double>& mu, double sigma,
                                     std::size_t n) {
  detail::check_lsm(d, mu, sigma);
  detail::check_n(n);
  const double nn = static_cast<double>(n);
  double mu_sq = 0.0;
  for (double v : mu) mu_sq += v * v;
  const double lhs = std::pow(4.0 * sigma * sigma + 1.0, -1.0 - 0.5 * static_cast<double>(d)) * mu_sq;
  const double rhs = detail::kLn2 / (2.0 * nn) - detail::kLn2 / (nn * nn);
  return detail::make_report("lsm", lhs, rhs);
}

// (p-q)^2/(q(1-q)) <= (n-2) ln2 / (n^2 - n)
inline ThresholdReport dsbm_condition(double p, double q, std::size_t n) {
  detail::check_pq(p, q);
  detail::check_n(n);
  const double nn = static_cast<double>(n);
  const double rhs = (nn - 2.0) * detail::kLn2 / (nn * nn - nn);
  return detail::make_report("dsbm", chi2_bound(p, q), rhs);
}

// (4 sigma^2 + 1)^{-1-d/2} ||mu||^2 <= (n-2) ln2 / (4(n^2 - n))
inline ThresholdReport dlsm_condition(std::size_t d, const std::vector<double>& mu, double sigma,
                                      std::size_t n) {
  detail::check_lsm(d, mu, sigma);
  detail::check_n(n);
  const double nn = static_cast<double>(n);
  double mu_sq = 0.0;
  for (double v : mu) mu_sq += v * v;
  const double lhs = std::pow(4.0 * sigma * sigma + 1.0, -1.0 - 0.5 * static_cast<double>(d)) * mu_sq;
  const double rhs = (nn - 2.0) * detail::kLn2 / (4.0 * (nn * nn - nn));
  return detail::make_report("dlsm", lhs, rhs);
}

// (s+1)/(8m) <= 2^{(n-2)/(n^2-n)} / n^2
inline ThresholdReport dpam_condition(std::size_t m, double s, std::size_t n) {
  detail::check_directed(m, s);
  detail::check_n(n);
  const double nn = static_cast<double>(n);
  const double lhs = (s + 1.0) / (8.0 * static_cast<double>(m));
  const double rhs = std::exp2((nn - 2.0) / (nn * nn - nn)) / (nn * nn);
  return detail::make_report("dpam", lhs, rhs);
}

// (s+1)^2/(m p (1-p)) <= 2^{2(n-2)/n^2} / n
inline ThresholdReport dswm_condition(std::size_t m, double s, double p_mix, std::size_t n) {
  detail::check_directed(m, s);
  if (!(p_mix > 0.0 && p_mix < 1.0)) throw RangeError("p_mix in (0,1) required");
  detail::check_n(n);
  const double nn = static_cast<double>(n);
  const double lhs = (s + 1.0) * (s + 1.0) / (static_cast<double>(m) * p_mix * (1.0 - p_mix));
  const double rhs = std::exp2(2.0 * (nn - 2.0) / (nn * nn)) / nn;
  return detail::make_report("dswm", lhs, rhs);
}

inline ThresholdReport threshold_for(const ModelSpec& spec, std::size_t n) {
  switch (spec.kind()) {
    case ModelKind::Sbm: {
      const auto& p = spec.get<SbmParams>();
      return sbm_condition(p.p, p.q, n);
    }
    case ModelKind::Ergm:
      return ergm_condition(spec.get<ErgmParams>().beta, n);
    case ModelKind::Lsm: {
      const auto& p = spec.get<LsmParams>();
      return lsm_condition(p.d, p.mu, p.sigma, n);
    }
    case ModelKind::Dsbm: {
      const auto& p = spec.get<DsbmParams>();
      return dsbm_condition(p.p, p.q, n);
    }
    case ModelKind::Dlsm: {
      const auto& p = spec.get<DlsmParams>();
      return dlsm_condition(p.d, p.mu, p.sigma, n);
    }
    case ModelKind::Dpam: {
      const auto& p = spec.get<DpamParams>();
      return dpam_condition(p.m, p.s, n);
    }
    case ModelKind::Dswm: {
      const auto& p = spec.get<DswmParams>();
      return dswm_condition(p.m, p.s, p.p_mix, n);
    }
  }
  throw UnsupportedSpecError("unknown model kind");
}

}  // namespace netlimits
