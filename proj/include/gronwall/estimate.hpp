#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gronwall/analytic.hpp"
#include "gronwall/rng.hpp"
#include "gronwall/simulate.hpp"

namespace gronwall {

enum class EstimatorKind { Clt, MedianOfMeans };

struct Method {
  EstimatorKind kind = EstimatorKind::Clt;
  std::size_t blocks = 0;  // MedianOfMeans only; odd, <= n

  static Method clt() { return {EstimatorKind::Clt, 0}; }
  static Method median_of_means(std::size_t k) {
    return {EstimatorKind::MedianOfMeans, k};
  }
};

struct EstimateWithCI {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
  double confidence = 0.999;
  Method method;

  double lower() const { return mean - half_width; }
  double upper() const { return mean + half_width; }
};

enum class Verdict { Pass, Fail, Inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    default: return "INCONCLUSIVE";
  }
}

/// Comparison of an estimated LHS against constant * estimated RHS.
/// FAIL only when the lower edge of LHS clears the upper edge of
/// constant * RHS; the inequalities under test are proven, so FAIL
/// signals an implementation bug rather than a discovery.
struct InequalityReport {
  std::string name;
  EstimateWithCI lhs;
  EstimateWithCI rhs;
  double constant = 1.0;
  double margin = 0.0;  // constant*(rhs.mean - rhs.hw) - (lhs.mean + lhs.hw)
  Verdict verdict = Verdict::Inconclusive;
  std::string bias_notes;
};

inline InequalityReport make_report(std::string name, EstimateWithCI lhs,
                                    EstimateWithCI rhs, double constant,
                                    std::string bias_notes = {}) {
  InequalityReport rep;
  rep.name = std::move(name);
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.constant = constant;
  rep.margin = constant * rhs.lower() - lhs.upper();
  rep.verdict = lhs.lower() <= constant * rhs.upper() ? Verdict::Pass
                                                      : Verdict::Fail;
  rep.bias_notes = std::move(bias_notes);
  return rep;
}

namespace detail {

/// Standard normal quantile (Acklam's rational approximation, |err| < 1.2e-9).
inline double normal_quantile(double prob) {
  if (!(prob > 0.0) || !(prob < 1.0))
    throw std::invalid_argument("normal_quantile: prob must lie in (0, 1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r;
  if (prob < plow) {
    q = std::sqrt(-2.0 * std::log(prob));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (prob > 1.0 - plow) {
    q = std::sqrt(-2.0 * std::log(1.0 - prob));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  q = prob - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline double binomial_cdf_half(std::size_t k, std::size_t upto) {
  // P(Bin(k, 1/2) <= upto), exact in double for the small k used here.
  double term = std::pow(0.5, static_cast<double>(k));  // C(k,0)/2^k
  double sum = term;
  for (std::size_t j = 1; j <= upto; ++j) {
    term *= static_cast<double>(k - j + 1) / static_cast<double>(j);
    sum += term;
  }
  return sum;
}

}  // namespace detail

/// Block count for median-of-means at the given confidence, capped at n/2
/// and forced odd.
inline std::size_t median_of_means_blocks(double confidence, std::size_t n) {
  const auto k = static_cast<std::size_t>(
      2 * std::floor(std::log(1.0 / (1.0 - confidence))) + 1);
  std::size_t capped = std::min(k, n / 2);
  if (capped < 3) capped = 3;
  if (capped % 2 == 0) --capped;
  return capped;
}

/// Estimate from an already-collected sample vector (order-insensitive up
/// to floating-point summation order; callers keep sample order fixed).
inline EstimateWithCI estimate_from_samples(const std::vector<double>& samples,
                                            Method method,
                                            double confidence = 0.999) {
  const std::size_t n = samples.size();
  if (n < 2)
    throw std::invalid_argument("estimate_from_samples: need n >= 2");

  EstimateWithCI est;
  est.n = n;
  est.confidence = confidence;

  if (method.kind == EstimatorKind::Clt) {
    est.method = Method::clt();
    double sum = 0.0;
    for (double x : samples) sum += x;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(n - 1);
    est.mean = mean;
    est.half_width =
        var > 0.0 ? detail::normal_quantile(0.5 + confidence / 2.0) *
                        std::sqrt(var / static_cast<double>(n))
                  : 0.0;
    return est;
  }

  std::size_t k = method.blocks != 0 ? method.blocks
                                     : median_of_means_blocks(confidence, n);
  if (k % 2 == 0 || k > n)
    throw std::invalid_argument("estimate_mean: blocks must be odd and <= n");
  est.method = Method::median_of_means(k);

  std::vector<double> block_means(k, 0.0);
  const std::size_t per = n / k;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t begin = j * per;
    const std::size_t end = j + 1 == k ? n : begin + per;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += samples[i];
    block_means[j] = sum / static_cast<double>(end - begin);
  }
  std::sort(block_means.begin(), block_means.end());
  est.mean = block_means[k / 2];

  // Largest r with two-sided sign-test error <= 1 - confidence.
  std::size_t r = 1;
  while (r + 1 <= k / 2 &&
         2.0 * detail::binomial_cdf_half(k, r) <= 1.0 - confidence) {
    ++r;
  }
  const double lo = block_means[r - 1];
  const double hi = block_means[k - r];
  est.half_width = std::max(est.mean - lo, hi - est.mean);
  return est;
}

/// Mean of n draws from the sampler with an interval at the stated
/// confidence.  CLT: mean +- z s/sqrt(n).  MedianOfMeans: median of block
/// means, interval from the sign-test order statistics of the blocks.
/// Workers > 1 fans sampling out over derived substreams; the reduction is
/// by worker index, so results do not depend on scheduling order.
inline EstimateWithCI estimate_mean(
    const std::function<double(RngStream&)>& sampler, const RngStream& base,
    std::size_t n, Method method, double confidence = 0.999,
    unsigned workers = 1) {
  if (n < 100) throw std::invalid_argument("estimate_mean: n must be >= 100");
  if (workers < 1) workers = 1;

  std::vector<double> samples(n);
  const auto fill_chunk = [&](unsigned w, std::size_t begin, std::size_t end) {
    RngStream rng = base.substream(w);
    for (std::size_t i = begin; i < end; ++i) samples[i] = sampler(rng);
  };
  if (workers == 1) {
    fill_chunk(0, 0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min<std::size_t>(w * chunk, n);
      const std::size_t end = std::min<std::size_t>(begin + chunk, n);
      if (begin < end) pool.emplace_back(fill_chunk, w, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  return estimate_from_samples(samples, method, confidence);
}

enum class LawTag { StoppedSupPower, Bounded };

/// Picks the estimator for a p-th power functional of a built-in law:
/// median-of-means whenever the second moment is infinite, which for the
/// stopped-sup law (tail ~ b/a) happens as soon as 2p >= 1.
inline Method select_estimator(const Exponent& p, LawTag law,
                               double confidence = 0.999,
                               std::size_t n = 0) {
  switch (law) {
    case LawTag::Bounded:
      return Method::clt();
    case LawTag::StoppedSupPower:
      if (2.0 * p.value() >= 1.0) {
        return Method::median_of_means(
            n > 0 ? median_of_means_blocks(confidence, n) : 0);
      }
      return Method::clt();
  }
  throw std::invalid_argument("select_estimator: unknown law tag");
}

struct LadderChainResult {
  EstimateWithCI lhs;       // MC estimate of E A^p for StoppedBm(b = 1)
  double chain_bound = 0.0; // sum Gamma_i * P{B >= a_{i-1}}
};

/// Monte-Carlo estimate of E A^p for the stopped-BM extremal model against
/// the ladder decomposition bound sum_i Gamma_i P{N >= i}, with
/// P{N >= i} <= P{B >= a_{i-1}} and B = b almost surely for this model.
inline LadderChainResult estimate_ladder_chain(const Exponent& p,
                                               const GeometricLadder& ladder,
                                               std::size_t n,
                                               const RngStream& rng,
                                               double b = 1.0,
                                               double confidence = 0.999) {
  if (!(ladder.level(ladder.depth()) > b)) {
    throw std::invalid_argument(
        "estimate_ladder_chain: ladder depth exhausted before clearing the "
        "barrier; increase depth");
  }
  LadderChainResult out;
  const double pv = p.value();
  out.lhs = estimate_mean(
      [b, pv](RngStream& r) {
        return std::pow(sample_stopped_sup_exact(r, b), pv);
      },
      rng, n, select_estimator(p, LawTag::StoppedSupPower, confidence, n),
      confidence);
  double bound = 0.0;
  for (int i = 1; i <= ladder.depth(); ++i) {
    // P{B >= a_{i-1}} for the almost-surely constant B = b.
    const double tail_prob = ladder.level(i - 1) <= b ? 1.0 : 0.0;
    if (tail_prob == 0.0) break;
    bound += ladder_moment(p, ladder.level(i - 1), ladder.level(i)) * tail_prob;
  }
  out.chain_bound = bound;
  return out;
}

}  // namespace gronwall
