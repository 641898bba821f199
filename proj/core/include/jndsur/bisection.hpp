#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jndsur/stats.hpp"

namespace jndsur {

/// Rounds of the bisection protocol; ceil(log2(51)) comparisons locate any QP.
inline constexpr int kBisectionRounds = 6;

/// Width of the initial JND search interval.
inline constexpr double kInitialInterval = 51.0;

/// Probability that a subject answers consistently with their latent JND at
/// round l (1-based). Values must stay in [0.5, 1] and be non-increasing in l.
using ConfidenceSchedule = std::function<double(int round)>;

/// p_l = 1 - 0.5 * (l - 1) / (L - 1) * noise. noise = 0 gives a
/// deterministic subject; noise = 1 makes the final round a coin flip.
[[nodiscard]] ConfidenceSchedule linear_schedule(double noise, int rounds = kBisectionRounds);

struct SubjectModel {
  double latent_jnd = 0.0;
  ConfidenceSchedule confidence = linear_schedule(0.0);
  std::uint64_t seed = 0;
};

struct BisectionTrace {
  int anchor_qp = 0;
  std::vector<int> compared_qp;  ///< QP shown against the anchor at each round
  std::vector<int> responses;    ///< 1 = noticeable, 0 = not noticeable
  std::vector<double> intervals; ///< nominal interval width at each round
  int result_qp = 0;

  [[nodiscard]] int rounds() const noexcept { return static_cast<int>(responses.size()); }
};

/// Nominal search interval at round l: 51 / 2^l. l must lie in [1, rounds].
[[nodiscard]] double interval_width(int round, int rounds = kBisectionRounds);

/// Real-valued JND offset implied by a full response vector,
/// sum over l of (1 - X_l) * 51 / 2^l. Requires exactly kBisectionRounds bits.
[[nodiscard]] double closed_form_jnd(std::span<const int> responses);

/// Response vector an idealised real-valued bisection produces for a
/// deterministic subject whose JND offset from the anchor is `latent_offset`.
[[nodiscard]] std::vector<int> ideal_responses(double latent_offset);

/// Integer binary search over [anchor_qp + 1, 51]. A consistent subject
/// notices clip j iff j >= round(latent_jnd); at round l the subject answers
/// consistently with probability p_l.
[[nodiscard]] BisectionTrace run_bisection(const SubjectModel& subject, int anchor_qp);

struct CampaignSpec {
  double mu = 27.0;
  double sigma = 4.0;
  int subjects = 30;
  int rounds = kBisectionRounds;
  int anchor_qp = 0;
  double noise = 0.0;
  std::uint64_t seed = 1;
  std::string clip_id = "synthetic";
  Resolution resolution = Resolution::k1080p;
  int jnd_order = 1;

  /// Throws InvalidInput when the panel, anchor, latent distribution or
  /// noise schedule is out of range.
  void validate() const;
};

/// Draws latent JNDs from Normal(mu, sigma^2) truncated to (anchor_qp, 51]
/// and runs one bisection per subject. Subject m uses an RNG stream derived
/// from (seed, m), so results do not depend on evaluation order.
[[nodiscard]] JndSampleSet simulate_campaign(const CampaignSpec& spec);

}  // namespace jndsur
