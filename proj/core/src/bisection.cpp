#include "jndsur/bisection.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "jndsur/error.hpp"

namespace jndsur {
namespace {

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

ConfidenceSchedule linear_schedule(double noise, int rounds) {
  if (!(noise >= 0.0 && noise <= 1.0)) {
    throw InvalidInput("confidence schedule: noise must lie in [0, 1]");
  }
  if (rounds < 2) {
    throw InvalidInput("confidence schedule: at least 2 rounds required");
  }
  return [noise, rounds](int round) {
    const int l = std::clamp(round, 1, rounds);
    return 1.0 - 0.5 * static_cast<double>(l - 1) / static_cast<double>(rounds - 1) * noise;
  };
}

double interval_width(int round, int rounds) {
  if (round < 1 || round > rounds) {
    throw InvalidInput("interval_width: round " + std::to_string(round) + " outside [1, " +
                       std::to_string(rounds) + "]");
  }
  return std::ldexp(kInitialInterval, -round);
}

double closed_form_jnd(std::span<const int> responses) {
  if (responses.size() != static_cast<std::size_t>(kBisectionRounds)) {
    throw InvalidInput("closed_form_jnd: expected " + std::to_string(kBisectionRounds) +
                       " responses, got " + std::to_string(responses.size()));
  }
  double offset = 0.0;
  for (int l = 1; l <= kBisectionRounds; ++l) {
    const int x = responses[static_cast<std::size_t>(l - 1)];
    if (x != 0 && x != 1) {
      throw InvalidInput("closed_form_jnd: responses must be 0 or 1");
    }
    if (x == 0) offset += interval_width(l);
  }
  return offset;
}

std::vector<int> ideal_responses(double latent_offset) {
  std::vector<int> responses;
  responses.reserve(kBisectionRounds);
  double offset = 0.0;
  for (int l = 1; l <= kBisectionRounds; ++l) {
    const double probe = offset + interval_width(l);
    const int noticed = probe >= latent_offset ? 1 : 0;
    responses.push_back(noticed);
    if (!noticed) offset = probe;
  }
  return responses;
}

BisectionTrace run_bisection(const SubjectModel& subject, int anchor_qp) {
  if (anchor_qp < 0 || anchor_qp >= kMaxQp) {
    throw InvalidInput("run_bisection: anchor_qp must lie in [0, 50]");
  }
  if (!(subject.latent_jnd > anchor_qp && subject.latent_jnd <= kMaxQp)) {
    throw InvalidInput("run_bisection: latent JND must lie in (anchor_qp, 51]");
  }

  // Nearest-integer perception: clip j is noticeable iff j >= round(latent).
  const int threshold = std::clamp(static_cast<int>(std::lround(subject.latent_jnd)),
                                   anchor_qp + 1, kMaxQp);

  std::mt19937_64 rng = stream_for(subject.seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  BisectionTrace trace;
  trace.anchor_qp = anchor_qp;
  int lo = anchor_qp + 1;
  int hi = kMaxQp;
  int round = 0;
  while (lo < hi) {
    ++round;
    const int mid = lo + (hi - lo) / 2;
    const bool consistent = mid >= threshold;
    const double p = subject.confidence ? subject.confidence(round) : 1.0;
    const bool noticed = unit(rng) < p ? consistent : !consistent;
    trace.compared_qp.push_back(mid);
    trace.responses.push_back(noticed ? 1 : 0);
    trace.intervals.push_back(std::ldexp(kInitialInterval, -round));
    if (noticed) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  trace.result_qp = lo;
  return trace;
}

void CampaignSpec::validate() const {
  if (subjects < 1) {
    throw InvalidInput("campaign: at least one subject required");
  }
  if (anchor_qp < 0 || anchor_qp >= kMaxQp) {
    throw InvalidInput("campaign: anchor_qp must lie in [0, 50]");
  }
  if (!(mu > anchor_qp && mu < kMaxQp)) {
    throw InvalidInput("campaign: mu must lie in (anchor_qp, 51)");
  }
  if (!(sigma > 0.0)) {
    throw InvalidInput("campaign: sigma must be positive");
  }
  if (jnd_order < 1 || jnd_order > 3) {
    throw InvalidInput("campaign: jnd_order must be 1, 2 or 3");
  }
  (void)linear_schedule(noise, rounds);
}

JndSampleSet simulate_campaign(const CampaignSpec& spec) {
  spec.validate();
  const ConfidenceSchedule schedule = linear_schedule(spec.noise, spec.rounds);

  JndSampleSet set;
  set.clip_id = spec.clip_id;
  set.resolution = spec.resolution;
  set.jnd_order = spec.jnd_order;
  set.anchor_qp = spec.anchor_qp;
  set.samples.reserve(static_cast<std::size_t>(spec.subjects));

  constexpr int kMaxRejections = 1'000'000;
  for (int m = 0; m < spec.subjects; ++m) {
    std::mt19937_64 rng = stream_for(spec.seed, static_cast<std::uint64_t>(m) + 1);
    std::normal_distribution<double> latent_dist(spec.mu, spec.sigma);
    double latent = 0.0;
    int tries = 0;
    do {
      if (++tries > kMaxRejections) {
        throw InvalidInput("simulate_campaign: truncated latent distribution has no mass");
      }
      latent = latent_dist(rng);
    } while (!(latent > spec.anchor_qp && latent <= kMaxQp));

    SubjectModel subject{latent, schedule, rng()};
    set.samples.push_back(static_cast<double>(run_bisection(subject, spec.anchor_qp).result_qp));
  }
  return set;
}

}  // namespace jndsur
