#pragma once

#include <array>
#include <optional>
#include <string>

#include "steerdi/behavior.hpp"
#include "steerdi/rng.hpp"
#include "steerdi/witness.hpp"

namespace steerdi {

/// Full four-photon protocol configuration. Defaults reproduce the ideal
/// protocol: Alice-Bob pair in werner(v), Bob-Charlie pair in |Phi+_2>,
/// Alice's three Paulis, Bob's partial BSM and six CHSH observables,
/// Charlie's axes (sx, -sy, sz).
struct ProtocolConfig {
  double visibility = 1.0;       // Werner v for the Alice-Bob pair
  double phi_visibility = 1.0;   // depolarization of the Bob-Charlie |Phi+_2>
  std::optional<double> alice_flip;  // extra outcome-flip noise, probability in [0, 1/2]

  void validate() const {
    if (visibility < 0 || visibility > 1)
      throw std::invalid_argument("ProtocolConfig: visibility must be in [0,1]");
    if (phi_visibility < 0 || phi_visibility > 1)
      throw std::invalid_argument("ProtocolConfig: phi_visibility must be in [0,1]");
    if (alice_flip && (*alice_flip < 0 || *alice_flip > 0.5))
      throw std::invalid_argument("ProtocolConfig: alice_flip must be in [0,1/2]");
  }
};

/// Flip Alice's outcome label with probability p_flip, as an exact transform
/// on the behavior tables. Applied to the ideal singlet behavior with
/// p = (1-v)/2 this reproduces the werner(v) behavior cell by cell.
inline Behavior apply_alice_flip(Behavior beh, double p_flip) {
  if (p_flip < 0 || p_flip > 0.5) throw std::invalid_argument("apply_alice_flip: p must be in [0,1/2]");
  for (int x = 0; x < 3; ++x)
    for (int z = 0; z < 3; ++z) {
      if (!beh.has_steer[x][z]) continue;
      for (int ib = 0; ib < 2; ++ib)
        for (int ic = 0; ic < 2; ++ic) {
          const double plus = beh.steer[x][z][0][ib][ic];
          const double minus = beh.steer[x][z][1][ib][ic];
          beh.steer[x][z][0][ib][ic] = (1 - p_flip) * plus + p_flip * minus;
          beh.steer[x][z][1][ib][ic] = (1 - p_flip) * minus + p_flip * plus;
        }
    }
  return beh;
}

/// Born-rule behavior of the four-party state rho_AB (x) rho_B0C under the
/// protocol measurements; all 9 steering settings and all 18 correlator cells.
inline Behavior exact_behavior(const ProtocolConfig& cfg) {
  cfg.validate();
  const DenseOperator rho_ab = werner(cfg.visibility);
  const DenseOperator rho_bc = depolarized_phi_plus(cfg.phi_visibility);
  const DenseOperator state = kron(rho_ab, rho_bc);  // A B B0 C
  const Povm bsm = partial_bsm(2);

  Behavior beh;
  for (int x = 1; x <= 3; ++x)
    for (int z = 1; z <= 3; ++z) {
      beh.has_steer[x - 1][z - 1] = true;
      for (int a = -1; a <= 1; a += 2) {
        const DenseOperator pa =
            (DenseOperator::identity(2) + pauli(x).matrix * cplx(a, 0)) * cplx(0.5, 0);
        for (int bob = 0; bob < 2; ++bob)
          for (int c = -1; c <= 1; c += 2) {
            const DenseOperator eff =
                kron(kron(pa, bsm.elements[static_cast<size_t>(bob)]), charlie_projector(c, z));
            beh.steer[x - 1][z - 1][a == 1 ? 0 : 1][bob][c == 1 ? 0 : 1] =
                real_trace_of_product(eff, state);
          }
      }
    }

  for (int y = 1; y <= 6; ++y)
    for (int z = 1; z <= 3; ++z) {
      beh.chsh_e[y - 1][z - 1] =
          real_trace_of_product(kron(bob_selftest_observable(y).matrix, charlie_axis(z)), rho_bc);
      beh.has_chsh[y - 1][z - 1] = true;
    }

  if (cfg.alice_flip) beh = apply_alice_flip(beh, *cfg.alice_flip);
  return beh;
}

/// Plain Alice-Bob CHSH on the werner pair (steerability baseline): optimal
/// settings give 2*sqrt(2)*v. Returns (E11, E12, E21, E22); the CHSH value is
/// E11 + E12 + E21 - E22.
inline std::array<double, 4> ab_chsh_correlators(const ProtocolConfig& cfg) {
  cfg.validate();
  const DenseOperator rho = werner(cfg.visibility);
  const double inv = 1.0 / std::sqrt(2.0);
  const DenseOperator a1 = pauli_z(), a2 = pauli_x();
  const DenseOperator b1 = (pauli_z() + pauli_x()) * cplx(-inv, 0);
  const DenseOperator b2 = (pauli_x() - pauli_z()) * cplx(inv, 0);
  return {real_trace_of_product(kron(a1, b1), rho), real_trace_of_product(kron(a1, b2), rho),
          real_trace_of_product(kron(a2, b1), rho), real_trace_of_product(kron(a2, b2), rho)};
}

inline double ab_chsh_value(const ProtocolConfig& cfg) {
  const auto e = ab_chsh_correlators(cfg);
  return e[0] + e[1] + e[2] - e[3];
}

/// Event budgets: per steering setting (x,z) and per CHSH line (split evenly
/// over the line's four (y,z) settings).
struct SamplingBudget {
  long long steer_per_setting = 1000000;
  long long chsh_per_line = 1000000;
};

/// Finite-statistics record: multinomial event counts per setting, with the
/// provenance needed to reproduce them.
struct CountsRecord {
  ProtocolConfig config;
  SamplingBudget budget;
  std::uint64_t seed = 0;

  // [x-1][z-1][a slot][bob slot][c slot]
  std::array<std::array<std::array<std::array<std::array<long long, 2>, 2>, 2>, 3>, 3> steer{};
  std::array<std::array<bool, 3>, 3> has_steer{};
  // [y-1][z-1][b slot][c slot]
  std::array<std::array<std::array<std::array<long long, 2>, 2>, 3>, 6> chsh{};
  std::array<std::array<bool, 3>, 6> has_chsh{};

  long long steer_total(int x, int z) const {
    long long t = 0;
    for (const auto& pa : steer[x - 1][z - 1])
      for (const auto& pb : pa)
        for (long long v : pb) t += v;
    return t;
  }
  long long chsh_total(int y, int z) const {
    long long t = 0;
    for (const auto& pb : chsh[y - 1][z - 1])
      for (long long v : pb) t += v;
    return t;
  }
};

namespace protocol_detail {
// stream tags: steering settings 0..8, chsh settings 9..26
inline std::uint64_t steer_tag(int x, int z) { return static_cast<std::uint64_t>((x - 1) * 3 + (z - 1)); }
inline std::uint64_t chsh_tag(int y, int z) { return 9 + static_cast<std::uint64_t>((y - 1) * 3 + (z - 1)); }
}  // namespace protocol_detail

/// Multinomial draw per setting; per-setting substreams keyed on (seed, tag)
/// so results do not depend on sampling order.
inline CountsRecord sample_counts(const Behavior& beh, const ProtocolConfig& cfg,
                                  const SamplingBudget& budget, std::uint64_t seed) {
  if (budget.steer_per_setting < 1 || budget.chsh_per_line < 1)
    throw std::invalid_argument("sample_counts: budgets must be >= 1");
  beh.validate();

  CountsRecord rec;
  rec.config = cfg;
  rec.budget = budget;
  rec.seed = seed;

  for (int x = 1; x <= 3; ++x)
    for (int z = 1; z <= 3; ++z) {
      if (!beh.has_steer[x - 1][z - 1]) continue;
      rec.has_steer[x - 1][z - 1] = true;
      std::vector<double> probs;
      probs.reserve(8);
      for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib)
          for (int ic = 0; ic < 2; ++ic) probs.push_back(beh.steer[x - 1][z - 1][ia][ib][ic]);
      Rng rng = Rng::stream(seed, protocol_detail::steer_tag(x, z));
      const auto counts = multinomial_sample(budget.steer_per_setting, probs, rng);
      int k = 0;
      for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib)
          for (int ic = 0; ic < 2; ++ic) rec.steer[x - 1][z - 1][ia][ib][ic] = counts[static_cast<size_t>(k++)];
    }

  for (const auto& ln : kChshLines) {
    const std::array<std::pair<int, int>, 4> cells{{{ln.y_plus, ln.pauli_i},
                                                    {ln.y_minus, ln.pauli_i},
                                                    {ln.y_plus, ln.pauli_j},
                                                    {ln.y_minus, ln.pauli_j}}};
    for (size_t ci = 0; ci < cells.size(); ++ci) {
      const auto [y, z] = cells[ci];
      if (!beh.has_chsh[y - 1][z - 1]) continue;
      rec.has_chsh[y - 1][z - 1] = true;
      long long n = budget.chsh_per_line / 4;
      if (ci < static_cast<size_t>(budget.chsh_per_line % 4)) ++n;
      // joint outcome distribution with unbiased local marginals
      const double e = std::clamp(beh.chsh_e[y - 1][z - 1], -1.0, 1.0);
      const std::vector<double> probs{(1 + e) / 4, (1 - e) / 4, (1 - e) / 4, (1 + e) / 4};
      Rng rng = Rng::stream(seed, protocol_detail::chsh_tag(y, z));
      const auto counts = multinomial_sample(n, probs, rng);
      rec.chsh[y - 1][z - 1][0][0] = counts[0];  // b=+1, c=+1
      rec.chsh[y - 1][z - 1][0][1] = counts[1];  // b=+1, c=-1
      rec.chsh[y - 1][z - 1][1][0] = counts[2];
      rec.chsh[y - 1][z - 1][1][1] = counts[3];
    }
  }
  return rec;
}

inline CountsRecord sample_counts(const ProtocolConfig& cfg, const SamplingBudget& budget,
                                  std::uint64_t seed) {
  return sample_counts(exact_behavior(cfg), cfg, budget, seed);
}

/// Empirical frequencies with per-cell standard errors sqrt(p(1-p)/n).
/// A setting with zero recorded events is a hard error.
inline Behavior estimate_behavior(const CountsRecord& rec) {
  Behavior beh;
  for (int x = 1; x <= 3; ++x)
    for (int z = 1; z <= 3; ++z) {
      if (!rec.has_steer[x - 1][z - 1]) continue;
      const long long total = rec.steer_total(x, z);
      if (total <= 0)
        throw std::invalid_argument("estimate_behavior: zero events at steering setting (x=" +
                                    std::to_string(x) + ",z=" + std::to_string(z) + ")");
      beh.has_steer[x - 1][z - 1] = true;
      for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib)
          for (int ic = 0; ic < 2; ++ic) {
            const double p = static_cast<double>(rec.steer[x - 1][z - 1][ia][ib][ic]) /
                             static_cast<double>(total);
            beh.steer[x - 1][z - 1][ia][ib][ic] = p;
            beh.steer_se[x - 1][z - 1][ia][ib][ic] =
                std::sqrt(std::max(0.0, p * (1 - p) / static_cast<double>(total)));
          }
    }
  beh.has_steer_se = true;

  for (int y = 1; y <= 6; ++y)
    for (int z = 1; z <= 3; ++z) {
      if (!rec.has_chsh[y - 1][z - 1]) continue;
      const long long total = rec.chsh_total(y, z);
      if (total <= 0)
        throw std::invalid_argument("estimate_behavior: zero events at correlator setting (y=" +
                                    std::to_string(y) + ",z=" + std::to_string(z) + ")");
      double e = 0;
      for (int ib = 0; ib < 2; ++ib)
        for (int ic = 0; ic < 2; ++ic)
          e += slot_outcome(ib) * slot_outcome(ic) *
               static_cast<double>(rec.chsh[y - 1][z - 1][ib][ic]);
      e /= static_cast<double>(total);
      beh.has_chsh[y - 1][z - 1] = true;
      beh.chsh_e[y - 1][z - 1] = e;
      beh.chsh_se[y - 1][z - 1] = std::sqrt(std::max(0.0, (1 - e * e) / static_cast<double>(total)));
    }
  beh.has_chsh_se = true;
  return beh;
}

namespace protocol_detail {

inline CountsRecord poisson_resample(const CountsRecord& rec, Rng& rng) {
  CountsRecord out = rec;
  for (int x = 0; x < 3; ++x)
    for (int z = 0; z < 3; ++z) {
      if (!rec.has_steer[x][z]) continue;
      for (auto& pa : out.steer[x][z])
        for (auto& pb : pa)
          for (auto& v : pb) v = poisson_sample(static_cast<double>(v), rng);
    }
  for (int y = 0; y < 6; ++y)
    for (int z = 0; z < 3; ++z) {
      if (!rec.has_chsh[y][z]) continue;
      for (auto& pb : out.chsh[y][z])
        for (auto& v : pb) v = poisson_sample(static_cast<double>(v), rng);
    }
  return out;
}

}  // namespace protocol_detail

/// Poisson bootstrap of the payoff: resample every cell count, re-estimate,
/// re-evaluate; the report carries the resample mean and standard deviation.
inline WitnessReport bootstrap_witness(const CountsRecord& rec, const std::array<double, 3>& f,
                                       int resamples, std::uint64_t seed) {
  if (resamples < 100) throw std::invalid_argument("bootstrap_witness: need at least 100 resamples");
  Rng rng = Rng::stream(seed, 0xb007ULL);
  double sum = 0, sum2 = 0;
  for (int r = 0; r < resamples; ++r) {
    const CountsRecord res = protocol_detail::poisson_resample(rec, rng);
    const double value = payoff_eq7(estimate_behavior(res), f).value;
    sum += value;
    sum2 += value * value;
  }
  const double mean = sum / resamples;
  const double var = std::max(0.0, sum2 / resamples - mean * mean);
  WitnessReport rep = make_report(WitnessKind::payoff, mean, 0.0, std::sqrt(var));
  return rep;
}

/// Same bootstrap for the triple Bell lines.
inline TripleBellResult bootstrap_triple_bell(const CountsRecord& rec, int resamples,
                                              std::uint64_t seed) {
  if (resamples < 100) throw std::invalid_argument("bootstrap_triple_bell: need at least 100 resamples");
  Rng rng = Rng::stream(seed, 0xce11ULL);
  std::array<double, 3> sum{}, sum2{};
  double tsum = 0, tsum2 = 0;
  for (int r = 0; r < resamples; ++r) {
    const CountsRecord res = protocol_detail::poisson_resample(rec, rng);
    const auto tb = triple_bell(estimate_behavior(res));
    for (int k = 0; k < 3; ++k) {
      sum[static_cast<size_t>(k)] += tb.lines[static_cast<size_t>(k)];
      sum2[static_cast<size_t>(k)] += tb.lines[static_cast<size_t>(k)] * tb.lines[static_cast<size_t>(k)];
    }
    tsum += tb.report.value;
    tsum2 += tb.report.value * tb.report.value;
  }
  TripleBellResult out;
  out.has_se = true;
  for (int k = 0; k < 3; ++k) {
    const double mean = sum[static_cast<size_t>(k)] / resamples;
    out.lines[static_cast<size_t>(k)] = mean;
    out.line_se[static_cast<size_t>(k)] =
        std::sqrt(std::max(0.0, sum2[static_cast<size_t>(k)] / resamples - mean * mean));
  }
  const double tmean = tsum / resamples;
  out.report = make_report(WitnessKind::triple_bell, tmean, 6.0,
                           std::sqrt(std::max(0.0, tsum2 / resamples - tmean * tmean)));
  return out;
}

}  // namespace steerdi
