/*
   Copyright 2026 The bhnoma Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bhnoma/channel.hpp"
#include "bhnoma/linkmodel.hpp"
#include "bhnoma/scenario.hpp"

namespace bhnoma {

/// Sum of squared capacity-demand gaps. Throws LengthMismatch.
double objective(const std::vector<double>& rates, const std::vector<double>& demands);

/// Y = D - sum_{tau < t} R_tau, not floored. history[tau][user].
std::vector<double> residual_demand(const std::vector<double>& demands,
                                    const std::vector<std::vector<double>>& history, int t);

/// Channel quantities of one NOMA pair on its shared carrier set, all in W.
/// h_nn = Ps ||diag(h_n) g_n||^2, h_mm likewise for m, h_mn = Ps ||diag(h_m) g_n||^2.
struct PairGains {
    double h_nn = 0.0;
    double h_mm = 0.0;
    double h_mn = 0.0;
    double zeta = 1.0;
};

/// The pair surrogate in its printed log-domain form (natural log):
/// log{1 + h_nn a_n zeta + h_mm a_m zeta + h_nn h_mn a_n^2 + h_nn h_mm a_m a_n
///     - theta zeta (2 zeta + h_mn a_n)}.
/// Throws NonPositiveLogArgument when the bracket is not positive.
double surrogate(double theta, double a_n, double a_m, const PairGains& g);

/// Ratio that zeroes the bracket correction of `surrogate`:
/// [(h_mn a_n + zeta) h_nn a_n + (a_m zeta + h_nn a_m a_n) h_mm] / [zeta (2 zeta + h_mn a_n)].
double update_theta(double a_n, double a_m, const PairGains& g);

/// Link of one pair as seen by the power solver. Gains include Ps and are
/// summed over the shared carriers; rate_scale converts log2(1 + SINR) to
/// bit/s (|S| W / N).
struct PairLink {
    double gain_n = 0.0;
    double gain_m = 0.0;
    double zeta_n = 1.0;
    double zeta_m = 1.0;
    double rate_scale = 1.0;
};

double rate_n(const PairLink& link, double a_n);
double rate_m(const PairLink& link, double a_n);
/// (R_n - y_n)^2 + (R_m - y_m)^2 at split a_n.
double pair_gap(const PairLink& link, double a_n, double y_n, double y_m);

inline constexpr double kMinPowerFraction = 1e-9;

struct PowerOptions {
    int max_iterations = 50;  // N2
    double theta_tolerance = 1e-6;
    double split_tolerance = 1e-6;  // relative to a_n
};

struct PowerSolution {
    double a_n = 0.5;
    double gap = 0.0;          // pair_gap at a_n
    int iterations = 0;
    bool converged = false;    // false: cap hit, best iterate returned
    std::vector<double> trace; // pair_gap after each outer iteration
};

/// Fractional-programming power split for one pair. Each outer iteration
/// freezes theta_phi = SINR_phi(a) and minimises the squared gap of the
/// linearised-ratio rates
///   c log2(1 + theta + (A(a) - theta B(a)) / B(a_k))
/// over a_n in [1e-9, 0.5], searched in log a_n since useful splits at high
/// SNR sit anywhere from 1e-8 to 0.5; theta is then refreshed. A backtracking guard keeps
/// the true gap monotone nonincreasing across iterations.
PowerSolution optimize_power_pair(const PairLink& link, double target_n, double target_m,
                                  const PowerOptions& options = {});

/// Carrier patterns for P co-scheduled pairs on K carriers with at most Q
/// per pair. Lexicographic optimum of (fewest carrier collisions between
/// different pairs, most carriers in use). `carrier_gain[p][k]` breaks the
/// remaining freedom greedily, strongest pair first; pass an empty table for
/// index order.
std::vector<std::uint32_t> match_subcarriers(int pairs, int K, int Q,
                                             const std::vector<std::vector<double>>& carrier_gain = {});

/// Sum over unordered pairs of users that are not partners of |S_u & S_v|.
/// `unit_masks` holds one carrier mask per pair (both partners share it).
long long intra_beam_overlap(const std::vector<std::uint32_t>& unit_masks);

/// Per-user patterns with a proposed pairing; partners that share no carrier
/// are re-matched by exchanging edge users between pairs.
struct ExchangeResult {
    std::vector<UserPair> pairs;
    std::vector<int> demoted;  // users left without a compatible partner
    int exchanges = 0;
};
ExchangeResult exchange_partners(const std::vector<UserPair>& pairs,
                                 const std::vector<std::uint32_t>& user_masks);
/// As exchange_partners, but throws InfeasibleMatching when any user is demoted.
std::vector<UserPair> exchange_partners_strict(const std::vector<UserPair>& pairs,
                                               const std::vector<std::uint32_t>& user_masks);

enum class ServiceMode { Noma, Orthogonal };
enum class BeamSelection { ResidualNeed, MaxSinr, Periodic };

struct SchedulerOptions {
    ServiceMode service = ServiceMode::Noma;
    BeamSelection selection = BeamSelection::ResidualNeed;
    bool preallocate = true;
    /// Outer passes stop after this many consecutive passes without a lower
    /// objective; 0 runs until the schedule repeats or the pass cap.
    int stall_passes = 5;
};

struct WindowResult {
    ResourcePlan plan;
    std::vector<double> capacity;     // per user, bit/s summed over slots
    double objective = 0.0;
    std::vector<double> trace;        // best objective after each pass; the min-rate
                                      // repair may raise `objective` above the last entry
    int passes = 0;
    int power_solves = 0;
    int power_not_converged = 0;
    std::vector<int> min_rate_failures;  // users still below min(R_min, D)
    bool feasible = true;
};

/// Slot-by-slot beam illumination driven by residual demand, with per-beam
/// carrier matching and power splits inside each slot.
WindowResult allocate_timeslots(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                                const std::vector<ChannelState>& channels,
                                const SchedulerOptions& options = {});

/// Pre-allocation phase alone: beam b is lit in slot floor(b / B0).
std::vector<std::vector<int>> preallocation(const ScenarioConfig& cfg);

/// Per-slot relaxed beam need: remaining demand over estimated per-slot beam
/// capacity. Beams whose users are all served carry +infinity as a removal
/// marker and are never lit again.
inline constexpr double kRemovedBeam = std::numeric_limits<double>::infinity();

}  // namespace bhnoma
