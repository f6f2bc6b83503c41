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

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "bhnoma/scenario.hpp"

namespace bhnoma {

/// Free-space path factor sqrt(Gr) * lambda / (4 pi d) * sqrt(Gt).
double path_constant(const ScenarioConfig& cfg, double distance);
double wavelength(const ScenarioConfig& cfg);

/// Channel realisation for one slot. Coefficients are stored normalised
/// (unit-variance fading eta, estimation error e ~ CN(0, omega*)); the
/// physical coefficients are chi * eta and chi * (eta + e).
struct ChannelState {
    std::uint64_t seed = 0;
    int slot = 0;
    int user_count = 0;
    int carriers = 0;  // K
    std::vector<double> path_factor;             // chi per user
    std::vector<std::complex<double>> fading;    // eta, index user * K + k
    std::vector<std::complex<double>> error;     // e, same layout

    std::complex<double> true_coefficient(int user, int k) const {
        return path_factor[user] * fading[idx(user, k)];
    }
    std::complex<double> estimated_coefficient(int user, int k) const {
        return path_factor[user] * (fading[idx(user, k)] + error[idx(user, k)]);
    }
    double estimated_gain(int user, int k) const { return std::norm(estimated_coefficient(user, k)); }
    /// Sum of estimated gains over the carriers in `mask` (bit k = carrier k).
    double estimated_norm(int user, std::uint32_t mask) const;
    /// ||h_bar||^2 over all K carriers; the ordering key.
    double effective_norm(int user) const;
    /// Unit-mean power of the coupling coefficient from interfering beam
    /// `beam` into `user` on carrier k. Drawn from its own substream so it
    /// does not depend on evaluation order.
    double interbeam_gain(int user, int beam, int k) const;

private:
    std::size_t idx(int user, int k) const {
        return static_cast<std::size_t>(user) * static_cast<std::size_t>(carriers) +
               static_cast<std::size_t>(k);
    }
};

ChannelState draw_channels(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                           std::uint64_t seed, int slot);

/// One channel realisation per slot of the window.
std::vector<ChannelState> draw_window(const ScenarioConfig& cfg,
                                      const std::vector<UserTerminal>& users, std::uint64_t seed);

struct UserPair {
    int n = -1;  // stronger (beam-centre) user
    int m = -1;  // weaker (beam-edge) user
};

struct BeamPairing {
    std::vector<int> order;  // users by decreasing effective norm
    std::vector<UserPair> pairs;
};

/// Median split of `beam_users` by effective norm and rank-symmetric
/// pairing (i-th strongest centre user with i-th strongest edge user).
/// Ties are broken by lower user index. Throws OddUserCount.
BeamPairing order_and_pair(const ChannelState& channel, const std::vector<int>& beam_users);

/// Same rule on raw gains; exposed for testing and for callers that keep
/// their own gain tables.
BeamPairing order_and_pair_by_gain(const std::vector<int>& user_ids,
                                   const std::vector<double>& gains);

/// Gamma(K, 1) distribution of Z = sum of K unit exponentials.
double gamma_cdf(int shape, double z);
double gamma_tail(int shape, double z);
double gamma_pdf(int shape, double z);

}  // namespace bhnoma
