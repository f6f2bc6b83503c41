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


#include "bhnoma/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "bhnoma/errors.hpp"
#include "bhnoma/rng.hpp"
#include "bhnoma/units.hpp"

namespace bhnoma {

double wavelength(const ScenarioConfig& cfg) { return kSpeedOfLight / cfg.carrier_frequency; }

double path_constant(const ScenarioConfig& cfg, double distance) {
    const double free_space = wavelength(cfg) / (4.0 * std::numbers::pi * distance);
    return std::sqrt(cfg.rx_gain) * free_space * std::sqrt(cfg.tx_gain);
}

double ChannelState::estimated_norm(int user, std::uint32_t mask) const {
    double sum = 0.0;
    for (int k = 0; k < carriers; ++k) {
        if (mask & (1u << k)) sum += estimated_gain(user, k);
    }
    return sum;
}

double ChannelState::effective_norm(int user) const {
    double sum = 0.0;
    for (int k = 0; k < carriers; ++k) sum += estimated_gain(user, k);
    return sum;
}

double ChannelState::interbeam_gain(int user, int beam, int k) const {
    CounterStream s(seed, StreamDomain::InterbeamFading, static_cast<std::uint32_t>(slot),
                    static_cast<std::uint32_t>(user),
                    static_cast<std::uint32_t>(beam * carriers + k));
    return std::norm(s.complex_normal(1.0));
}

ChannelState draw_channels(const ScenarioConfig& cfg, const std::vector<UserTerminal>& users,
                           std::uint64_t seed, int slot) {
    ChannelState ch;
    ch.seed = seed;
    ch.slot = slot;
    ch.user_count = static_cast<int>(users.size());
    ch.carriers = cfg.subcarriers_per_beam;
    ch.path_factor.resize(users.size());
    ch.fading.resize(users.size() * static_cast<std::size_t>(ch.carriers));
    ch.error.resize(ch.fading.size());

    const double omega = cfg.channel_error_variance;
    for (std::size_t i = 0; i < users.size(); ++i) {
        const auto& u = users[i];
        ch.path_factor[i] = path_constant(cfg, u.slant_distance);
        for (int k = 0; k < ch.carriers; ++k) {
            const auto slot_key = static_cast<std::uint32_t>(slot);
            const auto user_key = static_cast<std::uint32_t>(u.user_id);
            const auto k_key = static_cast<std::uint32_t>(k);
            const std::size_t j = i * static_cast<std::size_t>(ch.carriers) + k;
            CounterStream fade(seed, StreamDomain::Fading, slot_key, user_key, k_key);
            ch.fading[j] = fade.complex_normal(1.0);
            if (omega > 0.0) {
                CounterStream err(seed, StreamDomain::EstimationError, slot_key, user_key, k_key);
                ch.error[j] = err.complex_normal(omega);
            }
        }
    }
    return ch;
}

std::vector<ChannelState> draw_window(const ScenarioConfig& cfg,
                                      const std::vector<UserTerminal>& users, std::uint64_t seed) {
    std::vector<ChannelState> window;
    window.reserve(static_cast<std::size_t>(cfg.window_slots));
    for (int t = 0; t < cfg.window_slots; ++t) window.push_back(draw_channels(cfg, users, seed, t));
    return window;
}

BeamPairing order_and_pair_by_gain(const std::vector<int>& user_ids,
                                   const std::vector<double>& gains) {
    if (user_ids.size() != gains.size()) throw LengthMismatch("user and gain lists differ in length");
    if (user_ids.size() % 2 != 0) {
        throw OddUserCount("pairing needs an even number of users, got " +
                           std::to_string(user_ids.size()));
    }
    std::vector<std::size_t> idx(user_ids.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (gains[a] != gains[b]) return gains[a] > gains[b];
        return user_ids[a] < user_ids[b];
    });
    BeamPairing out;
    for (auto i : idx) out.order.push_back(user_ids[i]);
    const std::size_t half = out.order.size() / 2;
    for (std::size_t i = 0; i < half; ++i) out.pairs.push_back({out.order[i], out.order[half + i]});
    return out;
}

BeamPairing order_and_pair(const ChannelState& channel, const std::vector<int>& beam_users) {
    std::vector<double> gains;
    gains.reserve(beam_users.size());
    for (int u : beam_users) gains.push_back(channel.effective_norm(u));
    return order_and_pair_by_gain(beam_users, gains);
}

double gamma_cdf(int shape, double z) {
    if (z <= 0.0) return 0.0;
    if (z < shape) {
        // Lower series e^{-z} z^K / K! * sum_j z^j / ((K+1)...(K+j)); avoids
        // the cancellation of 1 - tail when the tail is close to 1.
        double term = 1.0;
        double sum = 1.0;
        for (int j = 1; j < 1000; ++j) {
            term *= z / (shape + j);
            sum += term;
            if (term < sum * 1e-17) break;
        }
        const double log_lead = -z + shape * std::log(z) - std::lgamma(shape + 1.0);
        return std::min(1.0, std::exp(log_lead) * sum);
    }
    return 1.0 - gamma_tail(shape, z);
}

double gamma_tail(int shape, double z) {
    if (z <= 0.0) return 1.0;
    if (z < shape) return 1.0 - gamma_cdf(shape, z);
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < shape; ++i) {
        term *= z / i;
        sum += term;
    }
    return std::min(1.0, std::exp(-z) * sum);
}

double gamma_pdf(int shape, double z) {
    if (z < 0.0) return 0.0;
    if (z == 0.0) return shape == 1 ? 1.0 : 0.0;
    return std::exp((shape - 1) * std::log(z) - z - std::lgamma(shape));
}

}  // namespace bhnoma
