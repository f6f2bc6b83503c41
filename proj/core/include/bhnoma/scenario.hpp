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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bhnoma {

enum class ReuseMode { OneColor, TwoColor, FourColor };

std::string to_string(ReuseMode mode);
/// Accepts "one_color"/"1c", "two_color"/"2c", "four_color"/"4c".
ReuseMode parse_reuse_mode(std::string_view text);

struct GeoPoint {
    double lon_deg = 0.0;
    double lat_deg = 0.0;
};

/// Static description of one beam-hopping downlink. All powers and gains are
/// stored in linear units; the scenario file carries them in dBW / dBi.
struct ScenarioConfig {
    double carrier_frequency = 11.7e9;      // Hz
    double bandwidth_per_carrier = 200e6;   // Hz (W)
    int total_subcarriers = 4;              // N
    int subcarriers_per_beam = 4;           // K
    int max_carriers_per_user = 2;          // Q
    int users_per_beam = 8;                 // M
    int beam_count = 48;                    // B
    int max_active_beams = 8;               // B0
    int window_slots = 32;                  // T

    double satellite_altitude = 1'000'000.0;  // m
    GeoPoint satellite_position{101.0, 0.0};
    double coverage_lon_min = 85.0;
    double coverage_lon_max = 115.0;
    double coverage_lat_min = -15.0;
    double coverage_lat_max = 15.0;

    double tx_power = 3.1622776601683795;        // W, 5 dBW
    double noise_power = 3.1622776601683795e-15; // W, -145 dBW
    double tx_gain = 91201.083935590985;          // linear, 49.6 dBi
    double rx_gain = 16218.100973589298;          // linear, 42.1 dBi

    double channel_error_variance = 0.0;  // omega*
    double demand_min = 200e6;            // bit/s
    double demand_max = 1.4e9;            // bit/s
    double min_rate = 5e6;                // bit/s

    ReuseMode reuse_mode = ReuseMode::OneColor;
    double slot_overlap_fraction = 0.2;  // kappa, fraction of T
    double beam_radius = 0.0;            // m; 0 selects the packing-derived radius

    double interbeam_attenuation = 0.1;  // linear, -10 dB
    double interference_inr = 10.0;      // linear INR per co-active interfering beam, 10 dB

    int optimizer_n1 = 50;
    int optimizer_n2 = 50;
    int optimizer_n3 = 50;
    std::uint64_t master_seed = 1;

    bool code_domain() const { return subcarriers_per_beam > 1; }
    int user_count() const { return beam_count * users_per_beam; }
};

enum class UserRole { Unassigned, BeamCenter, BeamEdge };

struct UserTerminal {
    int user_id = 0;
    int beam_id = 0;
    GeoPoint position;
    double slant_distance = 0.0;  // m
    double demand = 0.0;          // bit/s
    UserRole role = UserRole::Unassigned;
};

struct BeamLayout {
    std::vector<GeoPoint> centers;
    double radius = 0.0;  // m
};

/// Parse the flat `key = value` scenario format. Unlisted keys keep their
/// Table-II defaults. Throws ParseError on malformed input and
/// ValidationError when the parsed record breaks an invariant.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Throws ValidationError naming the first violated invariant.
void validate(const ScenarioConfig& cfg);

/// Canonical scenario text; parse_scenario(to_scenario_text(c)) reproduces c.
std::string to_scenario_text(const ScenarioConfig& cfg);
std::uint64_t scenario_hash(const ScenarioConfig& cfg);

/// Central angle between two points on the spherical Earth, radians.
double central_angle(GeoPoint a, GeoPoint b);
double slant_range(GeoPoint user, const ScenarioConfig& cfg);

/// Deterministic hexagonal packing of the B beam centres over the coverage
/// rectangle.
BeamLayout beam_layout(const ScenarioConfig& cfg);
int nearest_beam(const BeamLayout& layout, GeoPoint p);

/// B*M users, exactly M per beam; user_id = beam_id * M + local index.
std::vector<UserTerminal> generate_users(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace bhnoma
