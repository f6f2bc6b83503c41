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

#include "bhnoma/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "bhnoma/errors.hpp"
#include "bhnoma/rng.hpp"
#include "bhnoma/units.hpp"

namespace bhnoma {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view value) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto comma = value.find(',', start);
        parts.push_back(trim(value.substr(start, comma == std::string_view::npos ? value.npos
                                                                                 : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return parts;
}

double to_double(std::string_view key, std::string_view text, int line) {
    double out = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(out)) {
        throw ParseError("line " + std::to_string(line) + ": key '" + std::string(key) +
                         "' expects a number, got '" + std::string(text) + "'");
    }
    return out;
}

int to_int(std::string_view key, std::string_view text, int line) {
    long long out = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (ec != std::errc{} || ptr != end || text.empty() ||
        out < std::numeric_limits<int>::min() || out > std::numeric_limits<int>::max()) {
        throw ParseError("line " + std::to_string(line) + ": key '" + std::string(key) +
                         "' expects an integer, got '" + std::string(text) + "'");
    }
    return static_cast<int>(out);
}

std::vector<double> to_doubles(std::string_view key, std::string_view text, int line,
                               std::size_t count) {
    const auto parts = split_list(text);
    if (parts.size() != count) {
        throw ParseError("line " + std::to_string(line) + ": key '" + std::string(key) +
                         "' expects " + std::to_string(count) + " comma-separated values");
    }
    std::vector<double> out;
    for (auto p : parts) out.push_back(to_double(key, p, line));
    return out;
}

void require(bool ok, const char* invariant) {
    if (!ok) throw ValidationError(std::string("scenario violates invariant: ") + invariant);
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

std::string to_string(ReuseMode mode) {
    switch (mode) {
        case ReuseMode::OneColor: return "one_color";
        case ReuseMode::TwoColor: return "two_color";
        case ReuseMode::FourColor: return "four_color";
    }
    return "one_color";
}

ReuseMode parse_reuse_mode(std::string_view text) {
    if (text == "one_color" || text == "1c") return ReuseMode::OneColor;
    if (text == "two_color" || text == "2c") return ReuseMode::TwoColor;
    if (text == "four_color" || text == "4c") return ReuseMode::FourColor;
    throw ParseError("unknown reuse mode '" + std::string(text) + "'");
}

ScenarioConfig parse_scenario(std::string_view text) {
    ScenarioConfig cfg;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError("line " + std::to_string(line_no) + ": empty key or value");
        }

        if (key == "carrier_frequency") {
            cfg.carrier_frequency = to_double(key, value, line_no);
        } else if (key == "bandwidth_per_carrier") {
            cfg.bandwidth_per_carrier = to_double(key, value, line_no);
        } else if (key == "total_subcarriers") {
            cfg.total_subcarriers = to_int(key, value, line_no);
        } else if (key == "subcarriers_per_beam") {
            cfg.subcarriers_per_beam = to_int(key, value, line_no);
        } else if (key == "max_carriers_per_user") {
            cfg.max_carriers_per_user = to_int(key, value, line_no);
        } else if (key == "users_per_beam") {
            cfg.users_per_beam = to_int(key, value, line_no);
        } else if (key == "beam_count") {
            cfg.beam_count = to_int(key, value, line_no);
        } else if (key == "max_active_beams") {
            cfg.max_active_beams = to_int(key, value, line_no);
        } else if (key == "window_slots") {
            cfg.window_slots = to_int(key, value, line_no);
        } else if (key == "satellite_altitude") {
            cfg.satellite_altitude = to_double(key, value, line_no);
        } else if (key == "satellite_lon_lat") {
            const auto v = to_doubles(key, value, line_no, 2);
            cfg.satellite_position = {v[0], v[1]};
        } else if (key == "coverage_lon_range") {
            const auto v = to_doubles(key, value, line_no, 2);
            cfg.coverage_lon_min = v[0];
            cfg.coverage_lon_max = v[1];
        } else if (key == "coverage_lat_range") {
            const auto v = to_doubles(key, value, line_no, 2);
            cfg.coverage_lat_min = v[0];
            cfg.coverage_lat_max = v[1];
        } else if (key == "tx_power") {
            cfg.tx_power = db_to_linear(to_double(key, value, line_no));
        } else if (key == "noise_power") {
            cfg.noise_power = db_to_linear(to_double(key, value, line_no));
        } else if (key == "tx_gain") {
            cfg.tx_gain = db_to_linear(to_double(key, value, line_no));
        } else if (key == "rx_gain") {
            cfg.rx_gain = db_to_linear(to_double(key, value, line_no));
        } else if (key == "channel_error_variance") {
            cfg.channel_error_variance = to_double(key, value, line_no);
        } else if (key == "demand_range") {
            const auto v = to_doubles(key, value, line_no, 2);
            cfg.demand_min = v[0];
            cfg.demand_max = v[1];
        } else if (key == "min_rate") {
            cfg.min_rate = to_double(key, value, line_no);
        } else if (key == "reuse_mode") {
            cfg.reuse_mode = parse_reuse_mode(value);
        } else if (key == "slot_overlap_fraction") {
            cfg.slot_overlap_fraction = to_double(key, value, line_no);
        } else if (key == "beam_radius") {
            cfg.beam_radius = to_double(key, value, line_no);
        } else if (key == "interbeam_attenuation_db") {
            cfg.interbeam_attenuation = db_to_linear(to_double(key, value, line_no));
        } else if (key == "interference_inr_db") {
            cfg.interference_inr = db_to_linear(to_double(key, value, line_no));
        } else if (key == "optimizer_caps") {
            const auto v = to_doubles(key, value, line_no, 3);
            for (double c : v) {
                if (c != std::floor(c)) {
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": optimizer_caps must be integers");
                }
            }
            cfg.optimizer_n1 = static_cast<int>(v[0]);
            cfg.optimizer_n2 = static_cast<int>(v[1]);
            cfg.optimizer_n3 = static_cast<int>(v[2]);
        } else if (key == "master_seed") {
            std::uint64_t seed = 0;
            const auto* end = value.data() + value.size();
            auto [ptr, ec] = std::from_chars(value.data(), end, seed);
            if (ec != std::errc{} || ptr != end) {
                throw ParseError("line " + std::to_string(line_no) +
                                 ": master_seed expects an unsigned integer");
            }
            cfg.master_seed = seed;
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown key '" +
                             std::string(key) + "'");
        }
    }
    validate(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void validate(const ScenarioConfig& c) {
    require(c.beam_count >= 1, "beam_count B >= 1");
    require(c.max_active_beams >= 1, "max_active_beams B0 >= 1");
    require(c.max_active_beams <= c.beam_count, "B0 <= B");
    require(c.window_slots >= 1, "window_slots T >= 1");
    require(c.subcarriers_per_beam >= 1, "1 <= K");
    require(c.subcarriers_per_beam <= c.total_subcarriers, "K <= N");
    require(c.subcarriers_per_beam <= 32, "K <= 32");
    require(c.max_carriers_per_user >= 1, "1 <= Q");
    require(c.max_carriers_per_user <= c.subcarriers_per_beam, "Q <= K");
    require(c.users_per_beam >= 1, "users_per_beam M >= 1");
    require(c.subcarriers_per_beam == 1 || c.users_per_beam > c.subcarriers_per_beam,
            "M > K when K > 1 (overloaded code-domain mode)");
    require(c.carrier_frequency > 0, "carrier_frequency > 0");
    require(c.bandwidth_per_carrier > 0, "bandwidth_per_carrier > 0");
    require(c.tx_power > 0, "tx_power > 0");
    require(c.noise_power > 0, "noise_power > 0");
    require(c.tx_gain > 0, "tx_gain > 0");
    require(c.rx_gain > 0, "rx_gain > 0");
    require(c.satellite_altitude > 0, "satellite_altitude > 0");
    require(c.channel_error_variance >= 0, "channel_error_variance >= 0");
    require(c.slot_overlap_fraction >= 0 && c.slot_overlap_fraction <= 1,
            "0 <= slot_overlap_fraction <= 1");
    require(c.demand_min >= 0, "demand_min >= 0");
    require(c.demand_min <= c.demand_max, "D_min <= D_max");
    require(c.min_rate >= 0, "min_rate >= 0");
    require(c.beam_radius >= 0, "beam_radius >= 0");
    require(c.interbeam_attenuation > 0, "interbeam_attenuation > 0");
    require(c.interference_inr > 0, "interference_inr > 0");
    require(c.coverage_lon_min < c.coverage_lon_max, "coverage lon range non-empty");
    require(c.coverage_lat_min < c.coverage_lat_max, "coverage lat range non-empty");
    require(c.coverage_lat_min >= -90 && c.coverage_lat_max <= 90, "latitudes within [-90, 90]");
    require(c.optimizer_n1 >= 1 && c.optimizer_n2 >= 1 && c.optimizer_n3 >= 1,
            "optimizer caps >= 1");
}

std::string to_scenario_text(const ScenarioConfig& c) {
    std::ostringstream out;
    out << "carrier_frequency = " << fmt(c.carrier_frequency) << '\n'
        << "bandwidth_per_carrier = " << fmt(c.bandwidth_per_carrier) << '\n'
        << "total_subcarriers = " << c.total_subcarriers << '\n'
        << "subcarriers_per_beam = " << c.subcarriers_per_beam << '\n'
        << "max_carriers_per_user = " << c.max_carriers_per_user << '\n'
        << "users_per_beam = " << c.users_per_beam << '\n'
        << "beam_count = " << c.beam_count << '\n'
        << "max_active_beams = " << c.max_active_beams << '\n'
        << "window_slots = " << c.window_slots << '\n'
        << "satellite_altitude = " << fmt(c.satellite_altitude) << '\n'
        << "satellite_lon_lat = " << fmt(c.satellite_position.lon_deg) << ", "
        << fmt(c.satellite_position.lat_deg) << '\n'
        << "coverage_lon_range = " << fmt(c.coverage_lon_min) << ", " << fmt(c.coverage_lon_max)
        << '\n'
        << "coverage_lat_range = " << fmt(c.coverage_lat_min) << ", " << fmt(c.coverage_lat_max)
        << '\n'
        << "tx_power = " << fmt(linear_to_db(c.tx_power)) << '\n'
        << "noise_power = " << fmt(linear_to_db(c.noise_power)) << '\n'
        << "tx_gain = " << fmt(linear_to_db(c.tx_gain)) << '\n'
        << "rx_gain = " << fmt(linear_to_db(c.rx_gain)) << '\n'
        << "channel_error_variance = " << fmt(c.channel_error_variance) << '\n'
        << "demand_range = " << fmt(c.demand_min) << ", " << fmt(c.demand_max) << '\n'
        << "min_rate = " << fmt(c.min_rate) << '\n'
        << "reuse_mode = " << to_string(c.reuse_mode) << '\n'
        << "slot_overlap_fraction = " << fmt(c.slot_overlap_fraction) << '\n'
        << "beam_radius = " << fmt(c.beam_radius) << '\n'
        << "interbeam_attenuation_db = " << fmt(linear_to_db(c.interbeam_attenuation)) << '\n'
        << "interference_inr_db = " << fmt(linear_to_db(c.interference_inr)) << '\n'
        << "optimizer_caps = " << c.optimizer_n1 << ", " << c.optimizer_n2 << ", "
        << c.optimizer_n3 << '\n'
        << "master_seed = " << c.master_seed << '\n';
    return out.str();
}

std::uint64_t scenario_hash(const ScenarioConfig& cfg) {
    // FNV-1a over the canonical text.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_scenario_text(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double central_angle(GeoPoint a, GeoPoint b) {
    const double lat1 = deg_to_rad(a.lat_deg);
    const double lat2 = deg_to_rad(b.lat_deg);
    const double dlat = lat2 - lat1;
    const double dlon = deg_to_rad(b.lon_deg - a.lon_deg);
    const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * std::asin(std::min(1.0, std::sqrt(s)));
}

double slant_range(GeoPoint user, const ScenarioConfig& cfg) {
    const double psi = central_angle(user, cfg.satellite_position);
    const double re = kEarthRadius;
    const double rs = kEarthRadius + cfg.satellite_altitude;
    const double d2 = re * re + rs * rs - 2.0 * re * rs * std::cos(psi);
    return std::max(cfg.satellite_altitude, std::sqrt(std::max(0.0, d2)));
}

BeamLayout beam_layout(const ScenarioConfig& cfg) {
    const int beams = cfg.beam_count;
    const double width = cfg.coverage_lon_max - cfg.coverage_lon_min;
    const double height = cfg.coverage_lat_max - cfg.coverage_lat_min;

    // Pick the row count whose row pitch is closest to the hexagonal ideal
    // (sqrt(3)/2 of the column pitch).
    int best_rows = 1;
    double best_err = std::numeric_limits<double>::infinity();
    for (int rows = 1; rows <= beams; ++rows) {
        const int cols = (beams + rows - 1) / rows;
        const double sx = width / cols;
        const double sy = height / rows;
        const double err = std::abs(std::log(sy / (sx * std::sqrt(3.0) / 2.0)));
        if (err < best_err - 1e-12) {
            best_err = err;
            best_rows = rows;
        }
    }
    const int rows = best_rows;
    const int cols = (beams + rows - 1) / rows;
    const double sx = width / cols;
    const double sy = height / rows;

    BeamLayout layout;
    layout.centers.reserve(beams);
    for (int b = 0; b < beams; ++b) {
        const int r = b / cols;
        const int c = b % cols;
        const double shift = (r % 2 == 0) ? -0.25 : 0.25;
        double lon = cfg.coverage_lon_min + (c + 0.5 + shift) * sx;
        lon = std::clamp(lon, cfg.coverage_lon_min, cfg.coverage_lon_max);
        const double lat = cfg.coverage_lat_min + (r + 0.5) * sy;
        layout.centers.push_back({lon, lat});
    }
    const double derived = deg_to_rad(std::max(sx / std::sqrt(3.0), sy / 1.5)) * kEarthRadius;
    layout.radius = cfg.beam_radius > 0 ? cfg.beam_radius : derived;
    return layout;
}

int nearest_beam(const BeamLayout& layout, GeoPoint p) {
    int best = 0;
    double best_angle = std::numeric_limits<double>::infinity();
    for (int b = 0; b < static_cast<int>(layout.centers.size()); ++b) {
        const double a = central_angle(p, layout.centers[b]);
        if (a < best_angle) {
            best_angle = a;
            best = b;
        }
    }
    return best;
}

std::vector<UserTerminal> generate_users(const ScenarioConfig& cfg, std::uint64_t seed) {
    validate(cfg);
    const BeamLayout layout = beam_layout(cfg);
    const int per_beam = cfg.users_per_beam;
    std::vector<UserTerminal> users(static_cast<std::size_t>(cfg.user_count()));
    std::vector<int> filled(static_cast<std::size_t>(cfg.beam_count), 0);

    CounterStream placement(seed, StreamDomain::UserPlacement);
    int remaining = cfg.user_count();
    const long long max_attempts = 100000LL * cfg.user_count();
    for (long long attempt = 0; remaining > 0; ++attempt) {
        if (attempt >= max_attempts) {
            throw ValidationError("beam layout leaves a beam without usable coverage area");
        }
        const GeoPoint p{placement.uniform(cfg.coverage_lon_min, cfg.coverage_lon_max),
                         placement.uniform(cfg.coverage_lat_min, cfg.coverage_lat_max)};
        const int beam = nearest_beam(layout, p);
        if (filled[beam] == per_beam) continue;
        const int id = beam * per_beam + filled[beam]++;
        UserTerminal& u = users[id];
        u.user_id = id;
        u.beam_id = beam;
        u.position = p;
        u.slant_distance = slant_range(p, cfg);
        --remaining;
    }
    for (auto& u : users) {
        CounterStream demand(seed, StreamDomain::Demand, static_cast<std::uint32_t>(u.user_id));
        u.demand = demand.uniform(cfg.demand_min, cfg.demand_max);
    }
    return users;
}

}  // namespace bhnoma
