// SPDX-License-Identifier: Apache-2.0
//
// pmldpe: pseudo maximum likelihood direct position estimation for mobile arrays
// Copyright (C) 2026 The pmldpe authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "pmldpe/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace pmldpe
{
    namespace
    {
        namespace pt = boost::property_tree;

        std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string> split(const std::string &s, char sep)
        {
            std::vector<std::string> out;
            std::string item;
            std::istringstream is(s);
            while (std::getline(is, item, sep))
                out.push_back(trim(item));
            return out;
        }

        double to_double(const std::string &key, const std::string &text)
        {
            const std::string t = trim(text);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
                throw Error("config: '" + key + "' expects a number, got '" + text + "'");
            return v;
        }

        long long to_integer(const std::string &key, const std::string &text)
        {
            const std::string t = trim(text);
            long long v = 0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
                throw Error("config: '" + key + "' expects an integer, got '" + text + "'");
            return v;
        }

        std::uint64_t to_unsigned(const std::string &key, const std::string &text)
        {
            const std::string t = trim(text);
            std::uint64_t v = 0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
                throw Error("config: '" + key + "' expects an unsigned integer, got '" + text + "'");
            return v;
        }

        Position to_position(const std::string &key, const std::string &text)
        {
            const auto parts = split(text, ',');
            if (parts.size() != 2)
                throw Error("config: '" + key + "' expects 'x, y', got '" + text + "'");
            return {to_double(key, parts[0]), to_double(key, parts[1])};
        }

        std::string fmt(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        std::string fmt(const Position &p)
        {
            return fmt(p.x) + ", " + fmt(p.y);
        }

        using Setter = std::function<void(ScenarioConfig &, const std::string &key, const std::string &value)>;

        // section -> key -> setter; base stations are handled separately
        const std::map<std::string, std::map<std::string, Setter>> &schema()
        {
            static const std::map<std::string, std::map<std::string, Setter>> s = {
                {"scenario",
                 {
                     {"name", [](auto &c, auto &, auto &v) { c.name = trim(v); }},
                     {"duration_s", [](auto &c, auto &k, auto &v) { c.duration = to_double(k, v); }},
                     {"bs_rate_hz", [](auto &c, auto &k, auto &v) { c.bs_rate = to_double(k, v); }},
                     {"trials", [](auto &c, auto &k, auto &v) { c.trials = static_cast<int>(to_integer(k, v)); }},
                     {"master_seed", [](auto &c, auto &k, auto &v) { c.master_seed = to_unsigned(k, v); }},
                     {"first_trial",
                      [](auto &c, auto &k, auto &v) { c.first_trial = static_cast<int>(to_integer(k, v)); }},
                     {"estimators",
                      [](auto &c, auto &, auto &v)
                      {
                          c.estimators.clear();
                          for (const auto &name : split(v, ','))
                              if (!name.empty())
                                  c.estimators.push_back(estimator_from_string(name));
                      }},
                 }},
                {"mobility",
                 {
                     {"initial_position",
                      [](auto &c, auto &k, auto &v) { c.mobility.initial_position = to_position(k, v); }},
                     {"initial_heading_deg",
                      [](auto &c, auto &k, auto &v) { c.mobility.initial_heading = deg2rad(to_double(k, v)); }},
                     {"start_speed_kmh",
                      [](auto &c, auto &k, auto &v) { c.mobility.start_speed = kmh2ms(to_double(k, v)); }},
                     {"peak_speed_kmh",
                      [](auto &c, auto &k, auto &v) { c.mobility.peak_speed = kmh2ms(to_double(k, v)); }},
                     {"lateral_acceleration",
                      [](auto &c, auto &k, auto &v) { c.mobility.lateral_acceleration = to_double(k, v); }},
                     {"velocity_noise_fraction",
                      [](auto &c, auto &k, auto &v) { c.velocity_noise_fraction = to_double(k, v); }},
                 }},
                {"array",
                 {
                     {"elements",
                      [](auto &c, auto &k, auto &v) { c.element_count = static_cast<int>(to_integer(k, v)); }},
                     {"subarray_length",
                      [](auto &c, auto &k, auto &v) { c.subarray_length = static_cast<int>(to_integer(k, v)); }},
                 }},
                {"channel",
                 {
                     {"carrier_hz", [](auto &c, auto &k, auto &v) { c.channel.carrier_frequency = to_double(k, v); }},
                     {"path_loss_exponent",
                      [](auto &c, auto &k, auto &v) { c.channel.path_loss_exponent = to_double(k, v); }},
                     {"reference_distance_m",
                      [](auto &c, auto &k, auto &v) { c.channel.reference_distance = to_double(k, v); }},
                     {"coherence_bandwidth_hz",
                      [](auto &c, auto &k, auto &v) { c.channel.coherence_bandwidth = to_double(k, v); }},
                     {"doppler_spread_hz",
                      [](auto &c, auto &k, auto &v) { c.channel.doppler_spread = to_double(k, v); }},
                     {"coherence_time_s",
                      [](auto &c, auto &k, auto &v) { c.channel.coherence_time = to_double(k, v); }},
                     {"rms_delay_spread_s",
                      [](auto &c, auto &k, auto &v) { c.channel.rms_delay_spread = to_double(k, v); }},
                     {"transmit_power_dbm",
                      [](auto &c, auto &k, auto &v) { c.channel.transmit_power_dbm = to_double(k, v); }},
                     {"amplitude_law",
                      [](auto &c, auto &k, auto &v)
                      {
                          const auto t = trim(v);
                          if (t == "sqrt_pdp")
                              c.channel.amplitude_law = AmplitudeLaw::sqrt_pdp;
                          else if (t == "pdp")
                              c.channel.amplitude_law = AmplitudeLaw::pdp;
                          else
                              throw Error("config: '" + k + "' must be sqrt_pdp or pdp");
                      }},
                     {"p_nlos", [](auto &c, auto &k, auto &v) { c.p_nlos = to_double(k, v); }},
                     {"paths_min",
                      [](auto &c, auto &k, auto &v) { c.path_count.min = static_cast<int>(to_integer(k, v)); }},
                     {"paths_max",
                      [](auto &c, auto &k, auto &v) { c.path_count.max = static_cast<int>(to_integer(k, v)); }},
                     {"noise_power_w",
                      [](auto &c, auto &k, auto &v)
                      {
                          if (trim(v) == "thermal")
                              c.noise_power.reset();
                          else
                              c.noise_power = to_double(k, v);
                      }},
                 }},
                {"receiver",
                 {
                     {"snapshots", [](auto &c, auto &k, auto &v) { c.snapshots = static_cast<int>(to_integer(k, v)); }},
                     {"rolloff", [](auto &c, auto &k, auto &v) { c.rolloff = to_double(k, v); }},
                     {"observation_time_s", [](auto &c, auto &k, auto &v) { c.observation_time = to_double(k, v); }},
                 }},
                {"estimator",
                 {
                     {"d_max", [](auto &c, auto &k, auto &v) { c.d_max = static_cast<int>(to_integer(k, v)); }},
                     {"association_tolerance_deg",
                      [](auto &c, auto &k, auto &v) { c.association_tolerance = deg2rad(to_double(k, v)); }},
                     {"spectrum_points",
                      [](auto &c, auto &k, auto &v) { c.spectrum_points = static_cast<int>(to_integer(k, v)); }},
                     {"grid_center", [](auto &c, auto &k, auto &v) { c.grid.center = to_position(k, v); }},
                     {"grid_half_width_x_m", [](auto &c, auto &k, auto &v) { c.grid.half_width_x = to_double(k, v); }},
                     {"grid_half_width_y_m", [](auto &c, auto &k, auto &v) { c.grid.half_width_y = to_double(k, v); }},
                     {"grid_spacing_m", [](auto &c, auto &k, auto &v) { c.grid.spacing = to_double(k, v); }},
                 }},
            };
            return s;
        }

        void apply_override(pt::ptree &tree, const std::string &item)
        {
            const auto eq = item.find('=');
            const auto dot = item.find('.');
            if (eq == std::string::npos || dot == std::string::npos || dot > eq)
                throw Error("config: override '" + item + "' must look like section.key=value");
            const std::string section = trim(item.substr(0, dot));
            const std::string key = trim(item.substr(dot + 1, eq - dot - 1));
            const std::string value = trim(item.substr(eq + 1));
            tree.put_child(pt::ptree::path_type(section + '\x1f' + key, '\x1f'), pt::ptree(value));
        }

        ScenarioConfig from_tree(const pt::ptree &tree)
        {
            ScenarioConfig c;
            c.bs_positions.clear();
            std::set<std::string> seen_sections;
            for (const auto &[section, body] : tree)
            {
                if (!body.data().empty() && body.empty())
                    throw Error("config: key '" + section + "' appears outside a section");
                if (!seen_sections.insert(section).second)
                    throw Error("config: section [" + section + "] appears twice");
                if (section == "base_stations")
                {
                    for (const auto &[key, node] : body)
                    {
                        if (key.size() < 3 || key.rfind("bs", 0) != 0 ||
                            key.find_first_not_of("0123456789", 2) != std::string::npos)
                            throw Error("config: unknown key 'base_stations." + key + "' (expected bs1, bs2, ...)");
                        c.bs_positions.push_back(to_position("base_stations." + key, node.data()));
                    }
                    continue;
                }
                const auto sec = schema().find(section);
                if (sec == schema().end())
                    throw Error("config: unknown section [" + section + "]");
                for (const auto &[key, node] : body)
                {
                    const auto it = sec->second.find(key);
                    if (it == sec->second.end())
                        throw Error("config: unknown key '" + section + "." + key + "'");
                    it->second(c, section + "." + key, node.data());
                }
            }
            c.validate();
            return c;
        }
    }

    ScenarioConfig parse_scenario(std::istream &is, const std::vector<std::string> &overrides)
    {
        pt::ptree tree;
        try
        {
            pt::ini_parser::read_ini(is, tree);
        }
        catch (const pt::ini_parser_error &e)
        {
            throw Error(std::string("config: ") + e.what());
        }
        for (const auto &o : overrides)
            apply_override(tree, o);
        return from_tree(tree);
    }

    ScenarioConfig parse_scenario_string(const std::string &text, const std::vector<std::string> &overrides)
    {
        std::istringstream is(text);
        return parse_scenario(is, overrides);
    }

    ScenarioConfig load_scenario(const std::string &path, const std::vector<std::string> &overrides)
    {
        std::ifstream is(path);
        if (!is)
            throw Error("config: cannot open '" + path + "'");
        try
        {
            return parse_scenario(is, overrides);
        }
        catch (const Error &e)
        {
            throw Error(path + ": " + e.what());
        }
    }

    std::string to_ini(const ScenarioConfig &c)
    {
        std::ostringstream os;
        os << "[scenario]\n"
           << "name = " << c.name << '\n'
           << "duration_s = " << fmt(c.duration) << '\n'
           << "bs_rate_hz = " << fmt(c.bs_rate) << '\n'
           << "trials = " << c.trials << '\n'
           << "master_seed = " << c.master_seed << '\n'
           << "first_trial = " << c.first_trial << '\n'
           << "estimators = ";
        for (std::size_t i = 0; i < c.estimators.size(); ++i)
            os << (i ? ", " : "") << to_string(c.estimators[i]);
        os << "\n\n[base_stations]\n";
        for (std::size_t i = 0; i < c.bs_positions.size(); ++i)
            os << "bs" << i + 1 << " = " << fmt(c.bs_positions[i]) << '\n';
        os << "\n[mobility]\n"
           << "initial_position = " << fmt(c.mobility.initial_position) << '\n'
           << "initial_heading_deg = " << fmt(rad2deg(c.mobility.initial_heading)) << '\n'
           << "start_speed_kmh = " << fmt(c.mobility.start_speed * 3.6) << '\n'
           << "peak_speed_kmh = " << fmt(c.mobility.peak_speed * 3.6) << '\n'
           << "lateral_acceleration = " << fmt(c.mobility.lateral_acceleration) << '\n'
           << "velocity_noise_fraction = " << fmt(c.velocity_noise_fraction) << '\n'
           << "\n[array]\n"
           << "elements = " << c.element_count << '\n'
           << "subarray_length = " << c.subarray_length << '\n'
           << "\n[channel]\n"
           << "carrier_hz = " << fmt(c.channel.carrier_frequency) << '\n'
           << "path_loss_exponent = " << fmt(c.channel.path_loss_exponent) << '\n'
           << "reference_distance_m = " << fmt(c.channel.reference_distance) << '\n'
           << "coherence_bandwidth_hz = " << fmt(c.channel.coherence_bandwidth) << '\n'
           << "doppler_spread_hz = " << fmt(c.channel.doppler_spread) << '\n'
           << "coherence_time_s = " << fmt(c.channel.coherence_time) << '\n'
           << "rms_delay_spread_s = " << fmt(c.channel.rms_delay_spread) << '\n'
           << "transmit_power_dbm = " << fmt(c.channel.transmit_power_dbm) << '\n'
           << "amplitude_law = " << (c.channel.amplitude_law == AmplitudeLaw::sqrt_pdp ? "sqrt_pdp" : "pdp") << '\n'
           << "p_nlos = " << fmt(c.p_nlos) << '\n'
           << "paths_min = " << c.path_count.min << '\n'
           << "paths_max = " << c.path_count.max << '\n'
           << "noise_power_w = " << (c.noise_power ? fmt(*c.noise_power) : std::string("thermal")) << '\n'
           << "\n[receiver]\n"
           << "snapshots = " << c.snapshots << '\n'
           << "rolloff = " << fmt(c.rolloff) << '\n'
           << "observation_time_s = " << fmt(c.observation_time) << '\n'
           << "\n[estimator]\n"
           << "d_max = " << c.d_max << '\n'
           << "association_tolerance_deg = " << fmt(rad2deg(c.association_tolerance)) << '\n'
           << "spectrum_points = " << c.spectrum_points << '\n'
           << "grid_center = " << fmt(c.grid.center) << '\n'
           << "grid_half_width_x_m = " << fmt(c.grid.half_width_x) << '\n'
           << "grid_half_width_y_m = " << fmt(c.grid.half_width_y) << '\n'
           << "grid_spacing_m = " << fmt(c.grid.spacing) << '\n';
        return os.str();
    }

    std::uint64_t config_hash(const ScenarioConfig &config)
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char ch : to_ini(config))
        {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::string hex64(std::uint64_t value)
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
        return buf;
    }
}
