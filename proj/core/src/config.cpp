// Copyright 2026 The qlink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qlink/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace qlink {

namespace {

std::string_view trim(std::string_view s) {
    const char *ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string_view key;
    std::string_view value;
    int line;

    [[noreturn]] void fail(const std::string &what) const {
        throw ConfigError("line " + std::to_string(line) + ": " + std::string(key) + ": " + what, line, std::string(key));
    }

    double number() const {
        double out = 0.0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
            fail("expected a number, got '" + std::string(value) + "'");
        }
        return out;
    }

    double number_in(double lo, double hi) const {
        double x = number();
        if (x < lo || x > hi) {
            std::ostringstream os;
            os << "value " << x << " out of range [" << lo << ", " << hi << "]";
            fail(os.str());
        }
        return x;
    }

    std::uint64_t unsigned_integer() const {
        std::uint64_t out = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
            fail("expected a non-negative integer, got '" + std::string(value) + "'");
        }
        return out;
    }

    bool boolean() const {
        if (value == "true" || value == "1" || value == "yes") return true;
        if (value == "false" || value == "0" || value == "no") return false;
        fail("expected true or false, got '" + std::string(value) + "'");
    }

    std::vector<double> numbers() const {
        std::vector<double> out;
        std::string_view rest = value;
        while (true) {
            auto comma = rest.find(',');
            Entry item{key, trim(rest.substr(0, comma)), line};
            if (item.value.empty()) fail("empty element in list '" + std::string(value) + "'");
            out.push_back(item.number());
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return out;
    }
};

using Handler = std::function<void(ExperimentConfig &, const Entry &)>;

const std::map<std::string, Handler, std::less<>> &handlers() {
    static const std::map<std::string, Handler, std::less<>> table = [] {
        std::map<std::string, Handler, std::less<>> h;
        h["chi"] = [](ExperimentConfig &c, const Entry &e) {
            double x = e.number();
            if (!(x > 0.0 && x < 1.0)) e.fail("value must lie in (0, 1)");
            c.source.chi = x;
        };
        h["eta_deg"] = [](ExperimentConfig &c, const Entry &e) { c.source.eta = deg_to_rad(e.number_in(0.0, 90.0)); };
        h["site_a_retrieval"] = [](ExperimentConfig &c, const Entry &e) { c.source.site_a_retrieval = e.number_in(0.0, 1.0); };
        h["transmission"] = [](ExperimentConfig &c, const Entry &e) { c.channel.transmission = e.number_in(0.0, 1.0); };
        h["qwp_sign"] = [](ExperimentConfig &c, const Entry &e) {
            if (e.value == "plus") {
                c.channel.qwp_sign_convention = QwpSignConvention::kPlus;
            } else if (e.value == "minus") {
                c.channel.qwp_sign_convention = QwpSignConvention::kMinus;
            } else {
                e.fail("expected plus or minus");
            }
        };
        h["eps_b_plus"] = [](ExperimentConfig &c, const Entry &e) { c.storage.eps_plus = e.number_in(0.0, 1.0); };
        h["eps_b_minus"] = [](ExperimentConfig &c, const Entry &e) { c.storage.eps_minus = e.number_in(0.0, 1.0); };
        h["b_field_gauss"] = [](ExperimentConfig &c, const Entry &e) { c.storage.b_field_gauss = e.number(); };
        h["g_factor"] = [](ExperimentConfig &c, const Entry &e) { c.storage.g_factor = e.number(); };
        h["storage_time_b_ns"] = [](ExperimentConfig &c, const Entry &e) {
            c.storage.storage_time_s = e.number_in(0.0, 1e12) * 1e-9;
        };
        h["storage_time_a_ns"] = [](ExperimentConfig &c, const Entry &e) {
            c.storage_time_a_s = e.number_in(0.0, 1e12) * 1e-9;
        };
        h["phase_offset_deg"] = [](ExperimentConfig &c, const Entry &e) { c.phase_offset = deg_to_rad(e.number()); };
        for (int k = 0; k < 4; ++k) {
            h["eps_d" + std::to_string(k + 1)] = [k](ExperimentConfig &c, const Entry &e) {
                c.bank.eps[k] = e.number_in(0.0, 1.0);
            };
            h["p_dark_d" + std::to_string(k + 1)] = [k](ExperimentConfig &c, const Entry &e) {
                c.bank.p_dark[k] = e.number_in(0.0, 1.0);
            };
        }
        h["p_dark"] = [](ExperimentConfig &c, const Entry &e) { c.bank.p_dark.fill(e.number_in(0.0, 1.0)); };
        h["background_target_s"] = [](ExperimentConfig &c, const Entry &e) {
            c.background_target_s = e.number_in(-4.0, 4.0);
        };
        h["scenario"] = [](ExperimentConfig &c, const Entry &e) {
            auto s = parse_scenario(e.value);
            if (!s) e.fail("unknown scenario '" + std::string(e.value) + "'");
            c.scenario = *s;
        };
        h["theta_a_list"] = [](ExperimentConfig &c, const Entry &e) { c.theta_a_list = e.numbers(); };
        h["theta_b"] = [](ExperimentConfig &c, const Entry &e) { c.theta_b = e.number(); };
        h["theta_b_list"] = [](ExperimentConfig &c, const Entry &e) { c.theta_b_list = e.numbers(); };
        h["chsh_angles"] = [](ExperimentConfig &c, const Entry &e) {
            auto v = e.numbers();
            if (v.size() != 4) e.fail("expected four angles: theta_a, theta_a', theta_b, theta_b'");
            c.chsh_angles = ChshAngles{v[0], v[1], v[2], v[3]};
        };
        h["trials"] = [](ExperimentConfig &c, const Entry &e) {
            auto n = e.unsigned_integer();
            if (n == 0) e.fail("trials must be positive");
            c.trials = n;
        };
        h["duration_s"] = [](ExperimentConfig &c, const Entry &e) {
            double d = e.number();
            if (!(d > 0.0)) e.fail("duration must be positive");
            c.duration_s = d;
        };
        h["seed"] = [](ExperimentConfig &c, const Entry &e) { c.seed = e.unsigned_integer(); };
        h["workers"] = [](ExperimentConfig &c, const Entry &e) {
            auto n = e.unsigned_integer();
            if (n == 0 || n > 1024) e.fail("workers must lie in [1, 1024]");
            c.workers = static_cast<unsigned>(n);
        };
        h["sampling"] = [](ExperimentConfig &c, const Entry &e) {
            if (e.value == "full") {
                c.sampling = SamplingMode::kFull;
            } else if (e.value == "conditioned") {
                c.sampling = SamplingMode::kConditionedPair;
            } else {
                e.fail("expected full or conditioned");
            }
        };
        h["symmetrize"] = [](ExperimentConfig &c, const Entry &e) { c.symmetrize = e.boolean(); };
        h["visibility"] = [](ExperimentConfig &c, const Entry &e) { c.visibility = e.number_in(0.0, 1.0); };
        h["out"] = [](ExperimentConfig &c, const Entry &e) { c.output_path = std::string(e.value); };
        return h;
    }();
    return table;
}

}  // namespace

ConfigError::ConfigError(const std::string &message, int line, std::string key)
    : std::runtime_error(message), line_(line), key_(std::move(key)) {}

std::string_view scenario_name(Scenario scenario) {
    switch (scenario) {
        case Scenario::kFringe:
            return "fringe";
        case Scenario::kCorrelation:
            return "correlation";
        case Scenario::kChsh:
            return "chsh";
        case Scenario::kOracle:
            return "oracle";
    }
    return "unknown";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
    for (Scenario s : {Scenario::kFringe, Scenario::kCorrelation, Scenario::kChsh, Scenario::kOracle}) {
        if (scenario_name(s) == name) return s;
    }
    return std::nullopt;
}

std::uint64_t ExperimentConfig::trials_per_point() const {
    if (trials) return *trials;
    double seconds = duration_s ? *duration_s : (scenario == Scenario::kChsh ? 7200.0 : 900.0);
    return std::max<std::uint64_t>(1, trials_for_duration(seconds));
}

void ExperimentConfig::validate() const {
    auto wrap = [](auto &&check) {
        try {
            check();
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
    };
    wrap([&] { source.validate(); });
    wrap([&] { channel.validate(); });
    wrap([&] { storage.validate(); });
    wrap([&] { bank.validate(); });
    if (average_storage_efficiency(storage.eps_plus, storage.eps_minus, source.eta) <= 0.0) {
        throw ConfigError("eps_b_plus and eps_b_minus are both zero; the effective state is undefined");
    }
    if (theta_a_list.empty()) throw ConfigError("theta_a_list is empty");
    if (theta_b_list.empty()) throw ConfigError("theta_b_list is empty");
    if (!(visibility >= 0.0 && visibility <= 1.0)) throw ConfigError("visibility must lie in [0, 1]");
    if (workers == 0) throw ConfigError("workers must be positive");
    if (trials && *trials == 0) throw ConfigError("trials must be positive");
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig config;
    std::set<std::string, std::less<>> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" + std::string(line) + "'",
                              line_no);
        }
        Entry entry{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), line_no};
        if (entry.key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": missing key", line_no);
        }
        if (entry.value.empty()) entry.fail("missing value");

        const auto &table = handlers();
        auto it = table.find(entry.key);
        if (it == table.end()) entry.fail("unknown key");
        if (!seen.insert(std::string(entry.key)).second) entry.fail("key given more than once");
        it->second(config, entry);
    }
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace qlink
