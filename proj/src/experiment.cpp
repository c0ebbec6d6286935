// SPDX-License-Identifier: Apache-2.0
//
// prmimo: channel estimation and extrapolation for pattern-reconfigurable MIMO arrays
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

#include "prmimo/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "prmimo/binio.hpp"

namespace prmimo
{
    namespace
    {
        constexpr double pi = 3.1415926535897932384626433832795;

        std::string trim(const std::string &s)
        {
            const auto a = s.find_first_not_of(" \t\r\n");
            if (a == std::string::npos)
                return {};
            const auto b = s.find_last_not_of(" \t\r\n");
            return s.substr(a, b - a + 1);
        }

        std::vector<std::string> split_list(const std::string &s)
        {
            std::vector<std::string> out;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ','))
            {
                item = trim(item);
                if (!item.empty())
                    out.push_back(item);
            }
            return out;
        }

        arma::uword to_uword(const std::string &s, const std::string &key)
        {
            try
            {
                const long long v = std::stoll(s);
                if (v < 0)
                    throw std::invalid_argument("negative");
                return static_cast<arma::uword>(v);
            }
            catch (const std::exception &)
            {
                throw std::invalid_argument("config: bad integer for '" + key + "': " + s);
            }
        }

        double to_double(const std::string &s, const std::string &key)
        {
            try
            {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size())
                    throw std::invalid_argument("trailing");
                return v;
            }
            catch (const std::exception &)
            {
                throw std::invalid_argument("config: bad number for '" + key + "': " + s);
            }
        }

        std::string fmt_double(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return buf;
        }
    }

    ExperimentConfig ExperimentConfig::paper_scale()
    {
        ExperimentConfig cfg;
        cfg.num_tx = 64;
        cfg.num_rx = 8;
        cfg.num_modes = 8;
        cfg.num_clusters = 10;
        cfg.rays_per_cluster = 20;
        cfg.sample_count = 10240;
        cfg.hidden = {512, 512, 512};
        cfg.epochs = 500;
        cfg.antenna_sweep = {16, 32, 64};
        cfg.mode_sweep = {2, 4, 8};
        return cfg;
    }

    double ExperimentConfig::angular_spread_rad() const
    {
        return angular_spread_deg * pi / 180.0;
    }

    arma::uword ExperimentConfig::test_count() const
    {
        return static_cast<arma::uword>(
            (static_cast<std::uint64_t>(sample_count) * test_fraction_num) / test_fraction_den);
    }

    void ExperimentConfig::validate() const
    {
        if (num_tx < 1 || num_rx < 1 || num_modes < 1)
            throw std::invalid_argument("config: antenna and mode counts must be >= 1");
        if (num_tx < num_modes)
            throw std::invalid_argument("config: need at least one antenna per mode (num_tx >= num_modes)");
        if (num_clusters < 1 || rays_per_cluster < 1)
            throw std::invalid_argument("config: cluster and ray counts must be >= 1");
        if (angular_spread_deg < 0.0)
            throw std::invalid_argument("config: angular spread must be >= 0");
        if (carrier_hz <= 0.0)
            throw std::invalid_argument("config: carrier frequency must be positive");
        if (pattern_order_az < 1 || pattern_order_el < 1)
            throw std::invalid_argument("config: pattern orders must be >= 1");
        if (pattern_diversity < 0.0)
            throw std::invalid_argument("config: pattern diversity must be >= 0");
        if (sample_count < 1)
            throw std::invalid_argument("config: sample count must be >= 1");
        if (test_fraction_den == 0 || test_fraction_num >= test_fraction_den)
            throw std::invalid_argument("config: test fraction must be in [0, 1)");
        if (covariance_samples < 1)
            throw std::invalid_argument("config: covariance sample count must be >= 1");
        if (hidden.empty())
            throw std::invalid_argument("config: need at least one hidden width");
        for (arma::uword h : hidden)
            if (h < 1)
                throw std::invalid_argument("config: hidden widths must be >= 1");
        if (learning_rate <= 0.0)
            throw std::invalid_argument("config: learning rate must be positive");
        if (batch_size < 1)
            throw std::invalid_argument("config: batch size must be >= 1");
        if (model != "prnet" && model != "dnn")
            throw std::invalid_argument("config: model must be 'prnet' or 'dnn'");
    }

    void parse_fraction(const std::string &text, std::uint32_t &num, std::uint32_t &den)
    {
        const std::string s = trim(text);
        const auto slash = s.find('/');
        const auto dot = s.find('.');
        std::uint64_t n = 0, d = 1;
        try
        {
            if (slash != std::string::npos)
            {
                n = std::stoull(s.substr(0, slash));
                d = std::stoull(s.substr(slash + 1));
                if (d == 0)
                    throw std::invalid_argument("zero denominator");
            }
            else if (dot == std::string::npos)
            {
                n = std::stoull(s);
            }
            else
            {
                const std::string whole = s.substr(0, dot), frac = s.substr(dot + 1);
                if (frac.empty() || frac.size() > 9)
                    throw std::invalid_argument("fraction digits");
                n = (whole.empty() ? 0 : std::stoull(whole));
                for (char c : frac)
                {
                    if (c < '0' || c > '9')
                        throw std::invalid_argument("digit");
                    n = n * 10 + static_cast<std::uint64_t>(c - '0');
                    d *= 10;
                }
            }
        }
        catch (const std::exception &)
        {
            throw std::invalid_argument("config: bad fraction: " + text);
        }
        if (n == 0)
        {
            num = 0;
            den = 1;
            return;
        }
        const std::uint64_t g = std::gcd(n, d);
        num = static_cast<std::uint32_t>(n / g);
        den = static_cast<std::uint32_t>(d / g);
    }

    ExperimentConfig parse_config(const std::string &text, ExperimentConfig base)
    {
        ExperimentConfig cfg = base;
        std::stringstream ss(text);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(ss, line))
        {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));

            if (key == "num_tx")
                cfg.num_tx = to_uword(value, key);
            else if (key == "num_rx")
                cfg.num_rx = to_uword(value, key);
            else if (key == "num_modes")
                cfg.num_modes = to_uword(value, key);
            else if (key == "num_clusters")
                cfg.num_clusters = to_uword(value, key);
            else if (key == "rays_per_cluster")
                cfg.rays_per_cluster = to_uword(value, key);
            else if (key == "angular_spread_deg")
                cfg.angular_spread_deg = to_double(value, key);
            else if (key == "carrier_hz")
                cfg.carrier_hz = to_double(value, key);
            else if (key == "spacing_m")
                cfg.spacing_m = to_double(value, key);
            else if (key == "pattern_order_az")
                cfg.pattern_order_az = to_uword(value, key);
            else if (key == "pattern_order_el")
                cfg.pattern_order_el = to_uword(value, key);
            else if (key == "pattern_diversity")
                cfg.pattern_diversity = to_double(value, key);
            else if (key == "sample_count")
                cfg.sample_count = to_uword(value, key);
            else if (key == "test_fraction")
                parse_fraction(value, cfg.test_fraction_num, cfg.test_fraction_den);
            else if (key == "train_snr_db")
                cfg.train_snr_db = to_double(value, key);
            else if (key == "covariance_samples")
                cfg.covariance_samples = to_uword(value, key);
            else if (key == "hidden")
            {
                cfg.hidden.clear();
                for (const auto &item : split_list(value))
                    cfg.hidden.push_back(to_uword(item, key));
            }
            else if (key == "baseline_hidden")
                cfg.baseline_hidden = to_uword(value, key);
            else if (key == "learning_rate")
                cfg.learning_rate = to_double(value, key);
            else if (key == "batch_size")
                cfg.batch_size = to_uword(value, key);
            else if (key == "epochs")
                cfg.epochs = to_uword(value, key);
            else if (key == "master_seed")
                cfg.master_seed = std::stoull(value);
            else if (key == "model")
                cfg.model = value;
            else if (key == "snr_sweep_db")
            {
                cfg.snr_sweep_db.clear();
                for (const auto &item : split_list(value))
                    cfg.snr_sweep_db.push_back(to_double(item, key));
            }
            else if (key == "antenna_sweep")
            {
                cfg.antenna_sweep.clear();
                for (const auto &item : split_list(value))
                    cfg.antenna_sweep.push_back(to_uword(item, key));
            }
            else if (key == "mode_sweep")
            {
                cfg.mode_sweep.clear();
                for (const auto &item : split_list(value))
                    cfg.mode_sweep.push_back(to_uword(item, key));
            }
            else if (key == "eval_snr_db")
                cfg.eval_snr_db = to_double(value, key);
            else
                throw std::invalid_argument("config line " + std::to_string(line_no) +
                                            ": unknown key '" + key + "'");
        }
        return cfg;
    }

    ExperimentConfig load_config_file(const std::string &path, ExperimentConfig base)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file: " + path);
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str(), base);
    }

    std::string serialize_config(const ExperimentConfig &cfg)
    {
        std::ostringstream out;
        out << "num_tx = " << cfg.num_tx << "\n";
        out << "num_rx = " << cfg.num_rx << "\n";
        out << "num_modes = " << cfg.num_modes << "\n";
        out << "num_clusters = " << cfg.num_clusters << "\n";
        out << "rays_per_cluster = " << cfg.rays_per_cluster << "\n";
        out << "angular_spread_deg = " << fmt_double(cfg.angular_spread_deg) << "\n";
        out << "carrier_hz = " << fmt_double(cfg.carrier_hz) << "\n";
        out << "spacing_m = " << fmt_double(cfg.spacing_m) << "\n";
        out << "pattern_order_az = " << cfg.pattern_order_az << "\n";
        out << "pattern_order_el = " << cfg.pattern_order_el << "\n";
        out << "pattern_diversity = " << fmt_double(cfg.pattern_diversity) << "\n";
        out << "sample_count = " << cfg.sample_count << "\n";
        out << "test_fraction = " << cfg.test_fraction_num << "/" << cfg.test_fraction_den << "\n";
        out << "train_snr_db = " << fmt_double(cfg.train_snr_db) << "\n";
        out << "covariance_samples = " << cfg.covariance_samples << "\n";
        out << "hidden = ";
        for (std::size_t i = 0; i < cfg.hidden.size(); ++i)
            out << (i ? "," : "") << cfg.hidden[i];
        out << "\n";
        out << "baseline_hidden = " << cfg.baseline_hidden << "\n";
        out << "learning_rate = " << fmt_double(cfg.learning_rate) << "\n";
        out << "batch_size = " << cfg.batch_size << "\n";
        out << "epochs = " << cfg.epochs << "\n";
        out << "master_seed = " << cfg.master_seed << "\n";
        out << "model = " << cfg.model << "\n";
        out << "snr_sweep_db = ";
        for (std::size_t i = 0; i < cfg.snr_sweep_db.size(); ++i)
            out << (i ? "," : "") << fmt_double(cfg.snr_sweep_db[i]);
        out << "\n";
        out << "antenna_sweep = ";
        for (std::size_t i = 0; i < cfg.antenna_sweep.size(); ++i)
            out << (i ? "," : "") << cfg.antenna_sweep[i];
        out << "\n";
        out << "mode_sweep = ";
        for (std::size_t i = 0; i < cfg.mode_sweep.size(); ++i)
            out << (i ? "," : "") << cfg.mode_sweep[i];
        out << "\n";
        out << "eval_snr_db = " << fmt_double(cfg.eval_snr_db) << "\n";
        return out.str();
    }

    std::uint64_t config_checksum(const ExperimentConfig &cfg)
    {
        const std::string text = serialize_config(cfg);
        return fnv1a(reinterpret_cast<const std::uint8_t *>(text.data()), text.size());
    }

    std::vector<arma::uword> prnet_dims(const ExperimentConfig &cfg)
    {
        std::vector<arma::uword> dims;
        dims.push_back(cfg.num_tx * cfg.num_rx);
        dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
        dims.push_back(cfg.num_tx * cfg.num_rx * (cfg.num_modes - 1));
        return dims;
    }

    namespace
    {
        std::uint64_t real_count_for(const std::vector<arma::uword> &dims, bool complex_valued)
        {
            std::uint64_t count = 0;
            for (std::size_t k = 0; k + 1 < dims.size(); ++k)
                count += static_cast<std::uint64_t>(dims[k]) * dims[k + 1] + dims[k + 1];
            return complex_valued ? 2 * count : count;
        }
    }

    arma::uword baseline_parity_width(const ExperimentConfig &cfg)
    {
        if (cfg.baseline_hidden > 0)
            return cfg.baseline_hidden;

        const double target = static_cast<double>(real_count_for(prnet_dims(cfg), true));
        const double n_hidden = static_cast<double>(cfg.hidden.size());
        const double in = 2.0 * static_cast<double>(cfg.num_tx * cfg.num_rx);
        const double out = in * static_cast<double>(cfg.num_modes - 1);

        // Real parameters as a function of the shared hidden width h:
        //   (nh-1) h^2 + (in + out + nh) h + out = target
        const double a = n_hidden - 1.0;
        const double b = in + out + n_hidden;
        const double c = out - target;
        double h = a > 0.0 ? (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a) : -c / b;
        h = std::max(8.0, std::round(h / 8.0) * 8.0);
        return static_cast<arma::uword>(h);
    }

    std::vector<arma::uword> baseline_dims(const ExperimentConfig &cfg)
    {
        const arma::uword width = baseline_parity_width(cfg);
        std::vector<arma::uword> dims;
        dims.push_back(2 * cfg.num_tx * cfg.num_rx);
        dims.insert(dims.end(), cfg.hidden.size(), width);
        dims.push_back(2 * cfg.num_tx * cfg.num_rx * (cfg.num_modes - 1));
        return dims;
    }

    ParameterParity parameter_parity(const ExperimentConfig &cfg)
    {
        ParameterParity p;
        p.prnet_parameters = real_count_for(prnet_dims(cfg), true);
        p.baseline_parameters = real_count_for(baseline_dims(cfg), false);
        p.ratio = static_cast<double>(p.baseline_parameters) /
                  static_cast<double>(p.prnet_parameters);
        return p;
    }
}
