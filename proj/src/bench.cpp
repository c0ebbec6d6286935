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

#include "prmimo/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "prmimo/binio.hpp"
#include "prmimo/errors.hpp"
#include "prmimo/rng.hpp"

namespace prmimo
{
    namespace
    {
        std::string fmt_double(double v)
        {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            return buf;
        }

        template <class MatT>
        double nmse_impl(const MatT &truth, const MatT &estimate)
        {
            if (truth.n_rows != estimate.n_rows || truth.n_cols != estimate.n_cols)
                throw std::invalid_argument("nmse: truth and estimate shapes differ");
            if (truth.n_cols < 1 || truth.n_rows < 1)
                throw std::invalid_argument("nmse: empty input");

            double acc = 0.0;
            for (arma::uword c = 0; c < truth.n_cols; ++c)
            {
                const double power = arma::accu(arma::square(arma::abs(truth.col(c))));
                if (power == 0.0)
                    throw std::invalid_argument("nmse: all-zero truth vector, normalization undefined");
                const double err = arma::accu(arma::square(arma::abs(truth.col(c) - estimate.col(c))));
                acc += err / power;
            }
            return acc / static_cast<double>(truth.n_cols);
        }
    }

    double nmse(const arma::cx_mat &truth, const arma::cx_mat &estimate)
    {
        return nmse_impl(truth, estimate);
    }

    double nmse(const arma::mat &truth, const arma::mat &estimate)
    {
        return nmse_impl(truth, estimate);
    }

    double to_db(double linear)
    {
        return 10.0 * std::log10(linear);
    }

    arma::cx_mat TrainedModel::predict(const arma::cx_mat &inputs) const
    {
        if (kind == "prnet")
            return cnet.forward(norm_scale * inputs) / norm_scale;
        if (kind == "dnn")
            return unembed_complex(rnet.forward(embed_complex(norm_scale * inputs))) / norm_scale;
        throw std::logic_error("TrainedModel: unknown kind '" + kind + "'");
    }

    std::uint64_t TrainedModel::parameter_count() const
    {
        return kind == "prnet" ? cnet.parameter_count() : rnet.parameter_count();
    }

    void TrainedModel::save(const std::string &path) const
    {
        if (kind == "prnet")
            save_network(cnet, norm_scale, path);
        else if (kind == "dnn")
            save_network(rnet, norm_scale, path);
        else
            throw std::logic_error("TrainedModel: unknown kind '" + kind + "'");
    }

    TrainedModel TrainedModel::load(const std::string &path)
    {
        const auto bytes = read_file_bytes(path);
        if (bytes.size() < 4)
            throw format_error("file too short for a checkpoint magic", 0);
        const std::string magic(reinterpret_cast<const char *>(bytes.data()), 4);

        TrainedModel model;
        if (magic == "PRNW")
        {
            auto loaded = load_network(path);
            model.kind = "prnet";
            model.cnet = std::move(loaded.net);
            model.norm_scale = loaded.norm_scale;
        }
        else if (magic == "PRNR")
        {
            auto loaded = load_real_network(path);
            model.kind = "dnn";
            model.rnet = std::move(loaded.net);
            model.norm_scale = loaded.norm_scale;
        }
        else
        {
            throw format_error("unknown checkpoint magic '" + magic + "'", 0);
        }
        return model;
    }

    TrainedModel train_model(const ExperimentContext &ctx, const Dataset &dataset,
                             const std::string &kind, TrainReport *report)
    {
        if (kind != "prnet" && kind != "dnn")
            throw std::invalid_argument("train_model: model must be 'prnet' or 'dnn'");
        if (ctx.config.num_modes < 2)
            throw std::invalid_argument("train_model: nothing to extrapolate with a single mode");
        if (dataset.num_tx != ctx.config.num_tx || dataset.num_rx != ctx.config.num_rx ||
            dataset.num_modes != ctx.config.num_modes ||
            dataset.master_seed != ctx.config.master_seed)
            throw std::invalid_argument("train_model: dataset header does not match the configuration");
        if (dataset.train_indices.n_elem == 0)
            throw std::invalid_argument("train_model: empty training split");

        const arma::cx_mat train_in = dataset.inputs.cols(dataset.train_indices);
        const arma::cx_mat train_tg = dataset.targets.cols(dataset.train_indices);

        // One global scalar brings the training set to unit average
        // per-entry power; inverted again at inference.
        const double power =
            (arma::accu(arma::square(arma::abs(train_in))) +
             arma::accu(arma::square(arma::abs(train_tg)))) /
            static_cast<double>(train_in.n_elem + train_tg.n_elem);
        const double scale = power > 0.0 ? 1.0 / std::sqrt(power) : 1.0;

        TrainOptions opt;
        opt.adam.learning_rate = ctx.config.learning_rate;
        opt.batch_size = std::min<arma::uword>(ctx.config.batch_size, train_in.n_cols);
        opt.epochs = ctx.config.epochs;
        opt.shuffle_seed = split_seed(ctx.config.master_seed, stream::shuffle);

        const bool has_test = dataset.test_indices.n_elem > 0;
        const arma::cx_mat val_in = has_test ? arma::cx_mat(dataset.inputs.cols(dataset.test_indices))
                                             : arma::cx_mat();
        const arma::cx_mat val_tg = has_test ? arma::cx_mat(dataset.targets.cols(dataset.test_indices))
                                             : arma::cx_mat();

        TrainedModel model;
        model.kind = kind;
        model.norm_scale = scale;

        const std::uint64_t init_seed = split_seed(ctx.config.master_seed, stream::net_init);
        TrainReport local;
        if (kind == "prnet")
        {
            model.cnet = ComplexNetwork::init(prnet_dims(ctx.config), init_seed);
            local = train_network(model.cnet, arma::cx_mat(scale * train_in),
                                  arma::cx_mat(scale * train_tg),
                                  arma::cx_mat(scale * val_in), arma::cx_mat(scale * val_tg), opt);
        }
        else
        {
            model.rnet = RealNetwork::init(baseline_dims(ctx.config), init_seed);
            local = train_network(model.rnet, embed_complex(scale * train_in),
                                  embed_complex(scale * train_tg),
                                  embed_complex(scale * val_in), embed_complex(scale * val_tg), opt);
        }
        if (report)
            *report = std::move(local);
        return model;
    }

    double evaluate_dataset(const TrainedModel &model, const Dataset &dataset)
    {
        if (dataset.test_indices.n_elem == 0)
            throw std::invalid_argument("evaluate: dataset has no test split");
        const arma::cx_mat in = dataset.inputs.cols(dataset.test_indices);
        const arma::cx_mat tg = dataset.targets.cols(dataset.test_indices);
        return nmse(tg, model.predict(in));
    }

    double evaluate_at_snr(const ExperimentContext &ctx, const TrainedModel &model,
                           const Dataset &dataset, double snr_db)
    {
        if (dataset.test_indices.n_elem == 0)
            throw std::invalid_argument("evaluate: dataset has no test split");
        if (dataset.master_seed != ctx.config.master_seed ||
            dataset.num_tx != ctx.config.num_tx || dataset.num_rx != ctx.config.num_rx ||
            dataset.num_modes != ctx.config.num_modes)
            throw std::invalid_argument("evaluate: dataset header does not match the configuration");

        arma::cx_mat in(ctx.layout.input_length(), dataset.test_indices.n_elem);
        arma::cx_mat tg(ctx.layout.target_length(), dataset.test_indices.n_elem);
        for (arma::uword k = 0; k < dataset.test_indices.n_elem; ++k)
        {
            const Sample s = build_sample(ctx, sample_seed(dataset.master_seed,
                                                           dataset.test_indices(k)),
                                          snr_db);
            in.col(k) = s.input;
            tg.col(k) = s.target;
        }
        return nmse(tg, model.predict(in));
    }

    namespace
    {
        SweepPoint make_point(double axis_value, double nmse_linear, arma::uword count,
                              const std::string &model)
        {
            SweepPoint p;
            p.axis_value = axis_value;
            p.nmse_linear = nmse_linear;
            p.nmse_db = to_db(nmse_linear);
            p.sample_count = count;
            p.model = model;
            return p;
        }

        template <class T>
        void reject_duplicates(const std::vector<T> &values, const char *what)
        {
            std::set<T> seen(values.begin(), values.end());
            if (seen.size() != values.size())
                throw std::invalid_argument(std::string("sweep: duplicate ") + what + " values");
        }
    }

    SweepResult run_snr_sweep(const ExperimentConfig &cfg)
    {
        cfg.validate();
        if (cfg.snr_sweep_db.empty())
            throw std::invalid_argument("sweep: empty SNR list");
        reject_duplicates(cfg.snr_sweep_db, "SNR");

        const ExperimentContext ctx = ExperimentContext::prepare(cfg);
        const Dataset dataset = build_dataset(ctx);
        const TrainedModel model = train_model(ctx, dataset, cfg.model);

        SweepResult result;
        result.axis_name = "snr_db";
        result.config_checksum = config_checksum(cfg);
        for (double snr : cfg.snr_sweep_db)
            result.points.push_back(make_point(
                snr, evaluate_at_snr(ctx, model, dataset, snr),
                dataset.test_indices.n_elem, cfg.model));
        return result;
    }

    SweepResult run_antenna_sweep(const ExperimentConfig &cfg)
    {
        cfg.validate();
        if (cfg.antenna_sweep.empty())
            throw std::invalid_argument("sweep: empty antenna list");
        reject_duplicates(cfg.antenna_sweep, "antenna");
        for (arma::uword m : cfg.antenna_sweep)
            if (m < cfg.num_modes)
                throw std::invalid_argument("sweep: antenna count below the mode count");

        SweepResult result;
        result.axis_name = "m";
        result.config_checksum = config_checksum(cfg);
        for (arma::uword m : cfg.antenna_sweep)
        {
            ExperimentConfig point_cfg = cfg;
            point_cfg.num_tx = m;
            const ExperimentContext ctx = ExperimentContext::prepare(point_cfg);
            const Dataset dataset = build_dataset(ctx);
            const TrainedModel model = train_model(ctx, dataset, cfg.model);
            result.points.push_back(make_point(
                static_cast<double>(m), evaluate_at_snr(ctx, model, dataset, cfg.eval_snr_db),
                dataset.test_indices.n_elem, cfg.model));
        }
        return result;
    }

    SweepResult run_mode_sweep(const ExperimentConfig &cfg)
    {
        cfg.validate();
        if (cfg.mode_sweep.empty())
            throw std::invalid_argument("sweep: empty mode list");
        reject_duplicates(cfg.mode_sweep, "mode");
        for (arma::uword p : cfg.mode_sweep)
        {
            if (p < 2)
                throw std::invalid_argument("sweep: mode count must be >= 2, nothing to extrapolate");
            if (p > cfg.num_tx)
                throw std::invalid_argument("sweep: mode count above the antenna count");
        }

        SweepResult result;
        result.axis_name = "p";
        result.config_checksum = config_checksum(cfg);
        for (arma::uword p : cfg.mode_sweep)
        {
            ExperimentConfig point_cfg = cfg;
            point_cfg.num_modes = p;
            const ExperimentContext ctx = ExperimentContext::prepare(point_cfg);
            const Dataset dataset = build_dataset(ctx);
            const TrainedModel model = train_model(ctx, dataset, cfg.model);
            result.points.push_back(make_point(
                static_cast<double>(p), evaluate_at_snr(ctx, model, dataset, cfg.eval_snr_db),
                dataset.test_indices.n_elem, cfg.model));
        }
        return result;
    }

    std::string to_csv(const SweepResult &result)
    {
        std::ostringstream out;
        out << result.axis_name << ",nmse_linear,nmse_db,model\n";
        for (const auto &p : result.points)
            out << fmt_double(p.axis_value) << "," << fmt_double(p.nmse_linear) << ","
                << fmt_double(p.nmse_db) << "," << p.model << "\n";
        return out.str();
    }

    SweepResult parse_csv(const std::string &text)
    {
        std::stringstream ss(text);
        std::string line;
        if (!std::getline(ss, line))
            throw std::invalid_argument("csv: empty input");

        SweepResult result;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.substr(comma) != ",nmse_linear,nmse_db,model")
            throw std::invalid_argument("csv: unexpected header row: " + line);
        result.axis_name = line.substr(0, comma);

        while (std::getline(ss, line))
        {
            if (line.empty())
                continue;
            std::stringstream row(line);
            std::string a, b, c, d;
            if (!std::getline(row, a, ',') || !std::getline(row, b, ',') ||
                !std::getline(row, c, ',') || !std::getline(row, d))
                throw std::invalid_argument("csv: malformed row: " + line);
            SweepPoint p;
            p.axis_value = std::stod(a);
            p.nmse_linear = std::stod(b);
            p.nmse_db = std::stod(c);
            p.model = d;
            result.points.push_back(std::move(p));
        }
        return result;
    }
}
