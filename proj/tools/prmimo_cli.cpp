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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "prmimo/bench.hpp"
#include "prmimo/binio.hpp"
#include "prmimo/dataset.hpp"
#include "prmimo/experiment.hpp"

namespace fs = std::filesystem;

namespace
{
    struct CommonArgs
    {
        std::string config_path;
        std::string out_dir = "out";
        std::optional<std::uint64_t> seed;
        std::optional<std::string> model;
        bool paper_scale = false;
        std::vector<double> snr_list;
        std::vector<std::uint64_t> antenna_list;
        std::vector<std::uint64_t> mode_list;
    };

    void add_common(CLI::App *cmd, CommonArgs &args)
    {
        cmd->add_option("--config", args.config_path, "key = value configuration file");
        cmd->add_option("--seed", args.seed, "master seed override");
        cmd->add_option("--out", args.out_dir, "output directory");
        cmd->add_option("--model", args.model, "prnet or dnn")
            ->check(CLI::IsMember({"prnet", "dnn"}));
        cmd->add_flag("--paper-scale", args.paper_scale, "start from the full-scale defaults");
        cmd->add_option("--snr", args.snr_list, "SNR values in dB")->delimiter(',');
        cmd->add_option("--antennas", args.antenna_list, "antenna counts")->delimiter(',');
        cmd->add_option("--modes", args.mode_list, "mode counts")->delimiter(',');
    }

    prmimo::ExperimentConfig resolve_config(const CommonArgs &args)
    {
        prmimo::ExperimentConfig cfg = args.paper_scale
                                           ? prmimo::ExperimentConfig::paper_scale()
                                           : prmimo::ExperimentConfig::desk_scale();
        if (!args.config_path.empty())
            cfg = prmimo::load_config_file(args.config_path, cfg);
        if (args.seed)
            cfg.master_seed = *args.seed;
        if (args.model)
            cfg.model = *args.model;
        if (!args.snr_list.empty())
            cfg.snr_sweep_db = args.snr_list;
        if (!args.antenna_list.empty())
        {
            cfg.antenna_sweep.assign(args.antenna_list.begin(), args.antenna_list.end());
        }
        if (!args.mode_list.empty())
        {
            cfg.mode_sweep.assign(args.mode_list.begin(), args.mode_list.end());
        }
        cfg.validate();
        return cfg;
    }

    void write_text(const fs::path &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        out << text;
    }

    // Every run leaves a self-describing record behind.
    fs::path prepare_out_dir(const CommonArgs &args, const prmimo::ExperimentConfig &cfg)
    {
        fs::path dir(args.out_dir);
        fs::create_directories(dir);
        write_text(dir / "config.txt", prmimo::serialize_config(cfg));
        return dir;
    }

    std::string report_csv(const prmimo::TrainReport &report)
    {
        std::ostringstream out;
        out << "epoch,train_loss,validation_nmse_db,seconds\n";
        for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
        {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.6f,%.3f\n", e + 1,
                          report.epoch_loss[e],
                          prmimo::to_db(report.epoch_validation_nmse[e]),
                          report.epoch_seconds[e]);
            out << buf;
        }
        return out.str();
    }

    int cmd_generate(const CommonArgs &args)
    {
        const auto cfg = resolve_config(args);
        const auto dir = prepare_out_dir(args, cfg);
        const auto ctx = prmimo::ExperimentContext::prepare(cfg);
        const auto dataset = prmimo::build_dataset(ctx);
        const auto path = dir / "dataset.prnc";
        prmimo::write_dataset(dataset, path.string());

        const auto bytes = prmimo::read_file_bytes(path.string());
        std::printf("wrote %s: %llu samples (%llu train / %llu test), %zu bytes, fnv1a %016llx\n",
                    path.c_str(),
                    static_cast<unsigned long long>(dataset.sample_count()),
                    static_cast<unsigned long long>(dataset.train_indices.n_elem),
                    static_cast<unsigned long long>(dataset.test_indices.n_elem),
                    bytes.size(),
                    static_cast<unsigned long long>(prmimo::fnv1a(bytes.data(), bytes.size())));
        return 0;
    }

    int cmd_train(const CommonArgs &args, const std::string &dataset_path)
    {
        const auto cfg = resolve_config(args);
        const auto dir = prepare_out_dir(args, cfg);
        const auto ctx = prmimo::ExperimentContext::prepare(cfg);
        const auto dataset = dataset_path.empty()
                                 ? prmimo::build_dataset(ctx)
                                 : prmimo::read_dataset(dataset_path);

        prmimo::TrainReport report;
        const auto model = prmimo::train_model(ctx, dataset, cfg.model, &report);
        const auto model_path = dir / (cfg.model == "prnet" ? "model.prnw" : "model.prnr");
        model.save(model_path.string());
        write_text(dir / "train_report.csv", report_csv(report));

        std::printf("trained %s (%llu real parameters) -> %s\n", cfg.model.c_str(),
                    static_cast<unsigned long long>(model.parameter_count()),
                    model_path.c_str());
        if (!report.epoch_loss.empty())
            std::printf("final training loss %.6g, final validation NMSE %.3f dB\n",
                        report.epoch_loss.back(),
                        prmimo::to_db(report.epoch_validation_nmse.back()));
        std::printf("parameter checksum %016llx\n",
                    static_cast<unsigned long long>(report.final_parameter_checksum));
        return 0;
    }

    int cmd_evaluate(const CommonArgs &args, const std::string &dataset_path,
                     const std::string &model_path, std::optional<double> at_snr)
    {
        const auto cfg = resolve_config(args);
        const auto dir = prepare_out_dir(args, cfg);
        if (model_path.empty())
            throw std::invalid_argument("evaluate: --model-file is required (training disabled here)");
        const auto model = prmimo::TrainedModel::load(model_path);
        const auto dataset = prmimo::read_dataset(dataset_path);

        double value = 0.0;
        if (at_snr)
        {
            const auto ctx = prmimo::ExperimentContext::prepare(cfg);
            value = prmimo::evaluate_at_snr(ctx, model, dataset, *at_snr);
        }
        else
        {
            value = prmimo::evaluate_dataset(model, dataset);
        }

        char buf[128];
        std::snprintf(buf, sizeof(buf), "nmse_linear = %.17g\nnmse_db = %.17g\n",
                      value, prmimo::to_db(value));
        write_text(dir / "metrics.txt", buf);
        std::printf("NMSE %.4f dB (%.6g linear) over %llu test samples\n", prmimo::to_db(value),
                    value, static_cast<unsigned long long>(dataset.test_indices.n_elem));
        return 0;
    }

    int cmd_sweep(const CommonArgs &args, const std::string &axis)
    {
        const auto cfg = resolve_config(args);
        const auto dir = prepare_out_dir(args, cfg);

        prmimo::SweepResult result;
        if (axis == "snr")
            result = prmimo::run_snr_sweep(cfg);
        else if (axis == "antennas")
            result = prmimo::run_antenna_sweep(cfg);
        else if (axis == "modes")
            result = prmimo::run_mode_sweep(cfg);
        else
            throw std::invalid_argument("sweep: axis must be snr, antennas or modes");

        const std::string csv = prmimo::to_csv(result);
        write_text(dir / ("sweep_" + axis + ".csv"), csv);
        std::fputs(csv.c_str(), stdout);
        return 0;
    }

    int cmd_inspect(const std::string &path)
    {
        const auto bytes = prmimo::read_file_bytes(path);
        if (bytes.size() < 4)
            throw prmimo::format_error("file too short for a magic tag", 0);
        const std::string magic(reinterpret_cast<const char *>(bytes.data()), 4);

        if (magic == "PRNC")
        {
            const auto d = prmimo::read_dataset(path);
            std::printf("PRNC dataset\n");
            std::printf("  num_tx = %llu, num_rx = %llu, num_modes = %llu\n",
                        static_cast<unsigned long long>(d.num_tx),
                        static_cast<unsigned long long>(d.num_rx),
                        static_cast<unsigned long long>(d.num_modes));
            std::printf("  samples = %llu (train %llu / test %llu), test fraction %u/%u\n",
                        static_cast<unsigned long long>(d.sample_count()),
                        static_cast<unsigned long long>(d.train_indices.n_elem),
                        static_cast<unsigned long long>(d.test_indices.n_elem),
                        d.test_fraction_num, d.test_fraction_den);
            std::printf("  train SNR = %.2f dB, master seed = %llu, layout v%u\n", d.train_snr_db,
                        static_cast<unsigned long long>(d.master_seed), d.layout);
        }
        else if (magic == "PRNW" || magic == "PRNR")
        {
            const auto model = prmimo::TrainedModel::load(path);
            const auto dims = magic == "PRNW" ? model.cnet.dims() : model.rnet.dims();
            std::printf("%s checkpoint (%s)\n", magic.c_str(), model.kind.c_str());
            std::printf("  dims = ");
            for (std::size_t i = 0; i < dims.size(); ++i)
                std::printf("%s%llu", i ? " x " : "", static_cast<unsigned long long>(dims[i]));
            std::printf("\n  real parameters = %llu\n",
                        static_cast<unsigned long long>(model.parameter_count()));
            std::printf("  normalization scale = %.17g\n", model.norm_scale);
        }
        else
        {
            throw prmimo::format_error("unknown magic '" + magic + "'", 0);
        }
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"channel estimation and extrapolation benchmark for "
                 "pattern-reconfigurable MIMO arrays"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string dataset_path, model_path, sweep_axis, inspect_path;
    std::optional<double> at_snr;

    auto *generate = app.add_subcommand("generate", "build and serialize a dataset");
    add_common(generate, args);

    auto *train = app.add_subcommand("train", "train a model from a dataset");
    add_common(train, args);
    train->add_option("--dataset", dataset_path, "PRNC dataset file (default: regenerate)");

    auto *evaluate = app.add_subcommand("evaluate", "NMSE of a trained model on a dataset");
    add_common(evaluate, args);
    evaluate->add_option("--dataset", dataset_path, "PRNC dataset file")->required();
    evaluate->add_option("--model-file", model_path, "PRNW or PRNR checkpoint")->required();
    evaluate->add_option("--at-snr", at_snr, "regenerate test inputs at this SNR (dB)");

    auto *sweep = app.add_subcommand("sweep", "run an axis sweep and emit CSV");
    add_common(sweep, args);
    sweep->add_option("axis", sweep_axis, "snr | antennas | modes")->required();

    auto *inspect = app.add_subcommand("inspect", "dump the header of a prmimo binary file");
    inspect->add_option("path", inspect_path, "file to inspect")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage errors exit with 2
    }

    try
    {
        if (generate->parsed())
            return cmd_generate(args);
        if (train->parsed())
            return cmd_train(args, dataset_path);
        if (evaluate->parsed())
            return cmd_evaluate(args, dataset_path, model_path, at_snr);
        if (sweep->parsed())
            return cmd_sweep(args, sweep_axis);
        if (inspect->parsed())
            return cmd_inspect(inspect_path);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
