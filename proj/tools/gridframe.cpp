#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

using namespace gridframe;

struct Streams {
    std::unique_ptr<std::ifstream> in_file;
    std::unique_ptr<std::ofstream> out_file;
    std::istream* in = nullptr;
    std::ostream* out = &std::cout;
};

std::istream* open_input(Streams& s, const std::string& path) {
    if (path.empty()) return nullptr;
    if (path == "-") return s.in = &std::cin;
    s.in_file = std::make_unique<std::ifstream>(path);
    if (!*s.in_file) throw ConfigError("cannot open input '" + path + "'");
    return s.in = s.in_file.get();
}

std::ostream& open_output(Streams& s, const std::string& path) {
    if (path.empty() || path == "-") return *(s.out = &std::cout);
    s.out_file = std::make_unique<std::ofstream>(path);
    if (!*s.out_file) throw ConfigError("cannot open output '" + path + "'");
    return *(s.out = s.out_file.get());
}

io::json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    try {
        return io::parse_json(f);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Three-phase Clarke/Park/symmetrical transforms and adaptive frequency/unbalance tracking"};
    app.require_subcommand(1);

    std::string config_path, input_path, output_path, which = "clarke", format_name = "csv";
    double mu = 0.01, fs = 1000.0, f0 = 50.0, threshold = kDefaultBalanceThreshold, rank_tol = 1e-6;
    std::optional<double> omega0;
    std::optional<std::int64_t> samples;

    auto* synth_cmd = app.add_subcommand("synth", "Synthesize three-phase samples from a scenario file");
    synth_cmd->add_option("--config", config_path, "Scenario JSON")->required();
    synth_cmd->add_option("--output", output_path, "Output CSV (- for stdout)");
    synth_cmd->add_option("--samples", samples, "Override the scenario duration");

    auto* transform_cmd = app.add_subcommand("transform", "Apply a static transform");
    transform_cmd->add_option("--input", input_path, "Input CSV (- for stdin)");
    transform_cmd->add_option("--output", output_path, "Output file (- for stdout)");
    transform_cmd->add_option("--which", which, "clarke | clarke3 | park | symmetrical");
    transform_cmd->add_option("--config", config_path, "Config JSON (symmetrical: exact phasors)");
    transform_cmd->add_option("--omega0", omega0, "Nominal frequency in rad/sample (park, symmetrical)");
    transform_cmd->add_option("--fs", fs, "Sample rate in Hz");
    transform_cmd->add_option("--f0", f0, "Nominal frequency in Hz");
    transform_cmd->add_option("--format", format_name, "csv | json");

    auto* estimate_cmd = app.add_subcommand("estimate", "Adaptive Clarke/Park with ACLMS tracking");
    estimate_cmd->add_option("--input", input_path, "Input CSV (- for stdin)")->required();
    estimate_cmd->add_option("--output", output_path, "Output trace CSV (- for stdout)");
    estimate_cmd->add_option("--mu", mu, "ACLMS learning rate");
    estimate_cmd->add_option("--fs", fs, "Sample rate in Hz");
    estimate_cmd->add_option("--config", config_path, "Config JSON providing the sample rate");
    estimate_cmd->add_option("--format", format_name, "csv | json");

    auto* diagnose_cmd = app.add_subcommand("diagnose", "Covariance, circularity and balance verdict");
    diagnose_cmd->add_option("--input", input_path, "Input CSV (- for stdin)")->required();
    diagnose_cmd->add_option("--output", output_path, "Output JSON (- for stdout)");
    diagnose_cmd->add_option("--mu", mu, "ACLMS learning rate");
    diagnose_cmd->add_option("--fs", fs, "Sample rate in Hz");
    diagnose_cmd->add_option("--threshold", threshold, "|kappa| cutoff for Balanced");
    diagnose_cmd->add_option("--rank-tol", rank_tol, "Relative eigenvalue cutoff for the rank");

    auto* demo_cmd = app.add_subcommand("demo", "Write the reference scenario CSVs into a directory");
    demo_cmd->add_option("--output", output_path, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    Streams streams;
    try {
        if (synth_cmd->parsed()) {
            io::Scenario scenario = io::scenario_from_json(read_json_file(config_path));
            if (samples) {
                if (*samples <= 0) throw ConfigError("--samples must be positive");
                scenario.duration = *samples;
            }
            cli::cmd_synth(scenario, open_output(streams, output_path), cli::seed_from_env());
        } else if (transform_cmd->parsed()) {
            cli::TransformOptions opt;
            opt.which = which;
            opt.format = cli::parse_format(format_name);
            if (!config_path.empty()) {
                opt.config = io::config_from_json(read_json_file(config_path));
                fs = opt.config->sample_rate_hz;
                f0 = opt.config->base_frequency_hz;
            }
            opt.omega0 = omega0 ? *omega0 : 2.0 * kPi * f0 / fs;
            std::istream* in = open_input(streams, input_path);
            cli::cmd_transform(in, opt, open_output(streams, output_path));
        } else if (estimate_cmd->parsed()) {
            EstimatorOptions opt;
            opt.mu = mu;
            opt.sample_rate_hz = config_path.empty() ? fs : io::config_from_json(read_json_file(config_path)).sample_rate_hz;
            opt.validate();
            std::istream* in = open_input(streams, input_path);
            cli::cmd_estimate(*in, opt, cli::parse_format(format_name), open_output(streams, output_path));
        } else if (diagnose_cmd->parsed()) {
            cli::DiagnoseOptions opt;
            opt.estimator.mu = mu;
            opt.estimator.sample_rate_hz = fs;
            opt.estimator.validate();
            opt.threshold = threshold;
            opt.rank_tolerance = rank_tol;
            std::istream* in = open_input(streams, input_path);
            cli::cmd_diagnose(*in, opt, open_output(streams, output_path));
        } else if (demo_cmd->parsed()) {
            cli::cmd_demo(output_path, std::cerr);
        }
        if (streams.out) streams.out->flush();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
