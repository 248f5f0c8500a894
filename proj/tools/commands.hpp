#pragma once

// Subcommand bodies for the gridframe tool, stream-in / stream-out so they
// can be driven from tests without a process boundary.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gridframe/gridframe.hpp"
#include "gridframe/io.hpp"

namespace gridframe::cli {

enum class Format { Csv, Json };

inline Format parse_format(const std::string& name) {
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    throw ConfigError("unknown format '" + name + "'");
}

/// Re-emits a CSV document as {"columns": [...], "rows": [[...], ...]}.
inline void csv_to_json(const std::string& csv, std::ostream& out) {
    std::istringstream in(csv);
    const io::CsvTable t = io::read_csv(in);
    io::json doc{{"columns", t.header}, {"rows", t.rows}};
    out << doc.dump(2) << '\n';
}

inline void emit_table(const std::string& csv, Format format, std::ostream& out) {
    if (format == Format::Csv) out << csv;
    else csv_to_json(csv, out);
}

/// Seed for the optional noise generator, from GRIDFRAME_SEED.
inline std::uint64_t seed_from_env() {
    const char* v = std::getenv("GRIDFRAME_SEED");
    if (v == nullptr || *v == '\0') return 0;
    char* end = nullptr;
    const unsigned long long seed = std::strtoull(v, &end, 10);
    if (end == v || *end != '\0') throw ConfigError(std::string("GRIDFRAME_SEED is not an integer: ") + v);
    return seed;
}

inline void cmd_synth(const io::Scenario& scenario, std::ostream& out, std::uint64_t seed) {
    io::write_samples(out, synth(scenario.config, scenario.duration, seed));
}

struct TransformOptions {
    std::string which = "clarke";
    double omega0 = 2.0 * kPi * 50.0 / 1000.0;
    Format format = Format::Csv;
    std::optional<ThreePhaseConfig> config;  // symmetrical: exact phasors
};

inline void cmd_transform(std::istream* in, const TransformOptions& opt, std::ostream& out) {
    if (opt.which == "symmetrical") {
        PhasorVector pv;
        if (opt.config) {
            pv = phasor_vector(*opt.config);
        } else {
            if (in == nullptr) throw ConfigError("symmetrical needs --input or --config");
            const io::CsvTable t = io::read_csv(*in);
            if (io::classify_table(t) != io::CsvKind::ThreePhase)
                throw ParseError("symmetrical needs a k,va,vb,vc series");
            pv = estimate_phasors(io::to_samples(t), opt.omega0);
        }
        out << io::to_json(symmetrical(pv)).dump(2) << '\n';
        return;
    }

    if (in == nullptr) throw ConfigError("transform needs --input");
    const io::CsvTable t = io::read_csv(*in);
    std::ostringstream csv;
    if (opt.which == "clarke") {
        if (io::classify_table(t) != io::CsvKind::ThreePhase) throw ParseError("clarke needs a k,va,vb,vc series");
        io::write_clarke(csv, clarke_full(io::to_samples(t)));
    } else if (opt.which == "clarke3") {
        io::write_complex(csv, io::to_complex(t));
    } else if (opt.which == "park") {
        const Series<AlphaBeta> ab = io::to_alpha_beta(t);
        io::write_park(csv, park(ab, nominal_angles(ab, opt.omega0)));
    } else {
        throw ConfigError("unknown transform '" + opt.which + "' (expected clarke, clarke3, park or symmetrical)");
    }
    emit_table(csv.str(), opt.format, out);
}

inline EstimatorTrace estimate_from(std::istream& in, const EstimatorOptions& options) {
    options.validate();
    const io::CsvTable t = io::read_csv(in);
    return run_pipeline(io::to_complex(t), options);
}

inline void cmd_estimate(std::istream& in, const EstimatorOptions& options, Format format, std::ostream& out) {
    const EstimatorTrace trace = estimate_from(in, options);
    std::ostringstream csv;
    io::write_trace(csv, trace);
    emit_table(csv.str(), format, out);
}

struct DiagnoseOptions {
    EstimatorOptions estimator;
    double threshold = kDefaultBalanceThreshold;
    double rank_tolerance = 1e-6;
};

inline io::json diagnose(const io::CsvTable& t, const DiagnoseOptions& opt) {
    if (t.rows.empty()) throw DimensionError("diagnose: input has no samples");
    io::json report;
    if (io::classify_table(t) == io::CsvKind::ThreePhase) {
        const SampleSeries s = io::to_samples(t);
        const Covariance3 cov = empirical_covariance(s);
        report["covariance"] = io::to_json(cov, eigen3(cov));
        report["rank"] = rank_estimate(cov, opt.rank_tolerance);
    }
    const ComplexSeries clarke = io::to_complex(t);
    report["circularity"] = io::to_json(circularity(clarke));

    const EstimatorTrace trace = run_pipeline(clarke, opt.estimator);
    const TraceRecord& last = trace.back();
    ComplexSeries balanced{trace.records[trace.size() / 2].k, {}};
    for (std::size_t i = trace.size() / 2; i < trace.size(); ++i) balanced.samples.push_back(trace.records[i].mbar);
    if (balanced.size() >= 2) report["adaptive_circularity"] = io::to_json(circularity(balanced));

    const Vuf vuf{last.kappa, last.low_confidence};
    report["kappa"] = io::complex_json(last.kappa);
    report["frequency_hz"] = last.frequency_hz;
    report["verdict"] = io::to_json(classify(vuf, opt.threshold));
    return report;
}

inline void cmd_diagnose(std::istream& in, const DiagnoseOptions& opt, std::ostream& out) {
    out << diagnose(io::read_csv(in), opt).dump(2) << '\n';
}

/// Regenerates the reference scenarios: balanced circle, Type C and D
/// ellipses, the Park frequency-step transient and self-balancing.
inline void cmd_demo(const std::filesystem::path& dir, std::ostream& log) {
    std::filesystem::create_directories(dir);
    constexpr std::int64_t n = 4000;
    ThreePhaseConfig balanced;
    auto with_sag = [&](SagType type, double depth) {
        ThreePhaseConfig c = balanced;
        c.sag_events.push_back({type, depth, 0, n});
        return c;
    };
    auto write_file = [&](const std::string& name, auto&& writer) {
        std::ofstream f(dir / name);
        if (!f) throw ConfigError("cannot write " + (dir / name).string());
        writer(f);
        log << "wrote " << (dir / name).string() << '\n';
    };

    io::json summary;
    const std::pair<const char*, ThreePhaseConfig> trajectories[] = {
        {"balanced", balanced}, {"type_c", with_sag(SagType::TypeC, 0.5)}, {"type_d", with_sag(SagType::TypeD, 0.5)}};
    for (const auto& [name, cfg] : trajectories) {
        const ComplexSeries s = clarke_complex(synth(cfg, 200));
        write_file(std::string(name) + "_clarke.csv", [&](std::ostream& f) { io::write_complex(f, s); });
        summary[name] = io::to_json(circularity(s));
    }

    // Frequency drop halfway through a run with a Type C sag.
    ThreePhaseConfig transient = with_sag(SagType::TypeC, 0.8);
    transient.frequency_events.push_back({n / 2, 49.5});
    const SampleSeries raw = synth(transient, n);
    const ComplexSeries clarke = clarke_complex(raw);
    const ComplexSeries classical = park_complex(clarke, nominal_angles(clarke, balanced.base_omega()));
    const EstimatorTrace trace = run_pipeline(clarke, EstimatorOptions{});
    write_file("park_transient.csv", [&](std::ostream& f) {
        f << "k,park_vd,park_vq,adaptive_vd,adaptive_vq,freq_hz\n";
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const auto& r = trace.records[i];
            f << r.k << ',' << io::format_number(classical[i].real()) << ',' << io::format_number(classical[i].imag())
              << ',' << io::format_number(r.mtilde.real()) << ',' << io::format_number(r.mtilde.imag()) << ','
              << io::format_number(r.frequency_hz) << '\n';
        }
    });

    const ThreePhaseConfig sagged = with_sag(SagType::TypeD, 0.5);
    const ComplexSeries sag_clarke = clarke_complex(synth(sagged, n));
    const EstimatorTrace sag_trace = run_pipeline(sag_clarke, EstimatorOptions{});
    write_file("self_balancing.csv", [&](std::ostream& f) {
        f << "k,clarke_re,clarke_im,adaptive_re,adaptive_im\n";
        for (std::size_t i = 0; i < sag_trace.size(); ++i) {
            const auto& r = sag_trace.records[i];
            f << r.k << ',' << io::format_number(sag_clarke[i].real()) << ','
              << io::format_number(sag_clarke[i].imag()) << ',' << io::format_number(r.mbar.real()) << ','
              << io::format_number(r.mbar.imag()) << '\n';
        }
    });
    ComplexSeries settled{sag_trace.records[n / 2].k, {}};
    for (std::size_t i = n / 2; i < sag_trace.size(); ++i) settled.samples.push_back(sag_trace.records[i].mbar);
    summary["self_balancing"] = io::to_json(circularity(settled));
    write_file("summary.json", [&](std::ostream& f) { f << summary.dump(2) << '\n'; });
}

}  // namespace gridframe::cli
