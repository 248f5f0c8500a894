#pragma once

// CSV and JSON formats used by the command-line tool.
//
// CSV: LF line endings, a header row, numbers written as the shortest
// decimal that round-trips (so piping between commands is lossless).

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "gridframe/adaptive_estimator.hpp"
#include "gridframe/diagnostics.hpp"
#include "gridframe/error.hpp"
#include "gridframe/series.hpp"
#include "gridframe/signal_model.hpp"
#include "gridframe/subspace.hpp"
#include "gridframe/transforms.hpp"

namespace gridframe::io {

using nlohmann::json;

inline std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view field, std::size_t line) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
        field.remove_suffix(1);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw ParseError("line " + std::to_string(line) + ": cannot parse number '" + std::string(field) + "'");
    return value;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ParseError("missing CSV column '" + std::string(name) + "'");
    }
    std::vector<double> values(std::string_view name) const {
        const std::size_t c = column(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
    }
    bool has_column(std::string_view name) const {
        for (const auto& h : header)
            if (h == name) return true;
        return false;
    }
};

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (table.header.empty()) {
            for (auto f : split_fields(line)) {
                std::string name(f);
                name.erase(0, name.find_first_not_of(" \t"));
                name.erase(name.find_last_not_of(" \t") + 1);
                table.header.push_back(std::move(name));
            }
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != table.header.size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                             " fields, found " + std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto f : fields) {
            const double v = parse_number(f, line_no);
            if (!std::isfinite(v)) throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
        table.line_numbers.push_back(line_no);
    }
    if (table.header.empty()) throw ParseError("empty CSV input");
    return table;
}

namespace detail {

inline std::int64_t checked_start_index(const CsvTable& t) {
    const std::size_t kc = t.column("k");
    std::int64_t start = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double k = t.rows[i][kc];
        const auto ki = static_cast<std::int64_t>(k);
        if (static_cast<double>(ki) != k)
            throw ParseError("line " + std::to_string(t.line_numbers[i]) + ": sample index is not an integer");
        if (i == 0) start = ki;
        else if (ki != start + static_cast<std::int64_t>(i))
            throw ParseError("line " + std::to_string(t.line_numbers[i]) + ": sample index " + std::to_string(ki) +
                             " is not consecutive");
    }
    return start;
}

}  // namespace detail

enum class CsvKind { ThreePhase, Clarke, Complex, Unknown };

inline CsvKind classify_table(const CsvTable& t) {
    if (t.has_column("va") && t.has_column("vb") && t.has_column("vc")) return CsvKind::ThreePhase;
    if (t.has_column("valpha") && t.has_column("vbeta")) return CsvKind::Clarke;
    if (t.has_column("re") && t.has_column("im")) return CsvKind::Complex;
    return CsvKind::Unknown;
}

inline SampleSeries to_samples(const CsvTable& t) {
    const std::size_t a = t.column("va"), b = t.column("vb"), c = t.column("vc");
    SampleSeries s;
    s.start_index = detail::checked_start_index(t);
    s.samples.reserve(t.rows.size());
    for (const auto& r : t.rows) s.samples.push_back({r[a], r[b], r[c]});
    return s;
}

inline Series<AlphaBeta> to_alpha_beta(const CsvTable& t) {
    Series<AlphaBeta> s;
    s.start_index = detail::checked_start_index(t);
    switch (classify_table(t)) {
        case CsvKind::ThreePhase: return clarke_reduced(to_samples(t));
        case CsvKind::Clarke: {
            const std::size_t a = t.column("valpha"), b = t.column("vbeta");
            for (const auto& r : t.rows) s.samples.push_back({r[a], r[b]});
            return s;
        }
        case CsvKind::Complex: {
            const std::size_t a = t.column("re"), b = t.column("im");
            for (const auto& r : t.rows) s.samples.push_back({r[a], r[b]});
            return s;
        }
        default: throw ParseError("CSV header is not a three-phase, Clarke or complex series");
    }
}

/// Complex Clarke voltage from any supported input table.
inline ComplexSeries to_complex(const CsvTable& t) {
    if (classify_table(t) == CsvKind::ThreePhase) return clarke_complex(to_samples(t));
    const Series<AlphaBeta> ab = to_alpha_beta(t);
    ComplexSeries out{ab.start_index, {}};
    out.samples.reserve(ab.size());
    for (const auto& x : ab.samples) out.samples.emplace_back(x.valpha, x.vbeta);
    return out;
}

template <typename T, typename RowWriter>
void write_csv(std::ostream& out, std::string_view header, const Series<T>& s, RowWriter&& row) {
    out << header << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << s.index_of(i);
        row(s[i]);
        out << '\n';
    }
}

inline void write_samples(std::ostream& out, const SampleSeries& s) {
    write_csv(out, "k,va,vb,vc", s, [&](const PhaseTriple& v) {
        out << ',' << format_number(v[0]) << ',' << format_number(v[1]) << ',' << format_number(v[2]);
    });
}

inline void write_clarke(std::ostream& out, const Series<ClarkeOutput>& s) {
    write_csv(out, "k,v0,valpha,vbeta", s, [&](const ClarkeOutput& v) {
        out << ',' << format_number(v.v0) << ',' << format_number(v.valpha) << ',' << format_number(v.vbeta);
    });
}

inline void write_complex(std::ostream& out, const ComplexSeries& s) {
    write_csv(out, "k,re,im", s,
              [&](const cplx& v) { out << ',' << format_number(v.real()) << ',' << format_number(v.imag()); });
}

inline void write_park(std::ostream& out, const Series<DirectQuadrature>& s) {
    write_csv(out, "k,vd,vq", s,
              [&](const DirectQuadrature& v) { out << ',' << format_number(v.vd) << ',' << format_number(v.vq); });
}

inline void write_real(std::ostream& out, std::string_view column, const RealSeries& s) {
    out << "k," << column << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) out << s.index_of(i) << ',' << format_number(s[i]) << '\n';
}

inline void write_trace(std::ostream& out, const EstimatorTrace& trace) {
    out << "k,h_re,h_im,g_re,g_im,freq_rad,freq_hz,kappa_re,kappa_im,mbar_re,mbar_im,mtilde_re,mtilde_im,"
           "low_confidence\n";
    auto c = [&](cplx z) { out << ',' << format_number(z.real()) << ',' << format_number(z.imag()); };
    for (const auto& r : trace.records) {
        out << r.k;
        c(r.h);
        c(r.g);
        out << ',' << format_number(r.omega) << ',' << format_number(r.frequency_hz);
        c(r.kappa);
        c(r.mbar);
        c(r.mtilde);
        out << ',' << (r.low_confidence ? 1 : 0) << '\n';
    }
}

// ---- JSON ----

inline json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json to_json(const SequencePhasors& p) {
    return json{{"zero", complex_json(p.zero)},
                {"positive", complex_json(p.positive)},
                {"negative", complex_json(p.negative)}};
}

inline json matrix_json(const Mat3& m) {
    json out = json::array();
    for (const auto& row : m) out.push_back(json(std::vector<double>(row.begin(), row.end())));
    return out;
}

inline json to_json(const Covariance3& cov, const EigenDecomposition& eig) {
    json vecs = json::array();
    for (const auto& v : eig.eigenvectors) vecs.push_back(json(std::vector<double>(v.begin(), v.end())));
    return json{{"matrix", matrix_json(cov.entries)},
                {"eigenvalues", std::vector<double>(eig.eigenvalues.begin(), eig.eigenvalues.end())},
                {"eigenvectors", vecs}};
}

inline json to_json(const CircularityReport& r) {
    return json{{"covariance", r.covariance},
                {"pseudo_re", r.pseudo_covariance.real()},
                {"pseudo_im", r.pseudo_covariance.imag()},
                {"coefficient", r.coefficient},
                {"ellipse_major", r.ellipse_major},
                {"ellipse_minor", r.ellipse_minor}};
}

inline json to_json(const BalanceVerdict& v) {
    json out{{"state", to_string(v.state)}, {"vuf_magnitude", v.vuf_magnitude}};
    if (!v.notes.empty()) out["notes"] = v.notes;
    return out;
}

inline json to_json(const ThreePhaseConfig& c) {
    json freq = json::array();
    for (const auto& e : c.frequency_events)
        freq.push_back({{"start_index", e.start_index}, {"new_frequency_hz", e.new_frequency_hz}});
    json sags = json::array();
    for (const auto& s : c.sag_events)
        sags.push_back({{"type", s.type == SagType::TypeC ? "C" : "D"},
                        {"depth", s.depth},
                        {"start_index", s.start_index},
                        {"end_index", s.end_index}});
    return json{{"amplitudes", c.amplitudes},
                {"phases_rad", c.phases_rad},
                {"sample_rate_hz", c.sample_rate_hz},
                {"base_frequency_hz", c.base_frequency_hz},
                {"frequency_events", freq},
                {"sag_events", sags},
                {"noise_variance", c.noise_variance}};
}

namespace detail {

template <typename T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("key '") + key + "': " + e.what());
    }
}

template <typename T>
T optional_value(const json& j, const char* key, T fallback) {
    return j.contains(key) ? required<T>(j, key) : fallback;
}

inline cplx complex_value(const json& j, const char* key, cplx fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    if (v.is_object() && v.contains("re") && v.contains("im")) return {required<double>(v, "re"), required<double>(v, "im")};
    throw ConfigError(std::string("key '") + key + "' must be [re, im] or {re, im}");
}

}  // namespace detail

inline ThreePhaseConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    ThreePhaseConfig c;
    c.amplitudes = detail::required<std::array<double, 3>>(j, "amplitudes");
    c.phases_rad = detail::required<std::array<double, 3>>(j, "phases_rad");
    c.sample_rate_hz = detail::required<double>(j, "sample_rate_hz");
    c.base_frequency_hz = detail::required<double>(j, "base_frequency_hz");
    c.noise_variance = detail::optional_value<double>(j, "noise_variance", 0.0);
    if (j.contains("frequency_events")) {
        for (const auto& e : j.at("frequency_events"))
            c.frequency_events.push_back(
                {detail::required<std::int64_t>(e, "start_index"), detail::required<double>(e, "new_frequency_hz")});
    }
    if (j.contains("sag_events")) {
        for (const auto& e : j.at("sag_events")) {
            SagSpec s;
            const auto type = detail::required<std::string>(e, "type");
            if (type == "C") s.type = SagType::TypeC;
            else if (type == "D") s.type = SagType::TypeD;
            else throw ConfigError("unknown sag type '" + type + "'");
            s.depth = detail::required<double>(e, "depth");
            s.start_index = detail::required<std::int64_t>(e, "start_index");
            s.end_index = detail::required<std::int64_t>(e, "end_index");
            c.sag_events.push_back(s);
        }
    }
    c.validate();
    return c;
}

inline json parse_json(std::istream& in) {
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

inline json parse_json(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_json(in);
}

/// A synthesis run: configuration, length, estimator settings and the
/// artifacts to emit.
struct Scenario {
    ThreePhaseConfig config;
    std::int64_t duration = 0;
    EstimatorOptions estimator;
    std::vector<std::string> outputs{"raw"};
};

inline const std::vector<std::string>& known_outputs() {
    static const std::vector<std::string> names{"raw", "clarke", "park", "trace", "covariance", "circularity"};
    return names;
}

inline Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.config = config_from_json(j);
    s.duration = detail::required<std::int64_t>(j, "duration");
    if (s.duration <= 0) throw ConfigError("duration must be positive");
    s.estimator.sample_rate_hz = s.config.sample_rate_hz;
    if (j.contains("estimator")) {
        const json& e = j.at("estimator");
        s.estimator.mu = detail::optional_value<double>(e, "mu", s.estimator.mu);
        s.estimator.h0 = detail::complex_value(e, "h0", s.estimator.h0);
        s.estimator.g0 = detail::complex_value(e, "g0", s.estimator.g0);
        s.estimator.validate();
    }
    if (j.contains("outputs")) {
        s.outputs = detail::required<std::vector<std::string>>(j, "outputs");
        if (s.outputs.empty()) throw ConfigError("outputs must not be empty");
        for (const auto& o : s.outputs)
            if (std::find(known_outputs().begin(), known_outputs().end(), o) == known_outputs().end())
                throw ConfigError("unknown output '" + o + "'");
    }
    return s;
}

}  // namespace gridframe::io
