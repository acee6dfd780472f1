#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "chaoscast/errors.hpp"
#include "chaoscast/readout.hpp"
#include "chaoscast/time_series.hpp"

// Byte-level layouts live in docs/FORMATS.md. Binary containers are
// little-endian; text floats use shortest round-trip formatting so CSV and
// snapshot round trips are bit-exact.

namespace chaoscast {

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("bad floating-point literal: '" + std::string(s) + "'");
    return v;
}

inline long long parse_int(std::string_view s) {
    long long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("bad integer literal: '" + std::string(s) + "'");
    return v;
}

namespace detail {

template <typename T>
void write_pod(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError(std::string("truncated file while reading ") + what);
    return value;
}

inline std::ifstream open_input(const std::string& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw IoError("cannot open input file: " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

} // namespace detail

// ---------------------------------------------------------------- CCTS v1

inline void write_ccts(std::ostream& out, const TimeSeries& series) {
    out.write("CCTS", 4);
    detail::write_pod<std::uint32_t>(out, 1);
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(series.q()));
    detail::write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(series.steps()));
    detail::write_pod<double>(out, series.dt);
    const Eigen::MatrixXd row_major = series.data.transpose(); // row-major payload
    out.write(reinterpret_cast<const char*>(row_major.data()),
              static_cast<std::streamsize>(sizeof(double)) * row_major.size());
    if (!out) throw IoError("CCTS write failed");
}

inline TimeSeries read_ccts(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CCTS", 4) != 0) throw IoError("not a CCTS file (bad magic)");
    const auto version = detail::read_pod<std::uint32_t>(in, "version");
    if (version != 1) throw IoError("unsupported CCTS version " + std::to_string(version));
    const auto q = detail::read_pod<std::uint32_t>(in, "Q");
    const auto t = detail::read_pod<std::uint64_t>(in, "T");
    const auto dt = detail::read_pod<double>(in, "dt");
    if (q < 1 || t < 1) throw IoError("CCTS header has empty dimensions");

    Eigen::MatrixXd row_major(static_cast<Index>(t), static_cast<Index>(q));
    in.read(reinterpret_cast<char*>(row_major.data()),
            static_cast<std::streamsize>(sizeof(double)) * row_major.size());
    if (!in) throw IoError("truncated CCTS payload");
    TimeSeries series{row_major.transpose(), dt, 0.0};
    series.validate();
    return series;
}

inline void save_ccts(const std::string& path, const TimeSeries& series) {
    auto out = detail::open_output(path, true);
    write_ccts(out, series);
}

inline TimeSeries load_ccts(const std::string& path) {
    auto in = detail::open_input(path, true);
    return read_ccts(in);
}

// ------------------------------------------------------------ CSV series

inline void write_series_csv(std::ostream& out, const TimeSeries& series) {
    out << 't';
    for (Index i = 0; i < series.q(); ++i) out << ",x" << (i + 1);
    out << '\n';
    for (Index t = 0; t < series.steps(); ++t) {
        out << format_double(series.time_at(t));
        for (Index i = 0; i < series.q(); ++i) out << ',' << format_double(series.data(i, t));
        out << '\n';
    }
}

inline TimeSeries read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV");
    if (line.rfind("t,", 0) != 0) throw IoError("CSV header must start with 't,'");
    const Index q = static_cast<Index>(std::count(line.begin(), line.end(), ','));
    if (q < 1) throw IoError("CSV has no state columns");

    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t pos = 0;
        Index field = 0;
        while (pos <= line.size()) {
            const std::size_t next = line.find(',', pos);
            const std::string_view cell(line.data() + pos, (next == std::string::npos ? line.size() : next) - pos);
            if (field == 0)
                times.push_back(parse_double(cell));
            else
                values.push_back(parse_double(cell));
            ++field;
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (field != q + 1)
            throw IoError("CSV row has " + std::to_string(field) + " fields, expected " +
                          std::to_string(q + 1));
    }
    const Index t = static_cast<Index>(times.size());
    if (t < 1) throw IoError("CSV has no data rows");

    TimeSeries series;
    series.origin_time = times.front();
    series.dt = t > 1 ? times[1] - times[0] : 1.0;
    series.data.resize(q, t);
    for (Index col = 0; col < t; ++col)
        for (Index row = 0; row < q; ++row)
            series.data(row, col) = values[static_cast<std::size_t>(col * q + row)];
    series.validate();
    return series;
}

inline void save_series_csv(const std::string& path, const TimeSeries& series) {
    auto out = detail::open_output(path, false);
    write_series_csv(out, series);
}

inline TimeSeries load_series_csv(const std::string& path) {
    auto in = detail::open_input(path, false);
    return read_series_csv(in);
}

/// Dispatch on extension: .ccts binary, anything else CSV.
inline void save_series(const std::string& path, const TimeSeries& series) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".ccts")
        save_ccts(path, series);
    else
        save_series_csv(path, series);
}

inline TimeSeries load_series(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".ccts") return load_ccts(path);
    return load_series_csv(path);
}

// ------------------------------------------------- model text block (CCMD)

namespace detail {

inline const char* family_name(FeatureFamily f) {
    switch (f) {
        case FeatureFamily::heng_rc: return "heng_rc";
        case FeatureFamily::ng_rc: return "ng_rc";
        case FeatureFamily::esn_state: return "esn_state";
    }
    return "?";
}

inline FeatureFamily family_from(const std::string& s) {
    if (s == "heng_rc") return FeatureFamily::heng_rc;
    if (s == "ng_rc") return FeatureFamily::ng_rc;
    if (s == "esn_state") return FeatureFamily::esn_state;
    throw IoError("unknown feature family '" + s + "'");
}

inline std::string vector_to_text(const Eigen::VectorXd& v) {
    std::string out;
    for (Index i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += format_double(v[i]);
    }
    return out;
}

inline Eigen::VectorXd vector_from_text(const std::string& text) {
    std::istringstream in(text);
    std::vector<double> vals;
    std::string token;
    while (in >> token) vals.push_back(parse_double(token));
    return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Index>(vals.size()));
}

} // namespace detail

inline std::string model_text_block(const ReadoutModel& model) {
    std::string text;
    auto kv = [&text](const std::string& key, const std::string& value) {
        text += key + ": " + value + "\n";
    };
    if (model.is_esn()) {
        const EsnConfig& c = *model.esn;
        kv("kind", "esn");
        kv("n_nodes", std::to_string(c.n_nodes));
        kv("leak_rate", format_double(c.leak_rate));
        kv("spectral_radius", format_double(c.spectral_radius));
        kv("input_scale", format_double(c.input_scale));
        kv("bias_scale", format_double(c.bias_scale));
        kv("connectivity_degree", format_double(c.connectivity_degree));
        kv("activation", "tanh");
        kv("seed", std::to_string(c.seed));
        kv("washout", std::to_string(model.esn_washout));
    } else {
        const FeatureConfig& c = model.feature_map.config;
        kv("kind", "feature_map");
        kv("family", detail::family_name(c.family));
        kv("q", std::to_string(c.q));
        kv("k", std::to_string(c.k));
        kv("include_constant", c.include_constant ? "1" : "0");
        kv("constant_value", format_double(c.constant_value));
        kv("neighbor_wrap", c.neighbor_wrap == NeighborWrap::periodic ? "periodic" : "clamped");
        kv("heng_variant",
           c.heng_variant == HengVariant::full ? "full" : "first_dim_only");
        kv("heng_delay_start", std::to_string(c.heng_delay_start));
        kv("dims", std::to_string(model.feature_map.dim_constant) + " " +
                       std::to_string(model.feature_map.dim_linear) + " " +
                       std::to_string(model.feature_map.dim_nonlinear) + " " +
                       std::to_string(model.feature_map.total_dim));
    }
    if (model.norm) {
        kv("normalize", "1");
        kv("norm_mean", detail::vector_to_text(model.norm->mean));
        kv("norm_scale", detail::vector_to_text(model.norm->scale));
    }
    return text;
}

namespace detail {

inline std::map<std::string, std::string> parse_kv_block(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t colon = line.find(": ");
        if (colon == std::string::npos) throw IoError("bad model text line: '" + line + "'");
        kv[line.substr(0, colon)] = line.substr(colon + 2);
    }
    return kv;
}

inline std::string take(std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError("model text block missing key '" + key + "'");
    std::string value = it->second;
    kv.erase(it);
    return value;
}

} // namespace detail

/// Rebuild the model metadata (without W_out) from a text block.
inline ReadoutModel model_from_text_block(const std::string& text) {
    auto kv = detail::parse_kv_block(text);
    ReadoutModel model;
    const std::string kind = detail::take(kv, "kind");
    if (kind == "esn") {
        EsnConfig c;
        c.n_nodes = static_cast<Index>(parse_int(detail::take(kv, "n_nodes")));
        c.leak_rate = parse_double(detail::take(kv, "leak_rate"));
        c.spectral_radius = parse_double(detail::take(kv, "spectral_radius"));
        c.input_scale = parse_double(detail::take(kv, "input_scale"));
        c.bias_scale = parse_double(detail::take(kv, "bias_scale"));
        c.connectivity_degree = parse_double(detail::take(kv, "connectivity_degree"));
        if (detail::take(kv, "activation") != "tanh") throw IoError("unknown activation");
        c.seed = static_cast<std::uint64_t>(parse_int(detail::take(kv, "seed")));
        model.esn_washout = static_cast<Index>(parse_int(detail::take(kv, "washout")));
        model.esn = c;
        FeatureConfig fc;
        fc.family = FeatureFamily::esn_state;
        fc.q = c.n_nodes;
        model.feature_map = plan_features(fc);
    } else if (kind == "feature_map") {
        FeatureConfig c;
        c.family = detail::family_from(detail::take(kv, "family"));
        c.q = static_cast<Index>(parse_int(detail::take(kv, "q")));
        c.k = static_cast<Index>(parse_int(detail::take(kv, "k")));
        c.include_constant = parse_int(detail::take(kv, "include_constant")) != 0;
        c.constant_value = parse_double(detail::take(kv, "constant_value"));
        c.neighbor_wrap = detail::take(kv, "neighbor_wrap") == "periodic" ? NeighborWrap::periodic
                                                                          : NeighborWrap::clamped;
        c.heng_variant = detail::take(kv, "heng_variant") == "full" ? HengVariant::full
                                                                    : HengVariant::first_dim_only;
        c.heng_delay_start = static_cast<Index>(parse_int(detail::take(kv, "heng_delay_start")));
        model.feature_map = plan_features(c);
        const std::string dims = detail::take(kv, "dims");
        const std::string expect = std::to_string(model.feature_map.dim_constant) + " " +
                                   std::to_string(model.feature_map.dim_linear) + " " +
                                   std::to_string(model.feature_map.dim_nonlinear) + " " +
                                   std::to_string(model.feature_map.total_dim);
        if (dims != expect)
            throw IoError("model dims '" + dims + "' disagree with planned '" + expect + "'");
    } else {
        throw IoError("unknown model kind '" + kind + "'");
    }
    if (kv.count("normalize")) {
        if (detail::take(kv, "normalize") != "1") throw IoError("bad normalize flag");
        Normalization n;
        n.mean = detail::vector_from_text(detail::take(kv, "norm_mean"));
        n.scale = detail::vector_from_text(detail::take(kv, "norm_scale"));
        if (n.mean.size() != n.scale.size()) throw IoError("normalization vectors disagree");
        model.norm = std::move(n);
    }
    if (!kv.empty()) throw IoError("model text block has unknown key '" + kv.begin()->first + "'");
    return model;
}

// ---------------------------------------------------------------- CCMD v1

inline void write_ccmd(std::ostream& out, const ReadoutModel& model) {
    out.write("CCMD", 4);
    detail::write_pod<std::uint32_t>(out, 1);
    const std::string text = model_text_block(model);
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    detail::write_pod<std::uint8_t>(out, model.target_mode == TargetMode::delta ? 1 : 0);
    detail::write_pod<double>(out, model.lambda);
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(model.w_out.rows()));
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(model.w_out.cols()));
    const Eigen::MatrixXd row_major = model.w_out.transpose();
    out.write(reinterpret_cast<const char*>(row_major.data()),
              static_cast<std::streamsize>(sizeof(double)) * row_major.size());
    if (!out) throw IoError("CCMD write failed");
}

inline ReadoutModel read_ccmd(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CCMD", 4) != 0) throw IoError("not a CCMD file (bad magic)");
    const auto version = detail::read_pod<std::uint32_t>(in, "version");
    if (version != 1) throw IoError("unsupported CCMD version " + std::to_string(version));
    const auto text_len = detail::read_pod<std::uint32_t>(in, "text length");
    std::string text(text_len, '\0');
    in.read(text.data(), text_len);
    if (!in) throw IoError("truncated CCMD text block");

    ReadoutModel model = model_from_text_block(text);
    const auto mode = detail::read_pod<std::uint8_t>(in, "target mode");
    if (mode > 1) throw IoError("bad target mode byte");
    model.target_mode = mode == 1 ? TargetMode::delta : TargetMode::next_state;
    model.lambda = detail::read_pod<double>(in, "lambda");
    const auto rows = detail::read_pod<std::uint32_t>(in, "rows");
    const auto cols = detail::read_pod<std::uint32_t>(in, "cols");
    Eigen::MatrixXd row_major(static_cast<Index>(cols), static_cast<Index>(rows));
    in.read(reinterpret_cast<char*>(row_major.data()),
            static_cast<std::streamsize>(sizeof(double)) * row_major.size());
    if (!in) throw IoError("truncated CCMD payload");
    model.w_out = row_major.transpose();

    const Index expect = model.is_esn() ? model.esn->n_nodes : model.feature_map.total_dim;
    if (model.w_out.cols() != expect)
        throw IoError("W_out has " + std::to_string(model.w_out.cols()) + " columns, expected " +
                      std::to_string(expect));
    if (!model.w_out.allFinite()) throw IoError("W_out has non-finite entries");
    return model;
}

inline void save_ccmd(const std::string& path, const ReadoutModel& model) {
    auto out = detail::open_output(path, true);
    write_ccmd(out, model);
}

inline ReadoutModel load_ccmd(const std::string& path) {
    auto in = detail::open_input(path, true);
    return read_ccmd(in);
}

// ------------------------------------------------------------- utilities

inline void write_text_file(const std::string& path, const std::string& content) {
    auto out = detail::open_output(path, false);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

/// FNV-1a 64-bit content hash for run manifests.
inline std::string fnv1a64_hex(const std::string& path) {
    auto in = detail::open_input(path, true);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return std::string(hex);
}

} // namespace chaoscast
