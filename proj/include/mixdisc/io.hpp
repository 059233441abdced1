#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixdisc/errors.hpp"
#include "mixdisc/matrix.hpp"
#include "mixdisc/tuple.hpp"

namespace mixdisc {

struct TupleMetadata {
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha_target;
    std::optional<std::string> description;
};

struct TupleFile {
    MatrixTuple tuple;
    TupleMetadata metadata;
};

namespace detail {

/// Shortest 17-significant-digit decimal form; round-trips any double.
inline std::string format_double(double v) {
    if (v == 0.0) return "0"; // covers -0.0 too
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

} // namespace detail

/// Serializes a tuple with a hand-rolled emitter so output is byte-stable:
/// fixed key order, one matrix row per line, %.17g floats.
inline std::string tuple_to_json(const MatrixTuple& t, const TupleMetadata& meta = {}) {
    const std::size_t n = t.size();
    std::ostringstream os;
    os << "{\n  \"n\": " << n << ",\n  \"matrices\": [\n";
    for (std::size_t i = 0; i < n; ++i) {
        os << "    [";
        for (std::size_t row = 0; row < n; ++row) {
            if (row > 0) os << ",\n     ";
            os << "[";
            for (std::size_t col = 0; col < n; ++col) {
                if (col > 0) os << ", ";
                os << detail::format_double(t[i](row, col));
            }
            os << "]";
        }
        os << "]" << (i + 1 < n ? "," : "") << "\n";
    }
    os << "  ],\n  \"metadata\": {";
    bool first = true;
    auto sep = [&first, &os] {
        if (!first) os << ", ";
        first = false;
    };
    if (meta.seed) {
        sep();
        os << "\"seed\": " << *meta.seed;
    }
    if (meta.alpha_target) {
        sep();
        os << "\"alpha_target\": " << detail::format_double(*meta.alpha_target);
    }
    if (meta.description) {
        sep();
        os << "\"description\": \"" << detail::json_escape(*meta.description) << "\"";
    }
    os << "}\n}\n";
    return os.str();
}

/// Parses a TupleFile document. Matrices must be symmetric to 1e-9; smaller
/// asymmetries are averaged away with a warning on `warnings` when provided.
inline TupleFile tuple_from_json(const std::string& text, std::ostream* warnings = nullptr) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }

    try {
        if (!doc.is_object() || !doc.contains("n") || !doc.contains("matrices"))
            throw ParseError("expected an object with \"n\" and \"matrices\"");
        const auto n = doc.at("n").get<std::int64_t>();
        if (n < 1) throw ParseError("\"n\" must be a positive integer");
        const auto& mats = doc.at("matrices");
        if (!mats.is_array() || mats.size() != static_cast<std::size_t>(n))
            throw ParseError("\"matrices\" must hold exactly n matrices");

        const std::size_t nn = static_cast<std::size_t>(n);
        std::vector<SymMatrix> ms;
        ms.reserve(nn);
        double worst_asym = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            const auto& rows = mats[i];
            if (!rows.is_array() || rows.size() != nn)
                throw ParseError("matrix " + std::to_string(i) + " must have n rows");
            Matrix a(nn, nn);
            for (std::size_t r = 0; r < nn; ++r) {
                const auto& row = rows[r];
                if (!row.is_array() || row.size() != nn)
                    throw ParseError("matrix " + std::to_string(i) + " row " +
                                     std::to_string(r) + " must have n entries");
                for (std::size_t c = 0; c < nn; ++c) {
                    if (!row[c].is_number())
                        throw ParseError("matrix entries must be numbers");
                    const double v = row[c].get<double>();
                    if (!std::isfinite(v)) throw ParseError("matrix entries must be finite");
                    a(r, c) = v;
                }
            }
            double asym = 0.0;
            for (std::size_t r = 0; r < nn; ++r)
                for (std::size_t c = r + 1; c < nn; ++c)
                    asym = std::max(asym, std::abs(a(r, c) - a(c, r)));
            if (asym > 1e-9)
                throw ParseError("matrix " + std::to_string(i) +
                                 " is not symmetric (deviation " + std::to_string(asym) + ")");
            worst_asym = std::max(worst_asym, asym);
            ms.push_back(SymMatrix::from_dense(a));
        }
        if (worst_asym > 0.0 && warnings)
            *warnings << "warning: symmetrized matrices on load (max deviation "
                      << worst_asym << ")\n";

        TupleMetadata meta;
        if (doc.contains("metadata") && doc.at("metadata").is_object()) {
            const auto& md = doc.at("metadata");
            if (md.contains("seed")) meta.seed = md.at("seed").get<std::uint64_t>();
            if (md.contains("alpha_target"))
                meta.alpha_target = md.at("alpha_target").get<double>();
            if (md.contains("description"))
                meta.description = md.at("description").get<std::string>();
        }
        return TupleFile{MatrixTuple(std::move(ms)), std::move(meta)};
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed tuple file: ") + e.what());
    } catch (const Error&) {
        throw;
    }
}

inline void save_tuple_file(const std::string& path, const MatrixTuple& t,
                            const TupleMetadata& meta = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << tuple_to_json(t, meta);
    if (!out) throw IoError("write failed: " + path);
}

inline TupleFile load_tuple_file(const std::string& path, std::ostream* warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return tuple_from_json(ss.str(), warnings);
}

} // namespace mixdisc
