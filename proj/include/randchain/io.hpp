#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "randchain/analysis.hpp"
#include "randchain/core.hpp"
#include "randchain/errors.hpp"

namespace randchain {

enum class ReportFormat : uint8_t { csv, json };

// Canonical numeric rendering: 6 significant digits, correctly rounded
// (ties resolved by the binary value, i.e. round-half-even at the bit that
// matters). printf %g also strips trailing zeros, so 0.5 renders as "0.5".
inline std::string render_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return std::string(buf);
}

// Nearest double to the rendered form; JSON reports carry these so the
// serialized numbers match the CSV rendering.
inline double round_to_rendered(double value) {
    return std::strtod(render_number(value).c_str(), nullptr);
}

namespace detail {

inline bool valid_id_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '.' || c == '-';
}

inline bool valid_id(std::string_view id) {
    if (id.empty()) return false;
    for (char c : id) {
        if (!valid_id_char(c)) return false;
    }
    return true;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace detail

// Matrix file grammar: header `sample,<det1>,...,<detN>`, one body row per
// sample `id,b1,...,bN` with b in {0,1}. Ids restricted to [A-Za-z0-9_.-],
// LF line endings, no quoting.
inline DetectionMatrix parse_matrix(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ShapeError("empty input: missing header");
    std::vector<std::string> header = detail::split_csv_line(line);
    if (header.empty() || header[0] != "sample") {
        throw ShapeError("header must start with 'sample'");
    }
    if (header.size() < 2) throw ShapeError("header names no detectors");
    std::vector<std::string> detector_names(header.begin() + 1, header.end());
    for (std::size_t j = 0; j < detector_names.size(); ++j) {
        if (!detail::valid_id(detector_names[j])) {
            throw FormatError("invalid detector name in header column " +
                              std::to_string(j + 1));
        }
    }

    std::vector<SampleId> sample_ids;
    std::vector<Verdict> verdicts;
    std::size_t row_number = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) break;  // trailing newline
        ++row_number;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ShapeError("row " + std::to_string(row_number) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        }
        if (!detail::valid_id(cells[0])) {
            throw FormatError("invalid sample id at row " + std::to_string(row_number));
        }
        sample_ids.push_back(cells[0]);
        for (std::size_t j = 1; j < cells.size(); ++j) {
            const std::string& cell = cells[j];
            if (cell == "0") {
                verdicts.push_back(Verdict::Benign);
            } else if (cell == "1") {
                verdicts.push_back(Verdict::Malicious);
            } else {
                throw FormatError("invalid verdict bit at row " +
                                  std::to_string(row_number) + ", column " +
                                  detector_names[j - 1] + ": '" + cell + "'");
            }
        }
    }
    if (sample_ids.empty()) throw ShapeError("matrix body is empty");
    // DetectionMatrix re-checks uniqueness and shape.
    return DetectionMatrix(std::move(detector_names), std::move(sample_ids),
                           std::move(verdicts));
}

inline DetectionMatrix parse_matrix(const std::string& text) {
    std::istringstream in(text);
    return parse_matrix(in);
}

inline std::string emit_matrix(const DetectionMatrix& matrix) {
    std::string out = "sample";
    for (const std::string& name : matrix.detector_names()) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < matrix.sample_count(); ++i) {
        out += matrix.sample_ids()[i];
        for (std::size_t j = 0; j < matrix.detector_count(); ++j) {
            out += ',';
            out += matrix.at(i, j) == Verdict::Malicious ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

// --- curve reports -------------------------------------------------------

inline std::string emit_curve(const CurvePoints& curve, ReportFormat format) {
    if (format == ReportFormat::csv) {
        std::string out = "k,mean,std\n";
        for (const CurvePoint& p : curve.points) {
            out += std::to_string(p.k);
            out += ',';
            out += render_number(p.mean);
            out += ',';
            out += render_number(p.std_dev);
            out += '\n';
        }
        return out;
    }
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const CurvePoint& p : curve.points) {
        rows.push_back({{"k", p.k},
                        {"mean", round_to_rendered(p.mean)},
                        {"std", round_to_rendered(p.std_dev)}});
    }
    return rows.dump(2) + "\n";
}

inline CurvePoints parse_curve_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ShapeError("empty curve file");
    if (line != "k,mean,std") throw ShapeError("curve header must be 'k,mean,std'");
    CurvePoints curve;
    std::size_t row_number = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) break;
        ++row_number;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != 3) {
            throw ShapeError("curve row " + std::to_string(row_number) +
                             " has " + std::to_string(cells.size()) + " cells");
        }
        CurvePoint p;
        try {
            std::size_t pos = 0;
            p.k = std::stoi(cells[0], &pos);
            if (pos != cells[0].size()) throw std::invalid_argument(cells[0]);
            p.mean = std::stod(cells[1], &pos);
            if (pos != cells[1].size()) throw std::invalid_argument(cells[1]);
            p.std_dev = std::stod(cells[2], &pos);
            if (pos != cells[2].size()) throw std::invalid_argument(cells[2]);
        } catch (const std::logic_error&) {
            throw FormatError("invalid numeric cell at curve row " +
                              std::to_string(row_number));
        }
        curve.points.push_back(p);
    }
    if (curve.points.empty()) throw ShapeError("curve file has no data rows");
    return curve;
}

// --- transfer reports ----------------------------------------------------

struct TransferRow {
    std::string source;
    std::string target;
    std::size_t evasive_source = 0;
    std::size_t evasive_both = 0;
    double rate = 0.0;
};

inline std::string emit_transfer(const std::vector<TransferRow>& rows,
                                 ReportFormat format) {
    if (format == ReportFormat::csv) {
        std::string out = "source,target,evasive_source,evasive_both,rate\n";
        for (const TransferRow& r : rows) {
            out += r.source;
            out += ',';
            out += r.target;
            out += ',';
            out += std::to_string(r.evasive_source);
            out += ',';
            out += std::to_string(r.evasive_both);
            out += ',';
            out += render_number(r.rate);
            out += '\n';
        }
        return out;
    }
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const TransferRow& r : rows) {
        arr.push_back({{"source", r.source},
                       {"target", r.target},
                       {"evasive_source", r.evasive_source},
                       {"evasive_both", r.evasive_both},
                       {"rate", round_to_rendered(r.rate)}});
    }
    return arr.dump(2) + "\n";
}

inline std::vector<TransferRow> parse_transfer_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ShapeError("empty transfer file");
    if (line != "source,target,evasive_source,evasive_both,rate") {
        throw ShapeError("unexpected transfer header");
    }
    std::vector<TransferRow> rows;
    std::size_t row_number = 0;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) break;
        ++row_number;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != 5) {
            throw ShapeError("transfer row " + std::to_string(row_number) +
                             " has " + std::to_string(cells.size()) + " cells");
        }
        TransferRow r;
        r.source = cells[0];
        r.target = cells[1];
        try {
            r.evasive_source = static_cast<std::size_t>(std::stoull(cells[2]));
            r.evasive_both = static_cast<std::size_t>(std::stoull(cells[3]));
            r.rate = std::stod(cells[4]);
        } catch (const std::logic_error&) {
            throw FormatError("invalid numeric cell at transfer row " +
                              std::to_string(row_number));
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace randchain
