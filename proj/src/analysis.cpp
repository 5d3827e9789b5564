#include "labseq/analysis.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "labseq/errors.hpp"

namespace labseq {

double fit_proportionality(const std::vector<GcmsSample>& samples) {
    double cross = 0.0;  // sum of concentration * yield
    double sq = 0.0;     // sum of yield^2
    for (const GcmsSample& s : samples) {
        if (!s.yield_pct) {
            continue;
        }
        cross += s.concentration_mg_ml * *s.yield_pct;
        sq += *s.yield_pct * *s.yield_pct;
    }
    if (sq <= 0.0) {
        throw std::invalid_argument("proportionality fit needs at least one sample with nonzero yield");
    }
    return cross / sq;
}

double predict_yield(double concentration_mg_ml, double k) {
    if (!(k > 0.0) || !std::isfinite(k)) {
        throw std::invalid_argument("proportionality constant must be positive");
    }
    return concentration_mg_ml / k;
}

SampleMeans summarize(const std::vector<GcmsSample>& samples) {
    if (samples.empty()) {
        throw std::invalid_argument("cannot summarize an empty sample list");
    }
    SampleMeans means;
    double yield_sum = 0.0;
    std::size_t yield_count = 0;
    for (const GcmsSample& s : samples) {
        means.concentration_mg_ml += s.concentration_mg_ml;
        if (s.yield_pct) {
            yield_sum += *s.yield_pct;
            ++yield_count;
        }
    }
    means.count = samples.size();
    means.concentration_mg_ml /= static_cast<double>(samples.size());
    if (yield_count == 0) {
        throw std::invalid_argument("cannot summarize yields: no sample has one");
    }
    means.yield_pct = yield_sum / static_cast<double>(yield_count);
    return means;
}

namespace {

/// Splits one CSV record into fields, honoring double-quote escaping.
std::vector<std::string> split_csv_record(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) {
        throw ParseError("unterminated quote in CSV record", line_no, line.size() + 1);
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_field_double(const std::string& field, const char* what, std::size_t line_no) {
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(value)) {
        throw ParseError(std::string("invalid ") + what + " '" + field + "'", line_no, 1);
    }
    return value;
}

}  // namespace

std::vector<GcmsSample> load_gcms_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }

    std::vector<GcmsSample> samples;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (line != "label,concentration_mg_ml,yield_pct") {
                throw ParseError("expected header 'label,concentration_mg_ml,yield_pct'", line_no,
                                 1);
            }
            continue;
        }
        auto fields = split_csv_record(line, line_no);
        if (fields.size() != 3) {
            throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), line_no,
                             1);
        }
        GcmsSample sample;
        sample.label = std::move(fields[0]);
        sample.concentration_mg_ml =
            parse_field_double(fields[1], "concentration", line_no);
        if (sample.concentration_mg_ml < 0.0) {
            throw ParseError("concentration must be non-negative", line_no, 1);
        }
        if (!fields[2].empty()) {
            const double yield = parse_field_double(fields[2], "yield", line_no);
            if (yield < 0.0 || yield > 100.0) {
                throw ParseError("yield must lie in [0, 100]", line_no, 1);
            }
            sample.yield_pct = yield;
        }
        samples.push_back(std::move(sample));
    }
    if (!header_seen) {
        throw ParseError("empty CSV file '" + path + "'");
    }
    return samples;
}

}  // namespace labseq
