#pragma once

#include <optional>
#include <string>
#include <vector>

namespace labseq {

/// One GCMS measurement. Yield is absent until predicted or supplied.
struct GcmsSample {
    std::string label;
    double concentration_mg_ml = 0.0;
    std::optional<double> yield_pct;

    bool operator==(const GcmsSample&) const = default;
};

/// Least-squares fit of concentration = k * yield through the origin, over
/// the samples that carry a yield. Returns k in mg/mL per percent.
double fit_proportionality(const std::vector<GcmsSample>& samples);

double predict_yield(double concentration_mg_ml, double k);

struct SampleMeans {
    double yield_pct = 0.0;
    double concentration_mg_ml = 0.0;
    std::size_t count = 0;
};

/// Arithmetic means. Concentration averages over all samples; yield over the
/// samples that have one.
SampleMeans summarize(const std::vector<GcmsSample>& samples);

/// Reads `label,concentration_mg_ml,yield_pct` CSV (RFC-4180 quoting, blank
/// yield allowed). Throws ParseError with the offending line number.
std::vector<GcmsSample> load_gcms_csv(const std::string& path);

}  // namespace labseq
