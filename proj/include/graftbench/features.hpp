#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "graftbench/corpus.hpp"
#include "graftbench/stimulator.hpp"

namespace graftbench {

enum class FeatureKind { Basic, Permission, Api, All, Dynamic, Hybrid };

std::string_view feature_kind_name(FeatureKind kind);
FeatureKind parse_feature_kind(std::string_view name);
std::size_t feature_length(FeatureKind kind);  // 6, 4, 27, 37, 37, 74
bool is_static_kind(FeatureKind kind);

struct FeatureVector {
    FeatureKind kind = FeatureKind::Basic;
    std::string app_id;
    std::vector<double> values;

    bool operator==(const FeatureVector&) const = default;
};

struct FeatureMatrix {
    FeatureKind kind = FeatureKind::Basic;
    std::vector<FeatureVector> rows;
    std::vector<Label> labels;  // parallel to rows
};

// basic      = [min_sdk, max_sdk, n_activities, n_services, n_receivers, n_providers]
// permission = [total, android/total, custom/total, dangerous/total] (ratios 0 when total=0)
// api        = the static API counts
// all        = basic ++ permission ++ api
FeatureVector extract_static(const SyntheticApp& app, FeatureKind kind);

// Per-category call counts; unknown-category calls contribute nothing.
FeatureVector extract_dynamic(const Trace& trace);

// all ++ dynamic, length 74. Throws ConfigError on kind or app_id mismatch.
FeatureVector make_hybrid(const FeatureVector& static_all, const FeatureVector& dynamic);

// One row per app with a usable representation. Static kinds never consult
// traces; dynamic/hybrid kinds omit apps whose trace is missing or empty.
FeatureMatrix build_matrix(std::span<const SyntheticApp> apps,
                           const std::map<std::string, Trace>* traces, FeatureKind kind);

// CSV with header app_id,label,f0..f{n-1}; values as shortest round-trip decimals.
void write_matrix_csv(const FeatureMatrix& matrix, std::ostream& sink);
FeatureMatrix read_matrix_csv(std::istream& source);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace graftbench
