#include "graftbench/features.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "graftbench/errors.hpp"

namespace graftbench {

std::string_view feature_kind_name(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Basic: return "basic";
        case FeatureKind::Permission: return "permission";
        case FeatureKind::Api: return "api";
        case FeatureKind::All: return "all";
        case FeatureKind::Dynamic: return "dynamic";
        case FeatureKind::Hybrid: return "hybrid";
    }
    return "basic";
}

FeatureKind parse_feature_kind(std::string_view name) {
    if (name == "basic") return FeatureKind::Basic;
    if (name == "permission") return FeatureKind::Permission;
    if (name == "api") return FeatureKind::Api;
    if (name == "all") return FeatureKind::All;
    if (name == "dynamic") return FeatureKind::Dynamic;
    if (name == "hybrid") return FeatureKind::Hybrid;
    throw ConfigError("unknown feature kind: " + std::string(name));
}

std::size_t feature_length(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Basic: return 6;
        case FeatureKind::Permission: return 4;
        case FeatureKind::Api: return kStaticApiCategoryCount;
        case FeatureKind::All: return 6 + 4 + kStaticApiCategoryCount;
        case FeatureKind::Dynamic: return kApiCategoryCount;
        case FeatureKind::Hybrid: return 6 + 4 + kStaticApiCategoryCount + kApiCategoryCount;
    }
    return 0;
}

bool is_static_kind(FeatureKind kind) {
    return kind == FeatureKind::Basic || kind == FeatureKind::Permission ||
           kind == FeatureKind::Api || kind == FeatureKind::All;
}

FeatureVector extract_static(const SyntheticApp& app, FeatureKind kind) {
    const auto& m = app.manifest;
    FeatureVector v{kind, app.app_id, {}};
    switch (kind) {
        case FeatureKind::Basic:
            v.values = {static_cast<double>(m.min_sdk),      static_cast<double>(m.max_sdk),
                        static_cast<double>(m.n_activities), static_cast<double>(m.n_services),
                        static_cast<double>(m.n_receivers),  static_cast<double>(m.n_providers)};
            return v;
        case FeatureKind::Permission: {
            const double total = static_cast<double>(m.permissions.size());
            double android = 0, custom = 0, dangerous = 0;
            for (const auto& p : m.permissions) {
                if (p.origin == PermissionOrigin::Android) ++android;
                else ++custom;
                if (p.dangerous) ++dangerous;
            }
            if (total == 0) v.values = {0.0, 0.0, 0.0, 0.0};
            else v.values = {total, android / total, custom / total, dangerous / total};
            return v;
        }
        case FeatureKind::Api:
            v.values.reserve(m.static_api_counts.size());
            for (int count : m.static_api_counts) v.values.push_back(static_cast<double>(count));
            return v;
        case FeatureKind::All: {
            auto basic = extract_static(app, FeatureKind::Basic);
            auto permission = extract_static(app, FeatureKind::Permission);
            auto api = extract_static(app, FeatureKind::Api);
            v.values = std::move(basic.values);
            v.values.insert(v.values.end(), permission.values.begin(), permission.values.end());
            v.values.insert(v.values.end(), api.values.begin(), api.values.end());
            return v;
        }
        default:
            throw ConfigError("extract_static cannot produce kind " + std::string(feature_kind_name(kind)));
    }
}

FeatureVector extract_dynamic(const Trace& trace) {
    FeatureVector v{FeatureKind::Dynamic, trace.app_id, std::vector<double>(kApiCategoryCount, 0.0)};
    for (const auto& c : trace.calls)
        if (c.call.category >= 0 && c.call.category < kApiCategoryCount)
            v.values[static_cast<std::size_t>(c.call.category)] += 1.0;
    return v;
}

FeatureVector make_hybrid(const FeatureVector& static_all, const FeatureVector& dynamic) {
    if (static_all.kind != FeatureKind::All || dynamic.kind != FeatureKind::Dynamic)
        throw ConfigError("make_hybrid needs an 'all' vector and a 'dynamic' vector");
    if (static_all.app_id != dynamic.app_id)
        throw ConfigError("make_hybrid app mismatch: " + static_all.app_id + " vs " + dynamic.app_id);
    FeatureVector v{FeatureKind::Hybrid, static_all.app_id, static_all.values};
    v.values.insert(v.values.end(), dynamic.values.begin(), dynamic.values.end());
    return v;
}

FeatureMatrix build_matrix(std::span<const SyntheticApp> apps,
                           const std::map<std::string, Trace>* traces, FeatureKind kind) {
    FeatureMatrix matrix;
    matrix.kind = kind;
    for (const auto& app : apps) {
        if (is_static_kind(kind)) {
            matrix.rows.push_back(extract_static(app, kind));
            matrix.labels.push_back(app.label);
            continue;
        }
        if (!traces) throw ConfigError("dynamic/hybrid matrices need traces");
        const auto it = traces->find(app.app_id);
        if (it == traces->end() || it->second.empty()) continue;  // no usable representation
        auto dynamic = extract_dynamic(it->second);
        if (kind == FeatureKind::Dynamic) {
            matrix.rows.push_back(std::move(dynamic));
        } else {
            matrix.rows.push_back(make_hybrid(extract_static(app, FeatureKind::All), dynamic));
        }
        matrix.labels.push_back(app.label);
    }
    return matrix;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

void write_matrix_csv(const FeatureMatrix& matrix, std::ostream& sink) {
    sink << "app_id,label";
    for (std::size_t i = 0; i < feature_length(matrix.kind); ++i) sink << ",f" << i;
    sink << '\n';
    for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
        sink << matrix.rows[r].app_id << ',' << label_name(matrix.labels[r]);
        for (double v : matrix.rows[r].values) sink << ',' << format_double(v);
        sink << '\n';
    }
    if (!sink) throw IoError("feature matrix write failed");
}

FeatureMatrix read_matrix_csv(std::istream& source) {
    FeatureMatrix matrix;
    std::string line;
    if (!std::getline(source, line)) throw InputError("feature CSV is empty");
    std::size_t width = 0;
    for (std::size_t pos = 0; (pos = line.find(",f", pos)) != std::string::npos; ++pos) ++width;
    switch (width) {
        case 6: matrix.kind = FeatureKind::Basic; break;
        case 4: matrix.kind = FeatureKind::Permission; break;
        case kStaticApiCategoryCount: matrix.kind = FeatureKind::Api; break;
        case 6 + 4 + kStaticApiCategoryCount: matrix.kind = FeatureKind::All; break;
        case 6 + 4 + kStaticApiCategoryCount + kApiCategoryCount: matrix.kind = FeatureKind::Hybrid; break;
        default: throw InputError("feature CSV header has unsupported width " + std::to_string(width));
    }
    // "all" and "dynamic" share width 37; the header cannot distinguish them,
    // so 37-wide files load as "all" and callers may retag.
    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        FeatureVector row{matrix.kind, "", {}};
        if (!std::getline(ss, row.app_id, ',')) throw InputError("bad CSV row", line_no);
        if (!std::getline(ss, field, ',')) throw InputError("bad CSV row", line_no);
        matrix.labels.push_back(parse_label(field));
        while (std::getline(ss, field, ',')) {
            double v = 0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc() || ptr != field.data() + field.size())
                throw InputError("bad numeric field '" + field + "'", line_no);
            row.values.push_back(v);
        }
        if (row.values.size() != width) throw InputError("CSV row width mismatch", line_no);
        matrix.rows.push_back(std::move(row));
    }
    return matrix;
}

}  // namespace graftbench
