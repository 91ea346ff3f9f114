#include "graftbench/trace_io.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "graftbench/api_table.hpp"
#include "graftbench/errors.hpp"

namespace graftbench {

using ordered_json = nlohmann::ordered_json;

void write_trace(const Trace& trace, std::ostream& sink) {
    for (const auto& c : trace.calls) {
        const auto [cls, method] = split_call_name(c.call.method);
        ordered_json line{
            {"app", trace.app_id},
            {"run", trace.run_index},
            {"step", c.step},
            {"class", cls},
            {"method", method},
            {"args", c.args},
        };
        line["result"] = c.result ? ordered_json(*c.result) : ordered_json(nullptr);
        sink << line.dump() << '\n';
    }
    if (!sink) throw IoError("trace write failed for app " + trace.app_id);
}

std::string trace_to_string(const Trace& trace) {
    std::ostringstream out;
    write_trace(trace, out);
    return out.str();
}

ParseResult parse_trace_log(std::istream& source, const ParseOptions& options) {
    ParseResult result;
    std::map<std::pair<std::string, int>, std::vector<TraceCall>> grouped;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fail = [&](const std::string& why) {
            if (options.strict) throw InputError("malformed trace line: " + why, line_no);
            ++result.skipped;
        };
        if (line.find_first_not_of(" \t") == std::string::npos) {
            fail("blank line");
            continue;
        }
        const auto parsed = ordered_json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            fail("not a JSON object");
            continue;
        }
        const auto cls = parsed.find("class");
        const auto method = parsed.find("method");
        if (cls == parsed.end() || !cls->is_string() || cls->get<std::string>().empty()) {
            fail("missing class");
            continue;
        }
        if (method == parsed.end() || !method->is_string() || method->get<std::string>().empty()) {
            fail("missing method");
            continue;
        }

        std::string app = options.default_app;
        int run = options.default_run;
        int step = static_cast<int>(line_no);
        if (auto it = parsed.find("app"); it != parsed.end()) {
            if (!it->is_string()) { fail("app is not a string"); continue; }
            app = it->get<std::string>();
        }
        if (auto it = parsed.find("run"); it != parsed.end()) {
            if (!it->is_number_integer()) { fail("run is not an integer"); continue; }
            run = it->get<int>();
        }
        if (auto it = parsed.find("step"); it != parsed.end()) {
            if (!it->is_number_integer() || it->get<int>() < 0) { fail("step is not a non-negative integer"); continue; }
            step = it->get<int>();
        }

        TraceCall call;
        call.step = step;
        const std::string cls_str = cls->get<std::string>();
        const std::string method_str = method->get<std::string>();
        call.call.method = cls_str + "." + method_str;
        call.call.category = map_call_to_category(cls_str, method_str);
        if (auto it = parsed.find("args"); it != parsed.end()) {
            if (!it->is_array()) { fail("args is not an array"); continue; }
            bool bad = false;
            for (const auto& a : *it) {
                if (!a.is_string()) { bad = true; break; }
                call.args.push_back(a.get<std::string>());
            }
            if (bad) { fail("args contains a non-string"); continue; }
        }
        if (auto it = parsed.find("result"); it != parsed.end() && !it->is_null()) {
            if (!it->is_string()) { fail("result is not a string"); continue; }
            call.result = it->get<std::string>();
        }

        grouped[{std::move(app), run}].push_back(std::move(call));
        ++result.accepted;
    }

    for (auto& [key, calls] : grouped) {
        std::stable_sort(calls.begin(), calls.end(),
                         [](const TraceCall& a, const TraceCall& b) { return a.step < b.step; });
        Trace trace;
        trace.app_id = key.first;
        trace.run_index = key.second;
        trace.calls = std::move(calls);
        result.traces.push_back(std::move(trace));
    }
    return result;
}

ParseResult parse_trace_log(const std::string& text, const ParseOptions& options) {
    std::istringstream in(text);
    return parse_trace_log(in, options);
}

}  // namespace graftbench
