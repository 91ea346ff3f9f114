#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "graftbench/stimulator.hpp"

namespace graftbench {

// Trace log format: one JSON object per line, UTF-8, LF line endings, keys in
// the order {"app","run","step","class","method","args","result"}. An empty
// trace writes no lines. File extension: .trace.jsonl.

void write_trace(const Trace& trace, std::ostream& sink);
std::string trace_to_string(const Trace& trace);

struct ParseOptions {
    bool strict = false;          // reject any malformed line instead of skipping
    std::string default_app;      // app id for lines without an "app" key
    int default_run = 0;          // run index for lines without a "run" key
};

struct ParseResult {
    std::vector<Trace> traces;    // sorted by (app, run); calls by step, then input order
    std::size_t accepted = 0;
    std::size_t skipped = 0;      // tolerant mode only
};

// Accepted lines must be JSON objects with non-empty "class" and "method"
// strings; "step" defaults to the 1-based line number. Tolerant mode skips
// anything else (logcat prefixes, noise); strict mode throws InputError with
// the first offending line number.
ParseResult parse_trace_log(std::istream& source, const ParseOptions& options);
ParseResult parse_trace_log(const std::string& text, const ParseOptions& options);

}  // namespace graftbench
