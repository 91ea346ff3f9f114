#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graftbench/corpus.hpp"
#include "graftbench/rng.hpp"

namespace graftbench {

struct StimulationConfig {
    int max_steps = 30;                         // block visits per session
    double intent_broadcast_probability = 0.25; // per-step broadcast chance
};

struct TraceCall {
    int step = 0;
    ApiCall call;
    std::vector<std::string> args;
    std::optional<std::string> result;

    bool operator==(const TraceCall&) const = default;
};

struct Trace {
    std::string app_id;
    int run_index = 0;
    std::vector<TraceCall> calls;

    bool empty() const { return calls.empty(); }
    bool operator==(const Trace&) const = default;
};

// One random-walk session over the app's CFG. Each step the walker may
// broadcast a declared intent, then moves along an enabled outgoing edge
// chosen uniformly; with no enabled edge it restarts at the entry block.
// The grafted payload edge behaves like an injected guarded call: whenever
// the trigger fires at the graft block the walk enters the payload, and the
// return arrival back at the graft block does not re-evaluate the trigger.
// Every visited block appends its emitted calls to the trace, so the result
// is deterministic for a fixed (app, config, session_seed).
Trace stimulate(const SyntheticApp& app, const StimulationConfig& config, std::int64_t session_seed);

// Session for feedback iteration `iteration` (>= 1): stimulate with the seed
// derived from (master_seed, app_id, iteration). run_index is set to the
// iteration number.
Trace restimulate(const SyntheticApp& app, const StimulationConfig& config, std::int64_t master_seed,
                  int iteration);

// Size of the symmetric multiset difference between the two traces' method
// names; arguments and results are ignored.
std::size_t path_divergence(const Trace& a, const Trace& b);

}  // namespace graftbench
