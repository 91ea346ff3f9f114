#include "graftbench/stimulator.hpp"

#include <map>
#include <unordered_map>

#include "graftbench/errors.hpp"

namespace graftbench {

namespace {

struct WalkContext {
    const SyntheticApp* app;
    std::unordered_map<int, const Block*> blocks;
    std::unordered_map<int, std::vector<const Edge*>> out_edges;
    const Trigger* trigger = nullptr;
    int graft_block = -1;
    int payload_entry = -1;
};

WalkContext build_context(const SyntheticApp& app) {
    WalkContext ctx;
    ctx.app = &app;
    for (const auto& b : app.cfg.blocks) ctx.blocks.emplace(b.id, &b);
    for (const auto& e : app.cfg.edges) ctx.out_edges[e.from].push_back(&e);
    if (app.payload) {
        ctx.trigger = &app.payload->trigger;
        ctx.graft_block = app.payload->entry_edge_from;
        ctx.payload_entry = app.payload->blocks.front().id;
    }
    return ctx;
}

}  // namespace

Trace stimulate(const SyntheticApp& app, const StimulationConfig& config, std::int64_t session_seed) {
    if (config.max_steps < 1) throw ConfigError("max_steps must be >= 1");
    if (config.intent_broadcast_probability < 0.0 || config.intent_broadcast_probability > 1.0)
        throw ConfigError("intent_broadcast_probability must be in [0, 1]");
    const auto report = validate_app(app);
    if (!report.ok())
        throw ConfigError("app " + app.app_id + " is malformed: " + report.violations.front().message);

    const WalkContext ctx = build_context(app);
    Rng rng(static_cast<std::uint64_t>(session_seed));

    Trace trace;
    trace.app_id = app.app_id;

    std::unordered_map<int, int> arrivals;
    int current = app.cfg.entry;
    int previous = -1;

    auto visit = [&](int block_id, int step) {
        ++arrivals[block_id];
        for (const auto& call : ctx.blocks.at(block_id)->emits)
            trace.calls.push_back({step, call, {"*"}, std::nullopt});
    };

    auto is_payload_block = [&](int block_id) {
        const auto it = ctx.blocks.find(block_id);
        return it != ctx.blocks.end() && it->second->is_payload;
    };

    visit(current, 0);

    for (int step = 1; step < config.max_steps; ++step) {
        // Draw order per step is fixed: intent broadcast, trigger evaluation,
        // edge choice. Changing it would silently change every trace.
        std::string_view broadcast;
        const auto& intents = app.manifest.declared_intents;
        if (!intents.empty() && rng.next_bernoulli(config.intent_broadcast_probability))
            broadcast = intents[rng.next_below(intents.size())];

        // The grafted edge models an injected guarded call: when the trigger
        // fires, control transfers into the payload. Coming back over the
        // return edge completes the call, so that arrival does not
        // re-evaluate the trigger.
        const bool at_call_site = ctx.trigger && current == ctx.graft_block;
        const bool returning = at_call_site && previous >= 0 && is_payload_block(previous);
        bool trigger_fires = false;
        if (at_call_site && !returning) {
            switch (ctx.trigger->variant) {
                case TriggerKind::Null:
                    trigger_fires = true;
                    break;
                case TriggerKind::Probabilistic:
                    // Fresh draw per arrival at the graft block.
                    trigger_fires = rng.next_bernoulli(ctx.trigger->p);
                    break;
                case TriggerKind::Intent:
                    trigger_fires = !broadcast.empty() && broadcast == ctx.trigger->intent_name;
                    break;
                case TriggerKind::State:
                    trigger_fires = arrivals[current] - 1 >= ctx.trigger->counter_threshold;
                    break;
            }
        }

        int next;
        if (trigger_fires) {
            next = ctx.payload_entry;
        } else {
            std::vector<const Edge*> enabled;
            if (auto it = ctx.out_edges.find(current); it != ctx.out_edges.end()) {
                for (const Edge* e : it->second) {
                    // The grafted edge is only ever taken via the trigger.
                    if (at_call_site && e->to == ctx.payload_entry) continue;
                    switch (e->guard) {
                        case GuardKind::Unguarded:
                            enabled.push_back(e);
                            break;
                        case GuardKind::Intent:
                            if (!broadcast.empty() && broadcast == e->intent_name) enabled.push_back(e);
                            break;
                        case GuardKind::Trigger:
                            break;
                    }
                }
            }
            if (enabled.empty()) {
                next = app.cfg.entry;  // dead end: the activity restarts
                previous = -1;
                current = next;
                visit(current, step);
                continue;
            }
            next = enabled.size() == 1
                       ? enabled.front()->to
                       : enabled[static_cast<std::size_t>(rng.next_below(enabled.size()))]->to;
        }
        previous = current;
        current = next;
        visit(current, step);
    }

    return trace;
}

Trace restimulate(const SyntheticApp& app, const StimulationConfig& config, std::int64_t master_seed,
                  int iteration) {
    if (iteration < 1) throw ConfigError("iteration must be >= 1");
    Trace trace = stimulate(app, config, derive_seed(master_seed, app.app_id, iteration));
    trace.run_index = iteration;
    return trace;
}

std::size_t path_divergence(const Trace& a, const Trace& b) {
    std::map<std::string_view, long> counts;
    for (const auto& c : a.calls) ++counts[c.call.method];
    for (const auto& c : b.calls) --counts[c.call.method];
    std::size_t diff = 0;
    for (const auto& [method, count] : counts) diff += static_cast<std::size_t>(count < 0 ? -count : count);
    return diff;
}

}  // namespace graftbench
