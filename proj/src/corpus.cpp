#include "graftbench/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "graftbench/errors.hpp"
#include "graftbench/rng.hpp"

namespace graftbench {

namespace {

constexpr std::string_view kIntentPool[] = {
    "android.intent.action.BOOT_COMPLETED",
    "android.intent.action.BATTERY_LOW",
    "android.intent.action.SMS_RECEIVED",
    "android.intent.action.PACKAGE_ADDED",
    "android.intent.action.USER_PRESENT",
    "android.intent.action.AIRPLANE_MODE",
    "android.net.conn.CONNECTIVITY_CHANGE",
    "android.intent.action.TIMEZONE_CHANGED",
};

struct PermissionTemplate {
    std::string_view name;
    bool dangerous;
};

constexpr PermissionTemplate kAndroidPermissions[] = {
    {"android.permission.INTERNET", false},
    {"android.permission.ACCESS_NETWORK_STATE", false},
    {"android.permission.WAKE_LOCK", false},
    {"android.permission.VIBRATE", false},
    {"android.permission.READ_CONTACTS", true},
    {"android.permission.SEND_SMS", true},
    {"android.permission.ACCESS_FINE_LOCATION", true},
    {"android.permission.WRITE_EXTERNAL_STORAGE", true},
    {"android.permission.CAMERA", true},
    {"android.permission.RECORD_AUDIO", true},
};

constexpr std::string_view kCustomPermissionStems[] = {
    "com.vendor.sync.ACCESS",
    "com.vendor.push.RECEIVE",
    "com.vendor.billing.CHECK",
    "com.vendor.stats.UPLOAD",
};

ApiCall make_call(int category, Rng& rng) {
    const auto methods = api_category_methods(category);
    const auto idx = static_cast<int>(rng.next_below(methods.size()));
    return ApiCall{category, make_method_name(category, idx)};
}

std::string payload_block_message(int id) {
    return "payload block " + std::to_string(id);
}

}  // namespace

std::string_view label_name(Label label) {
    return label == Label::Malicious ? "malicious" : "benign";
}

Label parse_label(std::string_view name) {
    if (name == "malicious") return Label::Malicious;
    if (name == "benign") return Label::Benign;
    throw InputError("unknown label: " + std::string(name));
}

std::string_view trigger_kind_name(TriggerKind kind) {
    switch (kind) {
        case TriggerKind::Null: return "null";
        case TriggerKind::Probabilistic: return "probabilistic";
        case TriggerKind::Intent: return "intent";
        case TriggerKind::State: return "state";
    }
    return "null";
}

const Block* Cfg::find_block(int id) const {
    for (const auto& b : blocks)
        if (b.id == id) return &b;
    return nullptr;
}

std::vector<int> default_benign_categories() {
    return {
        api_category_index("android.app.Activity"),
        api_category_index("android.app.ActivityThread"),
        api_category_index("android.app.ApplicationPackageManager"),
        api_category_index("android.app.ContextImpl"),
        api_category_index("android.app.NotificationManager"),
        api_category_index("android.app.SharedPreferencesImpl$EditorImpl"),
        api_category_index("android.content.ContentResolver"),
        api_category_index("android.content.ContentValues"),
        api_category_index("android.net.ConnectivityManager"),
        api_category_index("android.net.wifi.WifiInfo"),
        api_category_index("java.io.FileInputStream"),
        api_category_index("java.io.FileOutputStream"),
        api_category_index("java.net.URL"),
        api_category_index("libcore.io.IoBridge"),
        api_category_index("org.apache.http.impl.client.AbstractHttpClient"),
    };
}

std::vector<int> default_payload_categories() {
    return {
        api_category_index("android.telephony.SmsManager"),
        api_category_index("android.telephony.TelephonyManager"),
        api_category_index("android.util.Base64"),
        api_category_index("javax.crypto.Cipher"),
        api_category_index("javax.crypto.Mac"),
        api_category_index("javax.crypto.spec.SecretKeySpec"),
        api_category_index("java.lang.Runtime"),
        api_category_index("java.lang.ProcessBuilder"),
    };
}

CorpusConfig CorpusConfig::defaults() {
    CorpusConfig config;
    config.benign_categories = default_benign_categories();
    config.payload_categories = default_payload_categories();
    return config;
}

void validate_config(const CorpusConfig& config) {
    if (config.n_benign <= 0) throw ConfigError("n_benign must be > 0");
    if (config.n_malicious <= 0) throw ConfigError("n_malicious must be > 0");
    if (config.host_blocks_min < 1 || config.host_blocks_max < config.host_blocks_min)
        throw ConfigError("host_blocks_min/host_blocks_max range is invalid");
    if (config.payload_ratio <= 0.0 || config.payload_ratio > 1.0)
        throw ConfigError("payload_ratio must be in (0, 1]");
    if (config.calls_per_block_min < 0 || config.calls_per_block_max < config.calls_per_block_min)
        throw ConfigError("calls_per_block_min/calls_per_block_max range is invalid");
    if (config.branch_probability < 0.0 || config.branch_probability > 1.0)
        throw ConfigError("branch_probability must be in [0, 1]");
    if (config.intent_edge_probability < 0.0 || config.intent_edge_probability > 1.0)
        throw ConfigError("intent_edge_probability must be in [0, 1]");
    const double mix = config.trigger_null + config.trigger_probabilistic +
                       config.trigger_intent + config.trigger_state;
    if (config.trigger_null < 0 || config.trigger_probabilistic < 0 || config.trigger_intent < 0 ||
        config.trigger_state < 0 || std::abs(mix - 1.0) > 1e-9)
        throw ConfigError("trigger mix (trigger_null + trigger_probabilistic + trigger_intent + trigger_state) must sum to 1");
    if (config.trigger_probability < 0.0 || config.trigger_probability > 1.0)
        throw ConfigError("trigger_probability must be in [0, 1]");
    if (config.state_threshold < 0) throw ConfigError("state_threshold must be >= 0");
    if (config.benign_categories.empty()) throw ConfigError("benign_categories must not be empty");
    if (config.payload_categories.empty()) throw ConfigError("payload_categories must not be empty");
    for (int c : config.benign_categories)
        if (c < 0 || c >= kApiCategoryCount) throw ConfigError("benign_categories contains an unknown category");
    for (int c : config.payload_categories)
        if (c < 0 || c >= kApiCategoryCount) throw ConfigError("payload_categories contains an unknown category");
}

ValidationReport validate_app(const SyntheticApp& app) {
    ValidationReport report;
    auto add = [&report](std::string code, std::string message) {
        report.violations.push_back({std::move(code), std::move(message)});
    };

    // Block ids unique, call records well-formed.
    std::unordered_map<int, const Block*> by_id;
    for (const auto& b : app.cfg.blocks) {
        if (!by_id.emplace(b.id, &b).second)
            add("duplicate-block-id", "block id " + std::to_string(b.id) + " appears more than once");
        for (const auto& call : b.emits) {
            if (call.method.empty()) {
                add("empty-method", "block " + std::to_string(b.id) + " emits a call with an empty method");
                continue;
            }
            if (call.category < 0 || call.category >= kApiCategoryCount) {
                add("bad-category", "block " + std::to_string(b.id) + " emits category " + std::to_string(call.category));
                continue;
            }
            const auto [cls, method] = split_call_name(call.method);
            if (map_call_to_category(cls, method) != call.category)
                add("category-mismatch",
                    "call " + call.method + " does not belong to category " + std::string(api_category_name(call.category)));
        }
    }

    if (!by_id.count(app.cfg.entry))
        add("missing-entry", "entry block " + std::to_string(app.cfg.entry) + " does not exist");

    std::set<std::string> declared(app.manifest.declared_intents.begin(), app.manifest.declared_intents.end());
    for (const auto& e : app.cfg.edges) {
        if (!by_id.count(e.from) || !by_id.count(e.to)) {
            add("dangling-edge", "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " references a missing block");
            continue;
        }
        if (e.guard == GuardKind::Intent) {
            if (e.intent_name.empty())
                add("empty-intent-guard", "intent-guarded edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " has no intent name");
            else if (!declared.count(e.intent_name))
                add("undeclared-intent-guard", "edge guard intent " + e.intent_name + " is not declared in the manifest");
        }
    }

    // Reachability from entry over the plain graph (guards ignored).
    if (by_id.count(app.cfg.entry)) {
        std::unordered_set<int> seen{app.cfg.entry};
        std::vector<int> stack{app.cfg.entry};
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            for (const auto& e : app.cfg.edges)
                if (e.from == cur && by_id.count(e.to) && seen.insert(e.to).second) stack.push_back(e.to);
        }
        for (const auto& b : app.cfg.blocks)
            if (!seen.count(b.id))
                add("unreachable-block", "block " + std::to_string(b.id) + " is unreachable from the entry block");
    }

    // Label/payload consistency.
    if ((app.label == Label::Malicious) != app.payload.has_value())
        add("label-payload-mismatch", "label " + std::string(label_name(app.label)) +
                                          (app.payload ? " with a payload present" : " without a payload"));

    std::unordered_set<int> payload_ids;
    for (const auto& b : app.cfg.blocks)
        if (b.is_payload) payload_ids.insert(b.id);

    if (!app.payload) {
        if (!payload_ids.empty()) add("stray-payload-block", "payload blocks present without a payload spec");
        for (const auto& e : app.cfg.edges)
            if (e.guard == GuardKind::Trigger)
                add("stray-trigger-edge", "trigger-guarded edge in an app without a payload");
    } else {
        const auto& payload = *app.payload;
        if (payload.blocks.empty()) add("empty-payload", "payload has no blocks");
        std::unordered_set<int> spec_ids;
        for (const auto& b : payload.blocks) {
            spec_ids.insert(b.id);
            if (!b.is_payload) add("payload-flag", payload_block_message(b.id) + " is not marked is_payload");
            if (!payload_ids.count(b.id)) add("payload-missing", payload_block_message(b.id) + " is absent from the CFG");
        }
        for (int id : payload_ids)
            if (!spec_ids.count(id)) add("payload-extra", payload_block_message(id) + " is not listed in the payload spec");

        if (!by_id.count(payload.entry_edge_from))
            add("bad-graft-point", "graft block " + std::to_string(payload.entry_edge_from) + " does not exist");
        else if (payload_ids.count(payload.entry_edge_from))
            add("bad-graft-point", "graft block " + std::to_string(payload.entry_edge_from) + " is a payload block");

        switch (payload.trigger.variant) {
            case TriggerKind::Null:
                break;
            case TriggerKind::Probabilistic:
                if (payload.trigger.p < 0.0 || payload.trigger.p > 1.0)
                    add("bad-trigger", "probabilistic trigger p outside [0, 1]");
                break;
            case TriggerKind::Intent:
                if (payload.trigger.intent_name.empty())
                    add("bad-trigger", "intent trigger without a name");
                else if (!declared.count(payload.trigger.intent_name))
                    add("bad-trigger", "intent trigger " + payload.trigger.intent_name + " is not declared in the manifest");
                break;
            case TriggerKind::State:
                if (payload.trigger.counter_threshold < 0)
                    add("bad-trigger", "state trigger threshold is negative");
                break;
        }

        // Exactly one edge crosses from host into the payload region, and its
        // guard matches the trigger (Null degenerates to an unguarded branch).
        int graft_edges = 0;
        for (const auto& e : app.cfg.edges) {
            if (payload_ids.count(e.from) || !payload_ids.count(e.to)) continue;
            ++graft_edges;
            if (e.from != payload.entry_edge_from)
                add("graft-edge-source", "payload entered from block " + std::to_string(e.from) +
                                             " instead of " + std::to_string(payload.entry_edge_from));
            const GuardKind expected =
                payload.trigger.variant == TriggerKind::Null ? GuardKind::Unguarded : GuardKind::Trigger;
            if (e.guard != expected) add("graft-edge-guard", "grafted edge guard does not match the trigger");
        }
        if (graft_edges == 0)
            add("no-graft-edge", "payload blocks are not connected to the host CFG");
        else if (graft_edges > 1)
            add("multiple-graft-edges", "payload region has " + std::to_string(graft_edges) + " entry edges");
    }

    // Manifest invariants.
    if (app.manifest.min_sdk > app.manifest.max_sdk)
        add("sdk-range", "min_sdk > max_sdk");
    if (app.manifest.n_activities < 0 || app.manifest.n_services < 0 || app.manifest.n_receivers < 0 ||
        app.manifest.n_providers < 0)
        add("negative-count", "manifest component counts must be non-negative");
    for (const auto& p : app.manifest.permissions) {
        if (p.name.empty()) add("empty-permission", "permission with an empty name");
        if (p.dangerous && p.origin != PermissionOrigin::Android)
            add("dangerous-custom-permission", "custom permission " + p.name + " marked dangerous");
    }
    for (int count : app.manifest.static_api_counts)
        if (count < 0) add("negative-count", "static_api_counts contains a negative value");

    return report;
}

SyntheticApp inject_payload(const SyntheticApp& base, const PayloadSpec& payload, std::int64_t /*seed*/) {
    if (base.label != Label::Benign) throw ConfigError("inject_payload requires a benign base app");
    if (payload.blocks.empty()) throw ConfigError("payload has no blocks");
    if (!base.cfg.find_block(payload.entry_edge_from))
        throw ConfigError("graft block " + std::to_string(payload.entry_edge_from) + " does not exist in the base app");
    for (const auto& b : payload.blocks)
        if (base.cfg.find_block(b.id))
            throw ConfigError(payload_block_message(b.id) + " collides with a base block id");

    SyntheticApp app = base;
    app.label = Label::Malicious;
    app.payload = payload;

    for (auto block : payload.blocks) {
        block.is_payload = true;
        app.cfg.blocks.push_back(std::move(block));
    }

    // A Null trigger is an unconditional branch into the payload.
    const GuardKind graft_guard =
        payload.trigger.variant == TriggerKind::Null ? GuardKind::Unguarded : GuardKind::Trigger;
    app.cfg.edges.push_back({payload.entry_edge_from, payload.blocks.front().id, graft_guard, ""});
    for (std::size_t i = 0; i + 1 < payload.blocks.size(); ++i)
        app.cfg.edges.push_back({payload.blocks[i].id, payload.blocks[i + 1].id, GuardKind::Unguarded, ""});
    app.cfg.edges.push_back({payload.blocks.back().id, payload.entry_edge_from, GuardKind::Unguarded, ""});

    if (payload.trigger.variant == TriggerKind::Intent) {
        const auto& intents = app.manifest.declared_intents;
        if (std::find(intents.begin(), intents.end(), payload.trigger.intent_name) == intents.end())
            app.manifest.declared_intents.push_back(payload.trigger.intent_name);
    }
    return app;
}

SyntheticApp generate_benign_app(const CorpusConfig& config, std::int64_t seed, const std::string& app_id) {
    Rng rng(static_cast<std::uint64_t>(seed));
    SyntheticApp app;
    app.app_id = app_id;
    app.label = Label::Benign;

    const int n_blocks =
        static_cast<int>(rng.next_in(config.host_blocks_min, config.host_blocks_max));

    // Manifest.
    auto& manifest = app.manifest;
    manifest.min_sdk = static_cast<int>(rng.next_in(9, 21));
    manifest.max_sdk = manifest.min_sdk + static_cast<int>(rng.next_in(0, 8));
    manifest.n_activities = static_cast<int>(rng.next_in(1, 8));
    manifest.n_services = static_cast<int>(rng.next_in(0, 3));
    manifest.n_receivers = static_cast<int>(rng.next_in(0, 3));
    manifest.n_providers = static_cast<int>(rng.next_in(0, 2));

    const int n_android = static_cast<int>(rng.next_in(2, 6));
    std::vector<int> perm_idx(std::size(kAndroidPermissions));
    for (std::size_t i = 0; i < perm_idx.size(); ++i) perm_idx[i] = static_cast<int>(i);
    rng.shuffle(perm_idx);
    for (int i = 0; i < n_android; ++i) {
        const auto& t = kAndroidPermissions[static_cast<std::size_t>(perm_idx[static_cast<std::size_t>(i)])];
        manifest.permissions.push_back({std::string(t.name), PermissionOrigin::Android, t.dangerous});
    }
    const int n_custom = static_cast<int>(rng.next_in(0, 2));
    for (int i = 0; i < n_custom; ++i)
        manifest.permissions.push_back(
            {std::string(kCustomPermissionStems[rng.next_below(std::size(kCustomPermissionStems))]),
             PermissionOrigin::Custom, false});

    const int n_intents = static_cast<int>(rng.next_in(2, 4));
    std::vector<int> intent_idx(std::size(kIntentPool));
    for (std::size_t i = 0; i < intent_idx.size(); ++i) intent_idx[i] = static_cast<int>(i);
    rng.shuffle(intent_idx);
    for (int i = 0; i < n_intents; ++i)
        manifest.declared_intents.emplace_back(kIntentPool[static_cast<std::size_t>(intent_idx[static_cast<std::size_t>(i)])]);

    // Blocks along a spine from the entry, plus forward/backward branches.
    app.cfg.entry = 0;
    for (int id = 0; id < n_blocks; ++id) {
        Block block;
        block.id = id;
        const int n_calls =
            static_cast<int>(rng.next_in(config.calls_per_block_min, config.calls_per_block_max));
        for (int c = 0; c < n_calls; ++c) {
            const int category =
                config.benign_categories[rng.next_below(config.benign_categories.size())];
            block.emits.push_back(make_call(category, rng));
        }
        app.cfg.blocks.push_back(std::move(block));
    }
    for (int id = 0; id + 1 < n_blocks; ++id)
        app.cfg.edges.push_back({id, id + 1, GuardKind::Unguarded, ""});
    for (int id = 0; id < n_blocks; ++id) {
        if (!rng.next_bernoulli(config.branch_probability)) continue;
        int target = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_blocks)));
        if (target == id) target = (target + 1) % n_blocks;
        Edge edge{id, target, GuardKind::Unguarded, ""};
        if (rng.next_bernoulli(config.intent_edge_probability)) {
            edge.guard = GuardKind::Intent;
            edge.intent_name =
                manifest.declared_intents[rng.next_below(manifest.declared_intents.size())];
        }
        app.cfg.edges.push_back(std::move(edge));
    }

    // Static API counts reflect what the blocks actually call, plus ambient
    // component-level usage in benign categories.
    for (const auto& block : app.cfg.blocks)
        for (const auto& call : block.emits)
            if (call.category < kStaticApiCategoryCount)
                ++manifest.static_api_counts[static_cast<std::size_t>(call.category)];
    for (int category : config.benign_categories)
        if (category < kStaticApiCategoryCount)
            manifest.static_api_counts[static_cast<std::size_t>(category)] +=
                static_cast<int>(rng.next_in(0, 2));

    return app;
}

SyntheticApp generate_malicious_app(const CorpusConfig& config, std::int64_t seed, const std::string& app_id) {
    SyntheticApp base = generate_benign_app(config, seed, app_id);
    Rng rng(static_cast<std::uint64_t>(derive_seed(seed, "payload", 0)));

    const int n_host = static_cast<int>(base.cfg.blocks.size());
    const int n_payload = std::max(1, static_cast<int>(std::lround(config.payload_ratio * n_host)));
    int next_id = 0;
    for (const auto& b : base.cfg.blocks) next_id = std::max(next_id, b.id + 1);

    PayloadSpec payload;
    for (int i = 0; i < n_payload; ++i) {
        Block block;
        block.id = next_id + i;
        block.is_payload = true;
        // First payload block always emits at least one call: a payload that
        // never calls anything would be undetectable by construction.
        const int lo = i == 0 ? 1 : config.calls_per_block_min;
        const int n_calls = static_cast<int>(rng.next_in(lo, std::max(lo, config.calls_per_block_max)));
        for (int c = 0; c < n_calls; ++c) {
            const int category =
                config.payload_categories[rng.next_below(config.payload_categories.size())];
            block.emits.push_back(make_call(category, rng));
        }
        payload.blocks.push_back(std::move(block));
    }

    payload.entry_edge_from =
        base.cfg.blocks[rng.next_below(static_cast<std::uint64_t>(n_host))].id;

    const double u = rng.next_unit();
    if (u < config.trigger_null) {
        payload.trigger = {TriggerKind::Null, 0.0, "", 0};
    } else if (u < config.trigger_null + config.trigger_probabilistic) {
        payload.trigger = {TriggerKind::Probabilistic, config.trigger_probability, "", 0};
    } else if (u < config.trigger_null + config.trigger_probabilistic + config.trigger_intent) {
        payload.trigger = {TriggerKind::Intent, 0.0,
                           std::string(kIntentPool[rng.next_below(std::size(kIntentPool))]), 0};
    } else {
        payload.trigger = {TriggerKind::State, 0.0, "", config.state_threshold};
    }

    SyntheticApp app = inject_payload(base, payload, seed);

    // Repackaged manifests stay close to the original; the grafted code only
    // nudges the static API counts of the categories it calls.
    for (const auto& block : payload.blocks)
        for (const auto& call : block.emits)
            if (call.category < kStaticApiCategoryCount)
                ++app.manifest.static_api_counts[static_cast<std::size_t>(call.category)];

    return app;
}

std::int64_t corpus_app_seed(std::int64_t corpus_seed, Label label, int index) {
    return derive_seed(corpus_seed, label_name(label), index);
}

std::vector<SyntheticApp> generate_corpus(const CorpusConfig& config, std::int64_t seed) {
    validate_config(config);
    std::vector<SyntheticApp> apps;
    apps.reserve(static_cast<std::size_t>(config.n_benign + config.n_malicious));
    char buf[32];
    for (int i = 0; i < config.n_benign; ++i) {
        std::snprintf(buf, sizeof buf, "b%04d", i);
        apps.push_back(generate_benign_app(config, corpus_app_seed(seed, Label::Benign, i), buf));
    }
    for (int i = 0; i < config.n_malicious; ++i) {
        std::snprintf(buf, sizeof buf, "m%04d", i);
        apps.push_back(generate_malicious_app(config, corpus_app_seed(seed, Label::Malicious, i), buf));
    }
    return apps;
}

}  // namespace graftbench
