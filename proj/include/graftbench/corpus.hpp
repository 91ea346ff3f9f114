#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graftbench/api_table.hpp"

namespace graftbench {

enum class Label { Benign, Malicious };

std::string_view label_name(Label label);
Label parse_label(std::string_view name);

// One monitored API call: category index into the table plus the full
// "package.module.class.method" name.
struct ApiCall {
    int category = kUnknownCategory;
    std::string method;

    bool operator==(const ApiCall&) const = default;
};

struct Block {
    int id = 0;
    std::vector<ApiCall> emits;
    bool is_payload = false;

    bool operator==(const Block&) const = default;
};

enum class TriggerKind { Null, Probabilistic, Intent, State };

std::string_view trigger_kind_name(TriggerKind kind);

// Condition guarding the grafted payload. A Null trigger is an unconditional
// branch; Probabilistic fires per arrival with probability p; Intent fires in
// steps where the named intent was broadcast; State fires once the walk has
// re-entered the graft block counter_threshold times within a session.
struct Trigger {
    TriggerKind variant = TriggerKind::Null;
    double p = 0.0;
    std::string intent_name;
    int counter_threshold = 0;

    bool operator==(const Trigger&) const = default;
};

struct PayloadSpec {
    std::vector<Block> blocks;  // all with is_payload=true; first block is the graft target
    int entry_edge_from = 0;    // host block the grafted edge leaves from
    Trigger trigger;

    bool operator==(const PayloadSpec&) const = default;
};

enum class PermissionOrigin { Android, Custom };

struct Permission {
    std::string name;
    PermissionOrigin origin = PermissionOrigin::Android;
    bool dangerous = false;

    bool operator==(const Permission&) const = default;
};

struct Manifest {
    int min_sdk = 1;
    int max_sdk = 1;
    int n_activities = 0;
    int n_services = 0;
    int n_receivers = 0;
    int n_providers = 0;
    std::vector<Permission> permissions;
    std::vector<std::string> declared_intents;
    std::array<int, kStaticApiCategoryCount> static_api_counts{};

    bool operator==(const Manifest&) const = default;
};

enum class GuardKind { Unguarded, Intent, Trigger };

struct Edge {
    int from = 0;
    int to = 0;
    GuardKind guard = GuardKind::Unguarded;
    std::string intent_name;  // set iff guard == Intent

    bool operator==(const Edge&) const = default;
};

struct Cfg {
    int entry = 0;
    std::vector<Block> blocks;
    std::vector<Edge> edges;

    const Block* find_block(int id) const;
    bool operator==(const Cfg&) const = default;
};

struct SyntheticApp {
    std::string app_id;
    Manifest manifest;
    Cfg cfg;
    Label label = Label::Benign;
    std::optional<PayloadSpec> payload;

    bool operator==(const SyntheticApp&) const = default;
};

struct CorpusConfig {
    int n_benign = 0;
    int n_malicious = 0;

    // Host CFG size range (blocks) and payload size as a fraction of it.
    int host_blocks_min = 8;
    int host_blocks_max = 16;
    double payload_ratio = 0.2;

    int calls_per_block_min = 0;
    int calls_per_block_max = 3;

    // Probability of an extra (branching) edge per block, and of that edge
    // being intent-guarded.
    double branch_probability = 0.6;
    double intent_edge_probability = 0.15;

    // Trigger variant mix; must sum to 1.
    double trigger_null = 0.25;
    double trigger_probabilistic = 0.25;
    double trigger_intent = 0.25;
    double trigger_state = 0.25;

    double trigger_probability = 0.3;  // p of Probabilistic triggers
    int state_threshold = 2;           // re-entry count of State triggers

    // Category indices each class of block draws its calls from.
    std::vector<int> benign_categories;
    std::vector<int> payload_categories;

    static CorpusConfig defaults();
};

// Default call profiles: payload blocks draw from messaging/identity/crypto
// style categories, benign blocks from UI/storage/network ones, so that the
// two classes are separable in principle once a payload actually runs.
std::vector<int> default_benign_categories();
std::vector<int> default_payload_categories();

// Throws ConfigError naming the offending field.
void validate_config(const CorpusConfig& config);

struct Violation {
    std::string code;     // stable identifier, e.g. "unreachable-block"
    std::string message;  // human-readable detail
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_app(const SyntheticApp& app);

// Grafts a payload onto a benign app: payload blocks are appended and chained,
// an entry edge is added from entry_edge_from to the first payload block
// (trigger-guarded, or unguarded for a Null trigger) and a return edge leads
// back to the graft block. Base blocks and edges are left untouched. Intent
// triggers register their intent in the manifest when missing.
SyntheticApp inject_payload(const SyntheticApp& base, const PayloadSpec& payload, std::int64_t seed);

// Deterministic builders used by generate_corpus and exposed for tests.
SyntheticApp generate_benign_app(const CorpusConfig& config, std::int64_t seed, const std::string& app_id);
SyntheticApp generate_malicious_app(const CorpusConfig& config, std::int64_t seed, const std::string& app_id);

// Per-app seeds inside a corpus, derived from the corpus seed.
std::int64_t corpus_app_seed(std::int64_t corpus_seed, Label label, int index);

std::vector<SyntheticApp> generate_corpus(const CorpusConfig& config, std::int64_t seed);

}  // namespace graftbench
