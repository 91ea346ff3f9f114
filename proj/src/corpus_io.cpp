#include "graftbench/corpus_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "graftbench/errors.hpp"
#include "graftbench/rng.hpp"

namespace graftbench {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json call_to_json(const ApiCall& call) {
    return ordered_json{{"category", call.category}, {"method", call.method}};
}

ApiCall call_from_json(const ordered_json& j) {
    return ApiCall{j.at("category").get<int>(), j.at("method").get<std::string>()};
}

ordered_json block_to_json(const Block& block) {
    ordered_json emits = ordered_json::array();
    for (const auto& call : block.emits) emits.push_back(call_to_json(call));
    return ordered_json{{"id", block.id}, {"emits", std::move(emits)}, {"is_payload", block.is_payload}};
}

Block block_from_json(const ordered_json& j) {
    Block block;
    block.id = j.at("id").get<int>();
    for (const auto& call : j.at("emits")) block.emits.push_back(call_from_json(call));
    block.is_payload = j.at("is_payload").get<bool>();
    return block;
}

ordered_json trigger_to_json(const Trigger& trigger) {
    ordered_json j{{"variant", std::string(trigger_kind_name(trigger.variant))}};
    switch (trigger.variant) {
        case TriggerKind::Probabilistic: j["p"] = trigger.p; break;
        case TriggerKind::Intent: j["name"] = trigger.intent_name; break;
        case TriggerKind::State: j["counter_threshold"] = trigger.counter_threshold; break;
        case TriggerKind::Null: break;
    }
    return j;
}

Trigger trigger_from_json(const ordered_json& j) {
    Trigger trigger;
    const auto variant = j.at("variant").get<std::string>();
    if (variant == "null") {
        trigger.variant = TriggerKind::Null;
    } else if (variant == "probabilistic") {
        trigger.variant = TriggerKind::Probabilistic;
        trigger.p = j.at("p").get<double>();
    } else if (variant == "intent") {
        trigger.variant = TriggerKind::Intent;
        trigger.intent_name = j.at("name").get<std::string>();
    } else if (variant == "state") {
        trigger.variant = TriggerKind::State;
        trigger.counter_threshold = j.at("counter_threshold").get<int>();
    } else {
        throw InputError("unknown trigger variant: " + variant);
    }
    return trigger;
}

std::string_view guard_name(GuardKind guard) {
    switch (guard) {
        case GuardKind::Unguarded: return "unguarded";
        case GuardKind::Intent: return "intent";
        case GuardKind::Trigger: return "trigger";
    }
    return "unguarded";
}

ordered_json edge_to_json(const Edge& edge) {
    ordered_json j{{"from", edge.from}, {"to", edge.to}, {"guard", std::string(guard_name(edge.guard))}};
    if (edge.guard == GuardKind::Intent) j["intent"] = edge.intent_name;
    return j;
}

Edge edge_from_json(const ordered_json& j) {
    Edge edge;
    edge.from = j.at("from").get<int>();
    edge.to = j.at("to").get<int>();
    const auto guard = j.at("guard").get<std::string>();
    if (guard == "unguarded") {
        edge.guard = GuardKind::Unguarded;
    } else if (guard == "intent") {
        edge.guard = GuardKind::Intent;
        edge.intent_name = j.at("intent").get<std::string>();
    } else if (guard == "trigger") {
        edge.guard = GuardKind::Trigger;
    } else {
        throw InputError("unknown edge guard: " + guard);
    }
    return edge;
}

ordered_json manifest_to_json(const Manifest& m) {
    ordered_json permissions = ordered_json::array();
    for (const auto& p : m.permissions)
        permissions.push_back(ordered_json{
            {"name", p.name},
            {"origin", p.origin == PermissionOrigin::Android ? "android" : "custom"},
            {"dangerous", p.dangerous}});
    return ordered_json{
        {"min_sdk", m.min_sdk},
        {"max_sdk", m.max_sdk},
        {"n_activities", m.n_activities},
        {"n_services", m.n_services},
        {"n_receivers", m.n_receivers},
        {"n_providers", m.n_providers},
        {"permissions", std::move(permissions)},
        {"declared_intents", m.declared_intents},
        {"static_api_counts", m.static_api_counts},
    };
}

Manifest manifest_from_json(const ordered_json& j) {
    Manifest m;
    m.min_sdk = j.at("min_sdk").get<int>();
    m.max_sdk = j.at("max_sdk").get<int>();
    m.n_activities = j.at("n_activities").get<int>();
    m.n_services = j.at("n_services").get<int>();
    m.n_receivers = j.at("n_receivers").get<int>();
    m.n_providers = j.at("n_providers").get<int>();
    for (const auto& p : j.at("permissions")) {
        Permission perm;
        perm.name = p.at("name").get<std::string>();
        const auto origin = p.at("origin").get<std::string>();
        if (origin == "android") perm.origin = PermissionOrigin::Android;
        else if (origin == "custom") perm.origin = PermissionOrigin::Custom;
        else throw InputError("unknown permission origin: " + origin);
        perm.dangerous = p.at("dangerous").get<bool>();
        m.permissions.push_back(std::move(perm));
    }
    m.declared_intents = j.at("declared_intents").get<std::vector<std::string>>();
    const auto& counts = j.at("static_api_counts");
    if (counts.size() != m.static_api_counts.size())
        throw InputError("static_api_counts must have " + std::to_string(m.static_api_counts.size()) + " entries");
    for (std::size_t i = 0; i < m.static_api_counts.size(); ++i)
        m.static_api_counts[i] = counts[i].get<int>();
    return m;
}

ordered_json app_to_json_value(const SyntheticApp& app) {
    ordered_json blocks = ordered_json::array();
    for (const auto& b : app.cfg.blocks) blocks.push_back(block_to_json(b));
    ordered_json edges = ordered_json::array();
    for (const auto& e : app.cfg.edges) edges.push_back(edge_to_json(e));

    ordered_json j{
        {"app_id", app.app_id},
        {"manifest", manifest_to_json(app.manifest)},
        {"cfg", ordered_json{{"entry", app.cfg.entry}, {"blocks", std::move(blocks)}, {"edges", std::move(edges)}}},
        {"label", std::string(label_name(app.label))},
    };
    if (app.payload) {
        ordered_json payload_blocks = ordered_json::array();
        for (const auto& b : app.payload->blocks) payload_blocks.push_back(block_to_json(b));
        j["payload"] = ordered_json{
            {"blocks", std::move(payload_blocks)},
            {"entry_edge_from", app.payload->entry_edge_from},
            {"trigger", trigger_to_json(app.payload->trigger)},
        };
    } else {
        j["payload"] = nullptr;
    }
    return j;
}

SyntheticApp app_from_json_value(const ordered_json& j) {
    SyntheticApp app;
    app.app_id = j.at("app_id").get<std::string>();
    app.manifest = manifest_from_json(j.at("manifest"));
    const auto& cfg = j.at("cfg");
    app.cfg.entry = cfg.at("entry").get<int>();
    for (const auto& b : cfg.at("blocks")) app.cfg.blocks.push_back(block_from_json(b));
    for (const auto& e : cfg.at("edges")) app.cfg.edges.push_back(edge_from_json(e));
    app.label = parse_label(j.at("label").get<std::string>());
    const auto& payload = j.at("payload");
    if (!payload.is_null()) {
        PayloadSpec spec;
        for (const auto& b : payload.at("blocks")) spec.blocks.push_back(block_from_json(b));
        spec.entry_edge_from = payload.at("entry_edge_from").get<int>();
        spec.trigger = trigger_from_json(payload.at("trigger"));
        app.payload = std::move(spec);
    }
    return app;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

ordered_json parse_json_file(const fs::path& path) {
    auto parsed = ordered_json::parse(read_file(path), nullptr, false);
    if (parsed.is_discarded()) throw InputError("malformed JSON in " + path.string());
    return parsed;
}

}  // namespace

std::string app_to_json(const SyntheticApp& app) {
    return app_to_json_value(app).dump(2) + "\n";
}

SyntheticApp app_from_json(const std::string& text) {
    auto parsed = ordered_json::parse(text, nullptr, false);
    if (parsed.is_discarded()) throw InputError("malformed app JSON");
    return app_from_json_value(parsed);
}

std::vector<int> payload_block_ids(const SyntheticApp& app) {
    std::vector<int> ids;
    if (app.payload)
        for (const auto& b : app.payload->blocks) ids.push_back(b.id);
    return ids;
}

void write_corpus(const fs::path& dir, const std::vector<SyntheticApp>& apps, bool overwrite) {
    std::error_code ec;
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) throw IoError(dir.string() + " exists and is not a directory");
        if (!fs::is_empty(dir, ec) && !overwrite)
            throw IoError(dir.string() + " is not empty (pass --force to overwrite)");
    } else {
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }

    ordered_json index = ordered_json::array();
    ordered_json ground_truth = ordered_json::object();
    for (const auto& app : apps) {
        const std::string file = app.app_id + ".json";
        write_file(dir / file, app_to_json(app));
        index.push_back(ordered_json{{"app_id", app.app_id}, {"label", std::string(label_name(app.label))}, {"file", file}});
        ground_truth[app.app_id] = payload_block_ids(app);
    }
    write_file(dir / "index.json", index.dump(2) + "\n");
    write_file(dir / "ground_truth.json", ground_truth.dump(2) + "\n");
}

std::vector<SyntheticApp> load_corpus(const fs::path& dir) {
    const auto index = parse_json_file(dir / "index.json");
    if (!index.is_array()) throw InputError("corpus index must be a JSON array");
    std::vector<SyntheticApp> apps;
    apps.reserve(index.size());
    for (const auto& entry : index) {
        const auto file = entry.at("file").get<std::string>();
        auto app = app_from_json(read_file(dir / file));
        if (app.app_id != entry.at("app_id").get<std::string>())
            throw InputError("index entry does not match app_id in " + file);
        if (label_name(app.label) != entry.at("label").get<std::string>())
            throw InputError("index label does not match app file " + file);
        apps.push_back(std::move(app));
    }
    return apps;
}

std::string corpus_digest(const fs::path& dir) {
    const auto text = read_file(dir / "index.json");
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

namespace {

std::vector<int> parse_category_list(const std::string& value, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        // trim
        const auto begin = item.find_first_not_of(" \t");
        const auto end = item.find_last_not_of(" \t");
        if (begin == std::string::npos) continue;
        item = item.substr(begin, end - begin + 1);
        const int idx = api_category_index(item);
        if (idx == kUnknownCategory)
            throw ConfigError(key + " names unknown API category '" + item + "'");
        out.push_back(idx);
    }
    if (out.empty()) throw ConfigError(key + " must name at least one API category");
    return out;
}

}  // namespace

CorpusConfig parse_corpus_config(const std::string& text) {
    CorpusConfig config = CorpusConfig::defaults();
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + " is not key=value: " + line);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto as_int = [&](int& field) {
            try {
                field = std::stoi(value);
            } catch (const std::exception&) {
                throw ConfigError(key + " must be an integer, got '" + value + "'");
            }
        };
        auto as_double = [&](double& field) {
            try {
                field = std::stod(value);
            } catch (const std::exception&) {
                throw ConfigError(key + " must be a number, got '" + value + "'");
            }
        };
        if (key == "n_benign") as_int(config.n_benign);
        else if (key == "n_malicious") as_int(config.n_malicious);
        else if (key == "host_blocks_min") as_int(config.host_blocks_min);
        else if (key == "host_blocks_max") as_int(config.host_blocks_max);
        else if (key == "payload_ratio") as_double(config.payload_ratio);
        else if (key == "calls_per_block_min") as_int(config.calls_per_block_min);
        else if (key == "calls_per_block_max") as_int(config.calls_per_block_max);
        else if (key == "branch_probability") as_double(config.branch_probability);
        else if (key == "intent_edge_probability") as_double(config.intent_edge_probability);
        else if (key == "trigger_null") as_double(config.trigger_null);
        else if (key == "trigger_probabilistic") as_double(config.trigger_probabilistic);
        else if (key == "trigger_intent") as_double(config.trigger_intent);
        else if (key == "trigger_state") as_double(config.trigger_state);
        else if (key == "trigger_probability") as_double(config.trigger_probability);
        else if (key == "state_threshold") as_int(config.state_threshold);
        else if (key == "benign_categories") config.benign_categories = parse_category_list(value, key);
        else if (key == "payload_categories") config.payload_categories = parse_category_list(value, key);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    validate_config(config);
    return config;
}

CorpusConfig load_corpus_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_corpus_config(buf.str());
}

}  // namespace graftbench
