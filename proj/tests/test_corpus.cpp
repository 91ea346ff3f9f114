#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "graftbench/corpus.hpp"
#include "graftbench/corpus_io.hpp"
#include "graftbench/errors.hpp"

using namespace graftbench;
namespace fs = std::filesystem;

namespace {

CorpusConfig small_config() {
    CorpusConfig config = CorpusConfig::defaults();
    config.n_benign = 10;
    config.n_malicious = 10;
    return config;
}

// Test-side inverse of inject_payload: drop payload blocks and every edge
// touching them.
SyntheticApp strip_payload(const SyntheticApp& app) {
    SyntheticApp out = app;
    std::set<int> payload_ids;
    for (const auto& b : app.cfg.blocks)
        if (b.is_payload) payload_ids.insert(b.id);
    out.cfg.blocks.clear();
    for (const auto& b : app.cfg.blocks)
        if (!payload_ids.count(b.id)) out.cfg.blocks.push_back(b);
    out.cfg.edges.clear();
    for (const auto& e : app.cfg.edges)
        if (!payload_ids.count(e.from) && !payload_ids.count(e.to)) out.cfg.edges.push_back(e);
    out.payload.reset();
    out.label = Label::Benign;
    return out;
}

SyntheticApp tiny_benign() {
    SyntheticApp app;
    app.app_id = "tiny";
    app.manifest.min_sdk = 9;
    app.manifest.max_sdk = 23;
    app.manifest.n_activities = 1;
    app.cfg.entry = 0;
    const int activity = api_category_index("android.app.Activity");
    for (int id = 0; id < 5; ++id) {
        Block b;
        b.id = id;
        b.emits.push_back({activity, make_method_name(activity, 0)});
        app.cfg.blocks.push_back(b);
        if (id > 0) app.cfg.edges.push_back({id - 1, id, GuardKind::Unguarded, ""});
    }
    return app;
}

PayloadSpec tiny_payload(Trigger trigger, int entry_from = 0) {
    PayloadSpec payload;
    const int sms = api_category_index("android.telephony.SmsManager");
    for (int i = 0; i < 2; ++i) {
        Block b;
        b.id = 100 + i;
        b.is_payload = true;
        b.emits.push_back({sms, make_method_name(sms, 0)});
        payload.blocks.push_back(b);
    }
    payload.entry_edge_from = entry_from;
    payload.trigger = std::move(trigger);
    return payload;
}

}  // namespace

TEST_CASE("generate_corpus produces the configured counts and labels") {
    const auto apps = generate_corpus(small_config(), 7);
    REQUIRE(apps.size() == 20);
    int malicious = 0;
    for (const auto& app : apps)
        if (app.label == Label::Malicious) ++malicious;
    CHECK(malicious == 10);
}

TEST_CASE("generate_corpus is deterministic: byte-identical serialization") {
    const auto a = generate_corpus(small_config(), 7);
    const auto b = generate_corpus(small_config(), 7);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
        CHECK(app_to_json(a[i]) == app_to_json(b[i]));
    }
}

TEST_CASE("trigger mix of 100% null forces null triggers everywhere") {
    CorpusConfig config = small_config();
    config.trigger_null = 1.0;
    config.trigger_probabilistic = config.trigger_intent = config.trigger_state = 0.0;
    for (const auto& app : generate_corpus(config, 3))
        if (app.payload) CHECK(app.payload->trigger.variant == TriggerKind::Null);
}

TEST_CASE("invalid configs are rejected with the field named") {
    CorpusConfig config = small_config();
    config.n_benign = 0;
    CHECK_THROWS_WITH_AS(generate_corpus(config, 1), "n_benign must be > 0", ConfigError);

    config = small_config();
    config.trigger_null = 0.5;  // mix now sums to 1.25
    CHECK_THROWS_AS(generate_corpus(config, 1), ConfigError);
}

TEST_CASE("every generated app validates cleanly") {
    for (const auto& app : generate_corpus(small_config(), 11)) {
        const auto report = validate_app(app);
        for (const auto& v : report.violations) {
            CAPTURE(app.app_id);
            CAPTURE(v.code);
            CAPTURE(v.message);
            CHECK(false);
        }
        CHECK(report.ok());
    }
}

TEST_CASE("inject_payload adds blocks, keeps the base region intact") {
    const auto base = tiny_benign();
    const auto app = inject_payload(base, tiny_payload({TriggerKind::Probabilistic, 0.5, "", 0}), 1);
    CHECK(app.cfg.blocks.size() == base.cfg.blocks.size() + 2);
    CHECK(app.label == Label::Malicious);
    for (const auto& b : base.cfg.blocks) {
        const Block* found = app.cfg.find_block(b.id);
        REQUIRE(found != nullptr);
        CHECK(*found == b);
    }
    for (const auto& e : base.cfg.edges)
        CHECK(std::find(app.cfg.edges.begin(), app.cfg.edges.end(), e) != app.cfg.edges.end());
    CHECK(validate_app(app).ok());
}

TEST_CASE("null trigger grafts an unguarded entry edge") {
    const auto app = inject_payload(tiny_benign(), tiny_payload({TriggerKind::Null, 0, "", 0}), 1);
    bool found = false;
    for (const auto& e : app.cfg.edges)
        if (e.to == 100 && e.from == 0) {
            found = true;
            CHECK(e.guard == GuardKind::Unguarded);
        }
    CHECK(found);
    CHECK(validate_app(app).ok());
}

TEST_CASE("payload block id collision is an error") {
    auto payload = tiny_payload({TriggerKind::Null, 0, "", 0});
    payload.blocks[0].id = 3;  // collides with a base block
    CHECK_THROWS_AS(inject_payload(tiny_benign(), payload, 1), ConfigError);
}

TEST_CASE("missing graft block is an error") {
    CHECK_THROWS_AS(inject_payload(tiny_benign(), tiny_payload({TriggerKind::Null, 0, "", 0}, 99), 1),
                    ConfigError);
}

TEST_CASE("intent trigger registers its intent in the manifest") {
    const auto app = inject_payload(
        tiny_benign(), tiny_payload({TriggerKind::Intent, 0, "android.intent.action.BOOT_COMPLETED", 0}), 1);
    const auto& intents = app.manifest.declared_intents;
    CHECK(std::find(intents.begin(), intents.end(), "android.intent.action.BOOT_COMPLETED") != intents.end());
    CHECK(validate_app(app).ok());
}

TEST_CASE("graft reversibility: stripping the payload recovers the base CFG") {
    // Direct injection round trip.
    const auto base = tiny_benign();
    const auto app = inject_payload(base, tiny_payload({TriggerKind::Probabilistic, 0.3, "", 0}), 5);
    const auto stripped = strip_payload(app);
    CHECK(stripped.cfg == base.cfg);
    CHECK(stripped.label == Label::Benign);
    CHECK(validate_app(stripped).ok());

    // Generated malicious apps against their regenerated bases. Grafting
    // nudges static API counts and may register an intent, so the comparison
    // covers CFG and label.
    const CorpusConfig config = small_config();
    for (int i = 0; i < config.n_malicious; ++i) {
        const auto seed = corpus_app_seed(21, Label::Malicious, i);
        const auto malicious = generate_malicious_app(config, seed, "m");
        const auto regenerated_base = generate_benign_app(config, seed, "m");
        const auto recovered = strip_payload(malicious);
        CHECK(recovered.cfg == regenerated_base.cfg);
        CHECK(recovered.label == Label::Benign);
        CHECK(validate_app(recovered).ok());
    }
}

TEST_CASE("validate_app reports label/payload mismatch") {
    auto app = tiny_benign();
    app.label = Label::Malicious;  // no payload attached
    const auto report = validate_app(app);
    REQUIRE(!report.ok());
    bool found = false;
    for (const auto& v : report.violations)
        if (v.code == "label-payload-mismatch") found = true;
    CHECK(found);
}

TEST_CASE("validate_app reports unreachable blocks") {
    auto app = tiny_benign();
    Block orphan;
    orphan.id = 50;
    app.cfg.blocks.push_back(orphan);
    const auto report = validate_app(app);
    REQUIRE(!report.ok());
    bool found = false;
    for (const auto& v : report.violations)
        if (v.code == "unreachable-block") found = true;
    CHECK(found);
}

TEST_CASE("corpus round-trips through the on-disk format") {
    const auto dir = fs::temp_directory_path() / "graftbench-test-corpus";
    fs::remove_all(dir);
    const auto apps = generate_corpus(small_config(), 13);
    write_corpus(dir, apps, false);

    CHECK(fs::exists(dir / "index.json"));
    CHECK(fs::exists(dir / "ground_truth.json"));
    const auto loaded = load_corpus(dir);
    REQUIRE(loaded.size() == apps.size());
    for (std::size_t i = 0; i < apps.size(); ++i) CHECK(loaded[i] == apps[i]);

    // Writing into the non-empty directory again requires overwrite.
    CHECK_THROWS_AS(write_corpus(dir, apps, false), IoError);
    write_corpus(dir, apps, true);
    fs::remove_all(dir);
}

TEST_CASE("corpus config parsing: defaults, overrides, unknown keys") {
    const auto config = parse_corpus_config(
        "# comment\n"
        "n_benign = 4\n"
        "n_malicious=2\n"
        "trigger_null=1\n"
        "trigger_probabilistic=0\n"
        "trigger_intent=0\n"
        "trigger_state=0\n"
        "payload_categories = javax.crypto.Cipher, android.telephony.SmsManager\n");
    CHECK(config.n_benign == 4);
    CHECK(config.n_malicious == 2);
    CHECK(config.payload_categories ==
          std::vector<int>{api_category_index("javax.crypto.Cipher"),
                           api_category_index("android.telephony.SmsManager")});
    CHECK(config.host_blocks_min == 8);  // untouched default

    CHECK_THROWS_WITH_AS(parse_corpus_config("n_benign=1\nn_malicious=1\nbogus_key=3\n"),
                         "unknown config key 'bogus_key'", ConfigError);
    CHECK_THROWS_AS(parse_corpus_config("n_benign=1\nn_malicious=1\npayload_categories=not.a.Category\n"),
                    ConfigError);
}
