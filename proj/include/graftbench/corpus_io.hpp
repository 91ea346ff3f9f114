#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "graftbench/corpus.hpp"

namespace graftbench {

// On-disk corpus layout: <dir>/<app_id>.json per app, <dir>/index.json listing
// {app_id, label, file} entries, and <dir>/ground_truth.json mapping app_id to
// payload block ids. Ground truth is for evaluation tooling only; the learner
// never reads it.

std::string app_to_json(const SyntheticApp& app);
SyntheticApp app_from_json(const std::string& text);

void write_corpus(const std::filesystem::path& dir, const std::vector<SyntheticApp>& apps, bool overwrite);
std::vector<SyntheticApp> load_corpus(const std::filesystem::path& dir);

// Payload block ids per app as persisted in ground_truth.json.
std::vector<int> payload_block_ids(const SyntheticApp& app);

// FNV-1a digest of the corpus index file, hex-encoded.
std::string corpus_digest(const std::filesystem::path& dir);

// Flat key=value corpus config file. '#' starts a comment; unknown keys are
// rejected. Category lists are comma-separated category names.
CorpusConfig parse_corpus_config(const std::string& text);
CorpusConfig load_corpus_config(const std::filesystem::path& path);

}  // namespace graftbench
