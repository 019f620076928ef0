#pragma once

#include <map>
#include <string>

#include "seq2form/train.hpp"

namespace s2f {

// key = value per line; blank lines and #-comments ignored; whitespace
// around keys and values trimmed.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config(const std::string& path);

// Applies known keys onto a TrainConfig; unknown keys throw (typos should
// not silently train a different model).
void apply_config(TrainConfig& config, const std::map<std::string, std::string>& kv);

// The resolved config as canonical "key = value" lines (sorted by key).
std::string dump_config(const TrainConfig& config);

// FNV-1a over the canonical dump, as 16 hex digits. Stable identifier for
// "which configuration produced this metric".
std::string config_hash(const TrainConfig& config);

}  // namespace s2f
