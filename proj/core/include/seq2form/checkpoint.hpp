#pragma once

#include <string>

#include "seq2form/params.hpp"

namespace s2f {

// Binary checkpoint: "S2FCKPT\0" magic, u32 format version, u32 tensor count,
// then a manifest of (name, shape, payload offset) entries followed by the
// concatenated little-endian float64 payloads.
//
// save overwrites; load fills `store`, creating missing tensors and rejecting
// any tensor that already exists with a different shape.
void save_checkpoint(const ParameterStore& store, const std::string& path);
void load_checkpoint(ParameterStore& store, const std::string& path);

}  // namespace s2f
