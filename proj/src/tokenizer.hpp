#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "model.hpp"

namespace headgate {

// Byte-level tokenizer: ids 0..255 are the raw bytes, then the two specials.
// Any UTF-8 text round-trips without a vocabulary file, which keeps model
// fixtures self-contained.
inline constexpr TokenId kByteTokens = 256;
inline constexpr TokenId kBosToken = 256;
inline constexpr TokenId kEosToken = 257;
inline constexpr std::uint32_t kByteVocabSize = 258;

// Text bytes only; no BOS/EOS.
std::vector<TokenId> encode_bytes(std::string_view text);

// Drops ids >= 256 (specials carry no text).
std::string decode_bytes(std::span<const TokenId> tokens);

}  // namespace headgate
