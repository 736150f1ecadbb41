#include "tokenizer.hpp"

namespace headgate {

std::vector<TokenId> encode_bytes(std::string_view text) {
    std::vector<TokenId> out;
    out.reserve(text.size());
    for (unsigned char b : text) out.push_back(static_cast<TokenId>(b));
    return out;
}

std::string decode_bytes(std::span<const TokenId> tokens) {
    std::string out;
    out.reserve(tokens.size());
    for (TokenId t : tokens) {
        if (t < kByteTokens) out.push_back(static_cast<char>(static_cast<unsigned char>(t)));
    }
    return out;
}

}  // namespace headgate
