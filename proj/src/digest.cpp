#include "digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <memory>

#include "error.hpp"

namespace headgate {

namespace {

struct CtxFree {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

std::string to_hex(const unsigned char* bytes, unsigned len) {
    static const char* digits = "0123456789abcdef";
    std::string hex(2 * len, '0');
    for (unsigned i = 0; i < len; ++i) {
        hex[2 * i] = digits[bytes[i] >> 4];
        hex[2 * i + 1] = digits[bytes[i] & 0xF];
    }
    return hex;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    std::unique_ptr<EVP_MD_CTX, CtxFree> ctx(EVP_MD_CTX_new());
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned out_len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), out, &out_len) != 1) {
        throw HgError(Err::Io, "sha256: digest computation failed");
    }
    return to_hex(out, out_len);
}

std::string sha256_file_hex(const std::filesystem::path& path) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(
        std::fopen(path.string().c_str(), "rb"), &std::fclose);
    if (!file) {
        throw HgError(Err::NotFound, "sha256: cannot open '" + path.string() + "'");
    }
    std::unique_ptr<EVP_MD_CTX, CtxFree> ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw HgError(Err::Io, "sha256: digest init failed");
    }
    std::array<unsigned char, 1 << 16> buf;
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), file.get())) > 0) {
        if (EVP_DigestUpdate(ctx.get(), buf.data(), got) != 1) {
            throw HgError(Err::Io, "sha256: digest update failed");
        }
    }
    if (std::ferror(file.get())) {
        throw HgError(Err::Io, "sha256: read error on '" + path.string() + "'");
    }
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned out_len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), out, &out_len) != 1) {
        throw HgError(Err::Io, "sha256: digest final failed");
    }
    return to_hex(out, out_len);
}

}  // namespace headgate
