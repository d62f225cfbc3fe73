#include "mkex/hash.hpp"

#include <openssl/evp.h>

#include <memory>

#include "mkex/error.hpp"

namespace mkex {

namespace {

struct CtxFree {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

} // namespace

Digest sha256_parts(std::initializer_list<std::span<const std::uint8_t>> parts) {
    std::unique_ptr<EVP_MD_CTX, CtxFree> ctx(EVP_MD_CTX_new());
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw Error("io", "sha256 init failed");
    for (const auto& part : parts) {
        if (EVP_DigestUpdate(ctx.get(), part.data(), part.size()) != 1)
            throw Error("io", "sha256 update failed");
    }
    Digest out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size())
        throw Error("io", "sha256 finalization failed");
    return out;
}

Digest sha256(std::span<const std::uint8_t> data) { return sha256_parts({data}); }

} // namespace mkex
