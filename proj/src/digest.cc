#include <spinbound/digest.hh>
#include <spinbound/errors.hh>

#include <openssl/evp.h>

#include <array>
#include <memory>

namespace spinbound
{
    auto sha256_hex(std::string_view data) -> std::string
    {
        std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
        std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
        unsigned len = 0;
        if (! ctx
                || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1
                || EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1
                || EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
            throw Error("sha256 failed");

        static constexpr char hex[] = "0123456789abcdef";
        std::string out;
        for (unsigned i = 0 ; i < len ; ++i) {
            out += hex[digest[i] >> 4];
            out += hex[digest[i] & 15];
        }
        return out;
    }

    auto graph_sha(const Graph & g) -> std::string
    {
        return sha256_hex(format_graph(g));
    }

    auto weights_sha(const Graph & g, const WeightSystem & w) -> std::string
    {
        return sha256_hex(format_weights(g, w));
    }
}
