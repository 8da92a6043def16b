#include "injectkit/digest.hpp"

#include <fstream>
#include <memory>
#include <vector>

#include <openssl/evp.h>

#include "injectkit/error.hpp"

namespace injectkit {

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};

class Sha224Stream {
public:
    Sha224Stream() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha224(), nullptr) != 1) {
            throw Error(Errc::IoError, "SHA-224 initialisation failed");
        }
    }

    void update(const void* data, std::size_t len) {
        if (len > 0 && EVP_DigestUpdate(ctx_.get(), data, len) != 1) {
            throw Error(Errc::IoError, "SHA-224 update failed");
        }
    }

    Sha224Digest finish() {
        Sha224Digest out{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), out.data(), &len) != 1 || len != out.size()) {
            throw Error(Errc::IoError, "SHA-224 finalisation failed");
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

} // namespace

Sha224Digest sha224(std::span<const std::uint8_t> data) {
    Sha224Stream s;
    s.update(data.data(), data.size());
    return s.finish();
}

Sha224Digest sha224(std::string_view text) {
    Sha224Stream s;
    s.update(text.data(), text.size());
    return s.finish();
}

Sha224Digest sha224_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    Sha224Stream s;
    std::vector<char> buf(1 << 20);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        s.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    if (in.bad()) throw Error(Errc::IoError, "read failed: " + path.string());
    return s.finish();
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0F]);
    }
    return out;
}

} // namespace injectkit
