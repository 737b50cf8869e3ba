// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "pastnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pastnet/dataset.hpp"

namespace pastnet {

static_assert(std::endian::native == std::endian::little, "blob I/O assumes a little-endian host");

namespace {

constexpr std::size_t kMagicLen = sizeof(kCheckpointMagic) - 1;

template <class T>
void put_le(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

class Reader {
public:
    explicit Reader(const std::string& b) : b_(b) {}
    template <class T>
    T get(const char* what) {
        need(sizeof(T), what);
        T v;
        std::memcpy(&v, b_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string bytes(std::uint64_t n, const char* what) {
        need(n, what);
        std::string s = b_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == b_.size(); }

private:
    void need(std::uint64_t n, const char* what) {
        const std::uint64_t left = b_.size() - pos_;
        if (left < n)
            throw TruncatedError(std::string("checkpoint truncated in ") + what + ": expected " + std::to_string(n) +
                                     " bytes, found " + std::to_string(left),
                                 n, left);
    }
    const std::string& b_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string Checkpoint::phase() const { return header.value("phase", std::string()); }

bool Checkpoint::has(const std::string& name) const {
    for (const auto& [n, _] : tensors)
        if (n == name) return true;
    return false;
}

const torch::Tensor& Checkpoint::tensor(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return t;
    throw FormatError("checkpoint has no tensor '" + name + "'");
}

void Checkpoint::put(const std::string& name, const torch::Tensor& t) {
    auto v = t.detach().to(torch::kCPU, torch::kFloat).contiguous().clone();
    for (auto& [n, old] : tensors) {
        if (n == name) {
            old = v;
            return;
        }
    }
    tensors.emplace_back(name, v);
}

void Checkpoint::put_module(const std::string& prefix, const torch::nn::Module& m) {
    for (const auto& p : m.named_parameters()) put(prefix + p.key(), p.value());
    for (const auto& b : m.named_buffers()) put(prefix + b.key(), b.value());
}

void Checkpoint::load_module(const std::string& prefix, torch::nn::Module& m) const {
    torch::NoGradGuard ng;
    auto copy = [&](const std::string& key, torch::Tensor& dst) {
        const auto& src = tensor(prefix + key);
        if (!src.sizes().equals(dst.sizes())) {
            std::ostringstream os;
            os << "checkpoint tensor '" << prefix << key << "' has shape " << src.sizes() << ", model expects "
               << dst.sizes();
            throw FormatError(os.str());
        }
        dst.copy_(src);
    };
    for (auto& p : m.named_parameters()) copy(p.key(), p.value());
    for (auto& b : m.named_buffers()) copy(b.key(), b.value());
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
    auto header = ckpt.header;
    auto blobs = nlohmann::json::array();
    for (const auto& [name, t] : ckpt.tensors) blobs.push_back({{"name", name}, {"shape", t.sizes().vec()}});
    header["blobs"] = blobs;
    const std::string h = header.dump();

    std::string out(kCheckpointMagic, kMagicLen);
    put_le<std::uint64_t>(out, h.size());
    out += h;
    for (const auto& [name, t] : ckpt.tensors) {
        const auto v = t.to(torch::kFloat).contiguous();
        put_le<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
        out += name;
        const std::uint64_t nbytes = static_cast<std::uint64_t>(v.numel()) * sizeof(float);
        put_le<std::uint64_t>(out, nbytes);
        out.append(reinterpret_cast<const char*>(v.data_ptr<float>()), nbytes);
    }
    return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
    if (bytes.size() < kMagicLen || bytes.compare(0, kMagicLen, kCheckpointMagic) != 0)
        throw BadMagicError("bad magic: not a PSTCKPT1 checkpoint");
    Reader r(bytes);
    r.bytes(kMagicLen, "magic");
    const auto hlen = r.get<std::uint64_t>("header length");
    Checkpoint ck;
    try {
        ck.header = nlohmann::json::parse(r.bytes(hlen, "header"));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("checkpoint header is not valid JSON: ") + e.what());
    }
    if (!ck.header.contains("blobs") || !ck.header["blobs"].is_array()) throw FormatError("checkpoint header lacks blobs");
    const auto blobs = ck.header["blobs"];
    ck.header.erase("blobs");
    for (const auto& b : blobs) {
        const auto nlen = r.get<std::uint32_t>("blob name length");
        const auto name = r.bytes(nlen, "blob name");
        if (name != b.at("name").get<std::string>())
            throw FormatError("checkpoint blob '" + name + "' out of order with header");
        const auto nbytes = r.get<std::uint64_t>("blob length");
        const auto shape = b.at("shape").get<std::vector<std::int64_t>>();
        std::int64_t numel = 1;
        for (auto s : shape) numel *= s;
        if (nbytes != static_cast<std::uint64_t>(numel) * sizeof(float))
            throw ShapeMismatchError("checkpoint blob '" + name + "': " + std::to_string(nbytes) +
                                     " bytes do not match shape with " + std::to_string(numel) + " floats");
        const auto data = r.bytes(nbytes, "blob data");
        auto t = torch::empty(shape, torch::kFloat);
        std::memcpy(t.data_ptr<float>(), data.data(), nbytes);
        ck.tensors.emplace_back(name, t);
    }
    if (!r.done()) throw FormatError("checkpoint has trailing bytes after the last blob");
    return ck;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const auto bytes = encode_checkpoint(ckpt);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return decode_checkpoint(ss.str());
}

}  // namespace pastnet
