#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "hpinn/net.hpp"

namespace hpinn {

namespace {

constexpr char kMagic[8] = {'H', 'P', 'I', 'N', 'N', 'M', 'L', 'P'};

void put_u64_le(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

std::vector<unsigned char> serialize(const MlpParams& params) {
    const Architecture& arch = params.architecture();
    const nlohmann::json header = {
        {"format", "hpinn-mlp-v1"},
        {"input_dim", arch.input_dim},
        {"hidden_widths", arch.hidden_widths},
        {"output_dim", 1},
        {"activation", std::string(to_string(arch.activation))},
        {"param_count", params.size()},
        {"layout", "per layer: W row-major (fan_out x fan_in), then b; float64 little-endian"},
    };
    const std::string text = header.dump();

    std::vector<unsigned char> out(std::begin(kMagic), std::end(kMagic));
    const auto len = static_cast<std::uint32_t>(text.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(len >> (8 * i)));
    out.insert(out.end(), text.begin(), text.end());
    out.reserve(out.size() + 8 * params.size());
    for (const double v : params.values()) put_u64_le(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

MlpParams deserialize(std::span<const unsigned char> blob) {
    if (blob.size() < 12 || std::memcmp(blob.data(), kMagic, 8) != 0)
        throw std::invalid_argument("not an hpinn parameter blob");
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(blob[8 + static_cast<std::size_t>(i)]) << (8 * i);
    if (blob.size() < 12 + static_cast<std::size_t>(len)) throw std::invalid_argument("truncated parameter header");

    const auto header = nlohmann::json::parse(blob.begin() + 12, blob.begin() + 12 + len);
    Architecture arch;
    arch.input_dim = header.at("input_dim").get<int>();
    arch.hidden_widths = header.at("hidden_widths").get<std::vector<int>>();
    arch.activation = parse_activation(header.at("activation").get<std::string>());
    arch.validate();
    const std::size_t count = param_count(arch);
    if (header.at("param_count").get<std::size_t>() != count)
        throw std::invalid_argument("parameter count in header does not match the architecture");

    const std::size_t body = 12 + static_cast<std::size_t>(len);
    if (blob.size() != body + 8 * count) throw std::invalid_argument("parameter payload has the wrong length");
    std::vector<double> values(count);
    for (std::size_t k = 0; k < count; ++k) values[k] = std::bit_cast<double>(get_u64_le(blob.data() + body + 8 * k));
    return MlpParams(std::move(arch), std::move(values));
}

void save_params(const MlpParams& params, const std::string& path) {
    const auto blob = serialize(params);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
}

MlpParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    const std::vector<unsigned char> blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(blob);
}

}  // namespace hpinn
