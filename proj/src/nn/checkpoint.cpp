#include "qrl/nn/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qrl::nn {

namespace {

const char* kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Input: return "input";
        case LayerKind::Conv2D: return "conv2d";
        case LayerKind::Dense: return "dense";
        case LayerKind::ReLU: return "relu";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::Concat: return "concat";
    }
    return "?";
}

void write_f32_le(std::ostream& out, const Tensor& t) {
    for (double v : t.data) {
        const float f = static_cast<float>(v);
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        const char bytes[4] = {static_cast<char>(u & 0xff), static_cast<char>((u >> 8) & 0xff),
                               static_cast<char>((u >> 16) & 0xff), static_cast<char>((u >> 24) & 0xff)};
        out.write(bytes, 4);
    }
}

void read_f32_le(std::istream& in, Tensor& t) {
    for (double& v : t.data) {
        unsigned char bytes[4];
        in.read(reinterpret_cast<char*>(bytes), 4);
        if (!in) throw std::runtime_error("truncated checkpoint tensor data");
        const std::uint32_t u = static_cast<std::uint32_t>(bytes[0]) |
                                (static_cast<std::uint32_t>(bytes[1]) << 8) |
                                (static_cast<std::uint32_t>(bytes[2]) << 16) |
                                (static_cast<std::uint32_t>(bytes[3]) << 24);
        float f;
        std::memcpy(&f, &u, 4);
        v = static_cast<double>(f);
    }
}

} // namespace

void save_net_checkpoint(const std::string& path, const NetworkSpec& net, const ParameterSet& params,
                         long step, const std::string& rng_state,
                         const std::map<std::string, std::string>& meta) {
    if (static_cast<int>(params.size()) != net.param_tensors)
        throw std::invalid_argument("checkpoint parameter set does not match network");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);

    out << "QRLNET1\n";
    out << "name " << net.name << '\n';
    out << "step " << step << '\n';
    if (!rng_state.empty()) out << "rng " << rng_state << '\n';
    for (const auto& [k, v] : meta) out << "meta " << k << ' ' << v << '\n';
    for (const Node& n : net.nodes) {
        out << "layer " << kind_name(n.kind);
        if (n.kind == LayerKind::Conv2D)
            out << ' ' << n.conv.kh << 'x' << n.conv.kw << 'x' << n.conv.out_channels
                << (n.conv.padding == Padding::Same ? " same" : " valid");
        else if (n.kind == LayerKind::Dense)
            out << ' ' << n.dense.in << "->" << n.dense.out;
        out << '\n';
    }
    for (const ParamTensor& p : params) {
        out << "tensor w";
        for (int d : p.w.shape) out << ' ' << d;
        out << "\ntensor b";
        for (int d : p.b.shape) out << ' ' << d;
        out << '\n';
    }
    out << "data\n";
    for (const ParamTensor& p : params) {
        write_f32_le(out, p.w);
        write_f32_le(out, p.b);
    }
    if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

NetCheckpoint load_net_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path);

    std::string line;
    if (!std::getline(in, line) || line != "QRLNET1")
        throw std::runtime_error("bad checkpoint magic: " + path);

    NetCheckpoint cp;
    std::vector<std::vector<int>> shapes;
    while (std::getline(in, line)) {
        if (line == "data") break;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "name") {
            ss >> cp.name;
        } else if (tag == "step") {
            ss >> cp.step;
        } else if (tag == "rng") {
            std::getline(ss >> std::ws, cp.rng_state);
        } else if (tag == "meta") {
            std::string key, value;
            ss >> key;
            std::getline(ss >> std::ws, value);
            cp.meta[key] = value;
        } else if (tag == "layer") {
            // informational; the graph is rebuilt from the network name
        } else if (tag == "tensor") {
            std::string which;
            ss >> which;
            std::vector<int> shape;
            int d;
            while (ss >> d) shape.push_back(d);
            if ((which != "w" && which != "b") || shape.empty())
                throw std::runtime_error("bad checkpoint tensor line: " + line);
            shapes.push_back(std::move(shape));
        } else {
            throw std::runtime_error("bad checkpoint header line: " + line);
        }
    }
    if (line != "data") throw std::runtime_error("checkpoint missing data section: " + path);
    if (cp.name.empty() || shapes.size() % 2 != 0)
        throw std::runtime_error("malformed checkpoint header: " + path);

    const NetworkSpec net = build_network_by_name(cp.name);
    if (static_cast<int>(shapes.size() / 2) != net.param_tensors)
        throw std::runtime_error("checkpoint tensor count does not match network: " + path);

    cp.params.resize(shapes.size() / 2);
    for (std::size_t i = 0; i < cp.params.size(); ++i) {
        cp.params[i].w = Tensor::zeros(shapes[2 * i]);
        cp.params[i].b = Tensor::zeros(shapes[2 * i + 1]);
        read_f32_le(in, cp.params[i].w);
        read_f32_le(in, cp.params[i].b);
    }

    // Cross-check against the rebuilt graph's expected shapes.
    Rng probe(0);
    const ParameterSet expect = init_params(net, probe);
    for (std::size_t i = 0; i < cp.params.size(); ++i)
        if (cp.params[i].w.shape != expect[i].w.shape || cp.params[i].b.shape != expect[i].b.shape)
            throw std::runtime_error("checkpoint tensor shapes do not match network: " + path);
    return cp;
}

} // namespace qrl::nn
