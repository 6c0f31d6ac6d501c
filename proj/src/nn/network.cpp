#include "qrl/nn/network.hpp"

#include <Eigen/Dense>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace qrl::nn {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatrixRM>;
using ConstMapRM = Eigen::Map<const MatrixRM>;

namespace {

void pad_offsets(const ConvSpec& c, int& pad_h, int& pad_w) {
    pad_h = c.padding == Padding::Same ? (c.kh - 1) / 2 : 0;
    pad_w = c.padding == Padding::Same ? (c.kw - 1) / 2 : 0;
}

void conv_out_dims(const ConvSpec& c, int h, int w, int& oh, int& ow) {
    if (c.padding == Padding::Same) {
        oh = h;
        ow = w;
    } else {
        oh = h - c.kh + 1;
        ow = w - c.kw + 1;
    }
    if (oh <= 0 || ow <= 0) throw std::invalid_argument("conv kernel larger than input");
}

void check_finite(const Tensor& t, const char* where) {
    if (!t.all_finite()) throw std::runtime_error(std::string("non-finite activation in ") + where);
}

} // namespace

int NetworkSpec::add_input() {
    Node n;
    n.kind = LayerKind::Input;
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
}

int NetworkSpec::add_conv(int input, int kh, int kw, int out_channels, Padding padding) {
    if (kh < 1 || kw < 1 || out_channels < 1) throw std::invalid_argument("bad conv spec");
    Node n;
    n.kind = LayerKind::Conv2D;
    n.inputs = {input};
    n.conv = {kh, kw, out_channels, padding};
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
}

int NetworkSpec::add_dense(int input, int out) {
    if (out < 1) throw std::invalid_argument("bad dense spec");
    Node n;
    n.kind = LayerKind::Dense;
    n.inputs = {input};
    n.dense.out = out;
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
}

int NetworkSpec::add_relu(int input) {
    Node n;
    n.kind = LayerKind::ReLU;
    n.inputs = {input};
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
}

int NetworkSpec::add_flatten(int input) {
    Node n;
    n.kind = LayerKind::Flatten;
    n.inputs = {input};
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
}

int NetworkSpec::add_concat(std::vector<int> inputs) {
    if (inputs.empty()) throw std::invalid_argument("concat needs inputs");
    Node n;
    n.kind = LayerKind::Concat;
    n.inputs = std::move(inputs);
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
}

void NetworkSpec::finalize() {
    if (nodes.empty() || nodes[0].kind != LayerKind::Input)
        throw std::invalid_argument("network must start with an input node");
    param_tensors = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        Node& n = nodes[i];
        for (int in : n.inputs)
            if (in < 0 || in >= static_cast<int>(i)) throw std::invalid_argument("node inputs must precede it");
        switch (n.kind) {
            case LayerKind::Input:
                n.out_shape = input_shape;
                n.flat = false;
                break;
            case LayerKind::Conv2D: {
                const Node& src = nodes[static_cast<std::size_t>(n.inputs[0])];
                if (src.flat) throw std::invalid_argument("conv input must be spatial");
                int oh, ow;
                conv_out_dims(n.conv, src.out_shape[0], src.out_shape[1], oh, ow);
                n.out_shape = {oh, ow, n.conv.out_channels};
                n.param_index = param_tensors++;
                break;
            }
            case LayerKind::Dense: {
                const Node& src = nodes[static_cast<std::size_t>(n.inputs[0])];
                if (!src.flat) throw std::invalid_argument("dense input must be flat");
                n.dense.in = src.flat_len;
                n.flat = true;
                n.flat_len = n.dense.out;
                n.param_index = param_tensors++;
                break;
            }
            case LayerKind::ReLU: {
                const Node& src = nodes[static_cast<std::size_t>(n.inputs[0])];
                n.flat = src.flat;
                n.flat_len = src.flat_len;
                n.out_shape = src.out_shape;
                break;
            }
            case LayerKind::Flatten: {
                const Node& src = nodes[static_cast<std::size_t>(n.inputs[0])];
                n.flat = true;
                n.flat_len = src.flat ? src.flat_len
                                      : src.out_shape[0] * src.out_shape[1] * src.out_shape[2];
                break;
            }
            case LayerKind::Concat: {
                int len = 0;
                for (int in : n.inputs) {
                    const Node& src = nodes[static_cast<std::size_t>(in)];
                    if (!src.flat) throw std::invalid_argument("concat inputs must be flat");
                    len += src.flat_len;
                }
                n.flat = true;
                n.flat_len = len;
                break;
            }
        }
    }
    output_node = static_cast<int>(nodes.size()) - 1;
    const Node& out = nodes.back();
    if (!out.flat) throw std::invalid_argument("network output must be a flat vector");
    output_size = out.flat_len;
}

ParameterSet init_params(const NetworkSpec& net, Rng& rng) {
    ParameterSet params(static_cast<std::size_t>(net.param_tensors));
    for (const Node& n : net.nodes) {
        if (n.param_index < 0) continue;
        ParamTensor& p = params[static_cast<std::size_t>(n.param_index)];
        if (n.kind == LayerKind::Conv2D) {
            const Node& src = net.nodes[static_cast<std::size_t>(n.inputs[0])];
            const int ic = src.out_shape[2];
            p.w = Tensor::zeros({n.conv.kh, n.conv.kw, ic, n.conv.out_channels});
            p.b = Tensor::zeros({n.conv.out_channels});
            const int fan_in = n.conv.kh * n.conv.kw * ic;
            const int fan_out = n.conv.kh * n.conv.kw * n.conv.out_channels;
            const double bound = std::sqrt(6.0 / (fan_in + fan_out));
            for (double& v : p.w.data) v = rng.uniform(-bound, bound);
        } else {
            p.w = Tensor::zeros({n.dense.in, n.dense.out});
            p.b = Tensor::zeros({n.dense.out});
            const double bound = std::sqrt(6.0 / (n.dense.in + n.dense.out));
            for (double& v : p.w.data) v = rng.uniform(-bound, bound);
        }
    }
    return params;
}

ParameterSet zero_like(const ParameterSet& params) {
    ParameterSet out(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        out[i].w = Tensor::zeros(params[i].w.shape);
        out[i].b = Tensor::zeros(params[i].b.shape);
    }
    return out;
}

namespace {

// Lowered convolution patch matrix: rows (b, oh, ow), cols (ki, kj, c).
Tensor im2col(const Tensor& x, const ConvSpec& c, int oh, int ow) {
    const int b = x.shape[0], h = x.shape[1], w = x.shape[2], ic = x.shape[3];
    int ph, pw;
    pad_offsets(c, ph, pw);
    Tensor m = Tensor::zeros({b * oh * ow, c.kh * c.kw * ic});
    const double* src = x.data.data();
    double* dst = m.data.data();
    const int cols = c.kh * c.kw * ic;
    for (int bi = 0; bi < b; ++bi)
        for (int i = 0; i < oh; ++i)
            for (int j = 0; j < ow; ++j) {
                double* row = dst + (static_cast<std::size_t>(bi) * oh * ow + static_cast<std::size_t>(i) * ow + j) * cols;
                for (int ki = 0; ki < c.kh; ++ki) {
                    const int si = i + ki - ph;
                    if (si < 0 || si >= h) continue;
                    for (int kj = 0; kj < c.kw; ++kj) {
                        const int sj = j + kj - pw;
                        if (sj < 0 || sj >= w) continue;
                        const double* px = src + ((static_cast<std::size_t>(bi) * h + si) * w + sj) * ic;
                        double* py = row + (ki * c.kw + kj) * ic;
                        for (int ch = 0; ch < ic; ++ch) py[ch] = px[ch];
                    }
                }
            }
    return m;
}

void col2im_add(const Tensor& m, const ConvSpec& c, int oh, int ow, Tensor& dx) {
    const int b = dx.shape[0], h = dx.shape[1], w = dx.shape[2], ic = dx.shape[3];
    int ph, pw;
    pad_offsets(c, ph, pw);
    const int cols = c.kh * c.kw * ic;
    const double* src = m.data.data();
    double* dst = dx.data.data();
    for (int bi = 0; bi < b; ++bi)
        for (int i = 0; i < oh; ++i)
            for (int j = 0; j < ow; ++j) {
                const double* row = src + (static_cast<std::size_t>(bi) * oh * ow + static_cast<std::size_t>(i) * ow + j) * cols;
                for (int ki = 0; ki < c.kh; ++ki) {
                    const int si = i + ki - ph;
                    if (si < 0 || si >= h) continue;
                    for (int kj = 0; kj < c.kw; ++kj) {
                        const int sj = j + kj - pw;
                        if (sj < 0 || sj >= w) continue;
                        double* py = dst + ((static_cast<std::size_t>(bi) * h + si) * w + sj) * ic;
                        const double* px = row + (ki * c.kw + kj) * ic;
                        for (int ch = 0; ch < ic; ++ch) py[ch] += px[ch];
                    }
                }
            }
}

std::int64_t batch_row_len(const Node& n) {
    return n.flat ? n.flat_len
                  : static_cast<std::int64_t>(n.out_shape[0]) * n.out_shape[1] * n.out_shape[2];
}

} // namespace

Tensor forward(const NetworkSpec& net, const ParameterSet& params, const Tensor& input,
               ForwardCache* cache) {
    if (net.output_node < 0) throw std::invalid_argument("network not finalized");
    if (input.shape.size() != 4 || input.shape[1] != net.input_shape[0] ||
        input.shape[2] != net.input_shape[1] || input.shape[3] != net.input_shape[2])
        throw std::invalid_argument("forward input shape mismatch");
    if (static_cast<int>(params.size()) != net.param_tensors)
        throw std::invalid_argument("parameter set does not match network");

    const int batch = input.shape[0];
    ForwardCache local;
    ForwardCache& fc = cache ? *cache : local;
    fc.outputs.assign(net.nodes.size(), Tensor{});
    fc.im2col.assign(net.nodes.size(), Tensor{});
    fc.batch = batch;

    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const Node& n = net.nodes[i];
        switch (n.kind) {
            case LayerKind::Input:
                fc.outputs[i] = input;
                break;
            case LayerKind::Conv2D: {
                const Tensor& x = fc.outputs[static_cast<std::size_t>(n.inputs[0])];
                const int oh = n.out_shape[0], ow = n.out_shape[1], oc = n.out_shape[2];
                Tensor cols = im2col(x, n.conv, oh, ow);
                const ParamTensor& p = params[static_cast<std::size_t>(n.param_index)];
                Tensor y = Tensor::zeros({batch, oh, ow, oc});
                ConstMapRM mc(cols.data.data(), cols.shape[0], cols.shape[1]);
                ConstMapRM mw(p.w.data.data(), cols.shape[1], oc);
                MapRM my(y.data.data(), cols.shape[0], oc);
                my.noalias() = mc * mw;
                my.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(p.b.data.data(), oc);
                fc.outputs[i] = std::move(y);
                fc.im2col[i] = std::move(cols);
                break;
            }
            case LayerKind::Dense: {
                const Tensor& x = fc.outputs[static_cast<std::size_t>(n.inputs[0])];
                const ParamTensor& p = params[static_cast<std::size_t>(n.param_index)];
                Tensor y = Tensor::zeros({batch, n.dense.out});
                ConstMapRM mx(x.data.data(), batch, n.dense.in);
                ConstMapRM mw(p.w.data.data(), n.dense.in, n.dense.out);
                MapRM my(y.data.data(), batch, n.dense.out);
                my.noalias() = mx * mw;
                my.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(p.b.data.data(), n.dense.out);
                fc.outputs[i] = std::move(y);
                break;
            }
            case LayerKind::ReLU: {
                Tensor y = fc.outputs[static_cast<std::size_t>(n.inputs[0])];
                for (double& v : y.data) v = v > 0.0 ? v : 0.0;
                fc.outputs[i] = std::move(y);
                break;
            }
            case LayerKind::Flatten: {
                Tensor y = fc.outputs[static_cast<std::size_t>(n.inputs[0])];
                y.shape = {batch, n.flat_len};
                fc.outputs[i] = std::move(y);
                break;
            }
            case LayerKind::Concat: {
                Tensor y = Tensor::zeros({batch, n.flat_len});
                int offset = 0;
                for (int in : n.inputs) {
                    const Tensor& x = fc.outputs[static_cast<std::size_t>(in)];
                    const int len = net.nodes[static_cast<std::size_t>(in)].flat_len;
                    for (int bi = 0; bi < batch; ++bi)
                        for (int k = 0; k < len; ++k)
                            y.data[static_cast<std::size_t>(bi * n.flat_len + offset + k)] =
                                x.data[static_cast<std::size_t>(bi * len + k)];
                    offset += len;
                }
                fc.outputs[i] = std::move(y);
                break;
            }
        }
        check_finite(fc.outputs[i], "forward");
    }
    fc.valid = true;
    return fc.outputs[static_cast<std::size_t>(net.output_node)];
}

ParameterSet backward(const NetworkSpec& net, const ParameterSet& params, const ForwardCache& cache,
                      const Tensor& output_gradient) {
    if (!cache.valid || cache.outputs.size() != net.nodes.size())
        throw std::invalid_argument("backward requires a fresh forward cache");
    const int batch = cache.batch;
    if (output_gradient.shape != std::vector<int>{batch, net.output_size})
        throw std::invalid_argument("output gradient shape mismatch");

    ParameterSet grads = zero_like(params);
    std::vector<Tensor> node_grads(net.nodes.size());
    node_grads[static_cast<std::size_t>(net.output_node)] = output_gradient;

    auto ensure_grad = [&](int idx) -> Tensor& {
        Tensor& g = node_grads[static_cast<std::size_t>(idx)];
        if (g.data.empty()) {
            const Node& n = net.nodes[static_cast<std::size_t>(idx)];
            if (n.flat)
                g = Tensor::zeros({batch, n.flat_len});
            else
                g = Tensor::zeros({batch, n.out_shape[0], n.out_shape[1], n.out_shape[2]});
        }
        return g;
    };

    for (int i = static_cast<int>(net.nodes.size()) - 1; i > 0; --i) {
        Tensor& dy = node_grads[static_cast<std::size_t>(i)];
        if (dy.data.empty()) continue; // node not on any path to the output
        const Node& n = net.nodes[static_cast<std::size_t>(i)];
        switch (n.kind) {
            case LayerKind::Input:
                break;
            case LayerKind::Conv2D: {
                const Tensor& cols = cache.im2col[static_cast<std::size_t>(i)];
                const int rows = cols.shape[0], kcols = cols.shape[1], oc = n.out_shape[2];
                const ParamTensor& p = params[static_cast<std::size_t>(n.param_index)];
                ParamTensor& g = grads[static_cast<std::size_t>(n.param_index)];
                ConstMapRM mdy(dy.data.data(), rows, oc);
                ConstMapRM mc(cols.data.data(), rows, kcols);
                MapRM mdw(g.w.data.data(), kcols, oc);
                mdw.noalias() += mc.transpose() * mdy;
                Eigen::Map<Eigen::RowVectorXd>(g.b.data.data(), oc) += mdy.colwise().sum();

                Tensor dcols = Tensor::zeros({rows, kcols});
                MapRM mdc(dcols.data.data(), rows, kcols);
                ConstMapRM mw(p.w.data.data(), kcols, oc);
                mdc.noalias() = mdy * mw.transpose();
                Tensor& dx = ensure_grad(n.inputs[0]);
                col2im_add(dcols, n.conv, n.out_shape[0], n.out_shape[1], dx);
                break;
            }
            case LayerKind::Dense: {
                const Tensor& x = cache.outputs[static_cast<std::size_t>(n.inputs[0])];
                const ParamTensor& p = params[static_cast<std::size_t>(n.param_index)];
                ParamTensor& g = grads[static_cast<std::size_t>(n.param_index)];
                ConstMapRM mdy(dy.data.data(), batch, n.dense.out);
                ConstMapRM mx(x.data.data(), batch, n.dense.in);
                MapRM mdw(g.w.data.data(), n.dense.in, n.dense.out);
                mdw.noalias() += mx.transpose() * mdy;
                Eigen::Map<Eigen::RowVectorXd>(g.b.data.data(), n.dense.out) += mdy.colwise().sum();

                Tensor& dx = ensure_grad(n.inputs[0]);
                ConstMapRM mw(p.w.data.data(), n.dense.in, n.dense.out);
                MapRM mdx(dx.data.data(), batch, n.dense.in);
                mdx.noalias() += mdy * mw.transpose();
                break;
            }
            case LayerKind::ReLU: {
                const Tensor& y = cache.outputs[static_cast<std::size_t>(i)];
                Tensor& dx = ensure_grad(n.inputs[0]);
                for (std::size_t k = 0; k < dy.data.size(); ++k)
                    if (y.data[k] > 0.0) dx.data[k] += dy.data[k];
                break;
            }
            case LayerKind::Flatten: {
                Tensor& dx = ensure_grad(n.inputs[0]);
                for (std::size_t k = 0; k < dy.data.size(); ++k) dx.data[k] += dy.data[k];
                break;
            }
            case LayerKind::Concat: {
                int offset = 0;
                for (int in : n.inputs) {
                    const int len = net.nodes[static_cast<std::size_t>(in)].flat_len;
                    Tensor& dx = ensure_grad(in);
                    for (int bi = 0; bi < batch; ++bi)
                        for (int k = 0; k < len; ++k)
                            dx.data[static_cast<std::size_t>(bi * len + k)] +=
                                dy.data[static_cast<std::size_t>(bi * n.flat_len + offset + k)];
                    offset += len;
                }
                break;
            }
        }
    }
    return grads;
}

Tensor stack_observations(const std::vector<Tensor>& obs) {
    if (obs.empty()) throw std::invalid_argument("empty observation batch");
    const auto& s = obs[0].shape;
    if (s.size() != 3) throw std::invalid_argument("observations must be H x W x C");
    Tensor out = Tensor::zeros({static_cast<int>(obs.size()), s[0], s[1], s[2]});
    const std::size_t row = obs[0].data.size();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (obs[i].shape != s) throw std::invalid_argument("ragged observation batch");
        std::copy(obs[i].data.begin(), obs[i].data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(i * row));
    }
    return out;
}

int env_thread_count() {
    const char* v = std::getenv("QRL_THREADS");
    if (!v) return 1;
    const int t = std::atoi(v);
    return t > 0 ? t : 1;
}

namespace {

double q_loss_chunk(const NetworkSpec& net, const ParameterSet& params,
                    const std::vector<QLossItem>& batch, std::size_t lo, std::size_t hi,
                    std::size_t total, ParameterSet& grads) {
    std::vector<Tensor> obs;
    obs.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) obs.push_back(batch[i].observation);
    ForwardCache cache;
    const Tensor q = forward(net, params, stack_observations(obs), &cache);

    const int b = static_cast<int>(hi - lo);
    Tensor dout = Tensor::zeros({b, net.output_size});
    double sq_sum = 0.0;
    for (int i = 0; i < b; ++i) {
        const QLossItem& item = batch[lo + static_cast<std::size_t>(i)];
        if (item.action < 0 || item.action >= net.output_size)
            throw std::out_of_range("q_loss action index out of range");
        const double pred = q.data[static_cast<std::size_t>(i * net.output_size + item.action)];
        const double resid = item.target - pred;
        sq_sum += resid * resid;
        dout.data[static_cast<std::size_t>(i * net.output_size + item.action)] =
            -2.0 * resid / static_cast<double>(total);
    }
    grads = backward(net, params, cache, dout);
    return sq_sum;
}

void accumulate(ParameterSet& into, const ParameterSet& from) {
    for (std::size_t i = 0; i < into.size(); ++i) {
        for (std::size_t k = 0; k < into[i].w.data.size(); ++k) into[i].w.data[k] += from[i].w.data[k];
        for (std::size_t k = 0; k < into[i].b.data.size(); ++k) into[i].b.data[k] += from[i].b.data[k];
    }
}

} // namespace

double q_loss_and_gradient(const NetworkSpec& net, const ParameterSet& params,
                           const std::vector<QLossItem>& batch, ParameterSet& grads_out) {
    if (batch.empty()) throw std::invalid_argument("q_loss batch must be nonempty");
    const std::size_t total = batch.size();
    const int threads = std::min<int>(env_thread_count(), static_cast<int>(total));

    if (threads <= 1) {
        ParameterSet grads;
        const double sq = q_loss_chunk(net, params, batch, 0, total, total, grads);
        grads_out = std::move(grads);
        return sq / static_cast<double>(total);
    }

    std::vector<ParameterSet> chunk_grads(static_cast<std::size_t>(threads));
    std::vector<double> chunk_sq(static_cast<std::size_t>(threads), 0.0);
    std::vector<std::thread> pool;
    const std::size_t per = (total + static_cast<std::size_t>(threads) - 1) / static_cast<std::size_t>(threads);
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = static_cast<std::size_t>(t) * per;
        const std::size_t hi = std::min(total, lo + per);
        if (lo >= hi) break;
        pool.emplace_back([&, t, lo, hi] {
            chunk_sq[static_cast<std::size_t>(t)] =
                q_loss_chunk(net, params, batch, lo, hi, total, chunk_grads[static_cast<std::size_t>(t)]);
        });
    }
    for (auto& th : pool) th.join();

    // Fixed chunk-order reduction keeps the sum deterministic for a given
    // thread count.
    ParameterSet grads = zero_like(params);
    double sq = 0.0;
    for (int t = 0; t < threads; ++t) {
        if (chunk_grads[static_cast<std::size_t>(t)].empty()) continue;
        accumulate(grads, chunk_grads[static_cast<std::size_t>(t)]);
        sq += chunk_sq[static_cast<std::size_t>(t)];
    }
    grads_out = std::move(grads);
    return sq / static_cast<double>(total);
}

void sgd_step(ParameterSet& params, const ParameterSet& grads, double lr) {
    if (lr <= 0.0) throw std::invalid_argument("learning rate must be positive");
    if (params.size() != grads.size()) throw std::invalid_argument("gradient/parameter mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].w.shape != grads[i].w.shape || params[i].b.shape != grads[i].b.shape)
            throw std::invalid_argument("gradient/parameter shape mismatch");
        for (std::size_t k = 0; k < params[i].w.data.size(); ++k)
            params[i].w.data[k] -= lr * grads[i].w.data[k];
        for (std::size_t k = 0; k < params[i].b.data.size(); ++k)
            params[i].b.data[k] -= lr * grads[i].b.data[k];
    }
}

NetworkSpec make_minesweeper_net(int n, int m, int in_channels) {
    NetworkSpec net;
    net.name = n == 16 && m == 16 && in_channels == 2
                   ? "minesweeper-cnn"
                   : "minesweeper-cnn-" + std::to_string(n) + "x" + std::to_string(m) + "x" +
                         std::to_string(in_channels);
    net.input_shape = {n, m, in_channels};
    const int in = net.add_input();
    const int c1 = net.add_relu(net.add_conv(in, 4, 4, 16, Padding::Same));
    const int c2 = net.add_relu(net.add_conv(c1, 3, 3, 32, Padding::Same));
    const int c3 = net.add_relu(net.add_conv(c2, 2, 2, 64, Padding::Same));
    net.add_dense(net.add_flatten(c3), n * m);
    net.finalize();
    return net;
}

NetworkSpec make_2048_net() {
    NetworkSpec net;
    net.name = "g2048-cnn";
    net.input_shape = {4, 4, 16};
    const int in = net.add_input();
    // First level: (1,2) and (2,1) filters detect horizontal/vertical pairs.
    const int h1 = net.add_relu(net.add_conv(in, 1, 2, 128, Padding::Valid)); // 4x3x128
    const int v1 = net.add_relu(net.add_conv(in, 2, 1, 128, Padding::Valid)); // 3x4x128
    // Second level: both filters on both branches, shape preserving so the
    // concatenated feature vector comes out at 6144.
    const int hh = net.add_flatten(net.add_relu(net.add_conv(h1, 1, 2, 128, Padding::Same)));
    const int hv = net.add_flatten(net.add_relu(net.add_conv(h1, 2, 1, 128, Padding::Same)));
    const int vh = net.add_flatten(net.add_relu(net.add_conv(v1, 1, 2, 128, Padding::Same)));
    const int vv = net.add_flatten(net.add_relu(net.add_conv(v1, 2, 1, 128, Padding::Same)));
    const int cat = net.add_concat({hh, hv, vh, vv});
    net.add_dense(cat, 4);
    net.finalize();
    return net;
}

NetworkSpec make_sudoku_net() {
    NetworkSpec net;
    net.name = "sudoku-dense";
    net.input_shape = {9, 9, 10};
    const int in = net.add_input();
    const int flat = net.add_flatten(in);
    net.add_relu(net.add_dense(flat, 810));
    net.finalize();
    return net;
}

NetworkSpec build_network_by_name(const std::string& name) {
    if (name == "minesweeper-cnn") return make_minesweeper_net();
    if (name == "g2048-cnn") return make_2048_net();
    if (name == "sudoku-dense") return make_sudoku_net();
    if (name.rfind("minesweeper-cnn-", 0) == 0) {
        int n = 0, m = 0, c = 0;
        char x1 = 0, x2 = 0;
        std::stringstream ss(name.substr(16));
        if (ss >> n >> x1 >> m >> x2 >> c && x1 == 'x' && x2 == 'x') return make_minesweeper_net(n, m, c);
    }
    throw std::invalid_argument("unknown network name: " + name);
}

} // namespace qrl::nn
