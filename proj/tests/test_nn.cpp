#include "doctest.h"

#include <cmath>
#include <limits>

#include "qrl/nn/network.hpp"

using namespace qrl;
using namespace qrl::nn;

namespace {

// A small mixed-topology net: conv -> relu -> flatten -> dense, plus a
// parallel flatten branch concatenated before the head.
NetworkSpec small_branchy_net() {
    NetworkSpec net;
    net.name = "test-branchy";
    net.input_shape = {3, 3, 2};
    const int in = net.add_input();
    const int conv = net.add_conv(in, 2, 2, 3, Padding::Same);
    const int act = net.add_relu(conv);
    const int fa = net.add_flatten(act);
    const int fb = net.add_flatten(in);
    const int cat = net.add_concat({fa, fb});
    net.add_dense(cat, 5);
    net.finalize();
    return net;
}

std::vector<QLossItem> random_batch(const NetworkSpec& net, int count, Rng& rng) {
    std::vector<QLossItem> batch(static_cast<std::size_t>(count));
    for (auto& item : batch) {
        item.observation = Tensor::zeros(
            {net.input_shape[0], net.input_shape[1], net.input_shape[2]});
        for (double& v : item.observation.data) v = rng.uniform(-1.0, 1.0);
        item.action = static_cast<int>(rng.below(static_cast<std::uint64_t>(net.output_size)));
        item.target = rng.uniform(-2.0, 2.0);
    }
    return batch;
}

double numeric_loss(const NetworkSpec& net, const ParameterSet& params,
                    const std::vector<QLossItem>& batch) {
    std::vector<Tensor> obs;
    for (const auto& item : batch) obs.push_back(item.observation);
    const Tensor q = forward(net, params, stack_observations(obs));
    double sum = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double resid = batch[i].target -
                             q.data[i * static_cast<std::size_t>(net.output_size) +
                                    static_cast<std::size_t>(batch[i].action)];
        sum += resid * resid;
    }
    return sum / static_cast<double>(batch.size());
}

// Worst relative error of the analytic gradient against central differences.
double gradient_check(const NetworkSpec& net, ParameterSet params,
                      const std::vector<QLossItem>& batch, double h = 1e-4) {
    ParameterSet grads;
    q_loss_and_gradient(net, params, batch, grads);
    double worst = 0.0;
    auto probe = [&](Tensor& theta, const Tensor& analytic) {
        for (std::size_t i = 0; i < theta.data.size(); ++i) {
            const double saved = theta.data[i];
            theta.data[i] = saved + h;
            const double up = numeric_loss(net, params, batch);
            theta.data[i] = saved - h;
            const double down = numeric_loss(net, params, batch);
            theta.data[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double denom = std::max({std::abs(numeric), std::abs(analytic.data[i]), 1.0});
            worst = std::max(worst, std::abs(numeric - analytic.data[i]) / denom);
        }
    };
    for (std::size_t p = 0; p < params.size(); ++p) {
        probe(params[p].w, grads[p].w);
        probe(params[p].b, grads[p].b);
    }
    return worst;
}

} // namespace

TEST_SUITE("nn") {

TEST_CASE("built-in architecture shapes are exact") {
    const NetworkSpec ms = make_minesweeper_net();
    CHECK(ms.input_shape == std::array<int, 3>{16, 16, 2});
    CHECK(ms.output_size == 256);
    // conv stack ends at 16x16x64, so the flatten sees 16384 values.
    bool found_16384 = false;
    for (const Node& n : ms.nodes)
        if (n.kind == LayerKind::Flatten && n.flat_len == 16384) found_16384 = true;
    CHECK(found_16384);

    const NetworkSpec g = make_2048_net();
    CHECK(g.input_shape == std::array<int, 3>{4, 4, 16});
    CHECK(g.output_size == 4);
    bool found_6144 = false;
    for (const Node& n : g.nodes)
        if (n.kind == LayerKind::Concat && n.flat_len == 6144) found_6144 = true;
    CHECK(found_6144);

    const NetworkSpec s = make_sudoku_net();
    CHECK(s.input_shape == std::array<int, 3>{9, 9, 10});
    CHECK(s.output_size == 810);
    bool found_810_dense = false;
    for (const Node& n : s.nodes)
        if (n.kind == LayerKind::Dense && n.dense.in == 810 && n.dense.out == 810)
            found_810_dense = true;
    CHECK(found_810_dense);
}

TEST_CASE("networks rebuild from their names") {
    for (const char* name : {"minesweeper-cnn", "g2048-cnn", "sudoku-dense"}) {
        const NetworkSpec net = build_network_by_name(name);
        CHECK(net.name == name);
        CHECK(net.output_size > 0);
    }
    const NetworkSpec custom = build_network_by_name("minesweeper-cnn-8x8x1");
    CHECK(custom.input_shape == std::array<int, 3>{8, 8, 1});
    CHECK(custom.output_size == 64);
    CHECK_THROWS(build_network_by_name("no-such-net"));
}

TEST_CASE("initialization: biases zero, weights inside the fan bound") {
    NetworkSpec net = small_branchy_net();
    Rng rng(5);
    const ParameterSet params = init_params(net, rng);
    REQUIRE(static_cast<int>(params.size()) == net.param_tensors);
    for (const auto& p : params) {
        for (double v : p.b.data) CHECK(v == 0.0);
        for (double v : p.w.data) CHECK(std::abs(v) <= std::sqrt(6.0)); // loosest possible bound
    }
    // Conv tensor bound: fan_in = 2*2*2 = 8, fan_out = 2*2*3 = 12.
    const double conv_bound = std::sqrt(6.0 / (8 + 12));
    for (double v : params[0].w.data) CHECK(std::abs(v) <= conv_bound);

    Rng rng2(5);
    const ParameterSet again = init_params(net, rng2);
    for (std::size_t p = 0; p < params.size(); ++p) CHECK(params[p].w.data == again[p].w.data);
}

TEST_CASE("forward is pure and zero weights give zero output") {
    NetworkSpec net = small_branchy_net();
    Rng rng(7);
    const ParameterSet params = init_params(net, rng);
    Tensor input = Tensor::zeros({2, 3, 3, 2});
    for (double& v : input.data) v = rng.uniform(-1.0, 1.0);
    const Tensor a = forward(net, params, input);
    const Tensor b = forward(net, params, input);
    CHECK(a.shape == std::vector<int>{2, 5});
    CHECK(a.data == b.data);

    const ParameterSet zeros = zero_like(params);
    const Tensor z = forward(net, zeros, input);
    for (double v : z.data) CHECK(v == 0.0);
}

TEST_CASE("concat output is the branch outputs laid side by side per row") {
    NetworkSpec net;
    net.input_shape = {2, 2, 1};
    const int in = net.add_input();
    const int fa = net.add_flatten(in);
    net.add_concat({fa, fa});
    net.finalize();
    CHECK(net.output_size == 8);

    Tensor input = Tensor::zeros({2, 2, 2, 1});
    for (int i = 0; i < 8; ++i) input.data[static_cast<std::size_t>(i)] = i + 1;
    const Tensor out = forward(net, {}, input);
    REQUIRE(out.shape == std::vector<int>{2, 8});
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < 4; ++i) {
            const double v = input.data[static_cast<std::size_t>(b * 4 + i)];
            CHECK(out.data[static_cast<std::size_t>(b * 8 + i)] == v);
            CHECK(out.data[static_cast<std::size_t>(b * 8 + 4 + i)] == v);
        }
}

TEST_CASE("conv with hand-set weights matches a hand computation") {
    // 1x1 conv with weight 2, bias 0.5 is an affine map per cell.
    NetworkSpec net;
    net.input_shape = {2, 2, 1};
    const int in = net.add_input();
    const int conv = net.add_conv(in, 1, 1, 1, Padding::Valid);
    net.add_flatten(conv);
    net.finalize();
    ParameterSet params(1);
    params[0].w = Tensor::zeros({1, 1, 1, 1});
    params[0].w.data[0] = 2.0;
    params[0].b = Tensor::zeros({1});
    params[0].b.data[0] = 0.5;
    Tensor input = Tensor::zeros({1, 2, 2, 1});
    for (int i = 0; i < 4; ++i) input.data[static_cast<std::size_t>(i)] = i;
    const Tensor out = forward(net, params, input);
    for (int i = 0; i < 4; ++i)
        CHECK(out.data[static_cast<std::size_t>(i)] == 2.0 * i + 0.5);
}

TEST_CASE("same-padded conv keeps the spatial size, valid shrinks it") {
    NetworkSpec same;
    same.input_shape = {5, 5, 1};
    const int si = same.add_input();
    const int sc = same.add_conv(si, 3, 3, 2, Padding::Same);
    same.add_flatten(sc);
    same.finalize();
    CHECK(same.nodes[static_cast<std::size_t>(sc)].out_shape == std::array<int, 3>{5, 5, 2});

    NetworkSpec valid;
    valid.input_shape = {5, 5, 1};
    const int vi = valid.add_input();
    const int vc = valid.add_conv(vi, 3, 3, 2, Padding::Valid);
    valid.add_flatten(vc);
    valid.finalize();
    CHECK(valid.nodes[static_cast<std::size_t>(vc)].out_shape == std::array<int, 3>{3, 3, 2});
}

TEST_CASE("q-loss worked examples") {
    // Identity-ish net: 1x1x1 input, flatten, dense(1) with w=1, b=0.
    NetworkSpec net;
    net.input_shape = {1, 1, 1};
    const int in = net.add_input();
    const int flat = net.add_flatten(in);
    net.add_dense(flat, 1);
    net.finalize();
    ParameterSet params(1);
    params[0].w = Tensor::zeros({1, 1});
    params[0].w.data[0] = 1.0;
    params[0].b = Tensor::zeros({1});

    QLossItem item;
    item.observation = Tensor::zeros({1, 1, 1});
    item.observation.data[0] = 1.0; // so Q = 1
    item.action = 0;
    item.target = 3.0;

    ParameterSet grads;
    const double loss = q_loss_and_gradient(net, params, {item}, grads);
    CHECK(loss == 4.0); // (3 - 1)^2
    // d(loss)/dQ = -2 * (target - Q) = -4; dQ/dw = x = 1, dQ/db = 1.
    CHECK(grads[0].w.data[0] == -4.0);
    CHECK(grads[0].b.data[0] == -4.0);

    // A perfectly fit batch has zero loss and zero gradient.
    item.target = 1.0;
    const double zero_loss = q_loss_and_gradient(net, params, {item, item}, grads);
    CHECK(zero_loss == 0.0);
    CHECK(grads[0].w.data[0] == 0.0);
    CHECK(grads[0].b.data[0] == 0.0);
}

TEST_CASE("q-loss over a batch is the mean of per-item losses") {
    NetworkSpec net = small_branchy_net();
    Rng rng(11);
    const ParameterSet params = init_params(net, rng);
    const auto batch = random_batch(net, 32, rng);
    ParameterSet grads;
    const double loss = q_loss_and_gradient(net, params, batch, grads);
    double manual = 0.0;
    for (const auto& item : batch) {
        ParameterSet g1;
        manual += q_loss_and_gradient(net, params, {item}, g1);
    }
    CHECK(loss == doctest::Approx(manual / 32.0).epsilon(1e-12));
}

TEST_CASE("analytic gradients match central differences on a mixed net") {
    NetworkSpec net = small_branchy_net();
    Rng rng(13);
    ParameterSet params = init_params(net, rng);
    const auto batch = random_batch(net, 4, rng);
    CHECK(gradient_check(net, params, batch) < 1e-5);
}

TEST_CASE("sgd step: rejects non-positive rates; the quadratic bowl converges") {
    ParameterSet params(1);
    params[0].w = Tensor::zeros({1, 1});
    params[0].w.data[0] = 1.0;
    params[0].b = Tensor::zeros({1});
    ParameterSet grads(1);
    grads[0].w = Tensor::zeros({1, 1});
    grads[0].b = Tensor::zeros({1});

    grads[0].w.data[0] = 123.0;
    CHECK_THROWS(sgd_step(params, grads, 0.0));
    CHECK_THROWS(sgd_step(params, grads, -0.1));
    CHECK(params[0].w.data[0] == 1.0); // rejected steps leave parameters alone

    // f(theta) = theta^2, grad = 2 theta, lr = 0.1: one step from 1 -> 0.8.
    grads[0].w.data[0] = 2.0 * params[0].w.data[0];
    sgd_step(params, grads, 0.1);
    CHECK(params[0].w.data[0] == doctest::Approx(0.8).epsilon(1e-15));
    for (int i = 0; i < 199; ++i) {
        grads[0].w.data[0] = 2.0 * params[0].w.data[0];
        sgd_step(params, grads, 0.1);
    }
    CHECK(std::abs(params[0].w.data[0]) < 1e-6);
}

TEST_CASE("stacking observations produces a batch-major tensor") {
    std::vector<Tensor> obs;
    for (int k = 0; k < 3; ++k) {
        Tensor t = Tensor::zeros({2, 2, 1});
        for (double& v : t.data) v = k;
        obs.push_back(t);
    }
    const Tensor batch = stack_observations(obs);
    CHECK(batch.shape == std::vector<int>{3, 2, 2, 1});
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 4; ++i)
            CHECK(batch.data[static_cast<std::size_t>(k * 4 + i)] == static_cast<double>(k));
}

TEST_CASE("non-finite activations are rejected") {
    NetworkSpec net = small_branchy_net();
    Rng rng(17);
    ParameterSet params = init_params(net, rng);
    params[0].w.data[0] = std::numeric_limits<double>::quiet_NaN();
    Tensor input = Tensor::zeros({1, 3, 3, 2});
    input.data[0] = 1.0;
    CHECK_THROWS(forward(net, params, input));
}

} // TEST_SUITE
