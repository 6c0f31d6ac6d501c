#pragma once

#include <array>
#include <string>
#include <vector>

#include "qrl/rng.hpp"
#include "qrl/tensor.hpp"

namespace qrl::nn {

enum class LayerKind { Input, Conv2D, Dense, ReLU, Flatten, Concat };
enum class Padding { Valid, Same };

struct ConvSpec {
    int kh = 1, kw = 1;
    int out_channels = 1;
    Padding padding = Padding::Valid;
};

struct DenseSpec {
    int in = 1, out = 1;
};

struct Node {
    LayerKind kind = LayerKind::Input;
    std::vector<int> inputs; // node indices; topological order is by index
    ConvSpec conv;
    DenseSpec dense;

    // Inferred during finalize().
    std::array<int, 3> out_shape{}; // H, W, C for spatial nodes
    bool flat = false;              // flatten/concat/dense produce flat vectors
    int flat_len = 0;
    int param_index = -1; // into the ParameterSet for conv/dense nodes
};

// Directed acyclic layer graph with one input and one flat output vector.
struct NetworkSpec {
    std::string name;
    std::array<int, 3> input_shape{};
    std::vector<Node> nodes;
    int output_node = -1;
    int output_size = 0;
    int param_tensors = 0;

    // Runs shape inference; throws when the graph is inconsistent.
    void finalize();

    // Builder helpers; return the new node index.
    int add_input();
    int add_conv(int input, int kh, int kw, int out_channels, Padding padding);
    int add_dense(int input, int out);
    int add_relu(int input);
    int add_flatten(int input);
    int add_concat(std::vector<int> inputs);
};

struct ParamTensor {
    Tensor w;
    Tensor b;
};
using ParameterSet = std::vector<ParamTensor>;

// Uniform [-b, b] with b = sqrt(6 / (fan_in + fan_out)); biases zero.
ParameterSet init_params(const NetworkSpec& net, Rng& rng);
ParameterSet zero_like(const ParameterSet& params);

struct ForwardCache {
    std::vector<Tensor> outputs; // per node, batch-major
    std::vector<Tensor> im2col;  // per node, conv nodes only
    int batch = 0;
    bool valid = false;
};

// Forward pass over a batch. Input shape {B, H, W, C} (or {B, len} when the
// network input is naturally flat); output {B, output_size}. Deterministic;
// every intermediate is checked finite.
Tensor forward(const NetworkSpec& net, const ParameterSet& params, const Tensor& input,
               ForwardCache* cache = nullptr);

// Backpropagation from d(loss)/d(output). Requires a fresh cache from
// forward(); gradient shapes mirror the parameters.
ParameterSet backward(const NetworkSpec& net, const ParameterSet& params, const ForwardCache& cache,
                      const Tensor& output_gradient);

struct QLossItem {
    Tensor observation; // single observation, {H, W, C}
    int action = 0;
    double target = 0.0;
};

// Mean squared Bellman-residual regression: loss = mean (target - Q[a])^2;
// gradient flows only through the taken action's output coordinate.
// QRL_THREADS > 1 splits the batch across threads with a fixed chunk-order
// reduction.
double q_loss_and_gradient(const NetworkSpec& net, const ParameterSet& params,
                           const std::vector<QLossItem>& batch, ParameterSet& grads_out);

// In-place theta <- theta - lr * grad.
void sgd_step(ParameterSet& params, const ParameterSet& grads, double lr);

// The three built-in architectures.
NetworkSpec make_minesweeper_net(int n = 16, int m = 16, int in_channels = 2);
NetworkSpec make_2048_net();
NetworkSpec make_sudoku_net();
NetworkSpec build_network_by_name(const std::string& name);

// Batch helpers.
Tensor stack_observations(const std::vector<Tensor>& obs);

int env_thread_count(); // from QRL_THREADS, default 1

} // namespace qrl::nn
