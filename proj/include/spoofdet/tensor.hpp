#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spoofdet/rng.hpp"

namespace spoofdet::nn {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& s);

// Dense row-major tensor of doubles. The whole pipeline runs in 64-bit:
// the models are tiny, so precision beats speed.
struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape s);
    Tensor(Shape s, std::vector<double> values);

    static Tensor zeros(Shape s) { return Tensor(std::move(s)); }
    static Tensor full(Shape s, double v);

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }
    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    bool all_finite() const;
};

std::size_t shape_numel(const Shape& s);

enum class Padding { same, valid };

struct Pool2d {
    std::size_t kernel_h = 3;
    std::size_t kernel_w = 3;
    std::size_t stride_h = 3;
    std::size_t stride_w = 3;
    bool ceil_mode = true;
};

// Reverse-mode node. Ops build a DAG of these; backward() runs the taped
// closures in reverse topological order. Only the fixed op set below is
// supported -- this is not a general autodiff engine.
class Node {
  public:
    Tensor value;
    Tensor grad;  // allocated on demand during backward
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop;  // scatters this->grad into parents

    explicit Node(Tensor v, bool req) : value(std::move(v)), requires_grad(req) {}

    Tensor& ensure_grad();
};

using Var = std::shared_ptr<Node>;

Var constant(Tensor v);
Var parameter(Tensor v);

// --- fixed op set -----------------------------------------------------

// x: [N,C,H,W], weight: [K,C,kh,kw], bias: [K] or null. Stride is 1x1.
// Cross-correlation; same-padding splits zeros evenly with the extra row
// or column on the high-index side.
Var conv2d(const Var& x, const Var& weight, const Var& bias, Padding pad);

// Gradient routes to the argmax of each window, first occurrence on ties.
// Ceil mode admits partial windows at the high edge.
Var maxpool2d(const Var& x, const Pool2d& cfg = {});

// Max-feature-map: halves the channel axis (4-D) or feature axis (2-D) by
// split-half pairing, out_i = max(x_i, x_(i+k)); ties go to the first half.
Var mfm(const Var& x);

Var relu(const Var& x);
Var elu(const Var& x, double alpha = 1.0);

// x: [N,D], weight: [D,M], bias: [M] or null.
Var linear(const Var& x, const Var& weight, const Var& bias);

// Inverted dropout: zero with probability rate, scale survivors by
// 1/(1-rate). Identity in inference mode.
Var dropout(const Var& x, double rate, Rng& rng, bool training);

// [N,C,H,W] -> [N,C*H*W]
Var flatten2d(const Var& x);

// Scalar <coeffs, x>; the scalarizer used by gradient checking.
Var inner(const Var& x, Tensor coeffs);

// Mean over the batch of -ln softmax(logits)[label], max-subtracted.
Var softmax_cross_entropy(const Var& logits, std::span<const int> labels);

void backward(const Var& root);

// Forward-only kernels shared with the graph ops.
Tensor softmax_rows(const Tensor& logits);
std::pair<double, Tensor> softmax_cross_entropy_value(const Tensor& logits,
                                                      std::span<const int> labels);

// --- init & optimizer --------------------------------------------------

// Uniform [-a, a] with a = sqrt(6/(fan_in+fan_out)). Conv kernels [K,C,kh,kw]
// use fan_in = C*kh*kw, fan_out = K*kh*kw.
Tensor xavier_init(const Shape& shape, Rng& rng);

struct AdamHyper {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 0.1;

    void validate() const;
};

struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    std::uint64_t step_count = 0;

    static AdamState like(const std::vector<Tensor>& params);
};

// One Adam step over aligned parameter/gradient lists. A non-finite
// gradient aborts before any parameter is touched.
void adam_step(std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state, const AdamHyper& hyper);

// Max over coordinates of |analytic - numeric| / max(1e-8, |analytic|+|numeric|),
// numeric being central differences of f. When max_coords > 0, a seeded
// random subset of coordinates is checked (large tensors).
double grad_check(const std::function<Var(const Var&)>& f, const Tensor& x, double h = 1e-4,
                  std::size_t max_coords = 0, std::uint64_t coord_seed = 0);

}  // namespace spoofdet::nn
