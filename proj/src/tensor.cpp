#include "spoofdet/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstring>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace spoofdet::nn {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatRM>;
using CMapRM = Eigen::Map<const MatRM>;

std::string shape_str(const Shape& s) {
    std::ostringstream os;
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
    return os.str();
}

std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (std::size_t e : s) n *= e;
    return n;
}

Tensor::Tensor(Shape s) : shape(std::move(s)), data(shape_numel(shape), 0.0) {
    for (std::size_t e : shape)
        if (e == 0) throw std::invalid_argument("tensor extents must be positive");
}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
    if (shape_numel(shape) != data.size())
        throw std::invalid_argument("tensor data does not match shape " + shape_str(shape));
}

Tensor Tensor::full(Shape s, double v) {
    Tensor t(std::move(s));
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
}

bool Tensor::all_finite() const {
    for (double v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

Tensor& Node::ensure_grad() {
    if (grad.data.empty()) grad = Tensor::zeros(value.shape);
    return grad;
}

Var constant(Tensor v) { return std::make_shared<Node>(std::move(v), false); }
Var parameter(Tensor v) { return std::make_shared<Node>(std::move(v), true); }

namespace {

Var make_node(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backprop) {
    bool req = false;
    for (const Var& p : parents) req = req || (p && p->requires_grad);
    auto node = std::make_shared<Node>(std::move(value), req);
    if (req) {
        node->parents = std::move(parents);
        node->backprop = std::move(backprop);
    }
    return node;
}

struct ConvDims {
    std::size_t n, c, h, w;        // input
    std::size_t k, kh, kw;         // kernel
    std::size_t pad_top, pad_left; // same-padding low-side zeros
    std::size_t oh, ow;
};

ConvDims conv_dims(const Tensor& x, const Tensor& weight, Padding pad) {
    if (x.rank() != 4) throw std::invalid_argument("conv2d input must be [N,C,H,W], got " + shape_str(x.shape));
    if (weight.rank() != 4)
        throw std::invalid_argument("conv2d weight must be [K,C,kh,kw], got " + shape_str(weight.shape));
    ConvDims d{};
    d.n = x.shape[0];
    d.c = x.shape[1];
    d.h = x.shape[2];
    d.w = x.shape[3];
    d.k = weight.shape[0];
    d.kh = weight.shape[2];
    d.kw = weight.shape[3];
    if (weight.shape[1] != d.c)
        throw std::invalid_argument("conv2d channel mismatch: input has " + std::to_string(d.c) +
                                    ", kernel expects " + std::to_string(weight.shape[1]));
    if (pad == Padding::valid) {
        if (d.kh > d.h || d.kw > d.w)
            throw std::invalid_argument("conv2d kernel " + std::to_string(d.kh) + "x" + std::to_string(d.kw) +
                                        " larger than input " + std::to_string(d.h) + "x" + std::to_string(d.w));
        d.pad_top = d.pad_left = 0;
        d.oh = d.h - d.kh + 1;
        d.ow = d.w - d.kw + 1;
    } else {
        // total pad kh-1; odd remainder goes to the high-index side
        d.pad_top = (d.kh - 1) / 2;
        d.pad_left = (d.kw - 1) / 2;
        d.oh = d.h;
        d.ow = d.w;
    }
    return d;
}

// In-range output columns for kernel offset q form one contiguous span:
// jj = oj + q - pad_left lands in [0, W) iff oj in [lo, hi).
struct ColSpan {
    std::size_t lo, hi;     // oj range
    std::ptrdiff_t offset;  // jj - oj
};

ColSpan col_span(const ConvDims& d, std::size_t q) {
    const auto off = static_cast<std::ptrdiff_t>(q) - static_cast<std::ptrdiff_t>(d.pad_left);
    const auto lo = std::max<std::ptrdiff_t>(0, -off);
    const auto hi = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(d.w) - off, lo,
                                               static_cast<std::ptrdiff_t>(d.ow));
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi), off};
}

// Column matrix [C*kh*kw, OH*OW] for one sample; rows follow the weight's
// row-major [C,kh,kw] order so the GEMM is a plain W * col.
void im2col(const double* x_n, const ConvDims& d, double* col) {
    const std::size_t ohw = d.oh * d.ow;
    for (std::size_t c = 0; c < d.c; ++c) {
        const double* plane = x_n + c * d.h * d.w;
        for (std::size_t p = 0; p < d.kh; ++p) {
            for (std::size_t q = 0; q < d.kw; ++q) {
                double* row = col + ((c * d.kh + p) * d.kw + q) * ohw;
                const ColSpan s = col_span(d, q);
                for (std::size_t oi = 0; oi < d.oh; ++oi) {
                    const std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(oi + p) -
                                              static_cast<std::ptrdiff_t>(d.pad_top);
                    double* dst = row + oi * d.ow;
                    if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(d.h)) {
                        std::fill(dst, dst + d.ow, 0.0);
                        continue;
                    }
                    const double* src = plane + static_cast<std::size_t>(ii) * d.w;
                    std::fill(dst, dst + s.lo, 0.0);
                    if (s.hi > s.lo)
                        std::memcpy(dst + s.lo, src + s.lo + s.offset, (s.hi - s.lo) * sizeof(double));
                    std::fill(dst + s.hi, dst + d.ow, 0.0);
                }
            }
        }
    }
}

void col2im_add(const double* col, const ConvDims& d, double* dx_n) {
    const std::size_t ohw = d.oh * d.ow;
    for (std::size_t c = 0; c < d.c; ++c) {
        double* plane = dx_n + c * d.h * d.w;
        for (std::size_t p = 0; p < d.kh; ++p) {
            for (std::size_t q = 0; q < d.kw; ++q) {
                const double* row = col + ((c * d.kh + p) * d.kw + q) * ohw;
                const ColSpan s = col_span(d, q);
                if (s.hi <= s.lo) continue;
                for (std::size_t oi = 0; oi < d.oh; ++oi) {
                    const std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(oi + p) -
                                              static_cast<std::ptrdiff_t>(d.pad_top);
                    if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(d.h)) continue;
                    double* dst = plane + static_cast<std::size_t>(ii) * d.w + s.lo + s.offset;
                    const double* src = row + oi * d.ow + s.lo;
                    const std::size_t len = s.hi - s.lo;
                    for (std::size_t t = 0; t < len; ++t) dst[t] += src[t];
                }
            }
        }
    }
}

}  // namespace

Var conv2d(const Var& x, const Var& weight, const Var& bias, Padding pad) {
    const ConvDims d = conv_dims(x->value, weight->value, pad);
    if (bias && (bias->value.rank() != 1 || bias->value.shape[0] != d.k))
        throw std::invalid_argument("conv2d bias must be [K]");

    const std::size_t ckk = d.c * d.kh * d.kw;
    const std::size_t ohw = d.oh * d.ow;
    Tensor out({d.n, d.k, d.oh, d.ow});
    std::vector<double> col(ckk * ohw);
    CMapRM wmat(weight->value.data.data(), static_cast<Eigen::Index>(d.k),
                static_cast<Eigen::Index>(ckk));
    for (std::size_t n = 0; n < d.n; ++n) {
        im2col(x->value.data.data() + n * d.c * d.h * d.w, d, col.data());
        CMapRM colmat(col.data(), static_cast<Eigen::Index>(ckk), static_cast<Eigen::Index>(ohw));
        MapRM outmat(out.data.data() + n * d.k * ohw, static_cast<Eigen::Index>(d.k),
                     static_cast<Eigen::Index>(ohw));
        outmat.noalias() = wmat * colmat;
        if (bias)
            for (std::size_t k = 0; k < d.k; ++k)
                outmat.row(static_cast<Eigen::Index>(k)).array() += bias->value[k];
    }

    std::vector<Var> parents = bias ? std::vector<Var>{x, weight, bias} : std::vector<Var>{x, weight};
    return make_node(std::move(out), std::move(parents), [d, ckk, ohw, has_bias = bool(bias)](Node& self) {
        const Var& px = self.parents[0];
        const Var& pw = self.parents[1];
        const Var* pb = has_bias ? &self.parents[2] : nullptr;
        std::vector<double> col(ckk * ohw);
        std::vector<double> dcol((px->requires_grad) ? ckk * ohw : 0);
        CMapRM wmat(pw->value.data.data(), static_cast<Eigen::Index>(d.k),
                    static_cast<Eigen::Index>(ckk));
        if (pw->requires_grad) pw->ensure_grad();
        if (px->requires_grad) px->ensure_grad();
        if (pb && (*pb)->requires_grad) (*pb)->ensure_grad();
        for (std::size_t n = 0; n < d.n; ++n) {
            CMapRM gout(self.grad.data.data() + n * d.k * ohw, static_cast<Eigen::Index>(d.k),
                        static_cast<Eigen::Index>(ohw));
            if (pw->requires_grad || px->requires_grad)
                im2col(px->value.data.data() + n * d.c * d.h * d.w, d, col.data());
            if (pw->requires_grad) {
                CMapRM colmat(col.data(), static_cast<Eigen::Index>(ckk),
                              static_cast<Eigen::Index>(ohw));
                MapRM dw(pw->grad.data.data(), static_cast<Eigen::Index>(d.k),
                         static_cast<Eigen::Index>(ckk));
                dw.noalias() += gout * colmat.transpose();
            }
            if (pb && (*pb)->requires_grad) {
                // sequential sum; simd reductions would make the result
                // depend on buffer alignment
                const double* gbase = self.grad.data.data() + n * d.k * ohw;
                for (std::size_t k = 0; k < d.k; ++k) {
                    double acc = 0.0;
                    const double* row = gbase + k * ohw;
                    for (std::size_t j = 0; j < ohw; ++j) acc += row[j];
                    (*pb)->grad[k] += acc;
                }
            }
            if (px->requires_grad) {
                MapRM dcolmat(dcol.data(), static_cast<Eigen::Index>(ckk),
                              static_cast<Eigen::Index>(ohw));
                dcolmat.noalias() = wmat.transpose() * gout;
                col2im_add(dcol.data(), d, px->grad.data.data() + n * d.c * d.h * d.w);
            }
        }
    });
}

Var maxpool2d(const Var& x, const Pool2d& cfg) {
    const Tensor& in = x->value;
    if (in.rank() != 4) throw std::invalid_argument("maxpool2d input must be [N,C,H,W]");
    if (cfg.kernel_h == 0 || cfg.kernel_w == 0 || cfg.stride_h == 0 || cfg.stride_w == 0)
        throw std::invalid_argument("maxpool2d kernel/stride must be positive");
    const std::size_t n = in.shape[0], c = in.shape[1], h = in.shape[2], w = in.shape[3];

    auto out_extent = [&](std::size_t sz, std::size_t k, std::size_t s) -> std::size_t {
        if (cfg.ceil_mode) {
            // partial windows allowed; every window must start inside the input
            std::size_t o = sz <= k ? 1 : (sz - k + s - 1) / s + 1;
            while (o > 1 && (o - 1) * s >= sz) --o;
            return o;
        }
        return sz < k ? 0 : (sz - k) / s + 1;
    };
    const std::size_t oh = out_extent(h, cfg.kernel_h, cfg.stride_h);
    const std::size_t ow = out_extent(w, cfg.kernel_w, cfg.stride_w);
    if (oh == 0 || ow == 0)
        throw std::invalid_argument("maxpool2d output collapsed to zero extent for input " +
                                    shape_str(in.shape));

    Tensor out({n, c, oh, ow});
    auto argmax = std::make_shared<std::vector<std::uint32_t>>(out.numel());
    if (in.numel() > UINT32_MAX) throw std::invalid_argument("maxpool2d input too large");

    std::size_t oidx = 0;
    for (std::size_t ni = 0; ni < n; ++ni) {
        for (std::size_t ci = 0; ci < c; ++ci) {
            const double* plane = in.data.data() + (ni * c + ci) * h * w;
            const std::size_t base = (ni * c + ci) * h * w;
            for (std::size_t oi = 0; oi < oh; ++oi) {
                const std::size_t i0 = oi * cfg.stride_h;
                const std::size_t i1 = std::min(i0 + cfg.kernel_h, h);
                for (std::size_t oj = 0; oj < ow; ++oj) {
                    const std::size_t j0 = oj * cfg.stride_w;
                    const std::size_t j1 = std::min(j0 + cfg.kernel_w, w);
                    double best = plane[i0 * w + j0];
                    std::size_t best_at = i0 * w + j0;
                    for (std::size_t i = i0; i < i1; ++i)
                        for (std::size_t j = j0; j < j1; ++j) {
                            const double v = plane[i * w + j];
                            if (v > best) {  // first occurrence wins ties
                                best = v;
                                best_at = i * w + j;
                            }
                        }
                    out[oidx] = best;
                    (*argmax)[oidx] = static_cast<std::uint32_t>(base + best_at);
                    ++oidx;
                }
            }
        }
    }

    return make_node(std::move(out), {x}, [argmax](Node& self) {
        const Var& px = self.parents[0];
        if (!px->requires_grad) return;
        px->ensure_grad();
        for (std::size_t i = 0; i < self.grad.numel(); ++i)
            px->grad[(*argmax)[i]] += self.grad[i];
    });
}

Var mfm(const Var& x) {
    const Tensor& in = x->value;
    if (in.rank() != 4 && in.rank() != 2)
        throw std::invalid_argument("mfm input must be 4-D [N,C,H,W] or 2-D [N,D]");
    const std::size_t axis_extent = in.shape[1];
    if (axis_extent % 2 != 0)
        throw std::invalid_argument("mfm needs an even extent to pair, got " +
                                    std::to_string(axis_extent));
    const std::size_t half = axis_extent / 2;
    const std::size_t n = in.shape[0];
    const std::size_t inner = in.numel() / (n * axis_extent);  // H*W or 1

    Shape out_shape = in.shape;
    out_shape[1] = half;
    Tensor out(out_shape);
    for (std::size_t ni = 0; ni < n; ++ni) {
        const double* a = in.data.data() + ni * axis_extent * inner;
        const double* b = a + half * inner;
        double* o = out.data.data() + ni * half * inner;
        for (std::size_t i = 0; i < half * inner; ++i) o[i] = a[i] >= b[i] ? a[i] : b[i];
    }

    return make_node(std::move(out), {x}, [n, half, inner, axis_extent](Node& self) {
        const Var& px = self.parents[0];
        if (!px->requires_grad) return;
        px->ensure_grad();
        for (std::size_t ni = 0; ni < n; ++ni) {
            const double* a = px->value.data.data() + ni * axis_extent * inner;
            const double* b = a + half * inner;
            double* da = px->grad.data.data() + ni * axis_extent * inner;
            double* db = da + half * inner;
            const double* g = self.grad.data.data() + ni * half * inner;
            for (std::size_t i = 0; i < half * inner; ++i) {
                if (a[i] >= b[i])
                    da[i] += g[i];
                else
                    db[i] += g[i];
            }
        }
    });
}

Var relu(const Var& x) {
    Tensor out = x->value;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return make_node(std::move(out), {x}, [](Node& self) {
        const Var& px = self.parents[0];
        if (!px->requires_grad) return;
        px->ensure_grad();
        for (std::size_t i = 0; i < self.grad.numel(); ++i)
            if (px->value[i] > 0.0) px->grad[i] += self.grad[i];
    });
}

Var elu(const Var& x, double alpha) {
    Tensor out = x->value;
    for (double& v : out.data) v = v > 0.0 ? v : alpha * std::expm1(v);
    return make_node(std::move(out), {x}, [alpha](Node& self) {
        const Var& px = self.parents[0];
        if (!px->requires_grad) return;
        px->ensure_grad();
        for (std::size_t i = 0; i < self.grad.numel(); ++i) {
            const double v = px->value[i];
            px->grad[i] += self.grad[i] * (v > 0.0 ? 1.0 : alpha * std::exp(v));
        }
    });
}

Var linear(const Var& x, const Var& weight, const Var& bias) {
    const Tensor& in = x->value;
    const Tensor& w = weight->value;
    if (in.rank() != 2 || w.rank() != 2)
        throw std::invalid_argument("linear expects [N,D] input and [D,M] weight");
    const std::size_t n = in.shape[0], ddim = in.shape[1], m = w.shape[1];
    if (w.shape[0] != ddim)
        throw std::invalid_argument("linear shape mismatch: input [N," + std::to_string(ddim) +
                                    "] vs weight [" + std::to_string(w.shape[0]) + ",M]");
    if (bias && (bias->value.rank() != 1 || bias->value.shape[0] != m))
        throw std::invalid_argument("linear bias must be [M]");

    Tensor out({n, m});
    CMapRM xm(in.data.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ddim));
    CMapRM wm(w.data.data(), static_cast<Eigen::Index>(ddim), static_cast<Eigen::Index>(m));
    MapRM om(out.data.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    om.noalias() = xm * wm;
    if (bias)
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < m; ++j) out[r * m + j] += bias->value[j];

    std::vector<Var> parents =
        bias ? std::vector<Var>{x, weight, bias} : std::vector<Var>{x, weight};
    return make_node(std::move(out), std::move(parents), [n, ddim, m, has_bias = bool(bias)](Node& self) {
        const Var& px = self.parents[0];
        const Var& pw = self.parents[1];
        CMapRM g(self.grad.data.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
        if (px->requires_grad) {
            px->ensure_grad();
            CMapRM wm(pw->value.data.data(), static_cast<Eigen::Index>(ddim),
                      static_cast<Eigen::Index>(m));
            MapRM dx(px->grad.data.data(), static_cast<Eigen::Index>(n),
                     static_cast<Eigen::Index>(ddim));
            dx.noalias() += g * wm.transpose();
        }
        if (pw->requires_grad) {
            pw->ensure_grad();
            CMapRM xm(px->value.data.data(), static_cast<Eigen::Index>(n),
                      static_cast<Eigen::Index>(ddim));
            MapRM dw(pw->grad.data.data(), static_cast<Eigen::Index>(ddim),
                     static_cast<Eigen::Index>(m));
            dw.noalias() += xm.transpose() * g;
        }
        if (has_bias && self.parents[2]->requires_grad) {
            const Var& pb = self.parents[2];
            pb->ensure_grad();
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t j = 0; j < m; ++j) pb->grad[j] += self.grad[r * m + j];
        }
    });
}

Var dropout(const Var& x, double rate, Rng& rng, bool training) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0,1)");
    if (!training || rate == 0.0) {
        // identity; no randomness consumed
        Tensor out = x->value;
        return make_node(std::move(out), {x}, [](Node& self) {
            const Var& px = self.parents[0];
            if (!px->requires_grad) return;
            px->ensure_grad();
            for (std::size_t i = 0; i < self.grad.numel(); ++i) px->grad[i] += self.grad[i];
        });
    }
    const double scale = 1.0 / (1.0 - rate);
    auto mask = std::make_shared<std::vector<double>>(x->value.numel());
    Tensor out = x->value;
    for (std::size_t i = 0; i < out.numel(); ++i) {
        const double keep = uniform01(rng) < rate ? 0.0 : scale;
        (*mask)[i] = keep;
        out[i] *= keep;
    }
    return make_node(std::move(out), {x}, [mask](Node& self) {
        const Var& px = self.parents[0];
        if (!px->requires_grad) return;
        px->ensure_grad();
        for (std::size_t i = 0; i < self.grad.numel(); ++i)
            px->grad[i] += self.grad[i] * (*mask)[i];
    });
}

Var flatten2d(const Var& x) {
    const Tensor& in = x->value;
    if (in.rank() < 2) throw std::invalid_argument("flatten2d needs rank >= 2");
    Tensor out({in.shape[0], in.numel() / in.shape[0]}, in.data);
    return make_node(std::move(out), {x}, [](Node& self) {
        const Var& px = self.parents[0];
        if (!px->requires_grad) return;
        px->ensure_grad();
        for (std::size_t i = 0; i < self.grad.numel(); ++i) px->grad[i] += self.grad[i];
    });
}

Var inner(const Var& x, Tensor coeffs) {
    if (!x->value.same_shape(coeffs))
        throw std::invalid_argument("inner: coefficient shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < coeffs.numel(); ++i) acc += coeffs[i] * x->value[i];
    Tensor out({1}, {acc});
    auto c = std::make_shared<Tensor>(std::move(coeffs));
    return make_node(std::move(out), {x}, [c](Node& self) {
        const Var& px = self.parents[0];
        if (!px->requires_grad) return;
        px->ensure_grad();
        const double g = self.grad[0];
        for (std::size_t i = 0; i < c->numel(); ++i) px->grad[i] += g * (*c)[i];
    });
}

Tensor softmax_rows(const Tensor& logits) {
    if (logits.rank() != 2) throw std::invalid_argument("softmax expects [N,C]");
    const std::size_t n = logits.shape[0], c = logits.shape[1];
    Tensor p(logits.shape);
    for (std::size_t r = 0; r < n; ++r) {
        const double* z = logits.data.data() + r * c;
        double m = z[0];
        for (std::size_t j = 1; j < c; ++j) m = std::max(m, z[j]);
        double denom = 0.0;
        for (std::size_t j = 0; j < c; ++j) denom += std::exp(z[j] - m);
        for (std::size_t j = 0; j < c; ++j) p[r * c + j] = std::exp(z[j] - m) / denom;
    }
    return p;
}

std::pair<double, Tensor> softmax_cross_entropy_value(const Tensor& logits,
                                                      std::span<const int> labels) {
    if (logits.rank() != 2) throw std::invalid_argument("cross entropy expects [N,C] logits");
    const std::size_t n = logits.shape[0], c = logits.shape[1];
    if (labels.size() != n) throw std::invalid_argument("label count does not match batch");
    for (int l : labels)
        if (l < 0 || static_cast<std::size_t>(l) >= c)
            throw std::invalid_argument("label out of range");

    Tensor grad = softmax_rows(logits);
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double* z = logits.data.data() + r * c;
        double m = z[0];
        for (std::size_t j = 1; j < c; ++j) m = std::max(m, z[j]);
        double denom = 0.0;
        for (std::size_t j = 0; j < c; ++j) denom += std::exp(z[j] - m);
        loss += -(z[static_cast<std::size_t>(labels[r])] - m - std::log(denom));
    }
    loss /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        grad[r * c + static_cast<std::size_t>(labels[r])] -= 1.0;
        for (std::size_t j = 0; j < c; ++j) grad[r * c + j] /= static_cast<double>(n);
    }
    return {loss, std::move(grad)};
}

Var softmax_cross_entropy(const Var& logits, std::span<const int> labels) {
    auto [loss, grad] = softmax_cross_entropy_value(logits->value, labels);
    auto g = std::make_shared<Tensor>(std::move(grad));
    Tensor out({1}, {loss});
    return make_node(std::move(out), {logits}, [g](Node& self) {
        const Var& pl = self.parents[0];
        if (!pl->requires_grad) return;
        pl->ensure_grad();
        const double s = self.grad[0];
        for (std::size_t i = 0; i < g->numel(); ++i) pl->grad[i] += s * (*g)[i];
    });
}

void backward(const Var& root) {
    if (!root) throw std::invalid_argument("backward on null node");
    if (root->value.numel() != 1) throw std::invalid_argument("backward root must be scalar");
    if (!root->requires_grad) return;

    // reverse DFS post-order = every consumer before its parents
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(root.get(), 0);
    seen.insert(root.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* p = node->parents[next++].get();
            if (p && p->requires_grad && !seen.count(p)) {
                seen.insert(p);
                stack.emplace_back(p, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root->ensure_grad();
    root->grad[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* node = *it;
        if (node->backprop && !node->grad.data.empty()) node->backprop(*node);
    }
}

Tensor xavier_init(const Shape& shape, Rng& rng) {
    if (shape.empty()) throw std::invalid_argument("xavier_init: empty shape");
    double fan_in, fan_out;
    if (shape.size() == 4) {
        fan_in = static_cast<double>(shape[1] * shape[2] * shape[3]);
        fan_out = static_cast<double>(shape[0] * shape[2] * shape[3]);
    } else if (shape.size() == 2) {
        fan_in = static_cast<double>(shape[0]);
        fan_out = static_cast<double>(shape[1]);
    } else {
        fan_in = fan_out = static_cast<double>(shape_numel(shape));
    }
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    Tensor t(shape);
    for (double& v : t.data) v = uniform(rng, -a, a);
    return t;
}

void AdamHyper::validate() const {
    if (learning_rate < 0.0) throw std::invalid_argument("learning_rate must be >= 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw std::invalid_argument("betas must be in [0,1)");
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be > 0");
}

AdamState AdamState::like(const std::vector<Tensor>& params) {
    AdamState s;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const Tensor& p : params) {
        s.m.push_back(Tensor::zeros(p.shape));
        s.v.push_back(Tensor::zeros(p.shape));
    }
    return s;
}

void adam_step(std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads,
               AdamState& state, const AdamHyper& hyper) {
    hyper.validate();
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: parameter/gradient/state count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->same_shape(*grads[i]) || !params[i]->same_shape(state.m[i]))
            throw std::invalid_argument("adam_step: shape mismatch at parameter " + std::to_string(i));
        if (!grads[i]->all_finite())
            throw std::runtime_error("adam_step: non-finite gradient at parameter " +
                                     std::to_string(i) + "; step aborted");
    }

    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double bc1 = 1.0 - std::pow(hyper.beta1, t);
    const double bc2 = 1.0 - std::pow(hyper.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& g = *grads[i];
        Tensor& m = state.m[i];
        Tensor& v = state.v[i];
        for (std::size_t j = 0; j < p.numel(); ++j) {
            m[j] = hyper.beta1 * m[j] + (1.0 - hyper.beta1) * g[j];
            v[j] = hyper.beta2 * v[j] + (1.0 - hyper.beta2) * g[j] * g[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            p[j] -= hyper.learning_rate * mhat / (std::sqrt(vhat) + hyper.epsilon);
        }
    }
}

double grad_check(const std::function<Var(const Var&)>& f, const Tensor& x, double h,
                  std::size_t max_coords, std::uint64_t coord_seed) {
    Var px = parameter(x);
    Var loss = f(px);
    if (loss->value.numel() != 1) throw std::invalid_argument("grad_check: f must be scalar-valued");
    backward(loss);
    const Tensor analytic = px->grad.data.empty() ? Tensor::zeros(x.shape) : px->grad;

    std::vector<std::size_t> coords(x.numel());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (max_coords > 0 && max_coords < coords.size()) {
        Rng rng(coord_seed);
        shuffle(coords, rng);
        coords.resize(max_coords);
    }

    double worst = 0.0;
    Tensor probe = x;
    for (std::size_t i : coords) {
        const double saved = probe[i];
        probe[i] = saved + h;
        const double fp = f(constant(probe))->value[0];
        probe[i] = saved - h;
        const double fm = f(constant(probe))->value[0];
        probe[i] = saved;
        const double numeric = (fp - fm) / (2.0 * h);
        const double a = analytic[i];
        const double rel = std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace spoofdet::nn
