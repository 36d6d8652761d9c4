// Copyright 2026 The sgx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sgx/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgx/errors.hpp"
#include "sgx/kernels.hpp"

namespace sgx::ops {
namespace {

std::string shape_str(const Tensor& t) {
  return "[" + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + "]";
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                         " differ");
  }
}

// Accumulates `g` into parent i when that parent carries a gradient.
template <typename F>
void with_grad(TensorNode& out, std::size_t i, F&& f) {
  TensorNode& p = *out.parents[i];
  if (p.requires_grad) f(p.ensure_grad());
}

}  // namespace

Tensor matmul(const Tensor& x, const Tensor& w) {
  if (x.cols() != w.rows()) {
    throw DimensionError("matmul: inner dimensions of " + shape_str(x) + " and " + shape_str(w) +
                         " disagree");
  }
  const std::size_t n = x.rows(), d = x.cols(), q = w.cols();
  std::vector<double> out(n * q);
  kernels::matmul(x.values(), w.values(), out, n, d, q);
  return make_op(n, q, std::move(out), {x, w}, [n, d, q](TensorNode& o) {
    const auto& xv = o.parents[0]->value;
    const auto& wv = o.parents[1]->value;
    with_grad(o, 0, [&](std::vector<double>& gx) { kernels::matmul_bt_acc(o.grad, wv, gx, n, d, q); });
    with_grad(o, 1, [&](std::vector<double>& gw) { kernels::matmul_at_acc(xv, o.grad, gw, n, d, q); });
  });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (x.cols() != w.rows() || b.size() != w.cols()) {
    throw DimensionError("linear: x " + shape_str(x) + ", W " + shape_str(w) + ", b " +
                         shape_str(b) + " are incompatible");
  }
  const std::size_t n = x.rows(), d = x.cols(), q = w.cols();
  std::vector<double> out(n * q);
  kernels::matmul(x.values(), w.values(), out, n, d, q);
  const auto bv = b.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < q; ++j) out[i * q + j] += bv[j];
  }
  return make_op(n, q, std::move(out), {x, w, b}, [n, d, q](TensorNode& o) {
    const auto& xv = o.parents[0]->value;
    const auto& wv = o.parents[1]->value;
    with_grad(o, 0, [&](std::vector<double>& gx) { kernels::matmul_bt_acc(o.grad, wv, gx, n, d, q); });
    with_grad(o, 1, [&](std::vector<double>& gw) { kernels::matmul_at_acc(xv, o.grad, gw, n, d, q); });
    with_grad(o, 2, [&](std::vector<double>& gb) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < q; ++j) gb[j] += o.grad[i * q + j];
      }
    });
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.values().begin(), a.values().end());
  const auto bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  return make_op(a.rows(), a.cols(), std::move(out), {a, b}, [](TensorNode& o) {
    for (std::size_t k = 0; k < 2; ++k) {
      with_grad(o, k, [&](std::vector<double>& g) {
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += o.grad[i];
      });
    }
  });
}

Tensor scale(const Tensor& a, double c) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (auto& v : out) v *= c;
  return make_op(a.rows(), a.cols(), std::move(out), {a}, [c](TensorNode& o) {
    with_grad(o, 0, [&](std::vector<double>& g) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += c * o.grad[i];
    });
  });
}

Tensor add_constant(const Tensor& a, std::span<const double> c) {
  if (c.size() != a.size()) {
    throw DimensionError("add_constant: " + shape_str(a) + " vs " + std::to_string(c.size()) + " values");
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c[i];
  return make_op(a.rows(), a.cols(), std::move(out), {a}, [](TensorNode& o) {
    with_grad(o, 0, [&](std::vector<double>& g) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += o.grad[i];
    });
  });
}

Tensor scale_rows(const Tensor& a, std::span<const double> factors) {
  if (factors.size() != a.rows()) {
    throw DimensionError("scale_rows: " + shape_str(a) + " vs " + std::to_string(factors.size()) + " factors");
  }
  const std::size_t w = a.cols();
  std::vector<double> out(a.values().begin(), a.values().end());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t j = 0; j < w; ++j) out[r * w + j] *= factors[r];
  }
  std::vector<double> f(factors.begin(), factors.end());
  return make_op(a.rows(), w, std::move(out), {a}, [f = std::move(f), w](TensorNode& o) {
    with_grad(o, 0, [&](std::vector<double>& g) {
      for (std::size_t r = 0; r < f.size(); ++r) {
        for (std::size_t j = 0; j < w; ++j) g[r * w + j] += f[r] * o.grad[r * w + j];
      }
    });
  });
}

Tensor one_plus_eps_scale(const Tensor& h, const Tensor& eps) {
  if (eps.size() != 1) throw DimensionError("one_plus_eps_scale: eps must be 1x1, got " + shape_str(eps));
  const double f = 1.0 + eps.item();
  std::vector<double> out(h.values().begin(), h.values().end());
  for (auto& v : out) v *= f;
  return make_op(h.rows(), h.cols(), std::move(out), {h, eps}, [f](TensorNode& o) {
    const auto& hv = o.parents[0]->value;
    with_grad(o, 0, [&](std::vector<double>& g) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += f * o.grad[i];
    });
    with_grad(o, 1, [&](std::vector<double>& g) {
      double s = 0.0;
      for (std::size_t i = 0; i < hv.size(); ++i) s += o.grad[i] * hv[i];
      g[0] += s;
    });
  });
}

Tensor relu(const Tensor& x) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (auto& v : out) v = v > 0.0 ? v : 0.0;
  return make_op(x.rows(), x.cols(), std::move(out), {x}, [](TensorNode& o) {
    with_grad(o, 0, [&](std::vector<double>& g) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (o.value[i] > 0.0) g[i] += o.grad[i];
      }
    });
  });
}

Tensor sigmoid(const Tensor& x) {
  std::vector<double> out(x.values().begin(), x.values().end());
  for (auto& v : out) {
    v = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  }
  return make_op(x.rows(), x.cols(), std::move(out), {x}, [](TensorNode& o) {
    with_grad(o, 0, [&](std::vector<double>& g) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += o.grad[i] * o.value[i] * (1.0 - o.value[i]);
    });
  });
}

Tensor spmm(std::shared_ptr<const SparseMatrix> d, const Tensor& x) {
  if (d->cols() != x.rows()) {
    throw DimensionError("spmm: operator is " + std::to_string(d->rows()) + "x" +
                         std::to_string(d->cols()) + ", x is " + shape_str(x));
  }
  const std::size_t w = x.cols();
  const std::size_t rows = d->rows();
  std::vector<double> out(rows * w, 0.0);
  kernels::csr_spmm_acc(d->csr(), x.values(), out, w);
  return make_op(rows, w, std::move(out), {x}, [d = std::move(d), w](TensorNode& o) {
    with_grad(o, 0, [&](std::vector<double>& g) { kernels::csr_spmm_acc(d->csr_transposed(), o.grad, g, w); });
  });
}

Tensor spmm_weighted(std::shared_ptr<const EdgePattern> p, const Tensor& w, const Tensor& x) {
  if (p->size() != x.rows() || w.size() != p->num_slots()) {
    throw DimensionError("spmm_weighted: pattern " + std::to_string(p->size()) + " nodes / " +
                         std::to_string(p->num_slots()) + " slots, weights " + shape_str(w) +
                         ", x " + shape_str(x));
  }
  const std::size_t width = x.cols();
  std::vector<double> out(x.rows() * width, 0.0);
  kernels::pattern_spmm_acc(p->row_ptr(), p->col(), p->slot(), w.values(), x.values(), out, width);
  return make_op(x.rows(), width, std::move(out), {w, x}, [p = std::move(p), width](TensorNode& o) {
    const auto& wv = o.parents[0]->value;
    const auto& xv = o.parents[1]->value;
    with_grad(o, 0, [&](std::vector<double>& gw) {
      const auto row_ptr = p->row_ptr();
      const auto col = p->col();
      const auto slot = p->slot();
      for (std::size_t r = 0; r + 1 < row_ptr.size(); ++r) {
        const double* gr = o.grad.data() + r * width;
        for (std::size_t e = row_ptr[r]; e < row_ptr[r + 1]; ++e) {
          const double* xr = xv.data() + static_cast<std::size_t>(col[e]) * width;
          double s = 0.0;
          for (std::size_t j = 0; j < width; ++j) s += gr[j] * xr[j];
          gw[static_cast<std::size_t>(slot[e])] += s;
        }
      }
    });
    with_grad(o, 1, [&](std::vector<double>& gx) {
      kernels::pattern_spmm_acc(p->t_row_ptr(), p->t_col(), p->t_slot(), wv, o.grad, gx, width);
    });
  });
}

Tensor sum_rows(const Tensor& x) {
  const std::size_t n = x.rows(), w = x.cols();
  std::vector<double> out(w, 0.0);
  const auto xv = x.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < w; ++j) out[j] += xv[i * w + j];
  }
  return make_op(1, w, std::move(out), {x}, [n, w](TensorNode& o) {
    with_grad(o, 0, [&](std::vector<double>& g) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < w; ++j) g[i * w + j] += o.grad[j];
      }
    });
  });
}

Tensor mean_rows(const Tensor& x) {
  if (x.rows() == 0) throw DimensionError("mean_rows of an empty tensor");
  return scale(sum_rows(x), 1.0 / static_cast<double>(x.rows()));
}

Tensor sum_all(const Tensor& x) {
  double s = 0.0;
  for (double v : x.values()) s += v;
  return make_op(1, 1, {s}, {x}, [](TensorNode& o) {
    with_grad(o, 0, [&](std::vector<double>& g) {
      for (auto& v : g) v += o.grad[0];
    });
  });
}

Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> targets) {
  const std::size_t n = logits.rows(), c = logits.cols();
  if (targets.size() != n) {
    throw DimensionError("softmax_cross_entropy: " + std::to_string(targets.size()) +
                         " targets for logits " + shape_str(logits));
  }
  if (c < 2) throw DimensionError("softmax_cross_entropy needs at least 2 classes, got " + std::to_string(c));
  if (n == 0) throw DimensionError("softmax_cross_entropy on an empty batch");
  const auto lv = logits.values();
  std::vector<double> probs(n * c);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const int t = targets[r];
    if (t < 0 || static_cast<std::size_t>(t) >= c) {
      throw ArgumentError("target " + std::to_string(t) + " outside [0, " + std::to_string(c) + ")");
    }
    const double* row = lv.data() + r * c;
    const double m = *std::max_element(row, row + c);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - m);
    const double lse = m + std::log(z);
    for (std::size_t j = 0; j < c; ++j) probs[r * c + j] = std::exp(row[j] - lse);
    total += lse - row[t];
  }
  std::vector<int> tg(targets.begin(), targets.end());
  return make_op(1, 1, {total / static_cast<double>(n)}, {logits},
                 [probs = std::move(probs), tg = std::move(tg), n, c](TensorNode& o) {
                   with_grad(o, 0, [&](std::vector<double>& g) {
                     const double s = o.grad[0] / static_cast<double>(n);
                     for (std::size_t r = 0; r < n; ++r) {
                       for (std::size_t j = 0; j < c; ++j) {
                         const double onehot = static_cast<int>(j) == tg[r] ? 1.0 : 0.0;
                         g[r * c + j] += s * (probs[r * c + j] - onehot);
                       }
                     }
                   });
                 });
}

Tensor softmax_cross_entropy(const Tensor& logits, int target) {
  const int t[1] = {target};
  return softmax_cross_entropy(logits, std::span<const int>(t, 1));
}

Tensor straight_through(std::vector<double> hard, const Tensor& soft) {
  if (hard.size() != soft.size()) {
    throw DimensionError("straight_through: " + std::to_string(hard.size()) + " hard values for " +
                         shape_str(soft));
  }
  return make_op(soft.rows(), soft.cols(), std::move(hard), {soft}, [](TensorNode& o) {
    with_grad(o, 0, [&](std::vector<double>& g) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += o.grad[i];
    });
  });
}

Tensor edge_pair_features(const Tensor& z, std::span<const Edge> edges) {
  const std::size_t w = z.cols(), n = z.rows();
  std::vector<double> out(edges.size() * 2 * w);
  const auto zv = z.values();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto u = static_cast<std::size_t>(edges[k].u), v = static_cast<std::size_t>(edges[k].v);
    if (u >= n || v >= n) {
      throw DimensionError("edge_pair_features: edge (" + std::to_string(u) + ", " +
                           std::to_string(v) + ") outside " + shape_str(z));
    }
    std::copy_n(zv.begin() + static_cast<std::ptrdiff_t>(u * w), w, out.begin() + static_cast<std::ptrdiff_t>(k * 2 * w));
    std::copy_n(zv.begin() + static_cast<std::ptrdiff_t>(v * w), w, out.begin() + static_cast<std::ptrdiff_t>(k * 2 * w + w));
  }
  std::vector<Edge> e(edges.begin(), edges.end());
  return make_op(edges.size(), 2 * w, std::move(out), {z}, [e = std::move(e), w](TensorNode& o) {
    with_grad(o, 0, [&](std::vector<double>& g) {
      for (std::size_t k = 0; k < e.size(); ++k) {
        const double* src = o.grad.data() + k * 2 * w;
        double* gu = g.data() + static_cast<std::size_t>(e[k].u) * w;
        double* gv = g.data() + static_cast<std::size_t>(e[k].v) * w;
        for (std::size_t j = 0; j < w; ++j) {
          gu[j] += src[j];
          gv[j] += src[w + j];
        }
      }
    });
  });
}

}  // namespace sgx::ops
