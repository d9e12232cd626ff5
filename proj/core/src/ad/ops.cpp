// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/ad/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lyrnet/error.hpp"

namespace lyrnet::ad {
namespace {

// Gradient of input `i` when it participates in the backward pass.
std::span<double> input_grad(Node& self, std::size_t i) {
  auto& in = *self.inputs[i];
  return in.requires_grad ? in.grad_buffer() : std::span<double>{};
}

std::size_t normalize_axis(int axis, std::size_t rank) {
  const int r = static_cast<int>(rank);
  const int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for rank " +
                     std::to_string(rank));
  }
  return static_cast<std::size_t>(a);
}

// Views a tensor as [outer, extent, inner] around `axis`.
struct AxisView {
  std::size_t outer = 1, extent = 1, inner = 1;
};

AxisView axis_view(const Shape& shape, std::size_t axis) {
  AxisView v;
  for (std::size_t i = 0; i < axis; ++i) v.outer *= shape[i];
  v.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) v.inner *= shape[i];
  return v;
}

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " +
                     to_string(t.shape()));
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: shape mismatch " + to_string(a.shape()) + " x " +
                     to_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  const auto A = a.data();
  const auto B = b.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A[i * k + p];
      const double* brow = B.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
  return Tensor::make_result(
      {m, n}, std::move(out), {a, b},
      [m, k, n](Node& self) {
        const auto& dC = self.grad;
        const auto& A = self.inputs[0]->data;
        const auto& B = self.inputs[1]->data;
        if (auto dA = input_grad(self, 0); !dA.empty()) {
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              double acc = 0.0;
              for (std::size_t j = 0; j < n; ++j) acc += dC[i * n + j] * B[p * n + j];
              dA[i * k + p] += acc;
            }
          }
        }
        if (auto dB = input_grad(self, 1); !dB.empty()) {
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t p = 0; p < k; ++p) {
              const double av = A[i * k + p];
              for (std::size_t j = 0; j < n; ++j) dB[p * n + j] += av * dC[i * n + j];
            }
          }
        }
      },
      "matmul");
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) {
    std::vector<double> out(a.data().begin(), a.data().end());
    const auto B = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i];
    return Tensor::make_result(
        a.shape(), std::move(out), {a, b},
        [](Node& self) {
          for (std::size_t k = 0; k < 2; ++k) {
            if (auto d = input_grad(self, k); !d.empty()) {
              for (std::size_t i = 0; i < d.size(); ++i) d[i] += self.grad[i];
            }
          }
        },
        "add");
  }
  if (b.rank() == 1 && a.rank() >= 1 && a.shape().back() == b.dim(0)) {
    const std::size_t n = b.dim(0);
    std::vector<double> out(a.data().begin(), a.data().end());
    const auto B = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += B[i % n];
    return Tensor::make_result(
        a.shape(), std::move(out), {a, b},
        [n](Node& self) {
          if (auto d = input_grad(self, 0); !d.empty()) {
            for (std::size_t i = 0; i < d.size(); ++i) d[i] += self.grad[i];
          }
          if (auto d = input_grad(self, 1); !d.empty()) {
            for (std::size_t i = 0; i < self.grad.size(); ++i) d[i % n] += self.grad[i];
          }
        },
        "add_bias");
  }
  throw ShapeError("add: incompatible shapes " + to_string(a.shape()) + " and " +
                   to_string(b.shape()));
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("mul: incompatible shapes " + to_string(a.shape()) + " and " +
                     to_string(b.shape()));
  }
  std::vector<double> out(a.size());
  const auto A = a.data();
  const auto B = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = A[i] * B[i];
  return Tensor::make_result(
      a.shape(), std::move(out), {a, b},
      [](Node& self) {
        const auto& A = self.inputs[0]->data;
        const auto& B = self.inputs[1]->data;
        if (auto d = input_grad(self, 0); !d.empty()) {
          for (std::size_t i = 0; i < d.size(); ++i) d[i] += self.grad[i] * B[i];
        }
        if (auto d = input_grad(self, 1); !d.empty()) {
          for (std::size_t i = 0; i < d.size(); ++i) d[i] += self.grad[i] * A[i];
        }
      },
      "mul");
}

Tensor scale(const Tensor& x, double factor) {
  std::vector<double> out(x.data().begin(), x.data().end());
  for (auto& v : out) v *= factor;
  return Tensor::make_result(
      x.shape(), std::move(out), {x},
      [factor](Node& self) {
        auto d = input_grad(self, 0);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += self.grad[i] * factor;
      },
      "scale");
}

Tensor gelu(const Tensor& x) {
  const auto X = x.data();
  std::vector<double> out(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    out[i] = 0.5 * X[i] * (1.0 + std::erf(X[i] * std::numbers::sqrt2 / 2.0));
  }
  return Tensor::make_result(
      x.shape(), std::move(out), {x},
      [](Node& self) {
        const auto& X = self.inputs[0]->data;
        auto d = input_grad(self, 0);
        const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        for (std::size_t i = 0; i < d.size(); ++i) {
          const double cdf = 0.5 * (1.0 + std::erf(X[i] * std::numbers::sqrt2 / 2.0));
          const double pdf = inv_sqrt_2pi * std::exp(-0.5 * X[i] * X[i]);
          d[i] += self.grad[i] * (cdf + X[i] * pdf);
        }
      },
      "gelu");
}

Tensor tanh(const Tensor& x) {
  const auto X = x.data();
  std::vector<double> out(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = std::tanh(X[i]);
  return Tensor::make_result(
      x.shape(), std::move(out), {x},
      [](Node& self) {
        auto d = input_grad(self, 0);
        for (std::size_t i = 0; i < d.size(); ++i) {
          const double y = self.data[i];
          d[i] += self.grad[i] * (1.0 - y * y);
        }
      },
      "tanh");
}

Tensor softmax(const Tensor& x, int axis) {
  if (x.rank() == 0) throw ShapeError("softmax: scalar input");
  const std::size_t ax = normalize_axis(axis, x.rank());
  const AxisView v = axis_view(x.shape(), ax);
  if (v.extent == 0) throw ShapeError("softmax: empty axis");
  const auto X = x.data();
  std::vector<double> out(X.size());
  for (std::size_t o = 0; o < v.outer; ++o) {
    for (std::size_t in = 0; in < v.inner; ++in) {
      const std::size_t base = o * v.extent * v.inner + in;
      double mx = X[base];
      for (std::size_t e = 1; e < v.extent; ++e) mx = std::max(mx, X[base + e * v.inner]);
      double total = 0.0;
      for (std::size_t e = 0; e < v.extent; ++e) {
        const double ev = std::exp(X[base + e * v.inner] - mx);
        out[base + e * v.inner] = ev;
        total += ev;
      }
      for (std::size_t e = 0; e < v.extent; ++e) out[base + e * v.inner] /= total;
    }
  }
  return Tensor::make_result(
      x.shape(), std::move(out), {x},
      [v](Node& self) {
        auto d = input_grad(self, 0);
        const auto& Y = self.data;
        const auto& G = self.grad;
        for (std::size_t o = 0; o < v.outer; ++o) {
          for (std::size_t in = 0; in < v.inner; ++in) {
            const std::size_t base = o * v.extent * v.inner + in;
            double dot = 0.0;
            for (std::size_t e = 0; e < v.extent; ++e) {
              const std::size_t i = base + e * v.inner;
              dot += G[i] * Y[i];
            }
            for (std::size_t e = 0; e < v.extent; ++e) {
              const std::size_t i = base + e * v.inner;
              d[i] += Y[i] * (G[i] - dot);
            }
          }
        }
      },
      "softmax");
}

Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> targets) {
  require_rank(logits, 2, "cross_entropy");
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  if (targets.size() != batch) {
    throw ShapeError("cross_entropy: " + std::to_string(targets.size()) + " targets for batch of " +
                     std::to_string(batch));
  }
  if (batch == 0 || classes == 0) throw ShapeError("cross_entropy: empty logits");
  for (std::size_t r = 0; r < batch; ++r) {
    if (targets[r] >= classes) {
      throw ContractError("cross_entropy: target " + std::to_string(targets[r]) + " at row " +
                          std::to_string(r) + " outside [0, " + std::to_string(classes) + ")");
    }
  }
  const auto X = logits.data();
  // Softmax rows are kept for the backward rule.
  std::vector<double> probs(X.size());
  double total = 0.0;
  for (std::size_t r = 0; r < batch; ++r) {
    const double* row = X.data() + r * classes;
    const double mx = *std::max_element(row, row + classes);
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) z += std::exp(row[c] - mx);
    const double log_z = mx + std::log(z);
    for (std::size_t c = 0; c < classes; ++c) probs[r * classes + c] = std::exp(row[c] - log_z);
    total += log_z - row[targets[r]];
  }
  std::vector<std::size_t> tgt(targets.begin(), targets.end());
  return Tensor::make_result(
      {}, {total / static_cast<double>(batch)}, {logits},
      [probs = std::move(probs), tgt = std::move(tgt), batch, classes](Node& self) {
        auto d = input_grad(self, 0);
        const double g = self.grad[0] / static_cast<double>(batch);
        for (std::size_t r = 0; r < batch; ++r) {
          for (std::size_t c = 0; c < classes; ++c) {
            const double onehot = c == tgt[r] ? 1.0 : 0.0;
            d[r * classes + c] += g * (probs[r * classes + c] - onehot);
          }
        }
      },
      "cross_entropy");
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  if (x.rank() == 0) throw ShapeError("layer_norm: scalar input");
  const std::size_t d = x.shape().back();
  if (d == 0) throw ShapeError("layer_norm: empty last dimension");
  if (gain.rank() != 1 || bias.rank() != 1 || gain.dim(0) != d || bias.dim(0) != d) {
    throw ShapeError("layer_norm: gain " + to_string(gain.shape()) + " / bias " +
                     to_string(bias.shape()) + " do not match last dimension of " +
                     to_string(x.shape()));
  }
  if (!(eps > 0.0)) throw InvalidParameterError("layer_norm: eps must be positive");
  const std::size_t rows = x.size() / d;
  const auto X = x.data();
  const auto G = gain.data();
  const auto B = bias.data();
  std::vector<double> out(X.size());
  std::vector<double> xhat(X.size());
  std::vector<double> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = X.data() + r * d;
    double mu = 0.0;
    for (std::size_t i = 0; i < d; ++i) mu += row[i];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t i = 0; i < d; ++i) var += (row[i] - mu) * (row[i] - mu);
    var /= static_cast<double>(d);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t i = 0; i < d; ++i) {
      xhat[r * d + i] = (row[i] - mu) * inv_std[r];
      out[r * d + i] = G[i] * xhat[r * d + i] + B[i];
    }
  }
  return Tensor::make_result(
      x.shape(), std::move(out), {x, gain, bias},
      [xhat = std::move(xhat), inv_std = std::move(inv_std), rows, d](Node& self) {
        const auto& G = self.inputs[1]->data;
        const auto& dY = self.grad;
        if (auto dX = input_grad(self, 0); !dX.empty()) {
          for (std::size_t r = 0; r < rows; ++r) {
            double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
              const double dxh = dY[r * d + i] * G[i];
              mean_dxhat += dxh;
              mean_dxhat_xhat += dxh * xhat[r * d + i];
            }
            mean_dxhat /= static_cast<double>(d);
            mean_dxhat_xhat /= static_cast<double>(d);
            for (std::size_t i = 0; i < d; ++i) {
              const double dxh = dY[r * d + i] * G[i];
              dX[r * d + i] +=
                  inv_std[r] * (dxh - mean_dxhat - xhat[r * d + i] * mean_dxhat_xhat);
            }
          }
        }
        if (auto dG = input_grad(self, 1); !dG.empty()) {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t i = 0; i < d; ++i) dG[i] += dY[r * d + i] * xhat[r * d + i];
          }
        }
        if (auto dB = input_grad(self, 2); !dB.empty()) {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t i = 0; i < d; ++i) dB[i] += dY[r * d + i];
          }
        }
      },
      "layer_norm");
}

Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng) {
  if (!(p >= 0.0) || p >= 1.0) {
    throw InvalidParameterError("dropout: probability " + std::to_string(p) +
                                " outside [0, 1)");
  }
  if (mode == Mode::eval || p == 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> mask(x.size());
  for (auto& m : mask) m = rng.uniform() < p ? 0.0 : keep_scale;
  const auto X = x.data();
  std::vector<double> out(X.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = X[i] * mask[i];
  return Tensor::make_result(
      x.shape(), std::move(out), {x},
      [mask = std::move(mask)](Node& self) {
        auto d = input_grad(self, 0);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += self.grad[i] * mask[i];
      },
      "dropout");
}

Tensor embedding_lookup(const Tensor& table, std::span<const std::size_t> ids) {
  require_rank(table, 2, "embedding_lookup");
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  const auto T = table.data();
  std::vector<double> out(ids.size() * d);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= vocab) {
      throw ContractError("embedding_lookup: id " + std::to_string(ids[r]) + " at position " +
                          std::to_string(r) + " outside vocabulary of " + std::to_string(vocab));
    }
    std::copy_n(T.data() + ids[r] * d, d, out.data() + r * d);
  }
  std::vector<std::size_t> idx(ids.begin(), ids.end());
  return Tensor::make_result(
      {ids.size(), d}, std::move(out), {table},
      [idx = std::move(idx), d](Node& self) {
        auto dT = input_grad(self, 0);
        for (std::size_t r = 0; r < idx.size(); ++r) {
          for (std::size_t i = 0; i < d; ++i) dT[idx[r] * d + i] += self.grad[r * d + i];
        }
      },
      "embedding_lookup");
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& first = parts.front().shape();
  if (axis >= first.size()) {
    throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for shape " +
                     to_string(first));
  }
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> extents;
  for (const auto& p : parts) {
    Shape s = p.shape();
    if (s.size() != first.size()) {
      throw ShapeError("concat: rank mismatch " + to_string(first) + " vs " + to_string(s));
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i != axis && s[i] != first[i]) {
        throw ShapeError("concat: shape mismatch " + to_string(first) + " vs " + to_string(s));
      }
    }
    extents.push_back(s[axis]);
    out_shape[axis] += s[axis];
  }
  const AxisView v = axis_view(out_shape, axis);
  std::vector<double> out(numel(out_shape));
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto P = parts[k].data();
    const std::size_t chunk = extents[k] * v.inner;
    for (std::size_t o = 0; o < v.outer; ++o) {
      std::copy_n(P.data() + o * chunk, chunk, out.data() + o * v.extent * v.inner + offset);
    }
    offset += chunk;
  }
  return Tensor::make_result(
      out_shape, std::move(out), parts,
      [v, extents](Node& self) {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < extents.size(); ++k) {
          const std::size_t chunk = extents[k] * v.inner;
          if (auto d = input_grad(self, k); !d.empty()) {
            for (std::size_t o = 0; o < v.outer; ++o) {
              const double* src = self.grad.data() + o * v.extent * v.inner + offset;
              for (std::size_t i = 0; i < chunk; ++i) d[o * chunk + i] += src[i];
            }
          }
          offset += chunk;
        }
      },
      "concat");
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (numel(shape) != x.size()) {
    throw ShapeError("reshape: cannot view " + to_string(x.shape()) + " as " + to_string(shape));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  return Tensor::make_result(
      std::move(shape), std::move(out), {x},
      [](Node& self) {
        auto d = input_grad(self, 0);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] += self.grad[i];
      },
      "reshape");
}

Tensor transpose(const Tensor& x) {
  require_rank(x, 2, "transpose");
  const std::size_t m = x.dim(0), n = x.dim(1);
  const auto X = x.data();
  std::vector<double> out(X.size());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = X[i * n + j];
  }
  return Tensor::make_result(
      {n, m}, std::move(out), {x},
      [m, n](Node& self) {
        auto d = input_grad(self, 0);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) d[i * n + j] += self.grad[j * m + i];
        }
      },
      "transpose");
}

Tensor slice(const Tensor& x, std::size_t axis, std::size_t begin, std::size_t end) {
  if (axis >= x.rank() || begin > end || end > x.dim(axis)) {
    throw ShapeError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") on axis " + std::to_string(axis) + " invalid for shape " +
                     to_string(x.shape()));
  }
  const AxisView v = axis_view(x.shape(), axis);
  Shape out_shape = x.shape();
  out_shape[axis] = end - begin;
  const std::size_t chunk = (end - begin) * v.inner;
  const auto X = x.data();
  std::vector<double> out(v.outer * chunk);
  for (std::size_t o = 0; o < v.outer; ++o) {
    std::copy_n(X.data() + o * v.extent * v.inner + begin * v.inner, chunk,
                out.data() + o * chunk);
  }
  return Tensor::make_result(
      std::move(out_shape), std::move(out), {x},
      [v, chunk, begin](Node& self) {
        auto d = input_grad(self, 0);
        for (std::size_t o = 0; o < v.outer; ++o) {
          double* dst = d.data() + o * v.extent * v.inner + begin * v.inner;
          for (std::size_t i = 0; i < chunk; ++i) dst[i] += self.grad[o * chunk + i];
        }
      },
      "slice");
}

Tensor gather_columns(const Tensor& x, std::span<const std::size_t> index, std::size_t cols) {
  require_rank(x, 2, "gather_columns");
  const std::size_t m = x.dim(0), n = x.dim(1);
  if (index.size() != m * cols) {
    throw ShapeError("gather_columns: index length " + std::to_string(index.size()) +
                     " does not match " + std::to_string(m) + "x" + std::to_string(cols));
  }
  const auto X = x.data();
  std::vector<double> out(m * cols);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::size_t c = index[i * cols + j];
      if (c >= n) throw ShapeError("gather_columns: column index out of range");
      out[i * cols + j] = X[i * n + c];
    }
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return Tensor::make_result(
      {m, cols}, std::move(out), {x},
      [idx = std::move(idx), m, n, cols](Node& self) {
        auto d = input_grad(self, 0);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < cols; ++j) d[i * n + idx[i * cols + j]] += self.grad[i * cols + j];
        }
      },
      "gather_columns");
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  return Tensor::make_result(
      {}, {total}, {x},
      [](Node& self) {
        auto d = input_grad(self, 0);
        for (auto& g : d) g += self.grad[0];
      },
      "sum");
}

Tensor mean(const Tensor& x) {
  if (x.size() == 0) throw ShapeError("mean: empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor mean_rows(const Tensor& x) {
  require_rank(x, 2, "mean_rows");
  const std::size_t m = x.dim(0), n = x.dim(1);
  if (m == 0) throw ShapeError("mean_rows: no rows");
  const auto X = x.data();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j] += X[i * n + j];
  }
  for (auto& v : out) v /= static_cast<double>(m);
  return Tensor::make_result(
      {n}, std::move(out), {x},
      [m, n](Node& self) {
        auto d = input_grad(self, 0);
        const double inv = 1.0 / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) d[i * n + j] += self.grad[j] * inv;
        }
      },
      "mean_rows");
}

}  // namespace lyrnet::ad
