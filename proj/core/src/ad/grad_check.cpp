// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/ad/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "lyrnet/ad/ops.hpp"
#include "lyrnet/ad/rng.hpp"
#include "lyrnet/error.hpp"

namespace lyrnet::ad {

double GradCheckReport::worst() const {
  double w = 0.0;
  for (double e : max_rel_error) w = std::max(w, std::isnan(e) ? INFINITY : e);
  return w;
}

namespace {

double evaluate(const ScalarFn& f, std::span<const Tensor> inputs) {
  const Tensor out = f(inputs);
  if (out.size() != 1 || out.rank() != 0) {
    throw ContractError("grad_check: function must return a scalar, got shape " +
                        to_string(out.shape()));
  }
  return out.item();
}

Tensor random_tensor(Rng& rng, Shape shape) {
  std::vector<double> v(numel(shape));
  for (auto& x : v) x = -2.0 + 4.0 * rng.uniform();
  return Tensor::from(std::move(shape), std::move(v), true);
}

// Reduces an arbitrary-shape output to a scalar with fixed random weights so
// every output element contributes a distinct gradient.
Tensor weighted_sum(const Tensor& y, const Tensor& weights) {
  return sum(mul(y, weights));
}

Tensor probe(Rng& rng, Shape shape) {
  std::vector<double> v(numel(shape));
  for (auto& x : v) x = -1.0 + 2.0 * rng.uniform();
  return Tensor::from(std::move(shape), std::move(v), false);
}

}  // namespace

GradCheckReport grad_check(const ScalarFn& f, std::span<Tensor> inputs, double step,
                           double floor) {
  for (auto& in : inputs) {
    in.set_requires_grad(true);
    in.zero_grad();
  }
  const Tensor out = f(inputs);
  if (out.size() != 1 || out.rank() != 0) {
    throw ContractError("grad_check: function must return a scalar, got shape " +
                        to_string(out.shape()));
  }
  out.backward();

  GradCheckReport report;
  for (auto& in : inputs) {
    std::vector<double> analytic(in.size(), 0.0);
    if (in.has_grad()) std::copy(in.grad().begin(), in.grad().end(), analytic.begin());
    auto values = in.mutable_data();
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + step;
      const double plus = evaluate(f, inputs);
      values[i] = original - step;
      const double minus = evaluate(f, inputs);
      values[i] = original;
      const double numeric = (plus - minus) / (2.0 * step);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
      const double err = std::abs(analytic[i] - numeric) / denom;
      worst = std::isnan(err) ? INFINITY : std::max(worst, err);
    }
    report.max_rel_error.push_back(worst);
  }
  return report;
}

std::vector<GradCheckOutcome> run_grad_checks(std::span<GradCheckCase> cases, double tolerance,
                                              double step) {
  std::vector<GradCheckOutcome> outcomes;
  outcomes.reserve(cases.size());
  for (auto& c : cases) {
    const auto report = grad_check(c.fn, c.inputs, c.step > 0.0 ? c.step : step);
    outcomes.push_back({c.name, report.worst(), report.passed(tolerance)});
  }
  return outcomes;
}

GradCheckCase with_corrupted_backward(GradCheckCase base, double factor) {
  auto inner = base.fn;
  base.fn = [inner, factor](std::span<const Tensor> in) {
    const Tensor y = inner(in);
    std::vector<double> v(y.data().begin(), y.data().end());
    return Tensor::make_result(
        y.shape(), std::move(v), {y},
        [factor](Node& self) {
          auto d = self.inputs[0]->grad_buffer();
          for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * self.grad[i];
        },
        "corrupted");
  };
  return base;
}

std::vector<GradCheckCase> primitive_grad_cases(std::uint64_t seed) {
  Rng rng(seed, 0x67726164);  // "grad"
  std::vector<GradCheckCase> cases;

  {
    auto w = probe(rng, {4, 3});
    cases.push_back({"matmul", {random_tensor(rng, {4, 5}), random_tensor(rng, {5, 3})},
                     [w](std::span<const Tensor> in) {
                       return weighted_sum(matmul(in[0], in[1]), w);
                     }});
  }
  {
    auto w = probe(rng, {3, 4});
    cases.push_back({"add", {random_tensor(rng, {3, 4}), random_tensor(rng, {3, 4})},
                     [w](std::span<const Tensor> in) { return weighted_sum(add(in[0], in[1]), w); }});
  }
  {
    auto w = probe(rng, {3, 4});
    cases.push_back({"add_bias", {random_tensor(rng, {3, 4}), random_tensor(rng, {4})},
                     [w](std::span<const Tensor> in) { return weighted_sum(add(in[0], in[1]), w); }});
  }
  {
    auto w = probe(rng, {3, 4});
    cases.push_back({"mul", {random_tensor(rng, {3, 4}), random_tensor(rng, {3, 4})},
                     [w](std::span<const Tensor> in) { return weighted_sum(mul(in[0], in[1]), w); }});
  }
  {
    auto w = probe(rng, {2, 5});
    cases.push_back({"scale", {random_tensor(rng, {2, 5})},
                     [w](std::span<const Tensor> in) { return weighted_sum(scale(in[0], -1.7), w); }});
  }
  {
    auto w = probe(rng, {3, 4});
    cases.push_back({"gelu", {random_tensor(rng, {3, 4})},
                     [w](std::span<const Tensor> in) { return weighted_sum(gelu(in[0]), w); }});
  }
  {
    auto w = probe(rng, {3, 4});
    cases.push_back({"tanh", {random_tensor(rng, {3, 4})},
                     [w](std::span<const Tensor> in) { return weighted_sum(ad::tanh(in[0]), w); }});
  }
  {
    auto w = probe(rng, {3, 5});
    cases.push_back({"softmax", {random_tensor(rng, {3, 5})},
                     [w](std::span<const Tensor> in) { return weighted_sum(softmax(in[0], -1), w); }});
  }
  {
    auto w = probe(rng, {4, 3});
    cases.push_back({"softmax_axis0", {random_tensor(rng, {4, 3})},
                     [w](std::span<const Tensor> in) { return weighted_sum(softmax(in[0], 0), w); }});
  }
  {
    std::vector<std::size_t> targets{2, 0, 3};
    cases.push_back({"cross_entropy", {random_tensor(rng, {3, 4})},
                     [targets](std::span<const Tensor> in) { return cross_entropy(in[0], targets); }});
  }
  {
    std::vector<std::size_t> targets{1, 0, 3};
    cases.push_back({"cross_entropy_matmul", {random_tensor(rng, {3, 4}), random_tensor(rng, {4, 4})},
                     [targets](std::span<const Tensor> in) {
                       return cross_entropy(matmul(in[0], in[1]), targets);
                     }});
  }
  {
    auto w = probe(rng, {2, 8});
    cases.push_back({"layer_norm",
                     {random_tensor(rng, {2, 8}), random_tensor(rng, {8}), random_tensor(rng, {8})},
                     [w](std::span<const Tensor> in) {
                       return weighted_sum(layer_norm(in[0], in[1], in[2]), w);
                     }});
  }
  {
    auto w = probe(rng, {4, 6});
    // A fixed stream keeps the mask identical across perturbed evaluations.
    const Rng mask_stream = rng.split(1);
    cases.push_back({"dropout", {random_tensor(rng, {4, 6})},
                     [w, mask_stream](std::span<const Tensor> in) {
                       Rng r = mask_stream;
                       return weighted_sum(dropout(in[0], 0.3, Mode::train, r), w);
                     }});
  }
  {
    auto w = probe(rng, {5, 3});
    std::vector<std::size_t> ids{0, 3, 3, 1, 5};
    cases.push_back({"embedding_lookup", {random_tensor(rng, {6, 3})},
                     [w, ids](std::span<const Tensor> in) {
                       return weighted_sum(embedding_lookup(in[0], ids), w);
                     }});
  }
  {
    auto w0 = probe(rng, {5, 3});
    cases.push_back({"concat_rows", {random_tensor(rng, {2, 3}), random_tensor(rng, {3, 3})},
                     [w0](std::span<const Tensor> in) {
                       return weighted_sum(concat({in[0], in[1]}, 0), w0);
                     }});
    auto w1 = probe(rng, {2, 7});
    cases.push_back({"concat_cols", {random_tensor(rng, {2, 3}), random_tensor(rng, {2, 4})},
                     [w1](std::span<const Tensor> in) {
                       return weighted_sum(concat({in[0], in[1]}, 1), w1);
                     }});
  }
  {
    auto w = probe(rng, {6, 2});
    cases.push_back({"reshape", {random_tensor(rng, {3, 4})},
                     [w](std::span<const Tensor> in) { return weighted_sum(reshape(in[0], {6, 2}), w); }});
  }
  {
    auto w = probe(rng, {4, 3});
    cases.push_back({"transpose", {random_tensor(rng, {3, 4})},
                     [w](std::span<const Tensor> in) { return weighted_sum(transpose(in[0]), w); }});
  }
  {
    auto w = probe(rng, {3, 2});
    cases.push_back({"slice", {random_tensor(rng, {3, 5})},
                     [w](std::span<const Tensor> in) { return weighted_sum(slice(in[0], 1, 1, 3), w); }});
  }
  {
    auto w = probe(rng, {3, 4});
    std::vector<std::size_t> idx{0, 1, 1, 4, 2, 2, 3, 0, 4, 3, 2, 1};
    cases.push_back({"gather_columns", {random_tensor(rng, {3, 5})},
                     [w, idx](std::span<const Tensor> in) {
                       return weighted_sum(gather_columns(in[0], idx, 4), w);
                     }});
  }
  {
    auto w = probe(rng, {4});
    cases.push_back({"mean_rows", {random_tensor(rng, {3, 4})},
                     [w](std::span<const Tensor> in) { return weighted_sum(mean_rows(in[0]), w); }});
  }
  cases.push_back({"mean", {random_tensor(rng, {3, 4})},
                   [](std::span<const Tensor> in) { return mean(mul(in[0], in[0])); }});
  return cases;
}

}  // namespace lyrnet::ad
