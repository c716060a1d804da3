// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lyricgen/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include <nlohmann/json.hpp>

#include "lyricgen/error.hpp"

namespace lyricgen {

Tensor::Tensor(std::vector<std::size_t> dims) : shape(std::move(dims)) {
  const std::size_t n =
      std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  data.assign(n, 0.0);
}

void Tensor::fill(double v) { std::fill(data.begin(), data.end(), v); }

bool Tensor::all_finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

void validate_tensor(const Tensor& t, const std::string& what) {
  const std::size_t n =
      std::accumulate(t.shape.begin(), t.shape.end(), std::size_t{1}, std::multiplies<>());
  if (n != t.data.size())
    throw DataError(what + ": data length " + std::to_string(t.data.size()) +
                    " does not match shape " + t.shape_string());
  if (!t.all_finite()) throw DataError(what + ": non-finite value");
}

nlohmann::json tensor_to_json(const Tensor& t) {
  return nlohmann::json{{"shape", t.shape}, {"data", t.data}};
}

Tensor tensor_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data"))
    throw DataError(what + ": expected {shape, data}");
  Tensor t;
  try {
    t.shape = j.at("shape").get<std::vector<std::size_t>>();
    t.data = j.at("data").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(what + ": " + e.what());
  }
  validate_tensor(t, what);
  return t;
}

void gemv_acc(const Tensor& W, std::span<const double> x, std::span<double> y) {
  const std::size_t r = W.rows(), c = W.cols();
  const double* w = W.data.data();
  for (std::size_t i = 0; i < r; ++i) {
    const double* wi = w + i * c;
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += wi[j] * x[j];
    y[i] += s;
  }
}

void gemv_t_acc(const Tensor& W, std::span<const double> x, std::span<double> y) {
  const std::size_t r = W.rows(), c = W.cols();
  const double* w = W.data.data();
  for (std::size_t i = 0; i < r; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* wi = w + i * c;
    for (std::size_t j = 0; j < c; ++j) y[j] += wi[j] * xi;
  }
}

void outer_acc(std::span<const double> a, std::span<const double> b, Tensor& W) {
  const std::size_t c = W.cols();
  double* w = W.data.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    double* wi = w + i * c;
    for (std::size_t j = 0; j < b.size(); ++j) wi[j] += ai * b[j];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace lyricgen
