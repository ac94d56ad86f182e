#include "rtcc/rl/policy.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace rtcc {

namespace {

// Flat layout: W1 | b1 | W2 | b2 | w_mean | b_mean | w_value | b_value | log_std
constexpr int kW1 = 0;
constexpr int kB1 = kW1 + PolicyNetwork::kHidden1 * PolicyNetwork::kInput;
constexpr int kW2 = kB1 + PolicyNetwork::kHidden1;
constexpr int kB2 = kW2 + PolicyNetwork::kHidden2 * PolicyNetwork::kHidden1;
constexpr int kWm = kB2 + PolicyNetwork::kHidden2;
constexpr int kBm = kWm + PolicyNetwork::kHidden2;
constexpr int kWv = kBm + 1;
constexpr int kBv = kWv + PolicyNetwork::kHidden2;
constexpr int kLogStd = kBv + 1;
constexpr int kTotal = kLogStd + 1;

}  // namespace

size_t PolicyNetwork::ParamCount() { return kTotal; }

PolicyNetwork::PolicyNetwork() : params_(kTotal, 0.0) {}

PolicyNetwork::PolicyNetwork(uint64_t seed) : params_(kTotal, 0.0) {
  std::mt19937_64 rng(seed);
  auto init_layer = [&](int offset, int rows, int cols) {
    // Xavier-style scaling.
    std::normal_distribution<double> dist(0.0, std::sqrt(1.0 / cols));
    for (int i = 0; i < rows * cols; ++i) params_[offset + i] = dist(rng);
  };
  init_layer(kW1, kHidden1, kInput);
  init_layer(kW2, kHidden2, kHidden1);
  init_layer(kWm, 1, kHidden2);
  init_layer(kWv, 1, kHidden2);
  params_[kLogStd] = std::log(0.5);  // moderately exploratory start
}

double PolicyNetwork::log_std() const { return params_[kLogStd]; }
void PolicyNetwork::set_log_std(double v) { params_[kLogStd] = v; }

PolicyNetwork::Output PolicyNetwork::Forward(std::span<const double> state) const {
  Cache cache;
  return Forward(state, &cache);
}

PolicyNetwork::Output PolicyNetwork::Forward(std::span<const double> state,
                                             Cache* cache) const {
  if (state.size() != kInput)
    throw std::invalid_argument("state must have 30 features");
  for (double v : state)
    if (!std::isfinite(v))
      throw std::invalid_argument("non-finite state feature");

  const double* p = params_.data();
  for (int i = 0; i < kInput; ++i) cache->input[i] = state[i];

  for (int j = 0; j < kHidden1; ++j) {
    double z = p[kB1 + j];
    for (int i = 0; i < kInput; ++i) z += p[kW1 + j * kInput + i] * state[i];
    cache->h1[j] = std::tanh(z);
  }
  for (int k = 0; k < kHidden2; ++k) {
    double z = p[kB2 + k];
    for (int j = 0; j < kHidden1; ++j)
      z += p[kW2 + k * kHidden1 + j] * cache->h1[j];
    cache->h2[k] = std::tanh(z);
  }
  double mean_pre = p[kBm];
  double value = p[kBv];
  for (int k = 0; k < kHidden2; ++k) {
    mean_pre += p[kWm + k] * cache->h2[k];
    value += p[kWv + k] * cache->h2[k];
  }
  cache->mean_pre = mean_pre;
  cache->mean = std::tanh(mean_pre);
  cache->value = value;

  return {cache->mean, p[kLogStd], value};
}

void PolicyNetwork::Backward(const Cache& cache, double d_mean, double d_value,
                             double d_log_std, std::span<double> grad) const {
  const double* p = params_.data();
  double* g = grad.data();

  g[kLogStd] += d_log_std;

  // Mean head through the tanh squash.
  double d_mean_pre = d_mean * (1.0 - cache.mean * cache.mean);
  g[kBm] += d_mean_pre;
  g[kBv] += d_value;

  std::array<double, kHidden2> d_h2{};
  for (int k = 0; k < kHidden2; ++k) {
    g[kWm + k] += d_mean_pre * cache.h2[k];
    g[kWv + k] += d_value * cache.h2[k];
    d_h2[k] = d_mean_pre * p[kWm + k] + d_value * p[kWv + k];
    d_h2[k] *= 1.0 - cache.h2[k] * cache.h2[k];  // through tanh
  }

  std::array<double, kHidden1> d_h1{};
  for (int k = 0; k < kHidden2; ++k) {
    g[kB2 + k] += d_h2[k];
    for (int j = 0; j < kHidden1; ++j) {
      g[kW2 + k * kHidden1 + j] += d_h2[k] * cache.h1[j];
      d_h1[j] += d_h2[k] * p[kW2 + k * kHidden1 + j];
    }
  }
  for (int j = 0; j < kHidden1; ++j) {
    double dz = d_h1[j] * (1.0 - cache.h1[j] * cache.h1[j]);
    g[kB1 + j] += dz;
    for (int i = 0; i < kInput; ++i)
      g[kW1 + j * kInput + i] += dz * cache.input[i];
  }
}

void PolicyNetwork::SaveCheckpoint(const std::string& path) const {
  nlohmann::json j = {
      {"format", "rtcc-policy-v1"},
      {"arch", {kInput, kHidden1, kHidden2}},
      {"params", params_},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump() << "\n";
}

PolicyNetwork PolicyNetwork::LoadCheckpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.value("format", "") != "rtcc-policy-v1")
    throw std::runtime_error("unknown checkpoint format in " + path);
  auto arch = j.at("arch").get<std::vector<int>>();
  if (arch != std::vector<int>{kInput, kHidden1, kHidden2})
    throw std::runtime_error("checkpoint architecture mismatch in " + path);
  PolicyNetwork net;
  net.params_ = j.at("params").get<std::vector<double>>();
  if (net.params_.size() != ParamCount())
    throw std::runtime_error("checkpoint parameter count mismatch in " + path);
  return net;
}

double GaussianLogProb(double action, double mean, double log_std) {
  double std = std::exp(log_std);
  double z = (action - mean) / std;
  return -0.5 * z * z - log_std - 0.5 * std::log(2.0 * std::numbers::pi);
}

double GaussianLogProbDMean(double action, double mean, double log_std) {
  double var = std::exp(2.0 * log_std);
  return (action - mean) / var;
}

double GaussianLogProbDLogStd(double action, double mean, double log_std) {
  double var = std::exp(2.0 * log_std);
  return (action - mean) * (action - mean) / var - 1.0;
}

double GaussianEntropy(double log_std) {
  return log_std + 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
}

}  // namespace rtcc
