#ifndef RTCC_RL_POLICY_H_
#define RTCC_RL_POLICY_H_

#include <array>
#include <span>
#include <string>
#include <vector>

#include "rtcc/rl/observation.h"

namespace rtcc {

// 30 -> 32 -> 16 fully connected net with tanh hidden activations, a
// tanh-squashed Gaussian mean head, an unbounded value head, and one learned
// state-independent log-std. Parameters live in a single flat vector so the
// optimizer and finite-difference checks can treat the net as f(theta).
class PolicyNetwork {
 public:
  static constexpr int kInput = kStateSize;  // 30
  static constexpr int kHidden1 = 32;
  static constexpr int kHidden2 = 16;

  PolicyNetwork();                      // zero-initialized
  explicit PolicyNetwork(uint64_t seed);  // small random init

  struct Output {
    double mean = 0.0;     // in [-1, 1]
    double log_std = 0.0;
    double value = 0.0;
  };

  // Intermediate activations retained for the backward pass.
  struct Cache {
    std::array<double, kInput> input;
    std::array<double, kHidden1> h1;
    std::array<double, kHidden2> h2;
    double mean_pre = 0.0;  // pre-tanh
    double mean = 0.0;
    double value = 0.0;
  };

  // Throws std::invalid_argument on non-finite input.
  Output Forward(std::span<const double> state) const;
  Output Forward(std::span<const double> state, Cache* cache) const;

  // Accumulates d(loss)/d(theta) into `grad` given upstream derivatives with
  // respect to the squashed mean, the value, and log-std.
  void Backward(const Cache& cache, double d_mean, double d_value,
                double d_log_std, std::span<double> grad) const;

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  static size_t ParamCount();

  double log_std() const;
  void set_log_std(double v);

  void SaveCheckpoint(const std::string& path) const;
  static PolicyNetwork LoadCheckpoint(const std::string& path);

 private:
  std::vector<double> params_;
};

// log N(action | mean, exp(log_std)^2)
double GaussianLogProb(double action, double mean, double log_std);
// d logp / d mean and d logp / d log_std
double GaussianLogProbDMean(double action, double mean, double log_std);
double GaussianLogProbDLogStd(double action, double mean, double log_std);
double GaussianEntropy(double log_std);

}  // namespace rtcc

#endif  // RTCC_RL_POLICY_H_
