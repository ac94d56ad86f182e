#ifndef RTCC_RL_PPO_H_
#define RTCC_RL_PPO_H_

#include <vector>

#include "rtcc/rl/policy.h"

namespace rtcc {

struct Transition {
  StateVector state{};
  double action = 0.0;
  double log_prob = 0.0;  // under the collecting policy
  double reward = 0.0;
  double value = 0.0;     // V(s) under the collecting policy
  bool episode_end = false;
};

struct PpoHyper {
  double clip = 0.2;
  double discount = 0.99;
  double gae_lambda = 0.95;
  double learning_rate = 3e-4;
  int epochs = 4;
  int minibatch = 64;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  int rollout_steps = 2048;
  bool normalize_advantages = true;
};

struct PpoSample {
  StateVector state{};
  double action = 0.0;
  double old_log_prob = 0.0;
  double advantage = 0.0;
  double ret = 0.0;  // GAE return (advantage + value)
};

// Generalized advantage estimation over a buffer that may contain several
// episodes (episode_end marks terminal steps; terminal value bootstraps 0).
std::vector<PpoSample> ComputeAdvantages(const std::vector<Transition>& buffer,
                                         const PpoHyper& hyper);

// Clipped-surrogate + value + entropy loss over one minibatch.
double PpoLoss(const PolicyNetwork& net, const std::vector<PpoSample>& batch,
               const PpoHyper& hyper);

// Analytic gradient of PpoLoss with respect to the flat parameter vector.
std::vector<double> PpoGrad(const PolicyNetwork& net,
                            const std::vector<PpoSample>& batch,
                            const PpoHyper& hyper);

// Central finite differences of PpoLoss, for gradient verification.
std::vector<double> PpoGradFiniteDiff(PolicyNetwork net,
                                      const std::vector<PpoSample>& batch,
                                      const PpoHyper& hyper,
                                      double step = 1e-5);

class AdamOptimizer {
 public:
  AdamOptimizer(size_t size, double lr, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);
  void Step(std::vector<double>& params, const std::vector<double>& grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::vector<double> m_, v_;
};

// One PPO update: GAE, advantage normalization, `epochs` passes of shuffled
// minibatch Adam steps. Throws on an empty buffer.
void PpoUpdate(PolicyNetwork& net, AdamOptimizer& opt,
               const std::vector<Transition>& buffer, const PpoHyper& hyper,
               uint64_t shuffle_seed);

}  // namespace rtcc

#endif  // RTCC_RL_PPO_H_
