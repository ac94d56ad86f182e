#include "rtcc/rl/ppo.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "rtcc/rl/action.h"

namespace rtcc {

double MapAction(double action, const RateState& rate_state) {
  if (!std::isfinite(action))
    throw std::invalid_argument("non-finite action");
  action = std::clamp(action, -1.0, 1.0);
  double rate = action >= 0.0 ? rate_state.prev_rate_kbps * (1.0 + action)
                              : rate_state.tput_200ms_kbps * (1.0 + action);
  return ClampRate(rate);
}

std::vector<PpoSample> ComputeAdvantages(const std::vector<Transition>& buffer,
                                         const PpoHyper& hyper) {
  std::vector<PpoSample> samples(buffer.size());
  double gae = 0.0;
  for (size_t idx = buffer.size(); idx-- > 0;) {
    const Transition& t = buffer[idx];
    double next_value = 0.0;
    if (!t.episode_end && idx + 1 < buffer.size())
      next_value = buffer[idx + 1].value;
    if (t.episode_end) gae = 0.0;
    double delta = t.reward + hyper.discount * next_value - t.value;
    gae = delta + hyper.discount * hyper.gae_lambda * gae * (t.episode_end ? 0.0 : 1.0);
    samples[idx].state = t.state;
    samples[idx].action = t.action;
    samples[idx].old_log_prob = t.log_prob;
    samples[idx].advantage = gae;
    samples[idx].ret = gae + t.value;
  }
  return samples;
}

double PpoLoss(const PolicyNetwork& net, const std::vector<PpoSample>& batch,
               const PpoHyper& hyper) {
  if (batch.empty()) throw std::invalid_argument("empty PPO batch");
  double policy_loss = 0.0, value_loss = 0.0;
  for (const PpoSample& s : batch) {
    auto out = net.Forward(s.state);
    double logp = GaussianLogProb(s.action, out.mean, out.log_std);
    double ratio = std::exp(logp - s.old_log_prob);
    double clipped = std::clamp(ratio, 1.0 - hyper.clip, 1.0 + hyper.clip);
    policy_loss -= std::min(ratio * s.advantage, clipped * s.advantage);
    double verr = out.value - s.ret;
    value_loss += verr * verr;
  }
  double n = static_cast<double>(batch.size());
  double entropy = GaussianEntropy(net.log_std());
  return policy_loss / n + hyper.value_coef * value_loss / n -
         hyper.entropy_coef * entropy;
}

std::vector<double> PpoGrad(const PolicyNetwork& net,
                            const std::vector<PpoSample>& batch,
                            const PpoHyper& hyper) {
  if (batch.empty()) throw std::invalid_argument("empty PPO batch");
  std::vector<double> grad(PolicyNetwork::ParamCount(), 0.0);
  const double n = static_cast<double>(batch.size());

  for (const PpoSample& s : batch) {
    PolicyNetwork::Cache cache;
    auto out = net.Forward(s.state, &cache);
    double logp = GaussianLogProb(s.action, out.mean, out.log_std);
    double ratio = std::exp(logp - s.old_log_prob);

    // Surrogate derivative: zero when the clipped branch is active.
    bool clipped_out = (s.advantage >= 0.0 && ratio > 1.0 + hyper.clip) ||
                       (s.advantage < 0.0 && ratio < 1.0 - hyper.clip);
    double d_logp = clipped_out ? 0.0 : -s.advantage * ratio / n;

    double d_mean = d_logp * GaussianLogProbDMean(s.action, out.mean, out.log_std);
    double d_log_std =
        d_logp * GaussianLogProbDLogStd(s.action, out.mean, out.log_std);
    double d_value = hyper.value_coef * 2.0 * (out.value - s.ret) / n;
    net.Backward(cache, d_mean, d_value, d_log_std, grad);
  }
  // Entropy bonus only touches log_std (d entropy / d log_std = 1).
  grad[PolicyNetwork::ParamCount() - 1] -= hyper.entropy_coef;
  return grad;
}

std::vector<double> PpoGradFiniteDiff(PolicyNetwork net,
                                      const std::vector<PpoSample>& batch,
                                      const PpoHyper& hyper, double step) {
  std::vector<double> grad(PolicyNetwork::ParamCount(), 0.0);
  for (size_t i = 0; i < grad.size(); ++i) {
    double original = net.params()[i];
    double h = std::max(step, step * std::abs(original));
    net.params()[i] = original + h;
    double up = PpoLoss(net, batch, hyper);
    net.params()[i] = original - h;
    double down = PpoLoss(net, batch, hyper);
    net.params()[i] = original;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

AdamOptimizer::AdamOptimizer(size_t size, double lr, double beta1,
                             double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(size, 0.0), v_(size, 0.0) {}

void AdamOptimizer::Step(std::vector<double>& params,
                         const std::vector<double>& grad) {
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, t_);
  double bc2 = 1.0 - std::pow(beta2_, t_);
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps_);
  }
}

void PpoUpdate(PolicyNetwork& net, AdamOptimizer& opt,
               const std::vector<Transition>& buffer, const PpoHyper& hyper,
               uint64_t shuffle_seed) {
  if (buffer.empty()) throw std::invalid_argument("empty PPO buffer");
  std::vector<PpoSample> samples = ComputeAdvantages(buffer, hyper);

  if (hyper.normalize_advantages && samples.size() > 1) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.advantage;
    mean /= samples.size();
    double var = 0.0;
    for (const auto& s : samples)
      var += (s.advantage - mean) * (s.advantage - mean);
    double std = std::sqrt(var / samples.size());
    for (auto& s : samples) s.advantage = (s.advantage - mean) / (std + 1e-8);
  }

  std::mt19937_64 rng(shuffle_seed);
  std::vector<size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t start = 0; start < order.size();
         start += static_cast<size_t>(hyper.minibatch)) {
      size_t end = std::min(order.size(),
                            start + static_cast<size_t>(hyper.minibatch));
      std::vector<PpoSample> batch;
      batch.reserve(end - start);
      for (size_t i = start; i < end; ++i) batch.push_back(samples[order[i]]);
      std::vector<double> grad = PpoGrad(net, batch, hyper);
      opt.Step(net.params(), grad);
    }
  }
}

}  // namespace rtcc
