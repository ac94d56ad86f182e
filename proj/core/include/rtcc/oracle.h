#ifndef RTCC_ORACLE_H_
#define RTCC_ORACLE_H_

#include "rtcc/controller.h"
#include "rtcc/trace.h"

namespace rtcc {

// Knows the trace: emits the link capacity minus a small packetization
// allowance, re-deciding exactly at every bandwidth breakpoint.
class OracleController : public Controller {
 public:
  explicit OracleController(NetworkTrace trace, double headroom = 0.98);

  ControllerDecision OnFeedback(const FeedbackReport& feedback,
                                Micros now_us) override;
  std::vector<Micros> ExtraDecisionTimesUs(Micros duration_us) const override;
  std::optional<ControllerDecision> OnTick(Micros now_us) override;
  double InitialRateKbps() const override;

 private:
  double RateAt(Micros now_us) const;

  NetworkTrace trace_;
  double headroom_;
};

// Oracle target rate at time t (kbps).
double OracleRateKbps(const NetworkTrace& trace, double t_s,
                      double headroom = 0.98);

}  // namespace rtcc

#endif  // RTCC_ORACLE_H_
