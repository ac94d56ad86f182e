#include "rtcc/rl/observation.h"

#include <algorithm>

#include "rtcc/gcc_like.h"

namespace rtcc {

WindowStats MakeWindowStats(const FeedbackReport& feedback,
                            const WindowStats* previous) {
  WindowStats w;
  w.window_index = previous ? previous->window_index + 1 : 0;
  w.packets_sent = feedback.packets_sent_in_window;
  w.packets_acked = static_cast<int64_t>(feedback.acked_ids.size());
  w.bytes_acked = feedback.bytes_acked;

  if (!feedback.rtt_ms.empty()) {
    double sum = 0.0;
    for (double r : feedback.rtt_ms) sum += r;
    w.mean_rtt_ms = sum / feedback.rtt_ms.size();
  } else {
    w.mean_rtt_ms = previous ? previous->mean_rtt_ms : 0.0;
  }

  double window_ms = UsToMs(feedback.window_end_us - feedback.window_start_us);
  w.rtt_slope = window_ms > 0.0 ? DelayTrendMs(feedback) / window_ms : 0.0;

  if (previous && previous->min_historic_mean_rtt_ms > 0.0) {
    w.min_historic_mean_rtt_ms = previous->min_historic_mean_rtt_ms;
    if (w.mean_rtt_ms > 0.0)
      w.min_historic_mean_rtt_ms =
          std::min(w.min_historic_mean_rtt_ms, w.mean_rtt_ms);
  } else {
    w.min_historic_mean_rtt_ms = w.mean_rtt_ms;
  }
  return w;
}

StateVector ExtractObservation(const std::deque<WindowStats>& history) {
  StateVector state;
  for (int i = 0; i < kHistoryWindows; ++i) {
    double gradient = 0.0, ratio = 1.0, sending = 1.0;
    if (i < static_cast<int>(history.size())) {
      // history is most-recent-first
      const WindowStats& w = history[i];
      gradient = w.rtt_slope;
      if (w.min_historic_mean_rtt_ms > 0.0 && w.mean_rtt_ms > 0.0)
        ratio = std::max(1.0, w.mean_rtt_ms / w.min_historic_mean_rtt_ms);
      sending = static_cast<double>(w.packets_sent) /
                static_cast<double>(std::max<int64_t>(w.packets_acked, 1));
    }
    state[i * kFeaturesPerWindow + 0] = gradient;
    state[i * kFeaturesPerWindow + 1] = ratio;
    state[i * kFeaturesPerWindow + 2] = sending;
  }
  return state;
}

}  // namespace rtcc
