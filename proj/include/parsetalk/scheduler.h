#ifndef PARSETALK_SCHEDULER_H_
#define PARSETALK_SCHEDULER_H_

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <vector>

namespace parsetalk {

struct TraceEvent {
  uint64_t seq = 0;
  std::string type;
  std::string from;
  std::string to;
  std::string outcome;
};

// Discrete-event message queue. Messages sent while handling a message at
// time t are delivered at t + delay; messages sharing a timestamp are the
// "concurrent" ones and are ordered by a seed-keyed hash of their send order,
// so a given seed always yields the same interleaving.
class Scheduler {
 public:
  // A handler returns the outcome string recorded in the trace.
  using Handler = std::function<std::string()>;

  explicit Scheduler(uint64_t seed = 0) : seed_(seed) {}

  void Send(std::string type, std::string from, std::string to, Handler handler,
            uint64_t delay = 1);
  // Delivers messages until the queue is empty. Returns the number delivered.
  size_t RunUntilQuiescent();

  void set_tracing(bool on) { tracing_ = on; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  uint64_t delivered() const { return delivered_; }
  uint64_t now() const { return now_; }

 private:
  struct Event {
    uint64_t time;
    uint64_t tiebreak;
    uint64_t sent;
    std::string type;
    std::string from;
    std::string to;
    Handler handler;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      if (a.tiebreak != b.tiebreak) return a.tiebreak > b.tiebreak;
      return a.sent > b.sent;
    }
  };

  uint64_t seed_;
  uint64_t now_ = 0;
  uint64_t sent_ = 0;
  uint64_t delivered_ = 0;
  bool tracing_ = false;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::vector<TraceEvent> trace_;
};

}  // namespace parsetalk

#endif  // PARSETALK_SCHEDULER_H_
