#include "parsetalk/scheduler.h"

namespace parsetalk {

namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void Scheduler::Send(std::string type, std::string from, std::string to, Handler handler,
                     uint64_t delay) {
  const uint64_t sent = sent_++;
  queue_.push(Event{now_ + delay, SplitMix64(seed_ ^ SplitMix64(sent)), sent, std::move(type),
                    std::move(from), std::move(to), std::move(handler)});
}

size_t Scheduler::RunUntilQuiescent() {
  size_t count = 0;
  while (!queue_.empty()) {
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    std::string outcome = ev.handler();
    ++count;
    ++delivered_;
    if (tracing_) {
      trace_.push_back(TraceEvent{delivered_, std::move(ev.type), std::move(ev.from),
                                  std::move(ev.to), std::move(outcome)});
    }
  }
  return count;
}

}  // namespace parsetalk
