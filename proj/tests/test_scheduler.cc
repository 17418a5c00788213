#include "doctest.h"
#include "parsetalk/scheduler.h"

using namespace parsetalk;

namespace {

std::vector<std::string> Order(uint64_t seed) {
  Scheduler s(seed);
  std::vector<std::string> seen;
  for (int i = 0; i < 8; ++i) {
    const std::string name = "m" + std::to_string(i);
    s.Send("ping", "A", name, [&seen, name] {
      seen.push_back(name);
      return "ok";
    });
  }
  s.RunUntilQuiescent();
  return seen;
}

}  // namespace

TEST_CASE("same seed, same interleaving") {
  CHECK(Order(1) == Order(1));
  CHECK(Order(1).size() == 8);
}

TEST_CASE("later timestamps wait for earlier ones") {
  Scheduler s;
  s.set_tracing(true);
  std::vector<int> seen;
  s.Send("a", "X", "Y", [&] {
    seen.push_back(1);
    s.Send("c", "Y", "X", [&] {
      seen.push_back(3);
      return "done";
    });
    return "sent";
  });
  s.Send("b", "X", "Z", [&] {
    seen.push_back(2);
    return "ok";
  }, 1);
  CHECK(s.RunUntilQuiescent() == 3);
  CHECK(seen.back() == 3);
  REQUIRE(s.trace().size() == 3);
  CHECK(s.trace()[2].type == "c");
  CHECK(s.trace()[2].outcome == "done");
}
