#ifndef PARSETALK_JSON_IO_H_
#define PARSETALK_JSON_IO_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "parsetalk/parse_result.h"

namespace parsetalk {

nlohmann::json ToJson(const InterpretationGraph& graph);
nlohmann::json ToJson(const Analysis& analysis);
// Wall time is left out unless asked for, so that serializations of two runs
// compare equal.
nlohmann::json ToJson(const MetricsRecord& metrics, bool with_wall_time = false);
nlohmann::json ToJson(const ParseResult& result, bool with_wall_time = false);

// "seq,type,from,to,outcome"
std::string TraceLine(const TraceEvent& event);

}  // namespace parsetalk

#endif  // PARSETALK_JSON_IO_H_
