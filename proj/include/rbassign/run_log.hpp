#pragma once

#include <iosfwd>
#include <string>

#include "rbassign/ddqn.hpp"

namespace rbassign {

// One JSON object per line:
//   {"episode":0,"epsilon":0.8,"reward":...,"feasible":true,"throughput":...,
//    "best_throughput":... or null,"loss":...}
std::string episode_json(const EpisodeRecord& record);
void write_episode_jsonl(std::ostream& out, const EpisodeRecord& record);

EpisodeRecord parse_episode_json(const std::string& line);

}  // namespace rbassign
