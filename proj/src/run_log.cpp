#include "rbassign/run_log.hpp"

#include <ostream>

#include <json.hpp>

#include "rbassign/errors.hpp"

namespace rbassign {

std::string episode_json(const EpisodeRecord& record) {
  nlohmann::ordered_json j;
  j["episode"] = record.episode;
  j["epsilon"] = record.epsilon;
  j["reward"] = record.reward;
  j["feasible"] = record.feasible;
  j["throughput"] = record.throughput;
  if (record.best_throughput) {
    j["best_throughput"] = *record.best_throughput;
  } else {
    j["best_throughput"] = nullptr;
  }
  j["loss"] = record.loss;
  return j.dump();
}

void write_episode_jsonl(std::ostream& out, const EpisodeRecord& record) {
  out << episode_json(record) << '\n';
}

EpisodeRecord parse_episode_json(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    EpisodeRecord r;
    r.episode = j.at("episode").get<int>();
    r.epsilon = j.at("epsilon").get<double>();
    r.reward = j.at("reward").get<double>();
    r.feasible = j.at("feasible").get<bool>();
    r.throughput = j.at("throughput").get<double>();
    if (!j.at("best_throughput").is_null()) r.best_throughput = j.at("best_throughput").get<double>();
    r.loss = j.value("loss", 0.0);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run log: ") + e.what());
  }
}

}  // namespace rbassign
