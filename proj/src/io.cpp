#include "vne/io.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace vne {

namespace {

std::string scaling_name(FeatureScaling s) {
  return s == FeatureScaling::raw ? "raw" : "normalized";
}

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidConfig(std::string(key) + ": missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string(key) + ": " + e.what());
  }
}

}  // namespace

Json config_to_json(const ScenarioConfig& c) {
  Json j;
  j["substrate_nodes"] = c.substrate_nodes;
  j["substrate_links"] = c.substrate_links;
  j["substrate_cpu_min"] = c.substrate_cpu_min;
  j["substrate_cpu_max"] = c.substrate_cpu_max;
  j["substrate_bw_min"] = c.substrate_bw_min;
  j["substrate_bw_max"] = c.substrate_bw_max;
  j["vnr_count"] = c.vnr_count;
  j["train_count"] = c.train_count;
  j["vnr_nodes_min"] = c.vnr_nodes_min;
  j["vnr_nodes_max"] = c.vnr_nodes_max;
  j["vnr_link_probability"] = c.vnr_link_probability;
  j["vnr_cpu_min"] = c.vnr_cpu_min;
  j["vnr_cpu_max"] = c.vnr_cpu_max;
  j["vnr_bw_min"] = c.vnr_bw_min;
  j["vnr_bw_max"] = c.vnr_bw_max;
  j["arrival_rate"] = c.arrival_rate;
  j["mean_lifetime"] = c.mean_lifetime;
  j["epochs"] = c.epochs;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["window"] = c.window;
  j["seed"] = c.seed;
  j["feature_scaling"] = scaling_name(c.feature_scaling);
  return j;
}

ScenarioConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidConfig("config: expected a JSON object");
  ScenarioConfig c;

  auto int_field = [](std::int64_t& dst) {
    return [&dst](const Json& v, const std::string& key) {
      if (!v.is_number_integer())
        throw InvalidConfig(key + ": expected an integer");
      dst = v.get<std::int64_t>();
    };
  };
  auto real_field = [](double& dst) {
    return [&dst](const Json& v, const std::string& key) {
      if (!v.is_number()) throw InvalidConfig(key + ": expected a number");
      dst = v.get<double>();
    };
  };
  const std::map<std::string, std::function<void(const Json&, const std::string&)>>
      setters = {
          {"substrate_nodes", int_field(c.substrate_nodes)},
          {"substrate_links", int_field(c.substrate_links)},
          {"substrate_cpu_min", int_field(c.substrate_cpu_min)},
          {"substrate_cpu_max", int_field(c.substrate_cpu_max)},
          {"substrate_bw_min", int_field(c.substrate_bw_min)},
          {"substrate_bw_max", int_field(c.substrate_bw_max)},
          {"vnr_count", int_field(c.vnr_count)},
          {"train_count", int_field(c.train_count)},
          {"vnr_nodes_min", int_field(c.vnr_nodes_min)},
          {"vnr_nodes_max", int_field(c.vnr_nodes_max)},
          {"vnr_link_probability", real_field(c.vnr_link_probability)},
          {"vnr_cpu_min", int_field(c.vnr_cpu_min)},
          {"vnr_cpu_max", int_field(c.vnr_cpu_max)},
          {"vnr_bw_min", int_field(c.vnr_bw_min)},
          {"vnr_bw_max", int_field(c.vnr_bw_max)},
          {"arrival_rate", real_field(c.arrival_rate)},
          {"mean_lifetime", real_field(c.mean_lifetime)},
          {"epochs", int_field(c.epochs)},
          {"learning_rate", real_field(c.learning_rate)},
          {"batch_size", int_field(c.batch_size)},
          {"window", real_field(c.window)},
          {"seed",
           [&c](const Json& v, const std::string& key) {
             if (!v.is_number_unsigned())
               throw InvalidConfig(key + ": expected a non-negative integer");
             c.seed = v.get<std::uint64_t>();
           }},
          {"feature_scaling",
           [&c](const Json& v, const std::string& key) {
             if (v == "normalized")
               c.feature_scaling = FeatureScaling::normalized;
             else if (v == "raw")
               c.feature_scaling = FeatureScaling::raw;
             else
               throw InvalidConfig(key + ": expected \"normalized\" or \"raw\"");
           }},
      };

  for (const auto& [key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw InvalidConfig(key + ": unknown key");
    it->second(value, key);
  }
  validate(c);
  return c;
}

Json substrate_to_json(const SubstrateNetwork& net) {
  Json nodes = Json::array();
  for (const auto& n : net.nodes())
    nodes.push_back({{"id", n.id},
                     {"cpu", n.cpu_initial},
                     {"delay", n.delay_level},
                     {"security", n.security_level}});
  Json links = Json::array();
  for (const auto& l : net.links())
    links.push_back({{"endpoints", {l.a, l.b}},
                     {"bw", l.bw_initial},
                     {"delay", l.delay_level}});
  return {{"nodes", std::move(nodes)}, {"links", std::move(links)}};
}

SubstrateNetwork substrate_from_json(const Json& j) {
  try {
    std::vector<SubstrateNode> nodes;
    for (const auto& n : j.at("nodes"))
      nodes.push_back({n.at("id").get<NodeId>(), n.at("cpu").get<Units>(), 0,
                       n.at("delay").get<Level>(), n.at("security").get<Level>()});
    std::vector<SubstrateLink> links;
    for (const auto& l : j.at("links")) {
      const auto& ends = l.at("endpoints");
      if (ends.size() != 2) throw InvalidConfig("substrate link: two endpoints expected");
      links.push_back({ends[0].get<NodeId>(), ends[1].get<NodeId>(),
                       l.at("bw").get<Units>(), 0, l.at("delay").get<Level>()});
    }
    return SubstrateNetwork(std::move(nodes), std::move(links));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("substrate: ") + e.what());
  } catch (const InvalidNetwork& e) {
    throw InvalidConfig(std::string("substrate: ") + e.what());
  }
}

Json request_to_json(const VirtualNetworkRequest& vnr) {
  Json nodes = Json::array();
  for (const auto& n : vnr.nodes)
    nodes.push_back({{"id", n.id},
                     {"cpu", n.cpu_demand},
                     {"delay", n.delay_requirement},
                     {"security", n.security_requirement}});
  Json links = Json::array();
  for (const auto& l : vnr.links)
    links.push_back({{"endpoints", {l.a, l.b}},
                     {"bw", l.bw_demand},
                     {"delay", l.delay_requirement}});
  return {{"id", vnr.id},
          {"arrival_time", vnr.arrival_time},
          {"lifetime", vnr.lifetime},
          {"nodes", std::move(nodes)},
          {"links", std::move(links)}};
}

VirtualNetworkRequest request_from_json(const Json& j) {
  try {
    VirtualNetworkRequest vnr;
    vnr.id = j.at("id").get<RequestId>();
    vnr.arrival_time = j.at("arrival_time").get<double>();
    vnr.lifetime = j.at("lifetime").get<double>();
    for (const auto& n : j.at("nodes"))
      vnr.nodes.push_back({n.at("id").get<NodeId>(), n.at("cpu").get<Units>(),
                           n.at("delay").get<Level>(), n.at("security").get<Level>()});
    for (const auto& l : j.at("links")) {
      const auto& ends = l.at("endpoints");
      if (ends.size() != 2) throw InvalidConfig("virtual link: two endpoints expected");
      vnr.links.push_back({ends[0].get<NodeId>(), ends[1].get<NodeId>(),
                           l.at("bw").get<Units>(), l.at("delay").get<Level>()});
    }
    validate(vnr);
    return vnr;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("request: ") + e.what());
  } catch (const InvalidNetwork& e) {
    throw InvalidConfig(e.what());
  }
}

Json scenario_to_json(const Scenario& s) {
  Json reqs = Json::array();
  for (const auto& r : s.requests) reqs.push_back(request_to_json(r));
  return {{"config", config_to_json(s.config)},
          {"substrate", substrate_to_json(s.substrate)},
          {"requests", std::move(reqs)}};
}

Scenario scenario_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("config") || !j.contains("substrate") ||
      !j.contains("requests"))
    throw InvalidConfig("scenario: expected keys config, substrate, requests");
  Scenario s;
  s.config = config_from_json(j.at("config"));
  s.substrate = substrate_from_json(j.at("substrate"));
  for (const auto& r : j.at("requests")) s.requests.push_back(request_from_json(r));
  return s;
}

Json checkpoint_to_json(const PolicyCheckpoint& c) {
  Json kernel = Json::array();
  for (double w : c.policy.kernel()) kernel.push_back(w);
  return {{"kernel", std::move(kernel)},
          {"bias", c.policy.bias()},
          {"seed", c.seed},
          {"epochs", c.epochs}};
}

PolicyCheckpoint checkpoint_from_json(const Json& j) {
  try {
    const auto& k = j.at("kernel");
    if (!k.is_array() || k.size() != kFeatureDim)
      throw InvalidConfig("checkpoint kernel: expected " +
                          std::to_string(kFeatureDim) + " values");
    PolicyNetwork::Kernel kernel{};
    for (std::size_t i = 0; i < kFeatureDim; ++i) kernel[i] = k[i].get<double>();
    PolicyCheckpoint c;
    c.policy = PolicyNetwork(kernel, field<double>(j, "bias"));
    c.seed = field<std::uint64_t>(j, "seed");
    c.epochs = field<std::int64_t>(j, "epochs");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("checkpoint: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
  std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidConfig(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace vne
