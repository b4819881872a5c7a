#include "iab/io.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace iab {

Network read_edge_list(std::istream& in) {
  std::vector<EdgeTriple> triples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::int64_t u, v;
    double c;
    if (!(fields >> u)) continue;
    if (!(fields >> v >> c)) throw ValidationError("malformed edge on line " + std::to_string(line_no));
    std::string extra;
    if (fields >> extra) throw ValidationError("trailing data on line " + std::to_string(line_no));
    triples.emplace_back(u, v, c);
  }
  return build_network(triples);
}

void write_edge_list(std::ostream& out, const Network& net) {
  const auto& labels = net.labels();
  out.precision(17);
  for (const Edge& e : net.edges()) out << labels[e.a] << ' ' << labels[e.b] << ' ' << e.conductance << '\n';
}

Json network_to_json(const Network& net) {
  Json edges = Json::array();
  for (EdgeId id = 0; id < net.num_edges(); ++id) {
    const Edge& e = net.edge(id);
    edges.push_back({{"a", e.a}, {"b", e.b}, {"c", e.conductance}, {"id", id}});
  }
  return {{"vertices", net.num_vertices()}, {"edges", std::move(edges)}, {"labels", net.labels()}};
}

Network network_from_json(const Json& j) {
  try {
    const std::size_t n = j.at("vertices").get<std::size_t>();
    const auto& list = j.at("edges");
    std::vector<Edge> edges(list.size());
    std::vector<char> seen(list.size(), 0);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& e = list[i];
      const std::size_t id = e.contains("id") ? e.at("id").get<std::size_t>() : i;
      if (id >= edges.size() || seen[id]) throw ValidationError("edge ids must be a permutation of 0..m-1");
      seen[id] = 1;
      edges[id] = {e.at("a").get<VertexId>(), e.at("b").get<VertexId>(), e.at("c").get<double>()};
    }
    Network net(n, std::move(edges));
    if (j.contains("labels")) net.set_labels(j.at("labels").get<std::vector<std::int64_t>>());
    if (!net.is_connected()) throw ConnectivityError("network is not connected");
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad network JSON: ") + e.what());
  }
}

std::string network_to_dot(const Network& net) {
  std::ostringstream out;
  out << "graph G {\n";
  for (VertexId v = 0; v < net.num_vertices(); ++v) out << "  " << v << " [label=\"" << net.labels()[v] << "\"];\n";
  for (EdgeId id = 0; id < net.num_edges(); ++id) {
    const Edge& e = net.edge(id);
    out << "  " << e.a << " -- " << e.b << " [label=\"" << id << ":" << e.conductance << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

const char* to_string(WalkEnd end) {
  switch (end) {
    case WalkEnd::kOpen: return "open";
    case WalkEnd::kHitTarget: return "hit_target";
    case WalkEnd::kReturnedToBoundary: return "returned_to_boundary";
    case WalkEnd::kStepCap: return "step_cap";
  }
  return "open";
}

WalkEnd walk_end_from_string(const std::string& s) {
  for (WalkEnd e : {WalkEnd::kOpen, WalkEnd::kHitTarget, WalkEnd::kReturnedToBoundary, WalkEnd::kStepCap})
    if (s == to_string(e)) return e;
  throw ValidationError("unknown walk termination cause '" + s + "'");
}

Json walk_to_json(const Walk& walk) {
  Json steps = Json::array();
  for (const Step& s : walk.steps) steps.push_back({{"edge_id", s.edge}, {"to", s.to}});
  return {{"start", walk.start}, {"steps", std::move(steps)}, {"cause", to_string(walk.end)}};
}

Walk walk_from_json(const Network& net, const Json& j) {
  try {
    Walk walk;
    walk.start = j.at("start").get<VertexId>();
    if (!net.contains(walk.start)) throw UnknownVertexError("walk starts outside the network");
    VertexId v = walk.start;
    for (const auto& s : j.at("steps")) {
      const EdgeId e = s.at("edge_id").get<EdgeId>();
      const VertexId to = s.at("to").get<VertexId>();
      if (e >= net.num_edges()) throw ValidationError("unknown edge id " + std::to_string(e));
      const Edge& edge = net.edge(e);
      bool forward;
      if (edge.a == v && edge.b == to)
        forward = true;
      else if (edge.b == v && edge.a == to)
        forward = false;
      else
        throw ValidationError("step along edge " + std::to_string(e) + " is not incident");
      walk.steps.push_back({e, to, forward});
      v = to;
    }
    walk.end = walk_end_from_string(j.at("cause").get<std::string>());
    return walk;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad walk JSON: ") + e.what());
  }
}

Json forest_to_json(const Network& net, const OrientedForest& forest) {
  Json parents = Json::array();
  for (VertexId v : forest.members()) {
    const auto& p = forest.parent(v);
    if (p) parents.push_back({{"v", v}, {"edge_id", p->id}, {"head", net.head(*p)}});
  }
  return {{"roots", forest.roots()}, {"parents", std::move(parents)}};
}

OrientedForest forest_from_json(const Network& net, const Json& j) {
  try {
    OrientedForest forest(net.num_vertices());
    for (const auto& r : j.at("roots")) {
      const VertexId v = r.get<VertexId>();
      if (!net.contains(v)) throw UnknownVertexError("unknown root");
      forest.add_root(v);
    }
    for (const auto& p : j.at("parents")) {
      const VertexId v = p.at("v").get<VertexId>();
      const EdgeId e = p.at("edge_id").get<EdgeId>();
      const VertexId head = p.at("head").get<VertexId>();
      if (!net.contains(v) || e >= net.num_edges()) throw ValidationError("parent entry out of range");
      const Edge& edge = net.edge(e);
      if (edge.a == v && edge.b == head)
        forest.set_parent(v, {e, true});
      else if (edge.b == v && edge.a == head)
        forest.set_parent(v, {e, false});
      else
        throw ValidationError("parent edge " + std::to_string(e) + " does not join v and head");
    }
    if (auto err = check_forest(net, forest)) throw ValidationError("invalid forest: " + *err);
    return forest;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad forest JSON: ") + e.what());
  }
}

std::string forest_to_dot(const Network& net, const OrientedForest& forest) {
  std::ostringstream out;
  out << "digraph F {\n";
  for (VertexId v : forest.members()) {
    out << "  " << v << (forest.parent(v) ? "" : " [shape=doublecircle]") << ";\n";
  }
  for (VertexId v : forest.members()) {
    const auto& p = forest.parent(v);
    if (p) out << "  " << v << " -> " << net.head(*p) << " [label=\"" << p->id << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

Json report_to_json(const TestReport& report) {
  Json j{{"test", report.test}, {"pass", report.pass}};
  // JSON has no infinities; non-finite values are written as null.
  j["statistic"] = std::isfinite(report.statistic) ? Json(report.statistic) : Json(nullptr);
  j["p_value"] = std::isfinite(report.p_value) ? Json(report.p_value) : Json(nullptr);
  if (!report.detail.empty()) j["detail"] = report.detail;
  return j;
}

}  // namespace iab
