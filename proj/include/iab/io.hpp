#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "iab/forest.hpp"
#include "iab/network.hpp"
#include "iab/stats.hpp"
#include "iab/walks.hpp"

namespace iab {

using Json = nlohmann::json;

// One `u v c` triple per line; blank lines and `#` comments are skipped.
Network read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Network& net);

// {vertices, edges:[{a,b,c,id}], labels?}
Json network_to_json(const Network& net);
Network network_from_json(const Json& j);

std::string network_to_dot(const Network& net);

const char* to_string(WalkEnd end);
WalkEnd walk_end_from_string(const std::string& s);

// {start, steps:[{edge_id, to}], cause}
Json walk_to_json(const Walk& walk);
Walk walk_from_json(const Network& net, const Json& j);

// {roots:[...], parents:[{v, edge_id, head}]}
Json forest_to_json(const Network& net, const OrientedForest& forest);
OrientedForest forest_from_json(const Network& net, const Json& j);
std::string forest_to_dot(const Network& net, const OrientedForest& forest);

// {test, statistic, p_value, pass}
Json report_to_json(const TestReport& report);

}  // namespace iab
