#include "flowmaint/station_graph.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace flowmaint {

const char* to_string(Stream s) {
  return s == Stream::embarking ? "embarking" : "disembarking";
}

Stream stream_from_string(const std::string& name) {
  if (name == "embarking") return Stream::embarking;
  if (name == "disembarking") return Stream::disembarking;
  throw std::invalid_argument("unknown stream name: " + name);
}

namespace {

struct Adjacency {
  std::map<std::string, std::vector<std::size_t>> out;  // node -> edge indices
  std::map<std::string, std::vector<std::size_t>> in;
};

Adjacency build_adjacency(const StationGraph& g) {
  Adjacency adj;
  for (const auto& n : g.nodes) {
    adj.out[n];
    adj.in[n];
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    adj.out[g.edges[i].from].push_back(i);
    adj.in[g.edges[i].to].push_back(i);
  }
  return adj;
}

// Nodes reachable from `start` following edge direction (forward=true) or
// against it.
std::set<std::string> reach(const StationGraph& g, const Adjacency& adj,
                            const std::vector<std::string>& start, bool forward) {
  std::set<std::string> seen(start.begin(), start.end());
  std::vector<std::string> stack(start.begin(), start.end());
  while (!stack.empty()) {
    const std::string node = stack.back();
    stack.pop_back();
    const auto& edges = forward ? adj.out : adj.in;
    auto it = edges.find(node);
    if (it == edges.end()) continue;
    for (std::size_t ei : it->second) {
      const std::string& next = forward ? g.edges[ei].to : g.edges[ei].from;
      if (seen.insert(next).second) stack.push_back(next);
    }
  }
  return seen;
}

// Relevant nodes for a stream: reachable from the source and co-reachable
// from a sink. Admissible edges are those with both endpoints relevant.
std::set<std::string> relevant_nodes(const StationGraph& g, const Adjacency& adj,
                                     const StreamSpec& spec) {
  const auto fwd = reach(g, adj, {spec.source}, true);
  const auto bwd = reach(g, adj, spec.sinks, false);
  std::set<std::string> rel;
  std::set_intersection(fwd.begin(), fwd.end(), bwd.begin(), bwd.end(),
                        std::inserter(rel, rel.begin()));
  return rel;
}

std::map<std::string, std::vector<std::size_t>> admissible_out_edges(
    const StationGraph& g, const Adjacency& adj, const std::set<std::string>& relevant) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (const auto& node : relevant) out[node];
  for (const auto& node : relevant) {
    auto it = adj.out.find(node);
    if (it == adj.out.end()) continue;
    for (std::size_t ei : it->second) {
      if (relevant.count(g.edges[ei].to)) out[node].push_back(ei);
    }
    std::sort(out[node].begin(), out[node].end(), [&](std::size_t a, std::size_t b) {
      return g.edges[a].id < g.edges[b].id;
    });
  }
  return out;
}

// Kahn's algorithm with a sorted ready set; on failure returns the nodes left
// in the cyclic remainder.
bool kahn_order(const std::set<std::string>& relevant,
                const std::map<std::string, std::vector<std::size_t>>& out,
                const StationGraph& g, std::vector<std::string>& order,
                std::vector<std::string>& cyclic) {
  std::map<std::string, int> indegree;
  for (const auto& n : relevant) indegree[n] = 0;
  for (const auto& [node, edges] : out) {
    (void)node;
    for (std::size_t ei : edges) indegree[g.edges[ei].to]++;
  }
  std::set<std::string> ready;  // label-sorted tie-breaking
  for (const auto& [n, d] : indegree) {
    if (d == 0) ready.insert(n);
  }
  order.clear();
  while (!ready.empty()) {
    const std::string n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    auto it = out.find(n);
    if (it == out.end()) continue;
    for (std::size_t ei : it->second) {
      if (--indegree[g.edges[ei].to] == 0) ready.insert(g.edges[ei].to);
    }
  }
  if (order.size() != relevant.size()) {
    cyclic.clear();
    std::set<std::string> placed(order.begin(), order.end());
    for (const auto& n : relevant) {
      if (!placed.count(n)) cyclic.push_back(n);
    }
    return false;
  }
  return true;
}

void add(ValidationReport& report, std::string code, std::string message) {
  report.violations.push_back({std::move(code), std::move(message)});
}

std::string join(const std::vector<std::string>& parts) {
  std::ostringstream os;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) os << ", ";
    os << parts[i];
  }
  return os.str();
}

}  // namespace

ValidationReport validate_graph(const StationGraph& graph) {
  ValidationReport report;

  std::set<std::string> node_set;
  for (const auto& n : graph.nodes) {
    if (!node_set.insert(n).second) {
      add(report, "duplicate-node", "node label '" + n + "' appears more than once");
    }
  }
  std::set<std::string> edge_ids;
  for (const auto& e : graph.edges) {
    if (!edge_ids.insert(e.id).second) {
      add(report, "duplicate-edge", "edge id '" + e.id + "' appears more than once");
    }
    if (!node_set.count(e.from)) {
      add(report, "unknown-node", "edge '" + e.id + "' references unknown node '" + e.from + "'");
    }
    if (!node_set.count(e.to)) {
      add(report, "unknown-node", "edge '" + e.id + "' references unknown node '" + e.to + "'");
    }
  }
  if (!report.ok()) return report;  // later checks assume resolvable references

  const Adjacency adj = build_adjacency(graph);

  for (Stream s : kStreams) {
    const StreamSpec& spec = graph.stream_spec(s);
    const std::string tag = std::string(to_string(s));
    if (!node_set.count(spec.source)) {
      add(report, "unknown-node", tag + " source '" + spec.source + "' is not a graph node");
      continue;
    }
    if (spec.sinks.empty()) {
      add(report, "no-sinks", tag + " stream declares no sink nodes");
      continue;
    }
    bool sinks_ok = true;
    for (const auto& sink : spec.sinks) {
      if (!node_set.count(sink)) {
        add(report, "unknown-node", tag + " sink '" + sink + "' is not a graph node");
        sinks_ok = false;
      }
      if (sink == spec.source) {
        add(report, "source-is-sink", tag + " source '" + spec.source + "' is also a sink");
        sinks_ok = false;
      }
    }
    if (!sinks_ok) continue;

    const auto relevant = relevant_nodes(graph, adj, spec);
    if (!relevant.count(spec.source)) {
      add(report, "unreachable-sink",
          tag + " stream has no path from source '" + spec.source + "' to any sink");
      continue;
    }
    const auto out = admissible_out_edges(graph, adj, relevant);

    std::vector<std::string> order, cyclic;
    if (!kahn_order(relevant, out, graph, order, cyclic)) {
      add(report, "cycle",
          tag + " stream subgraph contains a directed cycle through nodes: " + join(cyclic));
      continue;
    }

    std::set<std::string> sink_set(spec.sinks.begin(), spec.sinks.end());
    for (const auto& node : relevant) {
      const auto& outs = out.at(node);
      if (sink_set.count(node) && !outs.empty()) {
        std::vector<std::string> ids;
        for (std::size_t ei : outs) ids.push_back(graph.edges[ei].id);
        add(report, "sink-outflow",
            tag + " sink '" + node + "' has admissible outgoing edges: " + join(ids));
      }
      const auto prior_it = graph.routing_priors.find({node, s});
      if (outs.size() >= 2) {
        if (prior_it == graph.routing_priors.end()) {
          add(report, "missing-prior",
              tag + " branching node '" + node + "' (out-degree " +
                  std::to_string(outs.size()) + ") has no routing prior");
          continue;
        }
        const auto& alpha = prior_it->second;
        if (alpha.size() != outs.size()) {
          add(report, "prior-arity",
              tag + " node '" + node + "' prior has " + std::to_string(alpha.size()) +
                  " entries but admissible out-degree is " + std::to_string(outs.size()));
        }
        for (std::size_t ei : outs) {
          const std::string& eid = graph.edges[ei].id;
          auto a = alpha.find(eid);
          if (a == alpha.end()) {
            add(report, "prior-missing-edge",
                tag + " node '" + node + "' prior lacks an entry for edge '" + eid + "'");
          } else if (!(a->second > 0.0)) {
            add(report, "prior-nonpositive",
                tag + " node '" + node + "' prior entry for edge '" + eid +
                    "' must be strictly positive");
          }
        }
        for (const auto& [eid, w] : alpha) {
          (void)w;
          const bool known = std::any_of(outs.begin(), outs.end(), [&](std::size_t ei) {
            return graph.edges[ei].id == eid;
          });
          if (!known) {
            add(report, "prior-unknown-edge",
                tag + " node '" + node + "' prior references edge '" + eid +
                    "' which is not an admissible outgoing edge");
          }
        }
      }
    }
  }
  return report;
}

std::vector<std::string> topological_order(const StationGraph& graph, Stream stream) {
  const Adjacency adj = build_adjacency(graph);
  const StreamSpec& spec = graph.stream_spec(stream);
  const auto relevant = relevant_nodes(graph, adj, spec);
  const auto out = admissible_out_edges(graph, adj, relevant);
  std::vector<std::string> order, cyclic;
  if (!kahn_order(relevant, out, graph, order, cyclic)) {
    throw CycleError(std::string(to_string(stream)) +
                         " stream subgraph contains a directed cycle through nodes: " +
                         join(cyclic),
                     cyclic);
  }
  return order;
}

StreamTopology build_stream_topology(const StationGraph& graph, Stream stream) {
  const Adjacency adj = build_adjacency(graph);
  const StreamSpec& spec = graph.stream_spec(stream);
  const auto relevant = relevant_nodes(graph, adj, spec);
  if (!relevant.count(spec.source)) {
    throw InvalidGraph(std::string(to_string(stream)) + " stream has no source-to-sink path");
  }
  StreamTopology topo;
  topo.stream = stream;
  topo.source = spec.source;
  topo.out_edges = admissible_out_edges(graph, adj, relevant);
  std::vector<std::string> cyclic;
  if (!kahn_order(relevant, topo.out_edges, graph, topo.order, cyclic)) {
    throw CycleError(std::string(to_string(stream)) +
                         " stream subgraph contains a directed cycle through nodes: " +
                         join(cyclic),
                     cyclic);
  }
  std::set<std::string> sink_set(spec.sinks.begin(), spec.sinks.end());
  for (const auto& n : topo.order) topo.is_sink[n] = sink_set.count(n) > 0;
  return topo;
}

}  // namespace flowmaint
