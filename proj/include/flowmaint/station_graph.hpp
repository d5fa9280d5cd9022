#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace flowmaint {

/// The two aggregate passenger populations moving through the station.
enum class Stream { embarking = 0, disembarking = 1 };

inline constexpr std::array<Stream, 2> kStreams{Stream::embarking, Stream::disembarking};

const char* to_string(Stream s);
Stream stream_from_string(const std::string& name);

struct GraphEdge {
  std::string id;
  std::string from;
  std::string to;
};

struct StreamSpec {
  std::string source;              // single entry point of the aggregate stream
  std::vector<std::string> sinks;  // absorbing exits
};

/// Reduced directed station graph. Nodes are connection points, edges are
/// admissible aggregate transfers. Routing priors are Dirichlet concentration
/// weights keyed by edge id, per (node, stream). Immutable after construction;
/// safe to share read-only across concurrent samplers.
struct StationGraph {
  std::vector<std::string> nodes;
  std::vector<GraphEdge> edges;
  StreamSpec streams[2];  // indexed by Stream

  // (node, stream) -> { outgoing edge id -> concentration weight }
  std::map<std::pair<std::string, Stream>, std::map<std::string, double>> routing_priors;

  const StreamSpec& stream_spec(Stream s) const { return streams[static_cast<int>(s)]; }
  StreamSpec& stream_spec(Stream s) { return streams[static_cast<int>(s)]; }
};

struct Violation {
  std::string code;     // stable identifier, e.g. "cycle", "prior-arity"
  std::string message;  // human-readable, names the offending node/edge
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

class CycleError : public std::runtime_error {
 public:
  explicit CycleError(const std::string& what, std::vector<std::string> cycle_nodes)
      : std::runtime_error(what), cycle(std::move(cycle_nodes)) {}
  std::vector<std::string> cycle;
};

class InvalidGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-stream view of the graph used by the samplers: the subgraph of nodes
/// reachable from the source and co-reachable from a sink, in a deterministic
/// topological order (ties broken by label sort).
struct StreamTopology {
  Stream stream;
  std::vector<std::string> order;  // topological order of relevant nodes
  // node -> admissible outgoing edge indices into StationGraph::edges,
  // sorted by edge id
  std::map<std::string, std::vector<std::size_t>> out_edges;
  std::map<std::string, bool> is_sink;
  std::string source;
};

/// Checks every structural invariant and returns all violations found. An
/// empty report means the graph is valid for both streams.
ValidationReport validate_graph(const StationGraph& graph);

/// Deterministic topological order of the stream-relevant nodes. Throws
/// CycleError (with the offending nodes) if the stream subgraph is not a DAG.
std::vector<std::string> topological_order(const StationGraph& graph, Stream stream);

/// Builds the sampler-facing view for one stream. Throws InvalidGraph or
/// CycleError on structural problems.
StreamTopology build_stream_topology(const StationGraph& graph, Stream stream);

}  // namespace flowmaint
