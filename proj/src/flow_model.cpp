#include "flowmaint/flow_model.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <sstream>
#include <thread>

namespace flowmaint {

const char* to_string(RoutingRedraw mode) {
  return mode == RoutingRedraw::per_period ? "per_period" : "per_sample";
}

RoutingRedraw routing_redraw_from_string(const std::string& name) {
  if (name == "per_period") return RoutingRedraw::per_period;
  if (name == "per_sample") return RoutingRedraw::per_sample;
  throw std::invalid_argument("unknown routing_redraw mode: " + name);
}

FlowField::FlowField(std::size_t n_edges, std::size_t horizon)
    : n_edges_(n_edges), horizon_(horizon), flows_(2 * n_edges * horizon, 0) {
  source_totals_[0].assign(horizon, 0);
  source_totals_[1].assign(horizon, 0);
}

namespace {

void throw_if_invalid(const StationGraph& graph) {
  const ValidationReport report = validate_graph(graph);
  if (report.ok()) return;
  std::ostringstream os;
  os << "invalid graph:";
  for (const auto& v : report.violations) os << " [" << v.code << "] " << v.message;
  throw InvalidGraph(os.str());
}

std::vector<double> aligned_alphas(const std::map<std::string, double>& prior,
                                   const std::vector<std::size_t>& out_edges,
                                   const std::vector<GraphEdge>& edges) {
  std::vector<double> alpha;
  alpha.reserve(out_edges.size());
  for (std::size_t ei : out_edges) alpha.push_back(prior.at(edges[ei].id));
  return alpha;
}

FlowField sample_field(const StationGraph& graph, const StreamTopology topologies[2],
                       const DemandProfile& demand, RngEngine& rng, RoutingRedraw redraw) {
  const std::size_t horizon = demand.horizon();
  if (horizon == 0) throw std::invalid_argument("demand horizon must be >= 1");
  FlowField field(graph.edges.size(), horizon);

  for (Stream s : kStreams) {
    const StreamTopology& topo = topologies[static_cast<int>(s)];
    const auto& rates = demand.rates_for(s);

    // Epistemic routing mode: one Dirichlet draw per branching node, shared
    // across all periods of this sample.
    std::map<std::string, std::vector<double>> fixed_shares;
    if (redraw == RoutingRedraw::per_sample) {
      for (const auto& node : topo.order) {
        const auto& outs = topo.out_edges.at(node);
        if (outs.size() >= 2 && !topo.is_sink.at(node)) {
          const auto alpha = aligned_alphas(graph.routing_priors.at({node, s}), outs, graph.edges);
          fixed_shares[node] = sample_dirichlet(alpha, rng);
          field.routing_draws.push_back({s, node, 0, fixed_shares[node]});
        }
      }
    }

    for (std::size_t t = 0; t < horizon; ++t) {
      const std::int64_t n_total = sample_poisson(rates[t], rng);
      field.source_total(s, t) = n_total;

      std::map<std::string, std::int64_t> inflow;
      inflow[topo.source] = n_total;

      for (const auto& node : topo.order) {
        const auto& outs = topo.out_edges.at(node);
        auto in_it = inflow.find(node);
        const std::int64_t w = in_it == inflow.end() ? 0 : in_it->second;
        if (topo.is_sink.at(node) || outs.empty()) continue;  // absorbed
        if (outs.size() == 1) {
          field.flow(s, outs[0], t) += w;
          inflow[graph.edges[outs[0]].to] += w;
          continue;
        }
        std::vector<double> shares;
        if (redraw == RoutingRedraw::per_sample) {
          shares = fixed_shares.at(node);
        } else {
          const auto alpha = aligned_alphas(graph.routing_priors.at({node, s}), outs, graph.edges);
          shares = sample_dirichlet(alpha, rng);
          field.routing_draws.push_back({s, node, static_cast<int>(t) + 1, shares});
        }
        const auto counts = sample_multinomial(w, shares, rng);
        for (std::size_t i = 0; i < outs.size(); ++i) {
          field.flow(s, outs[i], t) += counts[i];
          inflow[graph.edges[outs[i]].to] += counts[i];
        }
      }
    }
  }
  return field;
}

}  // namespace

FlowField sample_flow_field(const StationGraph& graph, const DemandProfile& demand,
                            RngEngine& rng, RoutingRedraw redraw) {
  throw_if_invalid(graph);
  const StreamTopology topologies[2] = {build_stream_topology(graph, Stream::embarking),
                                        build_stream_topology(graph, Stream::disembarking)};
  return sample_field(graph, topologies, demand, rng, redraw);
}

FlowEnsemble sample_ensemble(const StationGraph& graph, const DemandProfile& demand,
                             const SamplerSettings& settings, int threads) {
  if (settings.samples < 1) throw std::invalid_argument("sample count must be >= 1");
  throw_if_invalid(graph);
  const StreamTopology topologies[2] = {build_stream_topology(graph, Stream::embarking),
                                        build_stream_topology(graph, Stream::disembarking)};

  FlowEnsemble ensemble;
  ensemble.settings = settings;
  ensemble.horizon = demand.horizon();
  ensemble.fields.resize(static_cast<std::size_t>(settings.samples));

  const int n_workers = std::max(1, std::min(threads, settings.samples));
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int k = next.fetch_add(1);
      if (k >= settings.samples) break;
      RngEngine rng(derive_seed(settings.master_seed, static_cast<std::uint64_t>(k)));
      FlowField field = sample_field(graph, topologies, demand, rng, settings.routing_redraw);
      field.sample_index = k;
      ensemble.fields[static_cast<std::size_t>(k)] = std::move(field);
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return ensemble;
}

std::vector<EdgeFlowSummaryRow> edge_flow_summary(const StationGraph& graph,
                                                  const FlowEnsemble& ensemble) {
  if (ensemble.fields.empty()) throw EmptyEnsemble("edge_flow_summary: ensemble has no samples");
  const std::size_t horizon = ensemble.horizon;
  std::vector<EdgeFlowSummaryRow> rows;
  rows.reserve(graph.edges.size() * horizon);
  std::vector<std::int64_t> values(ensemble.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    for (std::size_t t = 0; t < horizon; ++t) {
      double sum = 0.0;
      for (std::size_t k = 0; k < ensemble.size(); ++k) {
        values[k] = ensemble.fields[k].total(e, t);
        sum += static_cast<double>(values[k]);
      }
      std::sort(values.begin(), values.end());
      rows.push_back({graph.edges[e].id, static_cast<int>(t) + 1,
                      sum / static_cast<double>(ensemble.size()), nearest_rank(values, 0.05),
                      nearest_rank(values, 0.50), nearest_rank(values, 0.95)});
    }
  }
  return rows;
}

void write_edge_flow_csv(std::ostream& os, const std::vector<EdgeFlowSummaryRow>& rows) {
  os << "edge_id,period,mean,q05,q50,q95\n";
  std::ostringstream line;
  line.precision(10);
  for (const auto& r : rows) {
    line.str("");
    line << r.edge_id << ',' << r.period << ',' << r.mean << ',' << r.q05 << ',' << r.q50 << ','
         << r.q95 << '\n';
    os << line.str();
  }
}

}  // namespace flowmaint
