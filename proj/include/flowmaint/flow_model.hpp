#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "flowmaint/rng.hpp"
#include "flowmaint/station_graph.hpp"

namespace flowmaint {

/// Expected passengers per period for each stream, t = 1..horizon.
struct DemandProfile {
  std::vector<double> rates[2];  // indexed by Stream

  std::size_t horizon() const { return rates[0].size(); }
  const std::vector<double>& rates_for(Stream s) const { return rates[static_cast<int>(s)]; }
  std::vector<double>& rates_for(Stream s) { return rates[static_cast<int>(s)]; }
};

/// Whether routing shares are redrawn every period (aleatory, default) or
/// drawn once per sample (epistemic).
enum class RoutingRedraw { per_period = 0, per_sample = 1 };

const char* to_string(RoutingRedraw mode);
RoutingRedraw routing_redraw_from_string(const std::string& name);

struct SamplerSettings {
  int samples = 1000;
  int threshold_draws = 8;
  std::uint64_t master_seed = 1;
  RoutingRedraw routing_redraw = RoutingRedraw::per_period;
};

/// One routing share draw retained for diagnostics. `period` is 1-based; in
/// per-sample mode a single entry with period = 0 stands for the whole sample.
struct RoutingDraw {
  Stream stream;
  std::string node;
  int period;
  std::vector<double> shares;  // aligned with the node's admissible out-edges (id-sorted)
};

/// One Monte Carlo sample of per-edge, per-stream, per-period flows.
class FlowField {
 public:
  FlowField() = default;
  FlowField(std::size_t n_edges, std::size_t horizon);

  std::int64_t& flow(Stream s, std::size_t edge_index, std::size_t period_ix) {
    return flows_[offset(s, edge_index, period_ix)];
  }
  std::int64_t flow(Stream s, std::size_t edge_index, std::size_t period_ix) const {
    return flows_[offset(s, edge_index, period_ix)];
  }
  /// Total flow F_e,t = embarking + disembarking.
  std::int64_t total(std::size_t edge_index, std::size_t period_ix) const {
    return flow(Stream::embarking, edge_index, period_ix) +
           flow(Stream::disembarking, edge_index, period_ix);
  }

  std::int64_t source_total(Stream s, std::size_t period_ix) const {
    return source_totals_[static_cast<int>(s)][period_ix];
  }
  std::int64_t& source_total(Stream s, std::size_t period_ix) {
    return source_totals_[static_cast<int>(s)][period_ix];
  }

  std::size_t n_edges() const { return n_edges_; }
  std::size_t horizon() const { return horizon_; }

  bool operator==(const FlowField& other) const {
    return flows_ == other.flows_ && source_totals_[0] == other.source_totals_[0] &&
           source_totals_[1] == other.source_totals_[1];
  }

  int sample_index = 0;
  std::vector<RoutingDraw> routing_draws;

 private:
  std::size_t offset(Stream s, std::size_t edge_index, std::size_t period_ix) const {
    return (static_cast<std::size_t>(s) * n_edges_ + edge_index) * horizon_ + period_ix;
  }
  std::size_t n_edges_ = 0;
  std::size_t horizon_ = 0;
  std::vector<std::int64_t> flows_;
  std::vector<std::int64_t> source_totals_[2];
};

/// Monte Carlo carrier: S independent FlowFields plus the settings that
/// produced them. Sample k always comes from sub-seed derive(master, k), so the
/// ensemble is identical regardless of thread count.
struct FlowEnsemble {
  std::vector<FlowField> fields;
  SamplerSettings settings;
  std::size_t horizon = 0;

  std::size_t size() const { return fields.size(); }
};

class EmptyEnsemble : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Draws one flow field: Poisson totals at the source, Dirichlet routing
/// shares at branching nodes, multinomial allocation down the topological
/// order. Conservation holds exactly by construction. Throws InvalidGraph if
/// validation fails.
FlowField sample_flow_field(const StationGraph& graph, const DemandProfile& demand,
                            RngEngine& rng, RoutingRedraw redraw = RoutingRedraw::per_period);

/// S independent samples; sample k is seeded with derive_seed(master_seed, k).
/// `threads` bounds worker parallelism and never affects the result.
FlowEnsemble sample_ensemble(const StationGraph& graph, const DemandProfile& demand,
                             const SamplerSettings& settings, int threads = 1);

struct EdgeFlowSummaryRow {
  std::string edge_id;
  int period;  // 1-based
  double mean;
  std::int64_t q05, q50, q95;  // nearest-rank quantiles
};

/// Per-edge, per-period mean and nearest-rank quantiles of total flow.
/// Throws EmptyEnsemble when the ensemble holds no samples.
std::vector<EdgeFlowSummaryRow> edge_flow_summary(const StationGraph& graph,
                                                  const FlowEnsemble& ensemble);

/// CSV with header: edge_id,period,mean,q05,q50,q95
void write_edge_flow_csv(std::ostream& os, const std::vector<EdgeFlowSummaryRow>& rows);

/// Nearest-rank quantile of a sorted sample: value at rank ceil(q*n), 1-based.
template <typename T>
T nearest_rank(const std::vector<T>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank: empty sample");
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  if (rank < 1) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

}  // namespace flowmaint
