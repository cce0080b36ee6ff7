#pragma once

// Test-only oracle: direct recursive evaluation of the Lin3DistFlow
// equations. Aggregates downstream flows bottom-up and propagates squared
// voltages top-down, independent of the path-intersection assembly used by
// the library.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "pumpvolt/pdn.hpp"

namespace pumpvolt::testing {

// Realized demands for one period: forecast plus error, pumps added as
// balanced loads on the present phases of their bus.
inline Eigen::MatrixXd oracle_voltages_period(const PdnNetwork& net, int t,
                                              const Eigen::VectorXd& pump_power_pu,
                                              const Eigen::VectorXd& err_pu,
                                              const CoordinateMap& coords) {
  const int nb = static_cast<int>(net.buses.size());
  Eigen::Matrix3Xd inj_p = Eigen::Matrix3Xd::Zero(3, nb);
  Eigen::Matrix3Xd inj_q = Eigen::Matrix3Xd::Zero(3, nb);
  for (int k = 0; k < nb; ++k) {
    for (int p = 0; p < 3; ++p) {
      if (!net.buses[k].phases[p]) continue;
      double rho = net.buses[k].demand_p(p, t);
      int c = coords.pair_index(k, p);
      if (c >= 0) rho += err_pu[c];
      inj_p(p, k) = rho;
      inj_q(p, k) = net.buses[k].demand_q(p, t);
    }
  }
  for (int e = 0; e < static_cast<int>(net.pumps.size()); ++e) {
    int k = net.pumps[e].bus;
    for (int p = 0; p < 3; ++p) {
      if (!net.buses[k].phases[p]) continue;
      inj_p(p, k) += pump_power_pu[e];
      inj_q(p, k) += net.pumps[e].eta * pump_power_pu[e];
    }
  }

  // children lists from the substation
  std::vector<std::vector<std::pair<int, int>>> adj(nb);
  for (int l = 0; l < static_cast<int>(net.lines.size()); ++l) {
    adj[net.lines[l].from].push_back({net.lines[l].to, l});
    adj[net.lines[l].to].push_back({net.lines[l].from, l});
  }
  std::vector<int> parent(nb, -1), parent_line(nb, -1), order;
  std::vector<bool> seen(nb, false);
  order.push_back(net.substation);
  seen[net.substation] = true;
  for (std::size_t h = 0; h < order.size(); ++h)
    for (auto [next, line] : adj[order[h]])
      if (!seen[next]) {
        seen[next] = true;
        parent[next] = order[h];
        parent_line[next] = line;
        order.push_back(next);
      }

  // P_k, Q_k: total flow entering bus k, accumulated leaf-to-root.
  Eigen::Matrix3Xd flow_p = inj_p, flow_q = inj_q;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int k = *it;
    if (parent[k] < 0) continue;
    flow_p.col(parent[k]) += flow_p.col(k);
    flow_q.col(parent[k]) += flow_q.col(k);
  }

  Eigen::MatrixXd y(3, nb);
  for (int k : order) {
    if (k == net.substation) {
      y.col(k) = net.substation_y;
      continue;
    }
    const PdnLine& line = net.lines[parent_line[k]];
    y.col(k) = y.col(parent[k]) - line.m * flow_p.col(k) - line.n * flow_q.col(k);
  }
  return y;
}

// Small random radial instance for oracle-equivalence checks.
inline PdnNetwork random_radial_network(std::mt19937_64& rng, int max_buses = 6, int periods = 3) {
  std::uniform_int_distribution<int> nb_dist(2, max_buses);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int nb = nb_dist(rng);

  PdnNetwork net;
  net.periods = periods;
  net.substation = 0;
  net.substation_y = Eigen::Vector3d::Constant(1.0 + 0.05 * unif(rng));
  net.v_min = 0.9;
  net.v_max = 1.1;
  net.s_base_va = 1.0e6;
  for (int k = 0; k < nb; ++k) {
    PdnBus bus;
    bus.id = "b" + std::to_string(k);
    for (int p = 0; p < 3; ++p) bus.phases[p] = (k == 0) || unif(rng) < 0.8;
    if (!bus.phases[0] && !bus.phases[1] && !bus.phases[2]) bus.phases[static_cast<int>(unif(rng) * 3)] = true;
    bus.demand_p = Eigen::Matrix3Xd::Zero(3, periods);
    bus.demand_q = Eigen::Matrix3Xd::Zero(3, periods);
    for (int p = 0; p < 3; ++p)
      if (bus.phases[p] && k != 0)
        for (int t = 0; t < periods; ++t) {
          bus.demand_p(p, t) = 0.1 * unif(rng);
          bus.demand_q(p, t) = 0.04 * unif(rng);
        }
    net.buses.push_back(bus);
  }
  for (int k = 1; k < nb; ++k) {
    PdnLine line;
    std::uniform_int_distribution<int> parent_dist(0, k - 1);
    line.from = parent_dist(rng);
    line.to = k;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        line.m(i, j) = (i == j ? 0.04 : 0.008) * (0.5 + unif(rng));
        line.n(i, j) = (i == j ? 0.02 : 0.006) * (0.5 + unif(rng));
      }
    net.lines.push_back(line);
  }
  int npumps = nb > 2 ? 1 + static_cast<int>(unif(rng) * 2) : 1;
  for (int e = 0; e < npumps; ++e) {
    PumpAttachment pump;
    std::uniform_int_distribution<int> bus_dist(1, nb - 1);
    pump.pump_id = "pump" + std::to_string(e);
    pump.bus = nb > 1 ? bus_dist(rng) : 0;
    pump.eta = 0.3 + 0.5 * unif(rng);
    net.pumps.push_back(pump);
  }
  return net;
}

}  // namespace pumpvolt::testing
