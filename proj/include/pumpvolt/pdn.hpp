#pragma once

// Radial three-phase power distribution network model.
//
// The network is reduced to an explicit affine map from pump powers and
// demand-forecast errors to squared voltage magnitudes: for every period t
//
//   Y_t = y0_t + S p_t + W drho_t
//
// with per-period decoupling (a perturbation at period t never moves a
// voltage at another period) and a constant substation voltage.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pumpvolt/common.hpp"

namespace pumpvolt {

struct PdnBus {
  std::string id;
  PhaseSet phases{true, true, true};
  // Real demand forecast and reactive demand, per phase and period, in
  // per-unit power. Absent phases carry zeros.
  Eigen::Matrix3Xd demand_p;
  Eigen::Matrix3Xd demand_q;
};

struct PdnLine {
  int from = -1;  // upstream bus index
  int to = -1;    // downstream bus index
  Eigen::Matrix3d m;  // voltage sensitivity to real flow, pu^2 per pu
  Eigen::Matrix3d n;  // voltage sensitivity to reactive flow, pu^2 per pu
};

struct PumpAttachment {
  std::string pump_id;
  int bus = -1;
  double eta = 0.0;  // reactive-to-real power ratio of the pump load
};

struct PdnNetwork {
  std::vector<PdnBus> buses;
  std::vector<PdnLine> lines;
  std::vector<PumpAttachment> pumps;
  int substation = 0;
  Eigen::Vector3d substation_y;  // fixed squared voltage per phase, pu^2
  double v_min = 0.95;
  double v_max = 1.05;
  int periods = 0;
  double dt_hours = 1.0;
  double s_base_va = 1.0;  // single-phase power base, W per pu

  int bus_index(const std::string& id) const {
    for (int k = 0; k < static_cast<int>(buses.size()); ++k)
      if (buses[k].id == id) return k;
    return -1;
  }
};

struct RadialCheck {
  bool ok = false;
  std::string error;  // "cycle-detected" or "disconnected-bus" when !ok
  std::vector<std::pair<int, int>> cycle_edges;
  std::vector<int> unreachable_buses;
  std::string message;
};

// The line graph must be a spanning tree rooted at the substation.
inline RadialCheck validate_radial(const PdnNetwork& net) {
  RadialCheck check;
  const int nb = static_cast<int>(net.buses.size());
  std::vector<std::vector<std::pair<int, int>>> adj(nb);  // (neighbor, line)
  for (int l = 0; l < static_cast<int>(net.lines.size()); ++l) {
    adj[net.lines[l].from].push_back({net.lines[l].to, l});
    adj[net.lines[l].to].push_back({net.lines[l].from, l});
  }
  std::vector<bool> seen(nb, false);
  std::vector<bool> used_line(net.lines.size(), false);
  std::vector<int> stack{net.substation};
  seen[net.substation] = true;
  while (!stack.empty()) {
    int k = stack.back();
    stack.pop_back();
    for (auto [nb_idx, line] : adj[k]) {
      if (used_line[line]) continue;
      used_line[line] = true;
      if (seen[nb_idx]) {
        check.error = "cycle-detected";
        check.cycle_edges.push_back({net.lines[line].from, net.lines[line].to});
      } else {
        seen[nb_idx] = true;
        stack.push_back(nb_idx);
      }
    }
  }
  if (!check.cycle_edges.empty()) {
    check.message = "cycle detected through " + std::to_string(check.cycle_edges.size()) + " edge(s)";
    return check;
  }
  for (int k = 0; k < nb; ++k)
    if (!seen[k]) check.unreachable_buses.push_back(k);
  if (!check.unreachable_buses.empty()) {
    check.error = "disconnected-bus";
    check.message = std::to_string(check.unreachable_buses.size()) + " bus(es) unreachable from the substation";
    return check;
  }
  check.ok = true;
  return check;
}

// Index map for the demand-error coordinates of one period: every present
// (bus, phase) pair except the substation, in bus file order with phases
// a,b,c inside a bus. The full horizon is period-major: coordinate
// t*nt() + pair index.
struct CoordinateMap {
  std::vector<std::pair<int, int>> pairs;  // (bus, phase)
  int periods = 0;

  int nt() const { return static_cast<int>(pairs.size()); }
  int n() const { return nt() * periods; }

  int pair_index(int bus, int phase) const {
    for (int i = 0; i < nt(); ++i)
      if (pairs[i].first == bus && pairs[i].second == phase) return i;
    return -1;
  }
  int index(int bus, int phase, int t) const {
    int i = pair_index(bus, phase);
    return i < 0 ? -1 : t * nt() + i;
  }

  static CoordinateMap build(const PdnNetwork& net) {
    CoordinateMap map;
    map.periods = net.periods;
    for (int k = 0; k < static_cast<int>(net.buses.size()); ++k) {
      if (k == net.substation) continue;
      for (int p = 0; p < kNumPhases; ++p)
        if (net.buses[k].phases[p]) map.pairs.push_back({k, p});
    }
    return map;
  }
};

// Squared voltage magnitudes as an affine function of single-phase pump
// powers (pu) and demand forecast errors (pu). Rows cover every present
// (bus, phase) pair including the substation; the per-period blocks of the
// full sensitivity tensors are identical because line parameters are
// time-invariant, so only one block of each is stored.
struct VoltageAffineMap {
  std::vector<std::pair<int, int>> rows;  // (bus, phase), substation included
  CoordinateMap coords;
  int periods = 0;
  Eigen::MatrixXd y0;         // rows x periods, pu^2
  Eigen::MatrixXd pump_sens;  // rows x pumps, pu^2 per pu (per-period block)
  Eigen::MatrixXd err_sens;   // rows x coords.nt(), pu^2 per pu (per-period block)

  int num_rows() const { return static_cast<int>(rows.size()); }

  int row_index(int bus, int phase) const {
    for (int r = 0; r < num_rows(); ++r)
      if (rows[r].first == bus && rows[r].second == phase) return r;
    return -1;
  }
};

// Assembles the affine voltage map by accumulating, for every (row, source)
// pair, the line coefficient matrices along the intersection of the two
// root paths. A demand at bus b loads every line between the substation and
// b, and the flow on a line moves the voltage of every bus below it.
inline VoltageAffineMap build_voltage_map(const PdnNetwork& net) {
  RadialCheck radial = validate_radial(net);
  if (!radial.ok) throw InputError("build_voltage_map: network is not radial: " + radial.error);
  const int nb = static_cast<int>(net.buses.size());
  for (int k = 0; k < nb; ++k) {
    const PdnBus& bus = net.buses[k];
    if (bus.demand_p.cols() != net.periods || bus.demand_q.cols() != net.periods)
      throw InputError("build_voltage_map: missing-demand at bus " + bus.id);
    if (!bus.demand_p.allFinite() || !bus.demand_q.allFinite())
      throw InputError("build_voltage_map: non-finite demand at bus " + bus.id);
  }

  // Root paths as line-index lists, via parent pointers from the substation.
  std::vector<int> parent_line(nb, -1);
  std::vector<std::vector<std::pair<int, int>>> adj(nb);
  for (int l = 0; l < static_cast<int>(net.lines.size()); ++l) {
    adj[net.lines[l].from].push_back({net.lines[l].to, l});
    adj[net.lines[l].to].push_back({net.lines[l].from, l});
  }
  std::vector<int> order{net.substation};
  std::vector<bool> seen(nb, false);
  seen[net.substation] = true;
  for (std::size_t head = 0; head < order.size(); ++head) {
    int k = order[head];
    for (auto [next, line] : adj[k]) {
      if (seen[next]) continue;
      seen[next] = true;
      parent_line[next] = line;
      order.push_back(next);
    }
  }
  std::vector<std::vector<int>> path(nb);
  for (int k : order) {
    if (k == net.substation) continue;
    const PdnLine& line = net.lines[parent_line[k]];
    int up = (line.to == k) ? line.from : line.to;
    path[k] = path[up];
    path[k].push_back(parent_line[k]);
  }

  VoltageAffineMap map;
  map.periods = net.periods;
  map.coords = CoordinateMap::build(net);
  for (int k = 0; k < nb; ++k)
    for (int p = 0; p < kNumPhases; ++p)
      if (net.buses[k].phases[p]) map.rows.push_back({k, p});

  const int nr = map.num_rows();
  const int nt = map.coords.nt();
  const int np = static_cast<int>(net.pumps.size());
  map.y0 = Eigen::MatrixXd::Zero(nr, net.periods);
  map.err_sens = Eigen::MatrixXd::Zero(nr, nt);
  map.pump_sens = Eigen::MatrixXd::Zero(nr, np);

  // Shared-path coefficient of source bus b on row bus k: sum of the line
  // matrices over path(k) intersect path(b) = path of the deeper common part.
  auto shared_coeff = [&](int row_bus, int src_bus, Eigen::Matrix3d& m_sum, Eigen::Matrix3d& n_sum) {
    m_sum.setZero();
    n_sum.setZero();
    const std::vector<int>& a = path[row_bus];
    const std::vector<int>& b = path[src_bus];
    std::size_t len = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < len && a[i] == b[i]; ++i) {
      m_sum += net.lines[a[i]].m;
      n_sum += net.lines[a[i]].n;
    }
  };

  Eigen::Matrix3d m_sum, n_sum;
  for (int r = 0; r < nr; ++r) {
    auto [bus_k, phi] = map.rows[r];
    map.y0.row(r).setConstant(net.substation_y[phi]);
    if (bus_k == net.substation) continue;

    for (int src = 0; src < nb; ++src) {
      if (src == net.substation) continue;
      shared_coeff(bus_k, src, m_sum, n_sum);
      if (m_sum.isZero(0.0) && n_sum.isZero(0.0)) continue;
      for (int psi = 0; psi < kNumPhases; ++psi) {
        if (!net.buses[src].phases[psi]) continue;
        int coord = map.coords.pair_index(src, psi);
        map.err_sens(r, coord) -= m_sum(phi, psi);
        for (int t = 0; t < net.periods; ++t)
          map.y0(r, t) -= m_sum(phi, psi) * net.buses[src].demand_p(psi, t) +
                          n_sum(phi, psi) * net.buses[src].demand_q(psi, t);
      }
    }
    for (int e = 0; e < np; ++e) {
      shared_coeff(bus_k, net.pumps[e].bus, m_sum, n_sum);
      double coeff = 0.0;
      for (int psi = 0; psi < kNumPhases; ++psi) {
        if (!net.buses[net.pumps[e].bus].phases[psi]) continue;
        coeff -= m_sum(phi, psi) + net.pumps[e].eta * n_sum(phi, psi);
      }
      map.pump_sens(r, e) = coeff;
    }
  }
  return map;
}

// Pure evaluation of the affine map. p is pumps x periods in pu single-phase
// power, err is coords.nt() x periods. Returns rows x periods of squared
// voltage magnitudes in pu^2.
inline Eigen::MatrixXd evaluate_voltages(const VoltageAffineMap& map, const Eigen::MatrixXd& p,
                                         const Eigen::MatrixXd& err) {
  if (p.rows() != map.pump_sens.cols() || p.cols() != map.periods)
    throw DimensionError("evaluate_voltages: pump power shape mismatch");
  if (err.rows() != map.coords.nt() || err.cols() != map.periods)
    throw DimensionError("evaluate_voltages: error vector shape mismatch");
  Eigen::MatrixXd y = map.y0;
  if (p.rows() > 0) y += map.pump_sens * p;
  if (err.rows() > 0) y += map.err_sens * err;
  return y;
}

}  // namespace pumpvolt
