#pragma once

// Brute-force switched-capacitor network: floating nodes joined by capacitors to each other
// and to ideal voltage sources. Switching events move capacitor terminals between sources;
// node voltages follow from charge conservation and the charge every source delivers is
// counted plate by plate.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sarsim {

class ChargeNetwork {
 public:
  struct Terminal {
    bool is_node;
    int index;
  };
  static Terminal node(int i) { return {true, i}; }
  static Terminal source(int i) { return {false, i}; }

  struct Move {
    int cap;
    int source;
  };

  struct EventResult {
    std::vector<double> charge;  // C delivered by each source
    double energy = 0;           // J, sum of V_s * Q_s over sources with counted energy
  };

  explicit ChargeNetwork(int nodes) : node_v_(static_cast<std::size_t>(nodes), 0.0) {
    add_source(0.0);  // source 0 is ground
  }

  int add_source(double volts, bool counted = true) {
    sources_.push_back({volts, counted});
    return static_cast<int>(sources_.size()) - 1;
  }

  int add_cap(double c, Terminal a, Terminal b) {
    caps_.push_back({c, a, b});
    return static_cast<int>(caps_.size()) - 1;
  }

  int nodes() const { return static_cast<int>(node_v_.size()); }
  double node_voltage(int i) const { return node_v_.at(static_cast<std::size_t>(i)); }
  double source_voltage(int s) const { return sources_.at(static_cast<std::size_t>(s)).volts; }

  // Initial condition (e.g. the sampled input) before any event.
  void set_node_voltage(int i, double v) { node_v_.at(static_cast<std::size_t>(i)) = v; }

  // Moves the 'b' terminal of each listed capacitor to a new source, redistributes charge
  // and returns the charge drawn from every source.
  EventResult apply(const std::vector<Move>& moves) {
    const std::vector<double> q = node_charges();
    const std::vector<Cap> before = caps_;
    for (const auto& m : moves) caps_.at(static_cast<std::size_t>(m.cap)).b = source(m.source);
    solve(q);

    EventResult r;
    r.charge.assign(sources_.size(), 0.0);
    const auto vb = [&](const Cap& c, const std::vector<double>& nv) { return voltage(c.b, nv); };
    for (std::size_t k = 0; k < caps_.size(); ++k) {
      const Cap& now = caps_[k];
      if (now.b.is_node) continue;
      // charge on the source-side plate, after minus before
      const double q_after = now.c * (vb(now, node_v_) - voltage(now.a, node_v_));
      const double q_before = before[k].c * (vb(before[k], prev_v_) - voltage(before[k].a, prev_v_));
      r.charge[static_cast<std::size_t>(now.b.index)] += q_after - q_before;
    }
    for (std::size_t s = 0; s < sources_.size(); ++s)
      if (sources_[s].counted) r.energy += sources_[s].volts * r.charge[s];
    return r;
  }

 private:
  struct Cap {
    double c;
    Terminal a;
    Terminal b;
  };
  struct Source {
    double volts;
    bool counted;
  };

  double voltage(Terminal t, const std::vector<double>& nv) const {
    return t.is_node ? nv[static_cast<std::size_t>(t.index)] : sources_[static_cast<std::size_t>(t.index)].volts;
  }

  std::vector<double> node_charges() const {
    std::vector<double> q(node_v_.size(), 0.0);
    for (const auto& c : caps_) {
      const double va = voltage(c.a, node_v_), vb = voltage(c.b, node_v_);
      if (c.a.is_node) q[static_cast<std::size_t>(c.a.index)] += c.c * (va - vb);
      if (c.b.is_node) q[static_cast<std::size_t>(c.b.index)] += c.c * (vb - va);
    }
    return q;
  }

  // Nodal equations K v = q + sum C * V_source, dense Gaussian elimination.
  void solve(const std::vector<double>& q) {
    const std::size_t n = node_v_.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) a[i][n] = q[i];
    const auto stamp = [&](Terminal x, Terminal y, double c) {
      if (!x.is_node) return;
      const auto i = static_cast<std::size_t>(x.index);
      a[i][i] += c;
      if (y.is_node)
        a[i][static_cast<std::size_t>(y.index)] -= c;
      else
        a[i][n] += c * sources_[static_cast<std::size_t>(y.index)].volts;
    };
    for (const auto& c : caps_) {
      stamp(c.a, c.b, c.c);
      stamp(c.b, c.a, c.c);
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
      if (a[piv][col] == 0.0) throw std::runtime_error("ChargeNetwork: floating node without capacitance");
      std::swap(a[col], a[piv]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col) continue;
        const double f = a[r][col] / a[col][col];
        for (std::size_t k = col; k <= n; ++k) a[r][k] -= f * a[col][k];
      }
    }
    prev_v_ = node_v_;
    for (std::size_t i = 0; i < n; ++i) node_v_[i] = a[i][n] / a[i][i];
  }

  std::vector<double> node_v_;
  std::vector<double> prev_v_;
  std::vector<Source> sources_;
  std::vector<Cap> caps_;
};

}  // namespace sarsim
