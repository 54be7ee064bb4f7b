// SPDX-License-Identifier: Apache-2.0
#include "seql/feedback.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace seql {

std::vector<std::vector<std::size_t>> ff_dependencies(const Netlist& n) {
  const auto ffs = n.flip_flops();
  std::unordered_map<std::string_view, std::size_t> ff_index;
  for (std::size_t i = 0; i < ffs.size(); ++i) ff_index.emplace(ffs[i], i);

  // Support set (flip-flops only) of every combinational net, memoised in
  // topological order.
  std::unordered_map<std::string_view, std::vector<std::size_t>> support;
  for (const auto& net : n.topo_order()) {
    std::vector<std::size_t> s;
    for (const auto& in : n.gate(net).fanin) {
      if (auto it = ff_index.find(in); it != ff_index.end()) {
        s.push_back(it->second);
      } else if (auto st = support.find(in); st != support.end()) {
        s.insert(s.end(), st->second.begin(), st->second.end());
      }
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    support.emplace(net, std::move(s));
  }

  std::vector<std::vector<std::size_t>> deps(ffs.size());
  for (std::size_t i = 0; i < ffs.size(); ++i) {
    const auto& d = n.d_net(ffs[i]);
    if (auto it = ff_index.find(d); it != ff_index.end()) {
      deps[i] = {it->second};
    } else if (auto st = support.find(d); st != support.end()) {
      deps[i] = st->second;
    }
  }
  return deps;
}

std::vector<FlipFlopInfo> classify_feedback(const Netlist& n) {
  const auto ffs = n.flip_flops();
  const auto deps = ff_dependencies(n);
  const std::size_t count = ffs.size();

  // Tarjan's SCC over edges j -> i (j in deps[i]); direction does not matter
  // for component membership, so walk i -> deps[i].
  std::vector<int> index(count, -1), low(count, 0), comp(count, -1);
  std::vector<bool> on_stack(count, false);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> comp_size;
  int next_index = 0;

  std::function<void(std::size_t)> strongconnect = [&](std::size_t v) {
    index[v] = low[v] = next_index++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : deps[v]) {
      if (index[w] < 0) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      const int c = static_cast<int>(comp_size.size());
      std::size_t size = 0;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = c;
        ++size;
      } while (w != v);
      comp_size.push_back(size);
    }
  };
  for (std::size_t v = 0; v < count; ++v) {
    if (index[v] < 0) strongconnect(v);
  }

  std::vector<FlipFlopInfo> info;
  info.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const bool self_loop = std::find(deps[i].begin(), deps[i].end(), i) != deps[i].end();
    info.push_back({ffs[i], n.d_net(ffs[i]), self_loop || comp_size[comp[i]] >= 2});
  }
  return info;
}

}  // namespace seql
