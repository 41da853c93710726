#pragma once

#include <map>
#include <string>
#include <vector>

#include "manet/scenario/config.hpp"

namespace fixtures {

using manet::NodeId;
using manet::Position;

/// Ten-node neighborhood laid out so node 7 hears exactly 1, 2, 6, 8 and 9.
inline std::map<NodeId, Position> reference_layout() {
  return {
      {NodeId(1), {420, 300}}, {NodeId(2), {520, 420}}, {NodeId(3), {230, 300}}, {NodeId(4), {700, 440}},
      {NodeId(5), {780, 220}}, {NodeId(6), {470, 150}}, {NodeId(7), {500, 300}}, {NodeId(8), {600, 260}},
      {NodeId(9), {400, 440}}, {NodeId(10), {280, 170}},
  };
}

/// rows x cols grid, ids row-major from 1, 150 m apart (4-neighborhood at 200 m range).
inline std::map<NodeId, Position> grid(std::uint32_t rows, std::uint32_t cols, double spacing = 150.0) {
  std::map<NodeId, Position> out;
  for (std::uint32_t r = 0; r < rows; ++r)
    for (std::uint32_t c = 0; c < cols; ++c)
      out[NodeId(r * cols + c + 1)] = Position{100.0 + c * spacing, 100.0 + r * spacing};
  return out;
}

/// Static, lossless, unbounded-buffer scenario with no traffic and no adversaries.
inline manet::ScenarioConfig static_config(const std::map<NodeId, Position>& positions, double duration = 60.0) {
  manet::ScenarioConfig cfg;
  cfg.nodes = positions.size();
  cfg.positions = positions;
  cfg.max_speed = 0;
  cfg.duration_s = duration;
  cfg.flows = 0;
  cfg.base_loss_prob = 0.0;
  cfg.buffer_capacity.reset();
  cfg.detection = false;
  cfg.drain_s = 1.0;
  return cfg;
}

}  // namespace fixtures
