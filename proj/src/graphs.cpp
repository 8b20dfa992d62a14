#include "hlab/graphs.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hlab {

Graph flower_graph(int petals, int samples) {
  if (petals < 1) throw std::invalid_argument("flower_graph needs at least one petal");
  if (samples < 8) throw std::invalid_argument("flower_graph needs at least 8 samples per petal");
  std::vector<Vertex> vertices{{0, Point::Zero(2)}};
  std::vector<Edge> edges;
  for (int k = 0; k < petals; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / petals;
    Point c(2);
    c << std::cos(theta), std::sin(theta);
    Edge e{k + 1, 0, 0, {}};
    for (int s = 0; s < samples; ++s) {
      const double phi = theta + std::numbers::pi + 2.0 * std::numbers::pi * s / (samples - 1);
      Point p(2);
      p << c(0) + std::cos(phi), c(1) + std::sin(phi);
      e.curve.push_back(s == 0 || s == samples - 1 ? Point(Point::Zero(2)) : p);
    }
    edges.push_back(std::move(e));
  }
  return Graph(std::move(vertices), std::move(edges), 0);
}

Graph cycle_graph(int n) {
  if (n < 1) throw std::invalid_argument("cycle_graph needs at least one vertex");
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n;
    Point p(2);
    p << std::cos(theta), std::sin(theta);
    vertices.push_back({k, p});
  }
  for (int k = 0; k < n; ++k) edges.push_back({k + 1, k, (k + 1) % n, {}});
  return Graph(std::move(vertices), std::move(edges), 0);
}

}  // namespace hlab
