// Triangle with one bad edge: solve, list the corners, print the verifiable component.
#include <iostream>

#include "verilocal/verilocal.hpp"

using namespace verilocal;

int main() {
  MeasurementGraph g{3, {{1, 2}, {2, 3}, {1, 3}}};
  ProblemInstance inst{g, 1, {{Rational(0)}, {Rational(0)}, {Rational(1)}}};

  const auto result = solve(inst);
  std::cout << "cost " << to_string(result.solution.cost) << " after " << result.pivots << " pivots\n";

  const auto corners = analyze(inst);
  std::cout << to_string(corners.classification) << ", " << corners.corners.size() << " corners\n";
  for (const auto& c : corners.corners) {
    std::cout << " x =";
    for (const auto& v : c.x) std::cout << ' ' << to_string(v);
    std::cout << '\n';
  }

  const std::vector<CornerSet> dims{corners};
  for (const auto& comp : maximal_verifiable_components(dims, g).components) {
    std::cout << "component";
    for (const int v : comp.nodes) std::cout << ' ' << v;
    std::cout << '\n';
  }
}
