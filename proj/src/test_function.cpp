#include "enskog/test_function.hpp"

#include <cmath>
#include <string>

namespace enskog::test_functions {

TestFunction constant(double c) {
  return {"constant(" + std::to_string(c) + ")",
          [c](const PhasePoint&) { return c; }};
}

TestFunction coordinate(int index) {
  if (index < 0 || index > 5) {
    throw InvalidArgumentError("coordinate index must be in 0..5");
  }
  return {"coordinate(" + std::to_string(index) + ")",
          [index](const PhasePoint& z) {
            return index < 3 ? z.x[index] : z.v[index - 3];
          }};
}

TestFunction gaussian(const Vec3& x0, const Vec3& v0, double width) {
  if (width <= 0.0) throw InvalidArgumentError("gaussian width must be > 0");
  const double inv = 1.0 / (2.0 * width * width);
  return {"gaussian", [=](const PhasePoint& z) {
            const double q = (z.x - x0).squaredNorm() + (z.v - v0).squaredNorm();
            return std::exp(-q * inv);
          }};
}

TestFunction bump(const Vec3& x0, const Vec3& v0, double radius) {
  if (radius <= 0.0) throw InvalidArgumentError("bump radius must be > 0");
  const double r2 = radius * radius;
  return {"bump", [=](const PhasePoint& z) {
            const double q = (z.x - x0).squaredNorm() + (z.v - v0).squaredNorm();
            if (q >= r2) return 0.0;
            return std::exp(1.0 - r2 / (r2 - q));
          }};
}

TestFunction product(const TestFunction& f, const TestFunction& g) {
  return {f.name + "*" + g.name, [f = f.eval, g = g.eval](const PhasePoint& z) {
            return f(z) * g(z);
          }};
}

TestFunction linear(double alpha, const TestFunction& f, double beta,
                    const TestFunction& g) {
  return {"linear(" + f.name + "," + g.name + ")",
          [=, f = f.eval, g = g.eval](const PhasePoint& z) {
            return alpha * f(z) + beta * g(z);
          }};
}

}  // namespace enskog::test_functions
