// Small tour: Christoffel values on the interval and the disk, the maximum over the
// half-ball, and a growth-exponent fit for the square.

#include <cstdio>

#include "christoffel/asymptotics.hpp"

using namespace christoffel;

int main() {
  for (int n : {2, 5, 10}) {
    const ChristoffelEvaluator ev(Domain::interval(-1.0, 1.0), n);
    Vector x(1);
    x << 1.0;
    std::printf("interval  n=%2d  C(1) = %.12g  (expected %.12g)\n", n, ev.christoffel_at(x), (n + 1.0) * (n + 1) / 2);
  }

  const ChristoffelEvaluator disk(Domain::ball_p(2, 2.0), 6);
  Vector center = Vector::Zero(2), edge(2);
  edge << 1.0, 0.0;
  std::printf("disk      n= 6  C(0,0) = %.6g  C(1,0) = %.6g\n", disk.christoffel_at(center), disk.christoffel_at(edge));

  const ChristoffelEvaluator half_ball(Domain::half_ball(3), 8);
  const auto report = half_ball.christoffel_max();
  std::printf("half-ball n= 8  max C = %.6g at (%.3f, %.3f, %.3f), %zu candidates\n", report.value, report.argmax[0],
              report.argmax[1], report.argmax[2], report.candidates_examined);

  std::vector<int> degrees;
  for (int n = 4; n <= 16; n += 2) degrees.push_back(n);
  const auto fit = fit_sigma(Domain::cube(2), degrees);
  std::printf("square    fitted sigma = %.3f +- %.3f (closed form %.0f)\n", fit.slope, fit.half_width,
              *sigma_reference(Domain::cube(2)));
  return 0;
}
