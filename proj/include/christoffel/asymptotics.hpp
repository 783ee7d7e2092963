#pragma once

// Growth-exponent fits for max_x C(P_n, D, x) and lower/upper certificates built from
// explicit polynomials and inscribed ellipsoids.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "christoffel/christoffel.hpp"
#include "christoffel/common.hpp"
#include "christoffel/domain.hpp"
#include "christoffel/geometry.hpp"
#include "christoffel/gram.hpp"
#include "christoffel/orthopoly.hpp"
#include "christoffel/parallel.hpp"
#include "christoffel/sampling.hpp"
#include "christoffel/search.hpp"

namespace christoffel {

struct DegreeSample {
  int degree = 0;
  double value = 0.0;
  Vector argmax;
  bool degraded = false;
};

struct SigmaEstimate {
  std::vector<int> degrees;     // used in the fit
  std::vector<double> values;   // max C at those degrees
  double slope = 0.0;
  double intercept = 0.0;
  double half_width = 0.0;      // 95% Student-t half-width of the slope
  double r_squared = 1.0;
  std::vector<int> excluded;    // degraded or below n_min
  double tail_slope = 0.0;      // log-log slope between the two largest used degrees (diagnostic)
  std::vector<DegreeSample> samples;  // every computed degree, in order
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double r_squared = 1.0;
};

inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = x.size();
  if (k < 2 || y.size() != k) throw InsufficientDataError("least_squares: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("least_squares: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ssr += r * r;
  }
  fit.slope_se = k > 2 ? std::sqrt(ssr / static_cast<double>(k - 2) / sxx) : 0.0;
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return fit;
}

/// Log-log least squares of values against degrees, skipping degraded entries and n < n_min.
inline SigmaEstimate fit_power_law(const std::vector<DegreeSample>& samples, int n_min = 4) {
  SigmaEstimate est;
  est.samples = samples;
  std::vector<double> lx, ly;
  int last = -1;
  for (const auto& s : samples) {
    if (s.degree <= last) throw DomainError("fit_power_law: degrees must be strictly increasing");
    last = s.degree;
    if (s.degraded || s.degree < n_min || !(s.value > 0.0) || !std::isfinite(s.value)) {
      est.excluded.push_back(s.degree);
      continue;
    }
    est.degrees.push_back(s.degree);
    est.values.push_back(s.value);
    lx.push_back(std::log(static_cast<double>(s.degree)));
    ly.push_back(std::log(s.value));
  }
  if (est.degrees.size() < 5) {
    throw InsufficientDataError("fit_power_law: fewer than 5 usable degrees (" + std::to_string(est.degrees.size()) +
                                ")");
  }
  const auto fit = least_squares(lx, ly);
  est.slope = fit.slope;
  est.intercept = fit.intercept;
  est.r_squared = fit.r_squared;
  const std::size_t k = lx.size();
  est.tail_slope = (ly[k - 1] - ly[k - 2]) / (lx[k - 1] - lx[k - 2]);
  const boost::math::students_t dist(static_cast<double>(lx.size() - 2));
  est.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * fit.slope_se;
  return est;
}

/// Computes max C(P_n, D) for each degree, in order.
inline std::vector<DegreeSample> sweep_degrees(const Domain& domain, const std::vector<int>& degrees,
                                               const SearchConfig& search = {}, const GramOptions& options = {}) {
  std::vector<DegreeSample> out;
  out.reserve(degrees.size());
  for (int n : degrees) {
    const ChristoffelEvaluator evaluator(assemble_gram(domain, n, options));
    const auto report = evaluator.christoffel_max(search);
    out.push_back({n, report.value, report.argmax, report.degraded});
  }
  return out;
}

inline SigmaEstimate fit_sigma(const Domain& domain, const std::vector<int>& degrees, const SearchConfig& search = {},
                               const GramOptions& options = {}, int n_min = 4) {
  return fit_power_law(sweep_degrees(domain, degrees, search, options), n_min);
}

/// Closed-form exponent sigma for catalogue shapes when known.
inline std::optional<double> sigma_reference(const Domain& domain) {
  const int d = domain.dim();
  return domain.visit(detail::overloaded{
      [&](const shape::Interval&) -> std::optional<double> { return 2.0; },
      [&](const shape::Cube&) -> std::optional<double> { return 2.0 * d; },
      [&](const shape::BallP& b) -> std::optional<double> {
        if (d == 1) return 2.0;
        if (b.is_cube()) return 2.0 * d;
        if (b.p < 1.0) return std::nullopt;
        if (b.p <= 2.0) return 2.0 + 2.0 * (d - 1) / b.p;
        return d + 1.0;
      },
      [&](const shape::Simplex&) -> std::optional<double> { return 2.0 * d; },
      [&](const shape::SimplexUnion& u) -> std::optional<double> {
        // polygons behave like their vertices (square images); higher-dimensional
        // non-convex unions have no closed form
        if (u.convex || d == 2) return 2.0 * d;
        return std::nullopt;
      },
      [&](const shape::HalfBall&) -> std::optional<double> {
        if (d == 2) return 4.0;
        if (d == 3) return 5.0;
        return std::nullopt;
      },
      [&](const shape::ConeDisk&) -> std::optional<double> { return 6.0; },
      [&](const shape::Product& p) -> std::optional<double> {
        double total = 0.0;
        for (const auto& f : p.factors) {
          const auto s = sigma_reference(f);
          if (!s) return std::nullopt;
          total += *s;
        }
        return total;
      },
      [&](const shape::Affine& a) -> std::optional<double> { return sigma_reference(a.base); },
  });
}

struct ReferenceRow {
  std::string shape;
  int dim;
  std::string parameter;
  double sigma;
};

/// The full closed-form table: lp balls for a grid of p, polytopes, the half-disk and
/// half-ball, the quarter ball, the cone over a disk, the cylinder and rolling-ball domains.
inline std::vector<ReferenceRow> reference_table() {
  std::vector<ReferenceRow> rows;
  for (int d = 1; d <= 4; ++d) {
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
      const auto s = sigma_reference(Domain::ball_p(d, p));
      char buf[32];
      std::snprintf(buf, sizeof buf, "p=%g", p);
      rows.push_back({"ball_p", d, buf, *s});
    }
    rows.push_back({"ball_p", d, "p=inf", 2.0 * d});
    rows.push_back({"cube", d, "", 2.0 * d});
    rows.push_back({"simplex", d, "", 2.0 * d});
    rows.push_back({"rolling_ball", d, "smooth boundary", d + 1.0});
  }
  rows.push_back({"half_ball", 2, "half-disk", 4.0});
  rows.push_back({"half_ball", 3, "", 5.0});
  rows.push_back({"quarter_ball", 3, "", 6.0});
  rows.push_back({"cone_disk", 3, "", 6.0});
  rows.push_back({"product", 3, "ball_p(2,2) x interval", 5.0});
  rows.push_back({"simplex_union", 2, "star polygon", 4.0});
  return rows;
}

enum class CertificateKind { lower_tensor, lower_parallel_section, upper_inscribed_ellipsoid, upper_cone };

inline const char* certificate_name(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::lower_tensor: return "lower-tensor";
    case CertificateKind::lower_parallel_section: return "lower-parallel-section";
    case CertificateKind::upper_inscribed_ellipsoid: return "upper-inscribed-ellipsoid";
    case CertificateKind::upper_cone: return "upper-cone";
  }
  return "unknown";
}

struct Certificate {
  CertificateKind kind = CertificateKind::lower_tensor;
  Vector point;
  int degree = 0;
  // lower kinds: rigorous bound <= C(P_n, D, point); christoffel is the computed value there
  double bound = 0.0;
  double christoffel = 0.0;
  // upper kinds (and the rate path of the parallel section bound)
  double rate_exponent = 0.0;
  double det_scale = 1.0;  // |det T|^{-1}
  double rate_value = 0.0;
  Vector witness_coefficients;         // polynomial in the tensor-Legendre basis of the domain box
  std::optional<AffineMap> witness_map;
  bool premise_passed = false;
  int premise_violations = 0;
  bool bound_consistent = true;  // bound <= christoffel (lower kinds)
  std::map<std::string, double> details;
};

namespace asymptotics_detail {

/// Coefficients of f in the orthonormal tensor-Legendre basis of the box, by tensor Gauss
/// quadrature with degree+1 nodes per axis (exact for f of total degree <= degree).
template <class F>
std::vector<Quad> project(const BasisSpec& basis, F&& f) {
  if (basis.kind() != BasisKind::tensor_legendre) throw DomainError("project: needs a tensor-Legendre basis");
  std::vector<Vector> pts;
  std::vector<double> wts;
  gram_detail::tensor_gauss(basis.box(), basis.degree() + 1, pts, wts);
  const std::size_t n = basis.size();
  std::vector<Quad> coeffs(n, Quad(0));
  std::vector<Quad> psi(n), xr(static_cast<std::size_t>(basis.dim()));
  for (std::size_t g = 0; g < pts.size(); ++g) {
    for (int i = 0; i < basis.dim(); ++i) xr[static_cast<std::size_t>(i)] = pts[g][i];
    basis.evaluate<Quad>(std::span<const Quad>(xr), std::span<Quad>(psi));
    const Quad wf = Quad(wts[g]) * Quad(f(pts[g]));
    for (std::size_t k = 0; k < n; ++k) coeffs[k] += wf * psi[k];
  }
  return coeffs;
}

inline Quad evaluate_coefficients(const BasisSpec& basis, const std::vector<Quad>& coeffs, const Vector& x) {
  std::vector<Quad> xr(x.data(), x.data() + x.size());
  std::vector<Quad> psi(basis.size());
  basis.evaluate<Quad>(std::span<const Quad>(xr), std::span<Quad>(psi));
  Quad acc = 0;
  for (std::size_t k = 0; k < psi.size(); ++k) acc += coeffs[k] * psi[k];
  return acc;
}

inline Vector to_vector(const std::vector<Quad>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = to_double(v[i]);
  return out;
}

/// Points covering the domain: boundary candidates plus quasi-random interior points.
inline std::vector<Vector> covering_points(const Domain& domain, int interior = 4096) {
  const int d = domain.dim();
  const int res = d == 1 ? 8 : (d == 2 ? 512 : 2000);
  auto pts = geometry::boundary_candidates(domain, res).all();
  const Box box = domain.bounding_box();
  sampling::Halton halton(d, 3);
  int added = 0;
  for (std::uint64_t i = 1; added < interior && i < static_cast<std::uint64_t>(interior) * 64; ++i) {
    const Vector x = box.lower + (box.upper - box.lower).cwiseProduct(halton.point(i));
    if (domain.contains(x)) {
      pts.push_back(x);
      ++added;
    }
  }
  return pts;
}

inline GramOptions legendre_options(GramOptions options) {
  options.basis = BasisKind::tensor_legendre;
  return options;
}

inline void finish_lower(Certificate& cert, const GramSystem& system, const std::vector<Quad>& coeffs) {
  const Quad value = evaluate_coefficients(system.basis(), coeffs, cert.point);
  const Quad norm2 = system.quadratic_form(std::span<const Quad>(coeffs));
  cert.bound = to_double(value * value / norm2);
  cert.christoffel = to_double(system.christoffel_quad(cert.point));
  cert.bound_consistent = cert.bound <= cert.christoffel * (1.0 + 1e-9);
  cert.witness_coefficients = to_vector(coeffs);
  cert.details["witness_value"] = to_double(value);
  cert.details["witness_norm_squared"] = to_double(norm2);
}

}  // namespace asymptotics_detail

/// Lower bound at T y from the tensor product of univariate kernel polynomials
/// P_{m,1,y_i} with m = floor(n/d), transplanted to D through T^{-1}.
inline Certificate tensor_lower_certificate(const Domain& domain, const AffineMap& map, const Vector& y, int n,
                                            const GramOptions& options = {}) {
  using namespace asymptotics_detail;
  const int d = domain.dim();
  require_dim(d, map.dim(), "tensor certificate map");
  require_dim(d, y.size(), "tensor certificate point");
  if (n < d) throw DomainError("tensor_lower_certificate: need n >= d");
  for (int i = 0; i < d; ++i) {
    if (std::abs(y[i]) > 1.0) throw DomainError("tensor_lower_certificate: y must lie in [-1,1]^d");
  }
  Certificate cert;
  cert.kind = CertificateKind::lower_tensor;
  cert.degree = n;
  cert.point = map(y);
  cert.witness_map = map;
  const bool point_inside = domain.contains(cert.point, 1e-12);
  int violations = point_inside ? 0 : 1;
  for (const auto& x : covering_points(domain)) {
    const Vector z = map.apply_inverse(x);
    if (z.cwiseAbs().maxCoeff() > 1.0 + 1e-9) ++violations;
  }
  cert.premise_violations = violations;
  cert.premise_passed = violations == 0;

  const int m = n / d;
  std::vector<orthopoly::KernelPolynomial> factors;
  for (int i = 0; i < d; ++i) factors.emplace_back(m, 1, y[i]);
  auto q = [&](const Vector& x) {
    const Vector z = map.apply_inverse(x);
    double v = 1.0;
    for (int i = 0; i < d; ++i) v *= factors[static_cast<std::size_t>(i)](z[i]);
    return v;
  };
  const auto system = assemble_gram(domain, n, legendre_options(options));
  finish_lower(cert, *system, project(system->basis(), q));
  cert.details["univariate_degree"] = m;
  return cert;
}

/// Integrals of the parallel-section bound and the power-law detection near t = 0.
struct SectionRate {
  double near = 0.0;     // integral of A over [0, n^{-2}]
  double far = 0.0;      // n^{-2m} times the integral of A(t) t^{-m} beyond n^{-2}
  double rate = 0.0;     // reciprocal of near + far
  std::optional<double> lambda;
  double lambda_r_squared = 0.0;
};

inline SectionRate parallel_section_rate(const Domain& domain, const Vector& xi, int n, int m) {
  const Vector u = xi / xi.norm();
  const double width = domain.support(u) + domain.support(-u);
  auto area = [&](double t) { return geometry::parallel_section(domain, u, t).value; };
  SectionRate out;
  const double t0 = 1.0 / (static_cast<double>(n) * n);
  using boost::math::quadrature::gauss_kronrod;
  out.near = gauss_kronrod<double, 31>::integrate(area, 0.0, std::min(t0, width), 10, 1e-10);
  if (t0 < width) {
    // t = e^s removes the t^{-m} peak at the lower limit
    auto integrand = [&](double s) {
      const double t = std::exp(s);
      return area(t) * std::exp((1.0 - m) * s);
    };
    out.far = std::pow(t0, m) * gauss_kronrod<double, 31>::integrate(integrand, std::log(t0), std::log(width), 10, 1e-10);
  }
  out.rate = 1.0 / (out.near + out.far);
  std::vector<double> lx, ly;
  for (int i = 0; i < 21; ++i) {
    const double t = std::pow(10.0, -4.0 + 2.0 * i / 20.0);
    const double a = area(t);
    if (!(a > 0.0)) continue;
    lx.push_back(std::log(t));
    ly.push_back(std::log(a));
  }
  if (lx.size() >= 5) {
    const auto fit = least_squares(lx, ly);
    out.lambda_r_squared = fit.r_squared;
    if (fit.r_squared > 0.999) out.lambda = fit.slope;
  }
  return out;
}

/// Lower bound from Q(x) = P_{n,m,1}(1 - (x.xi - h)/b), P the univariate kernel polynomial,
/// evaluated at the point of D where x.xi is smallest; also reports the integral rate.
inline Certificate parallel_section_lower(const Domain& domain, const Vector& xi_in, int n, int m,
                                          const GramOptions& options = {}) {
  using namespace asymptotics_detail;
  const int d = domain.dim();
  require_dim(d, xi_in.size(), "parallel section direction");
  if (m < 1) throw DomainError("parallel_section_lower: m must be at least 1");
  if (n < 1) throw DomainError("parallel_section_lower: n must be positive");
  const Vector xi = xi_in / xi_in.norm();
  const double h = -domain.support(-xi);
  const double b = 0.5 * (domain.support(xi) - h);
  Certificate cert;
  cert.kind = CertificateKind::lower_parallel_section;
  cert.degree = n;
  // touching point: the lowest boundary candidate, pulled onto the supporting hyperplane
  Vector best;
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& p : covering_points(domain, 0)) {
    if (p.dot(xi) < lowest) {
      lowest = p.dot(xi);
      best = p;
    }
  }
  cert.point = best;
  cert.premise_passed = true;
  const orthopoly::KernelPolynomial poly(n, m, 1.0);
  auto q = [&](const Vector& x) { return poly(1.0 - (x.dot(xi) - h) / b); };
  const auto system = assemble_gram(domain, n, legendre_options(options));
  finish_lower(cert, *system, project(system->basis(), q));

  const auto rate = parallel_section_rate(domain, xi, n, m);
  cert.rate_value = rate.rate;
  cert.details["near_integral"] = rate.near;
  cert.details["far_integral"] = rate.far;
  cert.details["lambda_r_squared"] = rate.lambda_r_squared;
  cert.details["m"] = m;
  if (rate.lambda) {
    cert.details["lambda"] = *rate.lambda;
    if (*rate.lambda < m - 1) cert.rate_exponent = 2.0 * (1.0 + *rate.lambda);
  }
  return cert;
}

/// Rate record C(P_n, D, T v_n) <~ |det T|^{-1} n^{d+1} after checking T(B_2^d) inside D.
inline Certificate inscribed_upper_certificate(const Domain& domain, const AffineMap& map, int n, int samples = 10000) {
  const int d = domain.dim();
  require_dim(d, map.dim(), "inscribed ellipsoid map");
  Certificate cert;
  cert.kind = CertificateKind::upper_inscribed_ellipsoid;
  cert.degree = n;
  cert.point = map(geometry::extension_point(n, d));
  cert.witness_map = map;
  cert.premise_violations = geometry::ellipsoid_premise_violations(domain, map, samples);
  cert.premise_passed = cert.premise_violations == 0;
  cert.rate_exponent = d + 1.0;
  cert.det_scale = 1.0 / map.abs_determinant();
  cert.rate_value = cert.det_scale * std::pow(static_cast<double>(n), d + 1.0);
  return cert;
}

/// Cone-condition upper certificate on an lp ball (1 < p <= 2) at the boundary point x with
/// s = 1/p: checks the cone and the inscribed ellipsoid, and reports the rate n^{2+2s(d-1)}.
/// `contained` selects the map whose lateral scale carries the extra (alpha/3)^s factor.
inline Certificate cone_upper_certificate(const Domain& domain, const Vector& x, int n, bool contained = true,
                                          int samples = 10000) {
  if (domain.kind() != ShapeKind::ball_p) throw DomainError("cone_upper_certificate: needs an lp ball");
  const auto& ball = std::get<shape::BallP>(domain.node().shape);
  const int d = domain.dim();
  require_dim(d, x.size(), "cone certificate point");
  const auto constants = geometry::lp_cone_constants(d, ball.p);
  const double s = 1.0 / ball.p;
  const Vector inward = -geometry::lp_outward_normal(x, ball.p);
  const AffineMap map = contained ? geometry::contained_cone_map(x, inward, constants.alpha, constants.beta, s, n)
                                  : geometry::cone_inscription_map(x, inward, constants.alpha, constants.beta, s, n);
  Certificate cert;
  cert.kind = CertificateKind::upper_cone;
  cert.degree = n;
  cert.point = x;
  cert.witness_map = map;
  const int cone_bad = geometry::cone_premise_violations(domain, x, inward, constants.alpha, constants.beta, s);
  const int ellipse_bad = geometry::ellipsoid_premise_violations(domain, map, samples);
  cert.premise_violations = cone_bad + ellipse_bad;
  cert.premise_passed = cert.premise_violations == 0;
  cert.rate_exponent = 2.0 + 2.0 * s * (d - 1);
  cert.det_scale = 1.0 / map.abs_determinant();
  cert.rate_value = cert.det_scale * std::pow(static_cast<double>(n), d + 1.0);
  cert.details["alpha"] = constants.alpha;
  cert.details["beta"] = constants.beta;
  cert.details["s"] = s;
  cert.details["cone_violations"] = cone_bad;
  cert.details["ellipsoid_violations"] = ellipse_bad;
  cert.details["contained_map"] = contained ? 1.0 : 0.0;
  return cert;
}

struct ConsistencyReport {
  SigmaEstimate fit;
  std::optional<double> reference;
  double tolerance = 0.0;
  bool convex = false;
  bool within_general_bounds = true;  // d+1 - tol <= sigma <= 2d + tol for convex domains
  bool matches_reference = true;
  bool certificates_ok = true;
  std::vector<Certificate> certificates;

  bool passed() const { return within_general_bounds && matches_reference && certificates_ok; }
};

inline ConsistencyReport consistency_report(const Domain& domain, const std::vector<int>& degrees,
                                            std::vector<Certificate> certificates = {},
                                            const SearchConfig& search = {}, const GramOptions& options = {}) {
  ConsistencyReport report;
  report.fit = fit_sigma(domain, degrees, search, options);
  report.reference = sigma_reference(domain);
  report.tolerance = report.fit.half_width + 0.3;
  report.convex = domain.is_convex();
  const int d = domain.dim();
  if (report.convex) {
    report.within_general_bounds =
        report.fit.slope >= d + 1 - report.tolerance && report.fit.slope <= 2 * d + report.tolerance;
  }
  if (report.reference) report.matches_reference = std::abs(report.fit.slope - *report.reference) <= report.tolerance;
  for (const auto& c : certificates) {
    if (!c.premise_passed || !c.bound_consistent) report.certificates_ok = false;
  }
  report.certificates = std::move(certificates);
  return report;
}

}  // namespace christoffel
