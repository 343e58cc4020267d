#include <doctest.h>

#include <cmath>
#include <numbers>

#include "alphamod/bump.hpp"
#include "alphamod/construct.hpp"
#include "alphamod/decomp.hpp"
#include "alphamod/errors.hpp"
#include "alphamod/evolve.hpp"
#include "alphamod/norms.hpp"
#include "oracles.hpp"

using namespace alphamod;
using std::numbers::pi;

namespace {

// Brute-force window search: every integer k with the map value in the window.
std::vector<long> window_members(double alpha, long j) {
  const double lo = std::pow(2.0, j + 0.25), hi = std::pow(2.0, j + 0.5);
  std::vector<long> out;
  for (long k = 1; k <= static_cast<long>(hi) + 1; ++k) {
    const double h = std::pow(std::sqrt(1.0 + double(k) * double(k)), alpha / (1.0 - alpha)) * double(k);
    if (h >= lo && h < hi) out.push_back(k);
  }
  return out;
}

double rel_diff(const SpectralField& a, const SpectralField& b) {
  return oracle::rel_l2(a.coefficients, b.coefficients);
}

}  // namespace

TEST_CASE("choose_kj matches direct enumeration") {
  CHECK(choose_kj(0.0, 4) == 20);
  CHECK(choose_kj(0.0, 2) == 5);
  for (double alpha : {0.0, 0.3, 0.5, 0.8}) {
    for (long j = 0; j <= 20; ++j) {
      const auto members = window_members(alpha, j);
      if (members.empty()) {
        CHECK_THROWS_AS(choose_kj(alpha, j), WindowEmpty);
      } else {
        CHECK(choose_kj(alpha, j) == members.front());
      }
    }
  }
}

TEST_CASE("supercritical spec validation") {
  SupercriticalDataSpec spec;
  CHECK_NOTHROW(validate(spec));
  spec.s = 0.3;  // above s(kappa) = 1/6
  CHECK_THROWS_AS(validate(spec), InvalidArgument);
  spec.s = 0.0;  // below s_kappa = 1/4 - 1/6
  CHECK_THROWS_AS(validate(spec), InvalidArgument);
  spec.s = 0.12;
  spec.kappa = 2;  // kappa = 2/d
  spec.d = 1;
  CHECK_THROWS_AS(validate(spec), InvalidArgument);
}

TEST_CASE("supercritical data: empty band, linearity and scaling") {
  SupercriticalDataSpec spec;
  const GridSpec tiny = make_grid(1, 1024, 128.0);  // band below the first centre
  const SupercriticalData none = build_supercritical_u0(spec, tiny);
  CHECK(none.pieces.empty());
  CHECK(l2_norm(none.u0) == 0.0);

  const GridSpec g = make_grid(1, 16384, 128.0);
  const SupercriticalData a = build_supercritical_u0(spec, g);
  REQUIRE(a.pieces.size() == 2);
  CHECK(a.pieces[0].k == 9);
  CHECK(a.pieces[1].k == 13);
  SupercriticalDataSpec twice = spec;
  twice.eps = 2.0 * spec.eps;
  const SupercriticalData b = build_supercritical_u0(twice, g);
  CHECK(l2_norm(b.u0) == doctest::Approx(2.0 * l2_norm(a.u0)).epsilon(1e-13));
  CHECK(modulation_norm(b.u0, spec.s, spec.alpha, ModulationVariant::smooth) ==
        doctest::Approx(2.0 * modulation_norm(a.u0, spec.s, spec.alpha, ModulationVariant::smooth))
            .epsilon(1e-12));

  const Field same = scaled_data(spec, 1.0, g);
  CHECK(oracle::rel_l2(same.values, a.u0.values) == 0.0);
  for (double sigma : {2.0, 16.0, 256.0}) {
    const Field v = scaled_data(spec, sigma, g);
    const double ratio = l2_norm(v) / l2_norm(a.u0);
    CHECK(std::abs(ratio / std::pow(sigma, 1.0 / 3.0 - 0.5) - 1.0) <= 1e-10);
  }
  CHECK_THROWS_AS(scaled_data(spec, 3.0, g), InvalidArgument);
}

TEST_CASE("single piece sharp norm against per-box continuum quadrature") {
  SupercriticalDataSpec spec;
  spec.max_pieces = 1;
  const GridSpec g = make_grid(1, 16384, 128.0);
  const SupercriticalData data = build_supercritical_u0(spec, g);
  REQUIRE(data.pieces.size() == 1);
  const Piece& p = data.pieces[0];
  const double C = calibrate_c(g, spec.alpha);
  const double got = modulation_norm(data.u0, spec.s, spec.alpha, ModulationVariant::sharp, C);
  // sum over boxes c_l + [-r_l, r_l] meeting the bump of <l>^(s/(1-alpha))
  // times the L2 mass of the bump inside the box, by adaptive quadrature.
  const double a = spec.alpha / (1.0 - spec.alpha);
  double ref = 0.0;
  for (long l = -200; l <= 200; ++l) {
    const double br = std::sqrt(1.0 + double(l) * double(l));
    const double c = std::pow(br, a) * double(l), r = C * std::pow(br, a);
    const double lo = std::max(c - r, p.center - 2.0 * p.width);
    const double hi = std::min(c + r, p.center + 2.0 * p.width);
    if (lo >= hi) continue;
    const double mass = oracle::integrate(
        [&](double xi) {
          const double v = p.amplitude * bump_radial(std::abs(xi - p.center) / p.width);
          return v * v / (2.0 * pi);
        },
        lo, hi, 1e-16);
    ref += std::pow(br, spec.s / (1.0 - spec.alpha)) * std::sqrt(mass);
  }
  CHECK(std::abs(got / ref - 1.0) <= 0.1);
}

TEST_CASE("truncated modulation norms stay of size eps") {
  SupercriticalDataSpec spec;
  const GridSpec g = make_grid(1, 131072, 128.0);
  double last = 0.0;
  for (std::size_t m = 1; m <= 5; ++m) {
    spec.max_pieces = m;
    const SupercriticalData d = build_supercritical_u0(spec, g);
    REQUIRE(d.pieces.size() == m);
    const double v = modulation_norm(d.u0, spec.s, spec.alpha, ModulationVariant::smooth);
    CHECK(v > last);
    CHECK(v <= spec.eps);
    last = v;
  }
}

TEST_CASE("norm claims for the alpha = 1/2 data") {
  SupercriticalDataSpec spec;
  const GridSpec g = make_grid(1, 131072, 128.0);
  const SupercriticalData data = build_supercritical_u0(spec, g);
  REQUIRE(data.pieces.size() == 5);
  const NormClaimReport r = norm_claim_report(data, spec);
  CHECK(r.l2_scaling.pass);
  CHECK(r.l2_scaling.fit.slope == doctest::Approx(1.0 / 3.0 - 0.5).epsilon(1e-10));
  CHECK(r.modulation_scaling.fit.slope >= (1.0 - 0.5) / 3.0 - 0.1);
  CHECK(r.besov_growth.pass);
  CHECK(r.grid_max.pass);
  for (double v : r.grid_max.column("grid_max")) CHECK(v > 0.0);
  CHECK_THROWS_AS(norm_claim_report(build_supercritical_u0(spec, make_grid(1, 16384, 128.0)), spec),
                  InvalidArgument);
}

TEST_CASE("ill-posedness data") {
  IllposedDataSpec spec;
  spec.delta = 0.01;
  std::vector<double> ratios, flat;
  for (long N : {8, 16, 32, 64}) {
    spec.N = N;
    const GridSpec g = illposed_grid(spec);
    const Field v0 = build_illposed_v0(spec, g);
    // Even profile at +-k: real physical field.
    double imag = 0.0, total = 0.0;
    for (const auto& z : v0.values) {
      imag = std::max(imag, std::abs(z.imag()));
      total = std::max(total, std::abs(z));
    }
    CHECK(imag <= 1e-12 * total);
    const SpectralField vh = to_spectral(v0);
    // The profile is flat near its centre: the peak value is attained at +-N.
    double peak = 0.0;
    for (const auto& z : vh.coefficients) peak = std::max(peak, std::abs(z));
    const long q = std::lround(double(N) / g.dxi);
    CHECK(std::abs(vh.coefficients[wrap_index(q, g.n)]) == doctest::Approx(peak).epsilon(1e-12));
    CHECK(std::abs(vh.coefficients[wrap_index(-q, g.n)]) == doctest::Approx(peak).epsilon(1e-12));
    ratios.push_back(modulation_norm(v0, spec.s, spec.alpha, ModulationVariant::smooth) / spec.delta);
    IllposedDataSpec zero = spec;
    zero.s = 0.0;
    flat.push_back(modulation_norm(build_illposed_v0(zero, g), 0.0, 0.0, ModulationVariant::smooth));
  }
  CHECK(*std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end()) <= 4.0);
  CHECK(*std::max_element(flat.begin(), flat.end()) / *std::min_element(flat.begin(), flat.end()) <= 2.0);
  spec.N = 4;
  CHECK_THROWS_AS(validate(spec), InvalidArgument);
}

TEST_CASE("Taylor coefficient: zero data, short times and the two routes") {
  IllposedDataSpec spec;
  const GridSpec g = illposed_grid(spec);
  const Field v0 = build_illposed_v0(spec, g);
  CHECK(l2_norm(taylor_coefficient(zero_field(g), 0.5)) == 0.0);
  CHECK(l2_norm(taylor_coefficient_resonant(zero_field(g), 0.5)) == 0.0);
  const double a = l2_norm(taylor_coefficient_resonant(v0, 1e-4));
  const double b = l2_norm(taylor_coefficient_resonant(v0, 2e-4));
  CHECK(b / a == doctest::Approx(2.0).epsilon(1e-3));
  for (double t : {0.25, 1.0}) {
    CHECK(rel_diff(taylor_coefficient(v0, t), taylor_coefficient_resonant(v0, t)) <= 1e-10);
  }
  const GridSpec narrow = make_grid(1, 1024, g.L);
  CHECK_THROWS_AS(taylor_coefficient(build_illposed_v0(spec, narrow), 1.0), AliasingError);
}

TEST_CASE("Taylor coefficient matches the nonlinear solver for small delta") {
  IllposedDataSpec spec;
  const GridSpec g = illposed_grid(spec);
  const Field v0 = build_illposed_v0(spec, g);
  const double t = 1.0, lambda = 1.0;
  const SpectralField T = taylor_coefficient_resonant(v0, t);
  const SpectralField free = to_spectral(free_propagate(v0, t));
  EvolutionConfig cfg;
  cfg.lambda = lambda;
  cfg.kappa = 1;
  cfg.dt = 1e-3;
  cfg.t_end = t;
  cfg.snapshot_stride = 100000;
  // (u(delta) - delta S(t) v0) / delta^3 = i lambda T + O(delta^2).
  auto cubic = [&](double delta) {
    Field u0 = v0;
    for (auto& z : u0.values) z *= delta;
    const SpectralField u = to_spectral(evolve(u0, cfg).snapshots.back().field);
    SpectralField out = u;
    for (std::size_t i = 0; i < out.coefficients.size(); ++i) {
      out.coefficients[i] = (u.coefficients[i] - delta * free.coefficients[i]) / (delta * delta * delta);
    }
    return out;
  };
  const SpectralField f1 = cubic(1e-3), f2 = cubic(5e-4);
  SpectralField rich = f1, expected = T;
  for (std::size_t i = 0; i < rich.coefficients.size(); ++i) {
    rich.coefficients[i] = (4.0 * f2.coefficients[i] - f1.coefficients[i]) / 3.0;
    expected.coefficients[i] *= cplx(0.0, lambda);
  }
  CHECK(rel_diff(rich, expected) <= 0.05);
}

TEST_CASE("inflation sweep bookkeeping") {
  CHECK(inflation_exponent(-0.1, 0.0, 1, 1) == doctest::Approx(0.2));
  CHECK(inflation_exponent(-0.5, 0.5, 1, 1) == doctest::Approx(1.0));
  InflationOptions o;
  o.s = 0.1;
  o.N = {8, 16, 32, 64};
  const ExperimentReport r = inflation_sweep(o);
  CHECK(r.metrics.at("control") == 1.0);
  CHECK(r.fit.slope <= 0.0);
  CHECK(r.pass);
  for (double v : r.column("t")) CHECK(v == 1.0);
  o.N = {8, 16, 32};
  CHECK_THROWS_AS(inflation_sweep(o), InvalidArgument);
  o.N = {8, 16, 32, 64};
  o.kappa = 2;
  CHECK_THROWS_AS(inflation_sweep(o), InvalidArgument);
}
