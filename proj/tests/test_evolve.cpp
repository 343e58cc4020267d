#include <doctest.h>

#include <cmath>
#include <numbers>

#include "alphamod/evolve.hpp"
#include "alphamod/norms.hpp"
#include "oracles.hpp"

using namespace alphamod;
using std::numbers::pi;

namespace {

Field gaussian_data(const GridSpec& g, double amp = 1.0) {
  return sample(g, Gaussian{{0, 0, 0}, 1.0, {0.5, 0, 0}, amp});
}

}  // namespace

TEST_CASE("free propagator is a unitary group") {
  const GridSpec g = make_grid(1, 256, 20.0);
  const SpectralField f = to_spectral(oracle::random_bandlimited(g, 4.0, 9));
  CHECK(oracle::rel_l2(free_propagate(f, 0.0).coefficients, f.coefficients) == 0.0);
  const SpectralField a = free_propagate(f, 0.7);
  CHECK(std::abs(l2_norm(a) - l2_norm(f)) <= 1e-13 * l2_norm(f));
  CHECK(oracle::rel_l2(free_propagate(a, -0.7).coefficients, f.coefficients) <= 1e-13);
  const SpectralField b = free_propagate(free_propagate(f, 0.3), 0.4);
  CHECK(oracle::rel_l2(b.coefficients, a.coefficients) <= 1e-13);
}

TEST_CASE("free Gaussian matches the closed-form dispersed profile") {
  const GridSpec g = make_grid(1, 1024, 40.0);
  const Field u = free_propagate(sample(g, Gaussian{}), 0.5);
  std::vector<cplx> ref(g.n);
  for (std::size_t i = 0; i < g.n; ++i) ref[i] = oracle::dispersed_gaussian(position(g, i)[0], 0.5);
  CHECK(oracle::rel_l2(u.values, ref) <= 1e-8);
}

TEST_CASE("nonlinear phase step") {
  const GridSpec g = make_grid(1, 64, 4.0);
  const Field u = oracle::random_field(g, 1);
  const Field same = nonlinear_phase_step(u, 0.1, 0.0, 2);
  CHECK(oracle::rel_l2(same.values, u.values) == 0.0);
  const Field v = nonlinear_phase_step(u, 0.1, 1.3, 2);
  for (std::size_t i = 0; i < g.n; ++i) CHECK(std::abs(std::abs(v.values[i]) - std::abs(u.values[i])) <= 1e-15 * std::max(1.0, std::abs(u.values[i])));
  const cplx a(0.6, -0.3);
  Field c = sample(g, PlaneWave{{0, 0, 0}, 1.0});
  for (auto& z : c.values) z *= a;
  const Field cs = nonlinear_phase_step(c, 0.2, 1.5, 3);
  const cplx expect = a * std::exp(cplx(0.0, 1.5 * std::pow(std::norm(a), 3) * 0.2));
  for (const auto& z : cs.values) CHECK(std::abs(z - expect) <= 1e-15);
}

TEST_CASE("linear evolution equals free propagation") {
  const GridSpec g = make_grid(1, 256, 20.0);
  const Field u0 = gaussian_data(g);
  EvolutionConfig cfg;
  cfg.lambda = 0.0;
  cfg.dt = 0.01;
  cfg.t_end = 1.0;
  cfg.snapshot_stride = 100;
  const Trajectory tr = evolve(u0, cfg);
  CHECK(tr.snapshots.back().t == 1.0);
  CHECK(oracle::rel_l2(tr.snapshots.back().field.values, free_propagate(u0, 1.0).values) <= 1e-12);
}

TEST_CASE("mass is conserved and energy drift is second order") {
  const GridSpec g = make_grid(1, 256, 16.0);
  for (int kappa : {1, 3}) {
    const Field u0 = gaussian_data(g, 1.0);
    EvolutionConfig cfg;
    cfg.lambda = 1.0;
    cfg.kappa = kappa;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.snapshot_stride = 1000;
    const Trajectory tr = evolve(u0, cfg);
    const double m0 = tr.diagnostics.front().mass;
    for (const auto& d : tr.diagnostics) CHECK(std::abs(d.mass - m0) / m0 <= 1e-10);
    // Drift in energy at the final time for three step sizes.
    std::vector<double> lx, ly;
    for (double dt : {0.02, 0.01, 0.005}) {
      cfg.dt = dt;
      cfg.snapshot_stride = 100000;
      const Trajectory t2 = evolve(u0, cfg);
      const double drift = std::abs(t2.diagnostics.back().energy - t2.diagnostics.front().energy);
      lx.push_back(std::log(dt));
      ly.push_back(std::log(drift));
    }
    CHECK(oracle::slope(lx, ly) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("energy without coupling is the kinetic term and mass of a plane wave") {
  const GridSpec g = make_grid(2, 32, 3.0);
  const Field w = sample(g, PlaneWave{{0, 0, 0}, 1.0});
  CHECK(mass(w) == doctest::Approx(36.0).epsilon(1e-14));
  const Field u = sample(make_grid(1, 256, 12.0), Gaussian{});
  // ||u'||^2 = int x^2 exp(-x^2) = sqrt(pi)/2.
  CHECK(energy(u, 0.0, 1) == doctest::Approx(std::sqrt(pi) / 2.0).epsilon(1e-10));
  CHECK(std::abs(virial_momentum(u)[0]) <= 1e-14);
  CHECK_THROWS_AS(virial_momentum(w), BoundaryWarning);
}

TEST_CASE("gauge covariance") {
  const GridSpec g = make_grid(1, 128, 12.0);
  const Field u0 = gaussian_data(g, 1.2);
  EvolutionConfig cfg;
  cfg.lambda = 1.0;
  cfg.kappa = 2;
  cfg.dt = 0.01;
  cfg.t_end = 0.5;
  cfg.snapshot_stride = 1000;
  const cplx rot = std::exp(cplx(0.0, 0.9));
  Field v0 = u0;
  for (auto& z : v0.values) z *= rot;
  const Field a = evolve(u0, cfg).snapshots.back().field;
  Field b = evolve(v0, cfg).snapshots.back().field;
  for (auto& z : b.values) z /= rot;
  CHECK(oracle::rel_l2(b.values, a.values) <= 1e-13);
}

TEST_CASE("duhamel quadrature") {
  const GridSpec g = make_grid(1, 256, 20.0);
  const SpectralField gh = to_spectral(gaussian_data(g));
  const auto zero = duhamel([&](double) { return zero_spectrum(g); }, 1.0);
  CHECK(l2_norm(zero.value) == 0.0);
  // Free-wave forcing: A = t S(t) g.
  const double t = 0.8;
  const auto free = duhamel([&](double tau) { return free_propagate(gh, tau); }, t);
  SpectralField expect = free_propagate(gh, t);
  for (auto& z : expect.coefficients) z *= t;
  CHECK(oracle::rel_l2(free.value.coefficients, expect.coefficients) <= 1e-10);
  CHECK_THROWS_AS(duhamel([&](double) { return gh; }, -1.0), InvalidArgument);

  // d/dt A - i Lap A = f by central differences at three times.
  const auto xi2 = frequency_norm2(g);
  auto forcing = [&](double tau) {
    SpectralField f = gh;
    for (std::size_t i = 0; i < xi2.size(); ++i) f.coefficients[i] *= std::cos(2.0 * tau) * std::exp(-0.1 * xi2[i]);
    return f;
  };
  for (double ts : {0.3, 0.7, 1.1}) {
    const double h = 1e-4;
    const auto ap = duhamel(forcing, ts + h).value;
    const auto am = duhamel(forcing, ts - h).value;
    const auto a0 = duhamel(forcing, ts).value;
    const auto f0 = forcing(ts);
    std::vector<cplx> lhs(xi2.size());
    for (std::size_t i = 0; i < xi2.size(); ++i) {
      const cplx dt = (ap.coefficients[i] - am.coefficients[i]) / (2.0 * h);
      // Laplacian acts as -|xi|^2 on the spectral side.
      lhs[i] = dt + cplx(0.0, 1.0) * xi2[i] * a0.coefficients[i];
    }
    CHECK(oracle::rel_l2(lhs, f0.coefficients) <= 1e-4);
  }
}

TEST_CASE("picard iteration") {
  const GridSpec g = make_grid(1, 256, 8.0 * pi);
  EvolutionConfig cfg;
  cfg.lambda = 1.0;
  cfg.kappa = 3;
  cfg.t_end = 1.0;
  PicardOptions opts;
  opts.s = 0.1;
  opts.alpha = 0.5;
  const auto zero = picard_solve(zero_field(g), cfg, opts);
  CHECK(zero.converged);
  CHECK(zero.iterations == 1);
  const Field u0 = sample(g, Gaussian{});
  EvolutionConfig lin = cfg;
  lin.lambda = 0.0;
  const auto free = picard_solve(u0, lin, opts);
  CHECK(free.iterations == 1);
  CHECK(oracle::rel_l2(free.trajectory.snapshots.back().field.values, free_propagate(u0, 1.0).values) <= 1e-12);

  // Small data contracts fast.
  Field small = u0;
  const double m = modulation_norm(u0, opts.s, opts.alpha, ModulationVariant::smooth);
  for (auto& z : small.values) z *= 1e-3 / m;
  const auto res = picard_solve(small, cfg, opts);
  CHECK(res.converged);
  CHECK(res.small_data);
  REQUIRE(!res.ratios.empty());
  CHECK(res.iterations <= 4);
  for (double r : res.ratios) CHECK(r < 0.1);

  // Large data fails.
  Field big = u0;
  for (auto& z : big.values) z *= 10.0 / m;
  CHECK_THROWS_AS(picard_solve(big, cfg, opts), ContractionFailure);
}

TEST_CASE("picard solution agrees with the split-step solver") {
  const GridSpec g = make_grid(1, 256, 8.0 * pi);
  EvolutionConfig cfg;
  cfg.lambda = 1.0;
  cfg.kappa = 1;
  cfg.t_end = 0.5;
  cfg.dt = 1e-4;
  cfg.snapshot_stride = 1000000;
  PicardOptions opts;
  opts.s = 0.1;
  const Field u0 = sample(g, Gaussian{{0, 0, 0}, 1.0, {0, 0, 0}, 0.5});
  const auto res = picard_solve(u0, cfg, opts);
  const Trajectory tr = evolve(u0, cfg);
  CHECK(oracle::rel_l2(res.trajectory.snapshots.back().field.values, tr.snapshots.back().field.values) <= 1e-6);
}

TEST_CASE("scaling transform") {
  const GridSpec g = make_grid(1, 512, 16.0);
  const Field u = sample(g, Gaussian{{0, 0, 0}, 0.7, {1.0, 0, 0}});
  const Field id = scaling_transform(u, 1.0, 2, g);
  CHECK(oracle::rel_l2(id.values, u.values) == 0.0);
  for (int kappa : {1, 3}) {
    for (double sigma : {2.0, 4.0, 8.0}) {
      const Field r = scaling_transform(u, sigma, kappa);
      const double ratio = l2_norm(r) / l2_norm(u);
      CHECK(std::abs(ratio / std::pow(sigma, 1.0 / kappa - 0.5) - 1.0) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(scaling_transform(u, 3.0, 1), InvalidArgument);
  const Field wide = sample(g, PlaneWave{{0.9 * g.xi_max, 0, 0}});
  CHECK_THROWS_AS(scaling_transform(wide, 2.0, 1, g), AliasingError);
}

TEST_CASE("solve then scale agrees with scale then solve") {
  const GridSpec g = make_grid(1, 1024, 32.0);
  const Field u0 = sample(g, Gaussian{{0, 0, 0}, 1.0, {0, 0, 0}, 0.8});
  const double sigma = 2.0, t = 0.1;
  EvolutionConfig cfg;
  cfg.lambda = 1.0;
  cfg.kappa = 1;
  cfg.dt = 0.01;
  cfg.t_end = sigma * sigma * t;
  cfg.snapshot_stride = 1000000;
  const Field a = scaling_transform(evolve(u0, cfg).snapshots.back().field, sigma, cfg.kappa, g);
  EvolutionConfig cs = cfg;
  cs.dt = cfg.dt / (sigma * sigma);
  cs.t_end = t;
  const Field v0 = scaling_transform(u0, sigma, cfg.kappa, g);
  const Field b = evolve(v0, cs).snapshots.back().field;
  cs.dt /= 2.0;
  const Field b2 = evolve(v0, cs).snapshots.back().field;
  const double scheme = oracle::rel_l2(b.values, b2.values);
  CHECK(oracle::rel_l2(a.values, b.values) <= 10.0 * scheme + 1e-12);
}

TEST_CASE("focusing negative-energy data grows, defocusing stays bounded") {
  const GridSpec g = make_grid(1, 2048, 8.0 * pi);
  const double beta = 0.5;
  const double A = glassey_amplitude(1.0, 3, beta);
  CHECK(std::pow(A, 6) == doctest::Approx(16.0).epsilon(1e-12));
  const Field u0 = chirped_gaussian(g, A, beta);
  EvolutionConfig cfg;
  cfg.lambda = 1.0;
  cfg.kappa = 3;
  cfg.dt = 1e-3;
  cfg.t_end = 0.1;
  cfg.max_phase_per_step = 0.05;
  cfg.snapshot_stride = 10;
  const GlasseyResult foc = glassey_run(u0, cfg);
  CHECK(foc.initial_energy < 0.0);
  CHECK(foc.initial_virial < 0.0);
  CHECK(foc.growth >= 10.0);
  cfg.lambda = -1.0;
  cfg.t_end = 1.0;
  const GlasseyResult def = glassey_run(u0, cfg);
  CHECK(!def.stopped);
  CHECK(def.growth <= 2.0);
}
