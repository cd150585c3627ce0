#include "pcf/diagnostics.hpp"
#include "pcf/dynamics.hpp"
#include "pcf/errors.hpp"
#include "pcf/evolution.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pcf;

namespace {

SolitonParams interacting(double eps = 0.01) {
    SolitonParams p;
    p.epsilon = eps;
    p.theta = {BumpFamily::quartic_cosine, 8.5, 1.4, 1.0};
    p.sigma = {BumpFamily::quartic_cosine, 8.5, 1.4, 1.0};
    return p;
}

PerturbationState random_state(const SolitonParams& p, const Grid1D& g, unsigned seed, double amp = 0.02) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    PerturbationState q;
    q.params = p;
    for (auto* f : q.fields()) {
        f->resize(static_cast<std::size_t>(g.n));
        for (double& v : *f) v = u(rng);
    }
    return q;
}

PerturbationState zero_state(const SolitonParams& p, const Grid1D& g) {
    PerturbationState q;
    q.params = p;
    for (auto* f : q.fields()) f->assign(static_cast<std::size_t>(g.n), 0.0);
    return q;
}

PerturbationState packet(const SolitonParams& p, const Grid1D& g, double scale) {
    PerturbationState q = zero_state(p, g);
    const BumpSpec b{BumpFamily::quartic_cosine, -1.0, 4.0, scale};
    for (int i = 0; i < g.n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        q.z[k] = bump_eval(b, g.x(i)).value;
        q.s[k] = 0.5 * bump_eval(b, g.x(i) + 0.5).value;
        q.w[k] = 0.3 * bump_eval(b, g.x(i)).d1;
    }
    return q;
}

} // namespace

TEST_CASE("densities: constant full state and a pointwise value") {
    const Grid1D g = make_grid(-5, 5, 0.1);
    FullState y;
    y.lambda.assign(static_cast<std::size_t>(g.n), 1.0);
    y.pi.assign(static_cast<std::size_t>(g.n), 0.0);
    y.phi.assign(static_cast<std::size_t>(g.n), 0.2);
    y.psi.assign(static_cast<std::size_t>(g.n), 0.0);
    DensityFields d = densities_full(y, g);
    for (std::size_t i = 0; i < d.e.size(); ++i) {
        CHECK(d.e[i] == 0.0);
        CHECK(d.p[i] == 0.0);
    }
    y.pi[40] = 1.0;
    d = densities_full(y, g);
    CHECK(d.e[40] == doctest::Approx(0.5));
}

TEST_CASE("densities: pointwise structure on random states") {
    const SolitonParams p = interacting();
    const Grid1D g = make_grid(-20, 20, 1.0 / 16);
    for (unsigned seed : {1u, 2u, 3u}) {
        const PerturbationState q = random_state(p, g, seed);
        const DensityFields d = densities_perturbation(q, g, sample_soliton(p, g, 0.0));
        for (std::size_t i = 0; i < d.ehat.size(); ++i) {
            CHECK(d.ehat[i] >= 0.0);
            CHECK(std::abs(d.phat[i]) <= d.ehat[i] * (1 + 1e-14));
            CHECK(std::abs(d.p[i]) <= d.e[i] * (1 + 1e-14));
        }
    }
}

TEST_CASE("densities: zero perturbation and flat soliton") {
    const SolitonParams p = interacting();
    const Grid1D g = make_grid(-20, 20, 1.0 / 16);
    const DensityFields z = densities_perturbation(zero_state(p, g), g, sample_soliton(p, g, 0.5));
    for (std::size_t i = 0; i < z.ehat.size(); ++i) {
        CHECK(z.ehat[i] == 0.0);
        CHECK(z.phat[i] == 0.0);
        CHECK(z.Fe[i] == 0.0);
        CHECK(z.Fp[i] == 0.0);
    }
    const SolitonParams flat = interacting(0.0);
    const DensityFields f = densities_perturbation(random_state(flat, g, 5), g, sample_soliton(flat, g, 0.0));
    for (std::size_t i = 0; i < f.Fe.size(); ++i) {
        CHECK(f.Fe[i] == 0.0);
        CHECK(f.Fp[i] == 0.0);
    }
}

TEST_CASE("totals: crossed integral vanishes for left-moving data") {
    const SolitonParams p = interacting();
    const Grid1D g = make_grid(-20, 20, 1.0 / 16);
    const SolitonField f = sample_soliton(p, g, 0.0);
    CHECK(totals(zero_state(p, g), g, f).crossed == 0.0);
    PerturbationState q = packet(p, g, 0.01);
    q.w = d0(q.z, g.dx);
    q.m = d0(q.s, g.dx);
    CHECK(totals(q, g, f).crossed == 0.0);
}

TEST_CASE("exterior energy: region identity at t = 0 and empty region") {
    const SolitonParams p = interacting();
    const Grid1D g = make_grid(-20, 20, 1.0 / 16);
    const SolitonField f = sample_soliton(p, g, 0.0);
    const PerturbationState q = random_state(p, g, 9);
    const DensityFields d = densities_perturbation(q, g, f);
    double manual = 0.0;
    for (int i = 0; i < g.n; ++i)
        if (std::abs(g.x(i)) >= 3.0) manual += ((i == 0 || i == g.n - 1) ? 0.5 : 1.0) * d.ehat[static_cast<std::size_t>(i)];
    CHECK(exterior_energy(q, g, f, 3.0).value == doctest::Approx(manual * g.dx).epsilon(1e-14));
    CHECK(exterior_energy(zero_state(p, g), g, f, 3.0).value == 0.0);

    PerturbationState late = q;
    late.time = 100.0;
    const ExteriorEnergy e = exterior_energy(late, g, sample_soliton(p, g, 100.0), 200.0);
    CHECK(e.empty_region);
    CHECK(e.value == 0.0);
    CHECK_THROWS_AS(exterior_energy(q, g, f, 0.0), DomainError);
}

TEST_CASE("window: width, domain and zero state") {
    CHECK(window_width(std::exp(2.0)) == doctest::Approx(1.847264).epsilon(1e-6));
    CHECK_THROWS_AS(window_width(1.0), WindowUndefined);
    const SolitonParams p = interacting();
    const Grid1D g = make_grid(-20, 20, 1.0 / 16);
    PerturbationState q = zero_state(p, g);
    q.time = 10.0;
    CHECK(window_energy(q, g, sample_soliton(p, g, 10.0), 0.0) == 0.0);
    CHECK_THROWS_AS(window_energy(q, g, sample_soliton(p, g, 10.0), 1.0), DomainError);
    q.time = 7.9;
    CHECK_THROWS_AS(window_energy(q, g, sample_soliton(p, g, 7.9), 0.0), WindowUndefined);
}

TEST_CASE("weights and eta") {
    CHECK(weight(0.0, 0.25) == 1.0);
    CHECK(weight(1.0, 0.25) == doctest::Approx(2.378414).epsilon(1e-6));
    CHECK_THROWS_AS(validate_eta(0.5), DomainError);
    CHECK_THROWS_AS(validate_eta(0.0), DomainError);
    try {
        validate_eta(0.5);
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("0 < eta < 1/3") != std::string::npos);
    }
}

TEST_CASE("weighted norms: zero state, scaling and initial identity") {
    const SolitonParams p = interacting();
    const Grid1D g = make_grid(-20, 20, 1.0 / 32);
    const WeightedNorms z = weighted_norms(zero_state(p, g), g, 0.25);
    CHECK(z.surface_total() == 0.0);
    CHECK(weighted_initial_norm(zero_state(p, g), g, 0.25) == 0.0);

    const PerturbationState a = packet(p, g, 0.01);
    const PerturbationState b = packet(p, g, 0.03);
    CHECK(weighted_initial_norm(b, g, 0.25) == doctest::Approx(9.0 * weighted_initial_norm(a, g, 0.25)).epsilon(1e-12));

    // At t = 0, u = -x/2 and ubar = x/2: the surface norms are the x-weighted
    // norm with the weight's argument halved, up to the discrete L/Lbar split.
    const WeightedNorms n = weighted_norms(a, g, 0.25);
    CHECK(n.E0 + n.Ebar0 + n.E1 + n.Ebar1 ==
          doctest::Approx(2.0 * weighted_initial_norm(a, g, 0.25, 2.0)).epsilon(1e-10));
}

TEST_CASE("flux accumulator: zero data and nonnegative growth") {
    const SolitonParams p = interacting();
    const Grid1D g = make_grid(-20, 20, 1.0 / 16);
    SolitonCache cache(p, g);
    PerturbationState q = packet(p, g, 0.01);
    FluxAccumulator acc(g, 0.25, 0.0);
    acc.start(q);
    WeightedNorms n;
    acc.fill(n);
    CHECK(n.F0 == 0.0);
    double prev = 0.0;
    for (int k = 0; k < 20; ++k) {
        q = step(q, g, g.dt(), cache);
        acc.advance(q);
        acc.fill(n);
        CHECK(n.F0 >= prev);
        prev = n.F0;
    }
    CHECK(n.F0 > 0.0);
    CHECK(n.Fbar1 >= 0.0);
}

TEST_CASE("cutoffs: bounds and monotonicity") {
    const VirialCutoffs c = VirialCutoffs::diamond(5.0, 1.0, 1.0);
    for (double s = -10.0; s <= 10.0; s += 0.01) {
        const double a = c.chi1.value(s), b = c.chi2.value(s);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        CHECK(c.chi1.derivative(s) <= 0.0);
        CHECK(c.chi2.derivative(s) >= 0.0);
    }
    CHECK(c.chi1.value(4.9) == 1.0);
    CHECK(c.chi1.value(6.1) == 0.0);
    CHECK(c.chi2.value(-6.1) == 0.0);
    CHECK(c.chi2.value(-4.9) == 1.0);
    const VirialCutoffs u = VirialCutoffs::unit();
    CHECK(u.chi1.value(1e6) == 1.0);
    CHECK(u.chi2.derivative(-3.0) == 0.0);
}

TEST_CASE("virial report: history, zero state and unit-cutoff reduction") {
    const SolitonParams p = interacting();
    const Grid1D g = make_grid(-25, 25, 1.0 / 16);
    SolitonCache cache(p, g);
    TrajectoryWindow few;
    CHECK_THROWS_AS(virial_report(few, g, VirialCutoffs::unit()), InsufficientHistory);

    auto window_of = [&](PerturbationState q0) {
        std::vector<PerturbationState> lv{q0};
        lv.push_back(step(lv[0], g, g.dt(), cache));
        lv.push_back(step(lv[1], g, g.dt(), cache));
        std::vector<SolitonField> fs;
        for (const auto& s : lv) fs.push_back(sample_soliton(p, g, s.time));
        return std::make_pair(lv, fs);
    };

    auto [zl, zf] = window_of(zero_state(p, g));
    TrajectoryWindow zw{{&zl[0], &zl[1], &zl[2]}, {&zf[0], &zf[1], &zf[2]}, 1};
    const VirialReport zr = virial_report(zw, g, VirialCutoffs::diamond(10.0));
    CHECK(zr.max_norm() == 0.0);
    CHECK(zr.integrated_e == 0.0);

    PerturbationState q = packet(p, g, 0.01);
    auto [l, f] = window_of(q);
    TrajectoryWindow w{{&l[0], &l[1], &l[2]}, {&f[0], &f[1], &f[2]}, 1};
    const VirialReport r = virial_report(w, g, VirialCutoffs::unit(0.7));
    CHECK(std::abs(r.integrated_e - r.reduced_e) <= 1e-10);
    CHECK(std::abs(r.integrated_p - r.reduced_p) <= 1e-10);
}

TEST_CASE("virial sources: printed forms fail the local balance") {
    const SolitonParams p = interacting();
    const Grid1D g = make_grid(-20, 20, 1.0 / 16);
    const PerturbationState q = random_state(p, g, 4);
    const SolitonField f = sample_soliton(p, g, 0.5);
    const DensityFields d = densities_perturbation(q, g, f);
    std::vector<double> Fe, Fp;
    virial_sources_printed(q, g, f, Fe, Fp);
    double diff = 0.0;
    for (std::size_t i = 0; i < Fe.size(); ++i) diff = std::max({diff, std::abs(Fe[i] - d.Fe[i]), std::abs(Fp[i] - d.Fp[i])});
    CHECK(diff > 1e-8);
}

TEST_CASE("decay monitor: zero state, homogeneity and delta") {
    const SolitonParams p = interacting();
    const Grid1D g = make_grid(-20, 20, 1.0 / 16);
    CHECK(pointwise_decay_monitor(zero_state(p, g), g, 0.25, 0.01).max() == 0.0);
    const double a = pointwise_decay_monitor(packet(p, g, 0.01), g, 0.25, 0.01).max();
    const double b = pointwise_decay_monitor(packet(p, g, 0.02), g, 0.25, 0.02).max();
    CHECK(a == doctest::Approx(b).epsilon(1e-13));
    CHECK_THROWS_AS(pointwise_decay_monitor(zero_state(p, g), g, 0.25, 0.0), DomainError);
}

TEST_CASE("sinh bounds: flat background constants") {
    const SolitonParams p = interacting(0.0);
    const Grid1D g = make_grid(-10, 10, 1.0 / 8);
    const SinhBounds b = sinh_bounds_monitor(zero_state(p, g), g, sample_soliton(p, g, 0.0));
    CHECK(b.sinh_min == doctest::Approx(0.326039).epsilon(1e-6));
    CHECK(b.sinh_max == b.sinh_min);
    CHECK(b.cosh_min == doctest::Approx(1.051809).epsilon(1e-6));
    CHECK(b.cosh_min >= 1.0);
}

TEST_CASE("record: all perturbation diagnostics vanish for zero data on a flat background") {
    const SolitonParams p = interacting(0.0);
    const Grid1D g = make_grid(-20, 20, 1.0 / 16);
    EvolutionSettings s;
    s.t_end = 9.0;
    s.cadence = 64;
    int n = 0;
    evolve(zero_state(p, g), g, s, [&](const DiagnosticsRecord& r, const Snapshot&) {
        ++n;
        CHECK(r.E_total == 0.0);
        CHECK(r.crossed == 0.0);
        CHECK(r.norms.surface_total() == 0.0);
        CHECK(r.norms.F1 == 0.0);
        CHECK(r.decay_ratio == 0.0);
        CHECK((r.window_v == 0.0 || std::isnan(r.window_v)));
        CHECK((r.virial_max == 0.0 || std::isnan(r.virial_max)));
    });
    CHECK(n >= 3);
}
