"""Acceptance suite: every primary criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run with -s or -rA to see them).  The
expensive sweeps are shared through session fixtures; the full module takes
tens of minutes on a single core at the reference chain size N = 200.

Two assertions are known to fail for documented reasons (see the printed
analysis): the literal defect-prefactor comparison of criterion 6 and the
total-wipeout claim of criterion 9 are each inconsistent with the energy
normalization that the other criteria pin down.  Both are implemented
exactly as stated and left red rather than weakened; the consistent
counterparts are asserted alongside.
"""

import numpy as np
import pytest

from quenchlab import oracle
from quenchlab.correlators import (
    ab_correlators,
    pfaffian,
    spin_correlators_general,
    spin_correlators_r1,
    spin_correlators_r2,
)
from quenchlab.dynamics import (
    IntegratorParams,
    equilibrium_states,
    evolve_all_modes_checkpoints,
    evolve_mode,
    to_diagonal_basis,
    trace_distance,
    trajectory_oracle,
)
from quenchlab.entanglement import concurrence_from_spin
from quenchlab.model import NoiseSpec, QuenchProtocol, build_grid
from quenchlab.observables import defect_density, mean_purity
from quenchlab.runs import (
    SimulationConfig,
    concurrence_of_tau_fn,
    curve_along_ramp,
    defect_vs_tau,
    endpoint_metrics,
)
from quenchlab.scaling import (
    DEFAULT_EPS_C,
    SweepSeries,
    estimate_tau0,
    estimate_tau_c,
    estimate_tau_opt,
    fit_log_scaling,
    fit_power_law,
    geometric_grid,
    max_concurrence_over_tau,
)

# N = 200, ramp -30 -> +30; the sweep integrator profile is validated against
# the default profile to 1e-6 agreement in the dynamics tests
CFG = SimulationConfig(integrator=IntegratorParams.sweep_profile())

XI_LOG_SET = (0.002, 0.003, 0.004, 0.006, 0.008, 0.01)


def report(num, ok, text):
    print(f"ACCEPTANCE {num:>3} {'PASS' if ok else 'FAIL'}  {text}")


def tau_c_guess(xi: float) -> float:
    return 0.12 * (xi * xi) ** (-2.0 / 3.0)


@pytest.fixture(scope="session")
def tau0_value():
    return estimate_tau0(concurrence_of_tau_fn(CFG, 0.0), bracket=(1.0, 4.0))


@pytest.fixture(scope="session")
def xi_curves(tau0_value):
    """Endpoint C_nnn(tau) scans per noise intensity, reused by criteria 8-11."""
    curves = {}
    for xi in XI_LOG_SET:
        grid = geometric_grid(2.05, 1.45 * tau_c_guess(xi), 10)
        fn = concurrence_of_tau_fn(CFG, xi)
        vals = np.array([fn(t) for t in grid])
        curves[xi] = SweepSeries(grid, vals, fixed={"xi": xi})
    return curves


@pytest.fixture(scope="session")
def tau_c_values(xi_curves):
    out = {}
    for xi, series in xi_curves.items():
        out[xi] = estimate_tau_c(concurrence_of_tau_fn(CFG, xi), series.x)
    return out


class TestCriterion01StaticOracle:
    def test_static_equivalence(self):
        worst = 0.0
        for n in (6, 8, 10):
            grid = build_grid(n)
            for h0 in (0.2, 0.5, 1.0, 1.5, 3.0):
                corr = ab_correlators(equilibrium_states(grid, h0), r_max=3)
                s = {1: spin_correlators_r1(corr), 2: spin_correlators_r2(corr),
                     3: spin_correlators_general(corr, 3)}
                gs = oracle.ed_ground_state(n, h0)
                for r in (1, 2, 3):
                    for a, b in (("x", "x"), ("y", "y"), ("z", "z"),
                                 ("x", "y"), ("y", "x")):
                        dev = abs(getattr(s[r], a + b)
                                  - oracle.ed_spin_correlator(gs, a, b, r))
                        worst = max(worst, dev)
                worst = max(worst, abs(s[1].sz - oracle.ed_onsite_sz(gs)))
                worst = max(worst, abs(concurrence_from_spin(s[1])
                                       - oracle.ed_concurrence(gs, 1)))
                worst = max(worst, abs(concurrence_from_spin(s[2])
                                       - oracle.ed_concurrence(gs, 2)))
        ok = worst <= 1e-6
        report(1, ok, f"static pipeline vs ED, worst deviation {worst:.2e} (tol 1e-6)")
        assert ok


class TestCriterion02DynamicOracle:
    def test_ramp_equivalence(self):
        n = 8
        grid = build_grid(n)
        worst = 0.0
        for tau in (0.5, 5.0):
            prot = QuenchProtocol(h_i=-5.0, h_f=5.0, tau=tau)
            snaps = evolve_all_modes_checkpoints(
                grid, prot, NoiseSpec("white", 0.0), [prot.t_f])
            corr = ab_correlators(snaps[0], r_max=2)
            c1 = concurrence_from_spin(spin_correlators_r1(corr))
            c2 = concurrence_from_spin(spin_correlators_r2(corr))
            fin = oracle.ed_evolve(oracle.ed_ground_state(n, -5.0), prot, dt=1e-3)
            worst = max(worst, abs(c1 - oracle.ed_concurrence(fin, 1)),
                        abs(c2 - oracle.ed_concurrence(fin, 2)))
        ok = worst <= 1e-5
        report(2, ok, f"noiseless ramp vs ED at N=8, worst deviation {worst:.2e} (tol 1e-5)")
        assert ok


class TestCriterion03TrajectoryOracle:
    def test_master_equation_vs_sampling(self):
        # 16 independent 250-trajectory blocks; block means merge exactly
        # into 1000/2000/4000-trajectory ensemble means, and averaging the
        # distances of same-size ensembles estimates E[dist(M)] so the
        # 1/sqrt(M) decrease is tested above the single-sample noise.
        k = np.pi / 200
        prot = QuenchProtocol(h_i=-30.0, h_f=30.0, tau=10.0)
        noise = NoiseSpec("white", 0.01)
        master = evolve_mode(k, prot, noise, prot.t_f)
        rhos = [
            trajectory_oracle(k, prot, noise, n_traj=250, dt=1e-3,
                              seed=20240817 + 1000 * b).rho
            for b in range(16)
        ]

        def merged(group):
            return sum(rhos[i] for i in group) / len(group)

        d250 = np.mean([trace_distance(master.rho, r) for r in rhos])
        d1000 = np.mean([
            trace_distance(master.rho, merged(range(4 * j, 4 * j + 4)))
            for j in range(4)
        ])
        d2000 = trace_distance(master.rho, merged(range(8)))
        d4000 = trace_distance(master.rho, merged(range(16)))
        ok_main = d2000 <= 0.02
        scaled = [d250 * np.sqrt(250), d1000 * np.sqrt(1000), d4000 * np.sqrt(4000)]
        ok_rate = max(scaled) / min(scaled) < 4.0
        ok_mono = d250 > d1000 * 0.8 and d1000 > d4000 * 0.8
        ok = ok_main and ok_rate and ok_mono
        report(3, ok,
               f"trace distances E[d(250)]={d250:.5f}, E[d(1000)]={d1000:.5f}, "
               f"d(2000)={d2000:.5f} (tol 0.02), d(4000)={d4000:.5f}; "
               f"c*sqrt(M) spread {max(scaled)/min(scaled):.2f}")
        assert ok


class TestCriterion04Tau0:
    def test_threshold_window(self, tau0_value):
        ok = 1.9 < tau0_value < 2.0
        report(4, ok, f"tau0 = {tau0_value:.4f} (required within (1.9, 2.0))")
        assert ok


class TestCriterion05KzmConcurrence:
    def test_noiseless_sqrt_scaling(self):
        taus = geometric_grid(150.0, 1000.0, 24)
        fn = concurrence_of_tau_fn(CFG, 0.0)
        series = SweepSeries(taus, np.array([fn(t) for t in taus]))
        fit = fit_power_law(series)
        ok = abs(fit.exponent + 0.5) <= 0.05
        report(5, ok, f"noiseless C_nnn(tau) exponent {fit.exponent:.4f} "
                      f"(required -0.5 +- 0.05, r2={fit.r_squared:.4f})")
        assert ok


@pytest.fixture(scope="session")
def defect_series_noiseless():
    taus = geometric_grid(10.0, 1000.0, 24)
    return defect_vs_tau(CFG, taus, 0.0)


class TestCriterion06KzmDefects:
    def test_exponent(self, defect_series_noiseless):
        fit = fit_power_law(defect_series_noiseless)
        ok = abs(fit.exponent + 0.5) <= 0.05
        report(6, ok, f"defect exponent {fit.exponent:.4f} (required -0.5 +- 0.05)")
        assert ok

    def test_consistent_analytic_prefactor(self, defect_series_noiseless):
        # companion check in the package's own energy normalization:
        # the Gaussian integral of the implemented deep-ramp probability
        # exp(-pi sin^2(k) tau) gives n0 = 1/(pi sqrt(tau))
        s = defect_series_noiseless
        mask = s.x >= 50.0
        rel = np.abs(s.y[mask] * np.pi * np.sqrt(s.x[mask]) - 1.0)
        ok = rel.max() <= 0.10
        report(6, ok, f"defects vs 1/(pi sqrt(tau)) for tau >= 50: "
                      f"max rel dev {rel.max():.3f} (tol 0.10)")
        assert ok

    def test_literal_quoted_prefactor(self, defect_series_noiseless):
        # literal criterion: agreement with 1/(2 pi sqrt(tau)) within 10%.
        # That prefactor follows from the quoted exp(-4 pi sin^2(k) tau)
        # convention, which is inconsistent with the normalization fixed by
        # tau0 and tau_c (criteria 4 and 8); measured n0 = 1/(pi sqrt(tau)),
        # so this assertion fails by a factor of ~2.  Implemented as stated
        # and left red deliberately; see the decisions ledger.
        s = defect_series_noiseless
        mask = s.x >= 50.0
        rel = np.abs(s.y[mask] * 2.0 * np.pi * np.sqrt(s.x[mask]) - 1.0)
        ok = rel.max() <= 0.10
        report(6, ok, f"[literal] defects vs 1/(2 pi sqrt(tau)): max rel dev "
                      f"{rel.max():.3f} (tol 0.10) -- known spec/source "
                      f"normalization conflict, expected FAIL")
        assert ok


class TestCriterion07AntiKibbleZurek:
    def test_defects_increase_with_tau(self):
        vals = [endpoint_metrics(CFG, t, 0.01).defect for t in (200.0, 400.0, 800.0)]
        ok = vals[0] < vals[1] < vals[2]
        report(7, ok, f"AKZ regime at xi=0.01: n(200,400,800) = "
                      f"{vals[0]:.4f}, {vals[1]:.4f}, {vals[2]:.4f} (increasing)")
        assert ok

    @staticmethod
    def _tau_opt(xi: float) -> float:
        guess = (1.0 / (4.0 * np.pi * xi * xi)) ** (2.0 / 3.0)
        taus = guess * np.geomspace(0.3, 3.5, 13)
        return estimate_tau_opt(defect_vs_tau(CFG, taus, xi))

    def test_tau_opt_exponent_consistent_range(self):
        # companion check on intensities whose optima lie where the N = 200
        # momentum grid still resolves the Kibble-Zurek branch
        xis = (0.004, 0.008, 0.016)
        opt = [self._tau_opt(xi) for xi in xis]
        slope = np.polyfit(np.log([x * x for x in xis]), np.log(opt), 1)[0]
        ok = abs(slope + 2.0 / 3.0) <= 0.05
        report(7, ok, f"tau_opt(xi^2) exponent {slope:.4f} over xi=0.004..0.016 "
                      f"(required -2/3 +- 0.05); tau_opt = "
                      + ", ".join(f"{o:.0f}" for o in opt))
        assert ok

    def test_tau_opt_exponent_as_stated(self):
        # literal criterion: exponent over xi in {0.002, 0.004, 0.008}.
        # At N = 200 the xi = 0.002 optimum sits near tau ~ 930, where the
        # discrete momentum grid under-resolves the Kibble-Zurek branch and
        # pushes the (very shallow) minimum upward by ~25%: measured
        # tau_opt(0.002) = 927 at N = 200 vs 747 at N = 400, restoring the
        # -2/3 law with system size.  At the mandated N = 200 the slope
        # comes out near -0.74, so this assertion fails for a documented
        # finite-size reason; see the decisions ledger.
        xis = (0.002, 0.004, 0.008)
        opt = [self._tau_opt(xi) for xi in xis]
        slope = np.polyfit(np.log([x * x for x in xis]), np.log(opt), 1)[0]
        ok = abs(slope + 2.0 / 3.0) <= 0.05
        report(7, ok, f"[literal] tau_opt(xi^2) exponent {slope:.4f} over "
                      f"xi=0.002..0.008 (required -2/3 +- 0.05); tau_opt = "
                      + ", ".join(f"{o:.0f}" for o in opt)
                      + ("" if ok else " -- N=200 grid artifact at xi=0.002, "
                         "expected FAIL"))
        assert ok


class TestCriterion08TauCPowerLaw:
    def test_power_law(self, tau_c_values):
        xis = (0.004, 0.006, 0.008, 0.01)
        xi2 = np.array([x * x for x in xis])
        tc = np.array([tau_c_values[x] for x in xis])
        fit = fit_power_law(SweepSeries(xi2, tc, swept="xi2"), min_points=4)
        ok_exp = abs(fit.exponent + 0.666) <= 0.02
        ok_amp = abs(fit.amplitude - 0.12) <= 0.2 * 0.12
        ok = ok_exp and ok_amp
        report(8, ok, f"tau_c(xi^2): exponent {fit.exponent:.4f} "
                      f"(required -0.666 +- 0.02), prefactor {fit.amplitude:.4f} "
                      f"(required 0.12 +- 20%); tau_c = "
                      + ", ".join(f"{t:.1f}" for t in tc))
        assert ok


class TestCriterion09Wipeout:
    def test_xi_005_wipes_out_everywhere(self):
        # literal criterion: at xi = 0.05 the concurrence stays below eps_C
        # on the whole scan grid.  The measured dynamics keeps a small
        # entangled sliver near tau ~ 3.3 (C ~ 5e-3), exactly where the
        # quoted cutoff power law tau_c(0.05) ~ 6.5 > 2*tau0 predicts a
        # residual window, so the blanket wipeout claim contradicts the
        # power law it is quoted next to; implemented as stated and left
        # red.  See the decisions ledger.
        fn = concurrence_of_tau_fn(CFG, 0.05)
        grid = geometric_grid(2.05, 60.0, 24)
        vals = np.array([fn(t) for t in grid])
        worst = float(vals.max())
        ok = worst <= DEFAULT_EPS_C
        report(9, ok, f"xi=0.05 scan: max C_nnn = {worst:.3e} at "
                      f"tau = {grid[int(np.argmax(vals))]:.2f} (eps_C = 1e-6)"
                      + ("" if ok else " -- residual sliver consistent with "
                         "the tau_c power law, expected FAIL"))
        assert ok


def log_branch_fit(series, xi, tau0, tau_c):
    """Logarithmic-decay fit inside the entangled window (2 tau0, tau_c).

    The concurrence rises to its maximum around tau ~ 4 tau0 before the
    logarithmic decay sets in, so the fit window is the decaying branch
    (twice the peak location up to tau_c), which lies inside (2 tau0,
    tau_c); the window is recorded in the returned fit.
    """
    peak_tau = series.x[int(np.argmax(series.y))]
    lo = max(2.0 * tau0, 2.0 * peak_tau)
    sel = series.restrict(lo, tau_c * 0.995)
    sel = SweepSeries(sel.x[sel.y > 0], sel.y[sel.y > 0], fixed={"xi": xi})
    return fit_log_scaling(sel, xi=xi)


class TestCriterion10LogScaling:
    def test_log_form_and_crossing(self, tau0_value, xi_curves, tau_c_values):
        all_ok = True
        details = []
        for xi in (0.004, 0.006, 0.01):
            fit = log_branch_fit(xi_curves[xi], xi, tau0_value, tau_c_values[xi])
            crossing = fit.meta["zero_crossing"]
            ok_r2 = fit.r_squared >= 0.99
            ok_cross = abs(crossing - tau_c_values[xi]) <= 0.10 * tau_c_values[xi]
            all_ok &= ok_r2 and ok_cross
            details.append(f"xi={xi}: r2={fit.r_squared:.4f} slope={fit.exponent:.4f} "
                           f"cross={crossing:.1f} tau_c={tau_c_values[xi]:.1f} "
                           f"window=({fit.window[0]:.1f},{fit.window[1]:.1f})")
        report(10, all_ok, "log-law decay-branch fits: " + "; ".join(details))
        assert all_ok

    def test_amplitude_regimes(self, tau0_value, xi_curves, tau_c_values):
        # literal two-regime assertion: |c_xi| constant within 5% inside
        # each of {0.002, 0.003, 0.004} and {0.006, 0.008, 0.01} with a
        # detectable jump between them.  Measured: the amplitude varies
        # smoothly and continuously with xi (|c| ~ xi^0.4, ~30% spread
        # inside each group, no discontinuity at xi = 0.004), so the
        # quoted plateau/jump structure is not a property of the dynamics.
        # Implemented as stated and left red; see the decisions ledger.
        slopes = {}
        for xi in XI_LOG_SET:
            slopes[xi] = abs(log_branch_fit(
                xi_curves[xi], xi, tau0_value, tau_c_values[xi]).exponent)
        low = [slopes[x] for x in (0.002, 0.003, 0.004)]
        high = [slopes[x] for x in (0.006, 0.008, 0.01)]
        ok_low = max(low) / min(low) <= 1.05
        ok_high = max(high) / min(high) <= 1.05
        jump = abs(np.mean(low) - np.mean(high)) / np.mean(low + high)
        ok_jump = jump > 0.05
        ok = ok_low and ok_high and ok_jump
        report(10, ok,
               "amplitude plateaus |c_xi|: low " + ", ".join(f"{v:.4f}" for v in low)
               + " high " + ", ".join(f"{v:.4f}" for v in high)
               + f"; within-group spreads {max(low)/min(low):.3f}/"
                 f"{max(high)/min(high):.3f} (tol 1.05), jump {jump:.3f} (> 0.05)")
        assert ok


class TestCriterion11MaxConcurrenceLinear:
    def test_linear_in_xi_squared(self, xi_curves):
        xis = XI_LOG_SET[:5] + (0.01,) if 0.01 not in XI_LOG_SET else XI_LOG_SET
        xi2, cmax = [], []
        for xi in xis:
            val, _ = max_concurrence_over_tau(xi_curves[xi])
            xi2.append(xi * xi)
            cmax.append(val)
        xi2, cmax = np.array(xi2), np.array(cmax)
        slope, intercept = np.polyfit(xi2, cmax, 1)
        pred = slope * xi2 + intercept
        ss_res = np.sum((cmax - pred) ** 2)
        ss_tot = np.sum((cmax - cmax.mean()) ** 2)
        r2 = 1.0 - ss_res / ss_tot
        ok = r2 >= 0.98
        report(11, ok, f"max C_nnn vs xi^2: r2 = {r2:.4f} (required >= 0.98), "
                       f"slope {slope:.1f}")
        assert ok


class TestCriterion12Invariants:
    def test_state_invariants_on_reference_run(self, grid200):
        prot = QuenchProtocol(h_i=-30.0, h_f=30.0, tau=10.0)
        times = [prot.time_at(h) for h in (-10.0, 0.0, 1.0, 10.0, 30.0)]
        snaps = evolve_all_modes_checkpoints(
            grid200, prot, NoiseSpec("white", 0.01), times)
        purities = []
        for snap in snaps:
            for s in snap:
                assert abs(s.d11 + s.d22 - 1.0) < 1e-10   # trace
                assert s.d11 > -1e-9 and s.d22 > -1e-9    # positivity
                assert abs(s.d12) ** 2 <= s.d11 * s.d22 + 1e-9
            purities.append(mean_purity(snap))
        assert all(b <= a + 1e-9 for a, b in zip(purities, purities[1:]))
        noiseless = evolve_all_modes_checkpoints(
            grid200, prot, NoiseSpec("white", 0.0), [times[-1]])[0]
        assert abs(mean_purity(noiseless) - 1.0) < 1e-9
        report(12, True, "trace/positivity/coherence bounds and purity "
                         "monotonicity hold on the reference run")

    def test_pfaffian_and_sum_rules(self, rng):
        for n in (4, 8, 12):
            for _ in range(20):
                a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
                m = a - a.T
                assert pfaffian(m) ** 2 == pytest.approx(np.linalg.det(m), rel=1e-8)
        grid = build_grid(24)
        states = equilibrium_states(grid, 0.9)
        corr = ab_correlators(states, r_max=5)
        two_theta = 2 * np.array([s.theta_k for s in states])
        k = grid.momenta
        for r in range(-5, 6):
            ab_eq = (2 / 24) * np.sum(np.cos(k * r) * np.cos(two_theta)
                                      + np.sin(k * r) * np.sin(two_theta))
            assert corr.ab(r) == pytest.approx(ab_eq, abs=1e-12)
            assert corr.aa(r) == pytest.approx(1.0 if r == 0 else 0.0, abs=1e-12)
        report(12, True, "pfaffian pf^2 = det and equilibrium/sum-rule identities hold")


class TestCriterion13QualitativeStructure:
    def test_fast_quench_zero_window_and_spike(self):
        # literal criterion: at tau = 0.2 the nearest-neighbour concurrence
        # should vanish throughout an interior window after crossing
        # h0 = -1 and spike again after h0 = +1.  Measured (and confirmed
        # by raw dense ED at N = 8, which matches the pipeline to 1e-6
        # along this very ramp): C_nn stays smooth and nonzero (~0.22-0.30)
        # across the whole interior for every tau in [0.02, 0.2], with a
        # single smooth decay to zero near h0 ~ 4.6.  The quoted sudden
        # death/revival structure is not a property of this model in the
        # energy units fixed by tau0 and tau_c (criteria 4 and 8); it is
        # consistent with a four-times-larger energy convention appearing
        # in parts of the source.  Implemented as stated and left red; see
        # the decisions ledger.
        h_vals = np.concatenate([np.linspace(-0.9, 0.9, 19),
                                 np.linspace(1.05, 6.0, 40)])
        recs = curve_along_ramp(CFG, 0.2, 0.0, h_vals)
        inner = [r.c_nn for r in recs[:19]]
        after = [r.c_nn for r in recs[19:]]
        ok_zero = min(inner) == 0.0
        ok_spike = max(after) > 1e-3
        ok = ok_zero and ok_spike
        report(13, ok, f"[literal] tau=0.2 interior C_nn range "
                       f"[{min(inner):.4f}, {max(inner):.4f}] (needs a zero "
                       f"window), post-critical max {max(after):.4f}"
                       + ("" if ok else " -- smooth nonzero interior, "
                          "ED-confirmed, expected FAIL"))
        assert ok

    def test_fast_quench_eventual_death(self):
        # the part of the fast-quench phenomenology the model does show:
        # entanglement survives past the second critical point and then
        # vanishes identically at large field
        h_vals = np.linspace(1.05, 8.0, 30)
        recs = curve_along_ramp(CFG, 0.2, 0.0, h_vals)
        c = np.array([r.c_nn for r in recs])
        ok = c[0] > 0.1 and c[-1] == 0.0 and np.any(c == 0.0)
        report(13, ok, f"tau=0.2 past h0=+1: C_nn starts {c[0]:.3f}, "
                       f"dies at h0 ~ {h_vals[np.argmax(c == 0.0)]:.1f}")
        assert ok

    def test_slow_quench_tracks_static(self):
        # literal criterion: tau = 500 within 0.01 of the instantaneous
        # curve for h0 <= 0.5.  Measured worst deviation 0.0134 (just after
        # the first critical crossing, where the nearest-pi modes of the
        # N = 200 grid pick up finite excitation: the finite-size adiabatic
        # threshold 2 pi^3 tau / N^2 ~ 0.78 is of order one at tau = 500).
        # Tracking within 0.01 does hold from tau ~ 1000 (0.0077 at 1000,
        # 0.0040 at 2000).  Implemented as stated and left red; the
        # companion below asserts the tau = 2000 tracking.
        worst = self._tracking_deviation(500.0)
        ok = worst <= 0.01
        report(13, ok, f"[literal] tau=500 vs instantaneous C_nn for h0 <= 0.5: "
                       f"max deviation {worst:.4f} (tol 0.01)"
                       + ("" if ok else " -- N=200 finite-size excitation, "
                          "expected FAIL"))
        assert ok

    def test_slower_quench_tracks_static(self):
        worst = self._tracking_deviation(2000.0)
        ok = worst <= 0.01
        report(13, ok, f"tau=2000 vs instantaneous C_nn for h0 <= 0.5: "
                       f"max deviation {worst:.4f} (tol 0.01)")
        assert ok

    @staticmethod
    def _tracking_deviation(tau: float) -> float:
        h_vals = np.linspace(-2.0, 0.5, 26)
        recs = curve_along_ramp(CFG, tau, 0.0, h_vals)
        worst = 0.0
        for h, rec in zip(h_vals, recs):
            static = endpoint_static_c_nn(h)
            worst = max(worst, abs(rec.c_nn - static))
        return worst


def endpoint_static_c_nn(h0: float) -> float:
    corr = ab_correlators(equilibrium_states(CFG.grid(), h0), r_max=2)
    return concurrence_from_spin(spin_correlators_r1(corr))
