import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import wasserstein_distance

from coupledmaps.ergodic import (
    AttractorKind,
    SampleSet,
    bifurcation_scan,
    birkhoff_gap,
    classify_attractor,
    density_histogram,
    empirical_measure,
    log_derivative_chain,
    lyapunov_master,
    lyapunov_slave,
    sync_convergence_scan,
    wasserstein1,
)
from coupledmaps.errors import DomainError, SingularOrbit
from coupledmaps.maps import QuadraticMap, SkewSystem, iterate_master, iterate_skew
from coupledmaps.sync import delta_series, w_infinity

C1, C2 = 0.89, 0.8373351
N = 10**6
X_STAR_03 = (-1 + math.sqrt(1.72)) / 1.2


class TestEmpiricalMeasure:
    def test_single(self):
        m = empirical_measure([0.5])
        assert m.values.tolist() == [0.5] and m.weight == 1.0

    def test_sorted(self):
        assert empirical_measure([1, -1, 0]).values.tolist() == [-1, 0, 1]

    def test_empty(self):
        with pytest.raises(DomainError):
            empirical_measure([])

    def test_mean_stable_across_initial_points(self):
        means = [
            empirical_measure(iterate_master(QuadraticMap(C1), x0, N)).mean()
            for x0 in (0.1234, -0.6071)
        ]
        assert abs(means[0] - means[1]) <= 0.005


class TestLyapunovMaster:
    def test_paper_value(self):
        assert lyapunov_master(QuadraticMap(C1), 0.1234, N).value == pytest.approx(0.35, abs=0.02)

    @pytest.mark.parametrize("x0", [0.1234, 0.377, -0.61])
    def test_full_map_is_log2(self, x0):
        assert lyapunov_master(QuadraticMap(1.0), x0, N).value == pytest.approx(math.log(2), abs=1e-3)

    def test_attracting_fixed_point(self):
        expected = math.log(4 * 0.3 * X_STAR_03)
        assert expected == pytest.approx(-1.166, abs=1e-3)
        assert lyapunov_master(QuadraticMap(0.3), 0.5, N).value == pytest.approx(expected, abs=0.01)

    def test_partial_series_ends_at_value(self):
        est = lyapunov_master(QuadraticMap(C1), 0.1234, 10_000, stride=1000)
        assert len(est.partial_series) == 10
        assert est.partial_series[-1] == est.value
        est = lyapunov_master(QuadraticMap(C1), 0.1234, 10_500, stride=1000)
        assert est.partial_series[-1] == est.value

    def test_singular_orbit(self):
        with pytest.raises(SingularOrbit):
            lyapunov_master(QuadraticMap(0.5), 0.0, 10, burn_in=0)

    def test_halves_agree(self):
        m = QuadraticMap(C1)
        first = lyapunov_master(m, 0.1234, N // 2)
        second = lyapunov_master(m, 0.1234, N // 2, burn_in=10_000 + N // 2)
        assert abs(first.value - second.value) < 0.01

    @pytest.mark.parametrize("n", [1, 7, 40, 300])
    def test_chain_rule(self, n):
        m = QuadraticMap(C1)
        chain = log_derivative_chain(m, 0.1234, n) / n
        assert lyapunov_master(m, 0.1234, n, burn_in=0).value == pytest.approx(chain, rel=1e-12, abs=1e-14)


class TestLyapunovSlave:
    def test_full_coupling_equals_master(self):
        a = lyapunov_slave(SkewSystem(C1, C2, 1.0), 0.1234, -0.3, 10**5, burn_in=10)
        b = lyapunov_master(QuadraticMap(C1), 0.1234, 10**5, burn_in=10)
        assert a.value == b.value

    def test_converges_at_paper_coupling(self):
        lam = lyapunov_master(QuadraticMap(C1), 0.1234, N).value
        tilde = lyapunov_slave(SkewSystem(C1, C2, 0.9), 0.1234, 0.55, N).value
        assert abs(tilde - lam) < 0.05

    def test_zero_coupling_definition(self):
        ys = iterate_skew(SkewSystem(C1, C2, 0.0), 0.1234, 0.55, 1000, burn_in=0).ys
        orbit = np.concatenate(([0.55], ys[:-1]))
        expected = np.mean(np.log(np.abs(-4 * C1 * orbit)))
        got = lyapunov_slave(SkewSystem(C1, C2, 0.0), 0.1234, 0.55, 1000, burn_in=0).value
        assert got == pytest.approx(expected, rel=1e-13)


def _samples(draw_list):
    return SampleSet(np.array(draw_list))


small_sets = st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=12)


class TestWasserstein:
    def test_identical(self):
        a = SampleSet([0.1, 0.5, -0.3])
        assert wasserstein1(a, a) == 0.0

    def test_dirac_pair(self):
        assert wasserstein1(SampleSet([0.0]), SampleSet([0.7])) == pytest.approx(0.7)

    def test_shifted_pair(self):
        # pairings (0,0.5),(1,1.5) cost 0.5; (0,1.5),(1,0.5) cost 1.0
        a, b = SampleSet([0.0, 1.0]), SampleSet([0.5, 1.5])
        assert wasserstein1(a, b) == pytest.approx(min(0.5, 1.0))

    def test_unequal_counts(self):
        a, b = SampleSet([0.0, 1.0]), SampleSet([0.5])
        assert wasserstein1(a, b) == pytest.approx(0.5)

    @settings(max_examples=200)
    @given(small_sets, small_sets)
    def test_against_scipy(self, a, b):
        assert wasserstein1(_samples(a), _samples(b)) == pytest.approx(
            wasserstein_distance(a, b), abs=1e-12
        )

    @settings(max_examples=200)
    @given(small_sets, small_sets, small_sets)
    def test_metric_axioms(self, a, b, c):
        a, b, c = _samples(a), _samples(b), _samples(c)
        ab, ba = wasserstein1(a, b), wasserstein1(b, a)
        assert ab == pytest.approx(ba, abs=1e-12)
        assert ab <= wasserstein1(a, c) + wasserstein1(c, b) + 1e-12
        if np.array_equal(a.values, b.values):
            assert ab == 0.0
        elif len(a) == len(b):
            assert ab > 0.0


@pytest.fixture(scope="module")
def scan_rows():
    return {r.k: r for r in sync_convergence_scan(C1, C2, [0.5, 0.8, 0.9, 0.95, 1.0], 2 * 10**5)}


@pytest.fixture(scope="module")
def bif_rows():
    return {r.c: r for r in bifurcation_scan([0.3, 0.89, 1.0], 0.1234, N, keep=N)}


class TestConvergenceScan:
    @pytest.fixture
    def rows(self, scan_rows):
        return scan_rows

    def test_full_coupling(self, rows):
        assert rows[1.0].w1 <= 1e-9

    def test_paper_coupling(self, rows):
        assert rows[0.9].w1 <= 0.0082 + 0.001

    def test_monotone(self, rows):
        assert rows[0.95].w1 <= rows[0.8].w1

    def test_coupling_dominates_distance(self, rows):
        for row in rows.values():
            assert row.w1 <= row.mean_delta + 1e-15 <= row.tail_max_delta + 1e-15

    def test_below_threshold_flagged(self, rows):
        assert rows[0.5].flag == "BOUND_INVALID" and rows[0.5].w_inf is None


@pytest.mark.parametrize("f, lip", [(lambda x: x, 1.0), (np.square, 2.0)])
def test_birkhoff_gap_bounded_by_coupling(f, lip):
    traj = iterate_skew(SkewSystem(C1, C2, 0.9), 0.1234, 0.55, 10**5, burn_in=0)
    delta = delta_series(traj)
    transient = 2 * 1000 / len(delta)
    bound = lip * delta[1000:].max() + transient
    assert birkhoff_gap(traj, f) <= bound
    assert delta[1000:].max() <= w_infinity(C1, C2, 0.9) + 1e-6


class TestClassify:
    def test_chaotic(self):
        samples = np.linspace(-0.9, 0.9, 1000)
        assert classify_attractor(0.35, samples) is AttractorKind.CHAOTIC_INTERVAL

    def test_periodic(self):
        assert classify_attractor(-1.166, [X_STAR_03] * 10) is AttractorKind.PERIODIC

    def test_dead_zone(self):
        assert classify_attractor(0.0005, [0.1, 0.2], tol=0.01) is AttractorKind.UNDETERMINED

    def test_many_points_negative_exponent(self):
        assert classify_attractor(-0.5, np.linspace(0, 1, 1000)) is AttractorKind.UNDETERMINED


class TestBifurcationScan:
    @pytest.fixture
    def rows(self, bif_rows):
        return bif_rows

    def test_paper_parameter(self, rows):
        assert rows[0.89].lyapunov > 0
        assert rows[0.89].classification is AttractorKind.CHAOTIC_INTERVAL

    def test_fixed_point(self, rows):
        row = rows[0.3]
        assert row.classification is AttractorKind.PERIODIC
        assert np.all(np.abs(row.attractor_samples - X_STAR_03) <= 1e-6)
        assert row.lyapunov < 0

    def test_full_map_fills_interval(self, rows):
        row = rows[1.0]
        assert row.lyapunov == pytest.approx(math.log(2), abs=1e-3)
        hist = density_histogram(SampleSet(row.attractor_samples), 100)
        assert np.all(hist.masses > 0)

    def test_superstable_parameter(self):
        # starting on the critical point with no burn-in hits T'(x) = 0
        (row,) = bifurcation_scan([0.5], 0.0, 100, burn_in=0, keep=5)
        assert row.lyapunov == -math.inf
        assert row.classification is AttractorKind.PERIODIC


class TestDensityHistogram:
    def test_uniform(self):
        n = 10**5
        u = np.random.Generator(np.random.PCG64(3)).random(n)
        hist = density_histogram(SampleSet(u), 10, (0.0, 1.0))
        sigma = math.sqrt(0.1 * 0.9 / n)
        assert np.all(np.abs(hist.masses - 0.1) <= 3 * sigma)
        assert hist.masses.sum() == pytest.approx(1.0) and hist.overflow == 0

    def test_arcsine_edges_heavier(self):
        u = np.random.Generator(np.random.PCG64(4)).random(10**5)
        hist = density_histogram(SampleSet(np.cos(np.pi * u)), 50)
        centre = hist.masses[25]
        assert hist.masses[0] > centre and hist.masses[-1] > centre

    def test_arcsine_bin_masses_match_density(self):
        u = np.random.Generator(np.random.PCG64(5)).random(10**5)
        hist = density_histogram(SampleSet(np.cos(np.pi * u)), 50)
        cdf = 1 - np.arccos(hist.edges) / np.pi
        expected = np.diff(cdf)
        sigma = np.sqrt(expected * (1 - expected) / 10**5)
        assert np.all(np.abs(hist.masses - expected) <= 5 * sigma)

    def test_single_atom(self):
        hist = density_histogram(SampleSet([0.3] * 17), 20)
        assert sorted(hist.masses)[-1] == 1.0 and hist.masses.sum() == 1.0

    def test_overflow_counted(self):
        hist = density_histogram(SampleSet([0.5, 2.0]), 4, (0.0, 1.0))
        assert hist.overflow == 1 and hist.masses.sum() == 0.5
