import math

import numpy as np
import pytest

import services.entanglement_analysis as analysis
from schemas.matrix_schemas import GaussianState
from schemas.state_schemas import BondSpec, BuildingBlockParams, RingSpec, s_min
from services.entanglement_analysis import (
    block_entropies,
    block_entropy,
    by_separation,
    distribution,
    eof,
    local_purity,
    nearest_neighbor_asymptote,
    pair_eta,
    port_entanglement,
    ppt_eta,
    ppt_eta_eig,
    squeezing_db,
    threshold,
)
from services.errors import BrokenSymmetry, IndexOutOfRange, NonPositiveEta, NoThreshold, Unphysical, WrongModeCount
from services.gaussian_states import tmss, vacuum
from services.mps_builder import build_mps, long_range_cm
from services.symplectic_core import direct_sum

INF = BondSpec.infinite()


def _s2_polynomial(s: float, x: float) -> tuple[float, float]:
    """Threshold polynomial of the second neighbours on a six-site ring, and its leading term."""
    x2, s2 = x * x, s * s
    value = (
        72 * s2**4
        - 12 * (x2 + 1) * s2**3
        + (-34 * x2**2 + 28 * x2 - 34) * s2**2
        + (x2**3 - 5 * x2**2 - 5 * x2 + 1) * s2
        + (x2 - 1) ** 2 * (x2**2 - 6 * x2 + 1)
    )
    return value, 72 * s2**4


def _ring_distribution(n: int, x: float, s: float, bond: BondSpec = INF):
    return by_separation(distribution(build_mps(RingSpec.of(n, s=s, x=x, bond=bond))))


class TestPptEta:
    @pytest.mark.parametrize("r", [0.0, 0.3, 1.0, 2.5])
    def test_tmss(self, r):
        assert ppt_eta(tmss(r)) == pytest.approx(math.exp(-2 * r), rel=1e-10)

    def test_vacuum_is_separable(self):
        assert ppt_eta(vacuum(2)) == pytest.approx(1.0)

    def test_needs_two_modes(self):
        with pytest.raises(WrongModeCount):
            ppt_eta(vacuum(3))

    def test_invariants_agree_with_eigensolver(self, random_state):
        for _ in range(1000):
            g = random_state(2)
            assert abs(ppt_eta(g) - ppt_eta_eig(g)) < 1e-9


class TestEntanglementOfFormation:
    def test_separable(self):
        assert eof(1.0) == 0.0
        assert eof(1.7) == 0.0

    @pytest.mark.parametrize("eta", [0.0, -0.5])
    def test_non_positive_eta(self, eta):
        with pytest.raises(NonPositiveEta):
            eof(eta)

    @pytest.mark.parametrize("r", [0.1, 0.8811, 2.0])
    def test_tmss_closed_form(self, r):
        c2, s2 = math.cosh(r) ** 2, math.sinh(r) ** 2
        expected = c2 * math.log2(c2) - s2 * math.log2(s2)
        assert eof(math.exp(-2 * r)) == pytest.approx(expected, rel=1e-10)

    def test_decreasing_in_eta(self):
        values = [eof(eta) for eta in np.linspace(0.05, 0.99, 30)]
        assert all(a > b for a, b in zip(values, values[1:], strict=False))

    def test_matches_entropy_of_a_pure_pair(self):
        g = tmss(0.6)
        assert eof(ppt_eta(g)) == pytest.approx(block_entropy(g, [0]), rel=1e-9)


class TestEntropy:
    def test_vacuum_has_none(self):
        assert block_entropy(vacuum(3), [0, 2]) == pytest.approx(0.0, abs=1e-12)

    def test_whole_ring_is_rejected(self):
        with pytest.raises(IndexOutOfRange):
            block_entropy(tmss(0.3), [0, 1])

    def test_pure_state_bipartitions(self):
        entropies = block_entropies(long_range_cm(6, 2))
        assert len(entropies) == 5
        for k in range(1, 6):
            assert entropies[k - 1] == pytest.approx(entropies[5 - k], rel=1e-9)


def test_local_purity_of_long_range_state():
    assert local_purity(long_range_cm(4, 2), 0) == pytest.approx(8 / math.sqrt(91), rel=1e-12)
    assert local_purity(long_range_cm(5, 1), 3) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [4, 7])
def test_long_range_mixing_grows_with_x(n):
    xs = [1.5, 2, 4, 8, 16]
    purities = [local_purity(long_range_cm(n, x), 0) for x in xs]
    assert all(a > b for a, b in zip(purities, purities[1:], strict=False))
    for k in range(1, n // 2 + 1):
        entropies = [block_entropy(long_range_cm(n, x), range(k)) for x in xs]
        assert all(a < b for a, b in zip(entropies, entropies[1:], strict=False))


@pytest.mark.parametrize("n", [4, 6, 8])
@pytest.mark.parametrize("x", [2, 5])
def test_local_purity_closed_form(n, x):
    a_q = (n - 1 + x * x) / (n * x)
    a_p = (1 + (n - 1) * x * x) / (n * x)
    assert local_purity(long_range_cm(n, x), 0) == pytest.approx((a_q * a_p) ** -0.5, abs=1e-9)


def test_squeezing_db():
    levels = squeezing_db(1.1)
    assert levels.variance_ratio_db == pytest.approx(10 * math.log10(math.exp(2.2)))
    assert levels.cosh_db == pytest.approx(10 * math.log10(math.cosh(2.2)))
    assert squeezing_db(0.0).variance_ratio_db == 0.0
    with pytest.raises(Unphysical):
        squeezing_db(-1.0)


def test_input_port_entanglement_grows_with_s():
    grid = [1.5, 2.0, 2.5, 3.0, 4.0, 6.0]
    ports = [port_entanglement(BuildingBlockParams(s=s, x=2)) for s in grid]
    assert ports[0].eta_ss >= 1 - 1e-9
    assert ports[0].eof_ss == 0.0
    assert all(a.eta_ss > b.eta_ss for a, b in zip(ports, ports[1:], strict=False))
    assert all(a.eta_sx < b.eta_sx for a, b in zip(ports, ports[1:], strict=False))


@pytest.mark.parametrize(("n", "expected"), [(4, 0.5), (6, 2 / 3), (5, math.sqrt(0.6)), (7, math.sqrt(5 / 7))])
def test_nearest_neighbor_asymptote(n, expected):
    assert nearest_neighbor_asymptote(n) == pytest.approx(expected)


class TestDistribution:
    def test_record_layout(self):
        records = distribution(build_mps(RingSpec.of(6, s=3, x=2)))
        assert len(records) == 15
        assert [r.separation for r in records] == [1] * 6 + [2] * 6 + [3] * 3
        assert [(r.i, r.j) for r in records[:6]] == [(0, 1), (0, 5), (1, 2), (2, 3), (3, 4), (4, 5)]
        assert all((r.eof > 0) == r.entangled for r in records)

    def test_short_range_at_physicality_bound(self):
        records = _ring_distribution(6, x=2, s=1.5)
        assert [r.entangled for r in records] == [True, False, False]

    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
    @pytest.mark.parametrize("x", [1.5, 2, 5])
    def test_only_neighbours_entangled_at_s_min(self, n, x):
        records = _ring_distribution(n, x=x, s=s_min(x))
        assert records[0].eta < 1
        assert all(r.eta >= 1 - 1e-9 for r in records[1:])

    @pytest.mark.parametrize("s", [1.0, 3.0])
    def test_product_state(self, s):
        records = _ring_distribution(4, x=1, s=s)
        assert all(r.eta == pytest.approx(1.0, abs=1e-9) for r in records)
        assert not any(r.entangled for r in records)

    def test_long_range_regime(self):
        records = _ring_distribution(6, x=2, s=1e6)
        assert all(r.entangled for r in records)
        etas = [r.eta for r in records]
        assert max(etas) - min(etas) < 1e-4

    def test_rejects_broken_translation_symmetry(self):
        g = direct_sum([tmss(0.5).cm, tmss(1.0).cm])
        with pytest.raises(BrokenSymmetry):
            distribution(GaussianState.of(g))


@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_nearest_neighbour_limit_at_large_x(n):
    x = 1e4
    g = build_mps(RingSpec.of(n, s=s_min(x), x=x))
    assert pair_eta(g, 0, 1) == pytest.approx(nearest_neighbor_asymptote(n), abs=2e-3)


@pytest.mark.parametrize("n", [4, 6, 8])
@pytest.mark.parametrize("x", [2, 5])
def test_long_range_pairs_equally_entangled(n, x):
    g = long_range_cm(n, x)
    etas = [pair_eta(g, 0, j) for j in range(1, n)]
    assert max(etas) - min(etas) < 1e-6


def test_long_range_separability_trend():
    etas = [pair_eta(long_range_cm(n, 2), 0, 1) for n in (4, 8, 16, 32)]
    assert all(a < b for a, b in zip(etas, etas[1:], strict=False))


class TestThreshold:
    @pytest.mark.parametrize("x", [1.5, 2, 3])
    def test_third_neighbours_at_s_equal_x(self, x):
        result = threshold(3, x, 6, INF)
        assert abs(result.s_k - x) < 1e-6
        assert result.bracket[0] <= result.s_k <= result.bracket[1]
        assert result.width <= 1e-8

    @pytest.mark.parametrize("x", [1.5, 2, 3])
    def test_second_neighbours_solve_the_polynomial(self, x):
        result = threshold(2, x, 6, INF)
        value, leading = _s2_polynomial(result.s_k, x)
        assert abs(value) / leading < 1e-6
        assert s_min(x) < result.s_k < x

    @pytest.mark.parametrize("x", [1.5, 4.0])
    def test_nearest_neighbours_are_trivial(self, x):
        result = threshold(1, x, 6, INF)
        assert result.s_k == s_min(x)
        assert result.bracket == (s_min(x), s_min(x))

    @pytest.mark.parametrize("k", [2, 3])
    def test_finite_bonds_shift_thresholds_up(self, k):
        exact = threshold(k, 2, 6, INF).s_k
        finite = threshold(k, 2, 6, BondSpec.finite(1.1)).s_k
        assert finite - exact > 1e-4

    def test_separation_beyond_half_ring(self):
        with pytest.raises(IndexOutOfRange):
            threshold(4, 2, 6, INF)

    def test_product_blocks_never_entangle(self):
        with pytest.raises(Unphysical):
            threshold(2, 1, 6, INF)

    def test_no_threshold_below_cap(self, monkeypatch):
        monkeypatch.setattr(analysis, "separation_eta", lambda spec, k: 1.5)
        with pytest.raises(NoThreshold):
            threshold(2, 2, 6, INF, s_cap=100)


def test_eof_ordering_over_the_grid():
    for x in np.linspace(1.1, 4, 10):
        for d in np.linspace(0, 3, 10):
            spec = RingSpec(n_sites=6, block=BuildingBlockParams.at_offset(x, d), bond=INF)
            e1, e2, e3 = (r.eof for r in by_separation(distribution(build_mps(spec))))
            assert e1 >= e2 - 1e-12
            assert e2 >= e3 - 1e-12


@pytest.mark.parametrize("n", [6, 8, 10])
@pytest.mark.parametrize("x", [1.5, 3.0])
def test_thresholds_grow_with_separation(n, x):
    thresholds = [threshold(k, x, n, INF).s_k for k in range(1, n // 2 + 1)]
    assert all(a <= b + 1e-8 for a, b in zip(thresholds, thresholds[1:], strict=False))


# with finite bonds eta at separation 2 turns back up past d ~ 4.5 (r = 1.1)
@pytest.mark.parametrize(("bond", "d_max"), [(INF, 5.0), (BondSpec.finite(1.1), 4.0)])
def test_distant_pairs_entangle_as_s_grows(bond, d_max):
    x = 2.0
    grid = [s_min(x) + d for d in np.linspace(0, d_max, 11)]
    etas = np.array([[min(r.eta, 1.0) for r in _ring_distribution(6, x=x, s=s, bond=bond)] for s in grid])
    assert np.all(np.diff(etas[:, 1:], axis=0) <= 1e-9)


def test_weaker_bonds_degrade_entanglement():
    bonds = [BondSpec.finite(r) for r in (0.3, 0.6, 1.1, 2.0)] + [INF]
    eofs = np.array([[r.eof for r in _ring_distribution(6, x=2, s=3, bond=b)] for b in bonds])
    assert np.all(np.diff(eofs, axis=0) >= -1e-12)
