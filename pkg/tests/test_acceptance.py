"""Acceptance gate: ten independent checks with one printed verdict line each.

Each check owns a wall-clock budget.  A check that finishes over budget
fails even if its assertions hold, so regressions in asymptotic cost are
caught here rather than in review.
"""

import math
import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

import spongedim as sd
import _oracles as oracle
from conftest import random_strict_sponge
from spongedim.verify import Mode

LOG2, LOG3, LOG4 = math.log(2), math.log(3), math.log(4)

ASSOUAD_234 = 2 + LOG3 / LOG4
LOWER_234 = 1 + LOG2 / LOG3
BOX_234 = 1 + math.log(2.5) / LOG3 + LOG2 / LOG4
HAUSDORFF_234 = math.log2(
    (2 ** (LOG3 / LOG4) + 1) ** (LOG2 / LOG3)
    + (2 * 3 ** (LOG3 / LOG4) + 1) ** (LOG2 / LOG3)
)


@pytest.fixture
def criterion(capsys):
    """Timed block that prints a single PASS/FAIL line to the terminal."""

    @contextmanager
    def block(num: int, label: str, budget: float):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            verdict = "PASS" if ok and elapsed < budget else "FAIL"
            with capsys.disabled():
                print(f"criterion {num:02d} [{label}]: {verdict} ({elapsed:.2f}s)")
        assert elapsed < budget, f"budget {budget}s exceeded: {elapsed:.2f}s"

    return block


def test_criterion_01_dimension_formulas(criterion, sponge_234):
    with criterion(1, "dimension formulas", 1.0):
        r = sd.dim_report(sponge_234)
        assert r.assouad == pytest.approx(ASSOUAD_234, abs=1e-9)
        assert r.lower == pytest.approx(LOWER_234, abs=1e-9)
        assert r.box == pytest.approx(BOX_234, abs=1e-9)
        assert r.hausdorff == pytest.approx(HAUSDORFF_234, abs=1e-9)
        assert r.assouad == pytest.approx(2.792, abs=5e-4)
        assert r.lower == pytest.approx(1.631, abs=5e-4)
        assert r.box == pytest.approx(2.3340, abs=5e-4)
        assert r.hausdorff == pytest.approx(2.296, abs=5e-4)


def test_criterion_02_weight_table(criterion, sponge_234):
    with criterion(2, "weight table", 1.0):
        m = sd.coordinate_uniform(sponge_234)
        expected = {
            (0, 0, 0): Fraction(1, 8),
            (0, 0, 3): Fraction(1, 8),
            (0, 1, 2): Fraction(1, 4),
            (1, 0, 2): Fraction(1, 6),
            (1, 1, 0): Fraction(1, 18),
            (1, 1, 1): Fraction(1, 18),
            (1, 1, 2): Fraction(1, 18),
            (1, 2, 0): Fraction(1, 18),
            (1, 2, 2): Fraction(1, 18),
            (1, 2, 3): Fraction(1, 18),
        }
        assert dict(m.weights) == expected
        assert sum(m.weights.values()) == 1


def test_criterion_03_cube_sandwich_scan(criterion, sponge_234):
    with criterion(3, "cube sandwich scan", 10.0):
        m = sd.coordinate_uniform(sponge_234)
        report = sd.scan_cube_ratios(sponge_234, m, 1000, 20260819, depth=40)
        assert report.samples == 1000
        assert report.violations == ()


def test_criterion_04_enumeration_oracles(criterion, sponge_234):
    with criterion(4, "enumeration oracles", 30.0):
        carpet = random_strict_sponge(random.Random(99), max_d=2, max_digits=8)
        for s in (sponge_234, carpet):
            rng = random.Random(1234)
            n1 = s.bases[0]

            for a in range(7):
                r = Fraction(1, n1**a)
                assert sd.count_cubes(s, r) == oracle.brute_count_cubes(s, r)

            weights = [rng.randint(1, 9) for _ in s.digits]
            m_random = sd.BernoulliMeasure(
                s,
                {
                    t: Fraction(w, sum(weights))
                    for t, w in zip(s.digits, weights)
                },
            )
            for m in (sd.coordinate_uniform(s), m_random):
                for _ in range(6):
                    a = rng.randint(1, 6)
                    r = Fraction(1, n1**a)
                    word = tuple(rng.choice(s.digits) for _ in range(a))
                    got = sd.cube_measure(m, word, r).exact
                    assert got is not None
                    assert got == oracle.brute_cube_measure(m, word, r)

            for _ in range(3):
                parent_word = [rng.choice(s.digits) for _ in range(2)]
                q = sd.approximate_cube(s, parent_word, Fraction(1, n1**2))
                r = Fraction(1, n1**5)
                got = {c.constraints for c in sd.subcubes(s, q, r)}
                assert got == oracle.brute_subcube_signatures(s, q, r)


def test_criterion_05_box_count_slope(criterion, sponge_234):
    with criterion(5, "box-count slope", 1.0):
        cases = [sponge_234]
        cases.append(random_strict_sponge(random.Random(7)))
        cases.append(random_strict_sponge(random.Random(23)))
        for s in cases:
            assert abs(sd.box_dim_slope(s, 40) - sd.box_dim(s)) < 0.05


def test_criterion_06_non_doubling_sweep(criterion, carpet_24):
    with criterion(6, "non-doubling sweep", 60.0):
        flat = sd.BernoulliMeasure(
            carpet_24, {t: Fraction(1, 3) for t in carpet_24.digits}
        )
        report = sd.doubling_report(carpet_24, flat, 11)
        assert report.verdict is sd.DoublingVerdict.NON_DOUBLING
        assert report.growth_rate == pytest.approx(2.0, abs=1e-6)

        vectors = list(sd.positive_weight_grid(carpet_24, Fraction(1, 8)))
        assert len(vectors) == 21
        for m in vectors:
            rep = sd.doubling_report(carpet_24, m, 11)
            assert rep.verdict is sd.DoublingVerdict.NON_DOUBLING


def test_criterion_07_separated_ball_scaling(criterion, carpet_vssc):
    with criterion(7, "separated ball scaling", 60.0):
        m = sd.coordinate_uniform(carpet_vssc)
        report = sd.doubling_report(carpet_vssc, m, 12)
        assert report.verdict is sd.DoublingVerdict.DOUBLING
        assert all(row.pair_count == 0 for row in report.per_depth)

        scan = sd.scan_ball_ratios_vssc(carpet_vssc, 200, 20260819, depth=8)
        assert scan.samples == 200
        assert scan.violations == ()


def test_criterion_08_tangent_convergence(criterion, sponge_234):
    with criterion(8, "tangent convergence", 60.0):
        distances = []
        for e in (2, 3, 4):
            R = Fraction(1, 4**e)
            k1 = sd.scale_exponents(sponge_234, R).k[0]
            rep = sd.check_tangent_convergence(sponge_234, R, Mode.MAX, k1 + 2)
            assert rep.ok
            assert rep.distance <= rep.bound
            distances.append(rep.distance)

            tmap = sd.tangent_map(sponge_234, R, Mode.MAX)
            assert tmap.b / tmap.a <= 4

        # decreasing trend: no step may rise past jitter, and the last
        # scale must land well below the first
        for earlier, later in zip(distances, distances[1:]):
            assert later <= earlier + 5e-3
        assert distances[-1] < distances[0] - 0.1


def test_criterion_09_random_sponge_laws(criterion):
    with criterion(9, "random sponge laws", 10.0):
        for seed in range(100):
            s = random_strict_sponge(random.Random(seed))
            r = sd.dim_report(s)
            assert r.strictness_ok
            values = (r.lower, r.hausdorff, r.box, r.assouad)
            assert all(v is not None for v in values)

            assert r.lower <= r.hausdorff + 1e-12
            assert r.hausdorff <= r.box + 1e-12
            assert r.box <= r.assouad + 1e-12
            assert r.lower_via_zprime == pytest.approx(r.lower, abs=1e-12)

            spread = max(values) - min(values)
            if sd.has_uniform_fibres(s):
                assert spread < 1e-9
            else:
                assert spread > 1e-9


def test_criterion_10_repeated_bases_and_family(criterion, sponge_344):
    with criterion(10, "repeated bases and family", 1.0):
        assert sd.box_dim(sponge_344) == pytest.approx(1.792, abs=5e-4)
        with pytest.raises(sd.NonStrictBases):
            sd.assouad_dim(sponge_344)

        for lam in (Fraction(1, 10), Fraction(1, 4), Fraction(2, 5)):
            lower, hausdorff, box, assouad = sd.lg_family_dims(lam)
            contraction = -math.log(lam)
            assert lower == pytest.approx(1.0, abs=1e-9)
            assert hausdorff == pytest.approx(
                math.log2(1 + 2 ** (LOG2 / contraction)), abs=1e-9
            )
            assert box == pytest.approx(1 + math.log(1.5) / contraction, abs=1e-9)
            assert assouad == pytest.approx(1 + LOG2 / contraction, abs=1e-9)

        at_half = sd.lg_family_dims(Fraction(1, 2))
        for v in at_half:
            assert v == pytest.approx(math.log2(3), abs=1e-9)
        near_half = sd.lg_family_dims(Fraction(1, 2) - Fraction(1, 10**6))
        assert near_half[3] > 1.99  # lower and assouad both jump at 1/2
