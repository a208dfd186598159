"""Bernoulli measures: weights, conditionals, cube masses, ball brackets."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import spongedim as sd
import _oracles as oracle
from conftest import random_strict_sponge


class TestCoordinateUniform:
    def test_reference_weight_table(self, sponge_234):
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

    def test_full_grid_uniform_weights(self, full_grid_234):
        m = sd.coordinate_uniform(full_grid_234)
        assert set(m.weights.values()) == {Fraction(1, 24)}

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10**6))
    def test_weights_always_sum_to_one(self, seed):
        s = random_strict_sponge(random.Random(seed))
        m = sd.coordinate_uniform(s)
        assert sum(m.weights.values()) == 1
        assert all(w > 0 for w in m.weights.values())


class TestMeasureValidation:
    def test_support_must_match_digit_set(self, carpet_23):
        with pytest.raises(sd.DigitOutOfRange):
            sd.BernoulliMeasure(
                carpet_23, {(0, 0): Fraction(1, 2), (0, 2): Fraction(1, 2)}
            )

    def test_weights_must_be_positive(self, carpet_23):
        with pytest.raises(sd.ZeroMeasure):
            sd.BernoulliMeasure(
                carpet_23,
                {(0, 0): Fraction(1, 2), (0, 2): Fraction(1, 2), (1, 1): Fraction(0)},
            )

    def test_weights_must_sum_to_one(self, carpet_23):
        with pytest.raises(sd.SpongeError):
            sd.BernoulliMeasure(
                carpet_23,
                {
                    (0, 0): Fraction(1, 2),
                    (0, 2): Fraction(1, 2),
                    (1, 1): Fraction(1, 2),
                },
            )


class TestConditionals:
    def test_root_conditional(self, sponge_234):
        m = sd.coordinate_uniform(sponge_234)
        assert sd.conditional_prob(m, (), 0) == Fraction(1, 2)

    def test_vanishes_off_support(self, sponge_234):
        m = sd.coordinate_uniform(sponge_234)
        assert sd.conditional_prob(m, (1, 1), 5) == 0

    def test_marginal_with_plain_weights(self, carpet_24):
        m = sd.BernoulliMeasure(
            carpet_24, {t: Fraction(1, 3) for t in carpet_24.digits}
        )
        assert sd.conditional_prob(m, (), 1) == Fraction(2, 3)

    def test_unknown_prefix(self, sponge_234):
        m = sd.coordinate_uniform(sponge_234)
        with pytest.raises(sd.PrefixNotInSponge):
            sd.conditional_prob(m, (0, 2), 0)

    def test_coordinate_uniform_inverts_fibre_counts(self, sponge_234):
        """Conditionals of the canonical measure are 1 over the fibre count."""
        s = sponge_234
        m = sd.coordinate_uniform(s)
        for l in range(s.d):
            prefixes = [()] if l == 0 else sd.digit_set_projection(s, l)
            for p in prefixes:
                expected = Fraction(1, sd.fibre_count(s, p))
                for nxt in range(s.bases[l]):
                    got = sd.conditional_prob(m, p, nxt)
                    if tuple(p) + (nxt,) in set(sd.digit_set_projection(s, l + 1)):
                        assert got == expected
                    else:
                        assert got == 0


class TestCubeMeasure:
    def test_reference_value(self, sponge_234):
        m = sd.coordinate_uniform(sponge_234)
        got = sd.cube_measure(m, [(0, 0, 0), (0, 0, 0)], Fraction(1, 4))
        assert got.exact == Fraction(1, 16)

    def test_unit_scale_is_full_mass(self, sponge_234):
        m = sd.coordinate_uniform(sponge_234)
        assert sd.cube_measure(m, [], 1).exact == 1

    def test_word_too_short(self, sponge_234):
        m = sd.coordinate_uniform(sponge_234)
        with pytest.raises(sd.WordTooShort):
            sd.cube_measure(m, [(0, 0, 0)], Fraction(1, 8))

    def test_matches_cylinder_enumeration(self, sponge_234, carpet_24):
        rng = random.Random(5)
        for s in (sponge_234, carpet_24):
            m = sd.coordinate_uniform(s)
            for _ in range(8):
                a = rng.randint(0, 5)
                r = Fraction(1, s.bases[0] ** a)
                word = tuple(rng.choice(s.digits) for _ in range(a))
                got = sd.cube_measure(m, word, r).exact
                assert got == oracle.brute_cube_measure(m, word, r)

    def test_scale_r_cubes_partition_unit_mass(self, sponge_234):
        s = sponge_234
        m = sd.coordinate_uniform(s)
        r = Fraction(1, 8)
        trivial = sd.approximate_cube(s, [], 1)
        total = Fraction(0)
        k = sd.scale_exponents(s, r).k
        for c in sd.subcubes(s, trivial, r):
            word = oracle.word_from_signature(s, c.constraints, k)
            total += sd.cube_measure(m, word, r).exact
        assert total == 1

    def test_refinement_additivity(self, carpet_24):
        s = carpet_24
        m = sd.coordinate_uniform(s)
        big_r, small_r = Fraction(1, 4), Fraction(1, 16)
        word = ((1, 1), (0, 1), (1, 3), (1, 1))
        parent = sd.approximate_cube(s, word, big_r)
        parent_mass = sd.cube_measure(m, word, big_r).exact
        k = sd.scale_exponents(s, small_r).k
        pieces = Fraction(0)
        for c in sd.subcubes(s, parent, small_r):
            w = oracle.word_from_signature(s, c.constraints, k)
            pieces += sd.cube_measure(m, w, small_r).exact
        assert pieces == parent_mass

    def test_single_track_ratio_identity(self, carpet_24):
        """Masses of cubes differing only in the wide-coordinate tail.

        Two words that agree except on the first-coordinate digits of the
        tail positions have cube-mass ratio equal to the marginal ratio
        raised to the number of differing positions.
        """
        s = carpet_24
        rng = random.Random(17)
        raw = [Fraction(rng.randint(1, 9)) for _ in range(3)]
        total = sum(raw)
        weights = {t: w / total for t, w in zip(s.digits, raw)}
        m = sd.BernoulliMeasure(s, weights)
        p0 = weights[(0, 1)]
        p1 = weights[(1, 1)] + weights[(1, 3)]
        k = 5
        R = Fraction(1, 4**k)
        head = tuple((1, 1) for _ in range(k + 2))
        tail_a = tuple((1, 1) for _ in range(k - 2))
        tail_b = tuple((0, 1) for _ in range(k - 2))
        mass_a = sd.cube_measure(m, head + tail_a, R).exact
        mass_b = sd.cube_measure(m, head + tail_b, R).exact
        assert mass_a / mass_b == (p1 / p0) ** (k - 2)

    def test_log_value_consistent_with_exact(self, sponge_234):
        m = sd.coordinate_uniform(sponge_234)
        got = sd.cube_measure(m, [(1, 1, 0)] * 4, Fraction(1, 16))
        assert got.exact is not None
        assert got.log_value == pytest.approx(
            math.log(got.exact), rel=1e-12
        )

    def test_deep_scan_leaves_log_only(self, sponge_234):
        m = sd.coordinate_uniform(sponge_234)
        word = [(1, 1, 0)] * 200
        got = sd.cube_measure(m, word, Fraction(1, 2**200), exact_budget=16)
        assert got.exact is None
        assert got.log_value < -100


class TestBallBrackets:
    def test_covering_ball(self, carpet_23):
        m = sd.coordinate_uniform(carpet_23)
        lo, up = sd.ball_measure_bounds(m, (Fraction(1, 2), Fraction(1, 2)), 2, 3)
        assert lo.exact == 1
        assert up.exact == 1

    def test_degenerate_ball(self, carpet_23):
        m = sd.coordinate_uniform(carpet_23)
        lo, up = sd.ball_measure_bounds(m, (Fraction(0), Fraction(0)), 0, 3)
        assert lo.exact == 0
        assert up.exact == Fraction(1, 64)

    def test_brackets_tighten_with_depth(self, carpet_vssc):
        m = sd.coordinate_uniform(carpet_vssc)
        center = (Fraction(0), Fraction(0))
        radius = Fraction(1, 8)
        prev_lo, prev_up = None, None
        for depth in (2, 3, 4, 5):
            lo, up = sd.ball_measure_bounds(m, center, radius, depth)
            assert lo.exact <= up.exact
            if prev_lo is not None:
                assert lo.exact >= prev_lo
                assert up.exact <= prev_up
            prev_lo, prev_up = lo.exact, up.exact

    def test_bracket_encloses_reference_mass(self, sponge_234):
        m = sd.coordinate_uniform(sponge_234)
        center = (Fraction(0), Fraction(0), Fraction(0))
        lo, up = sd.ball_measure_bounds(m, center, Fraction(1, 8), 4)
        assert 0 < lo.exact <= up.exact < 1


class TestWeightFiles:
    def test_round_trip(self, sponge_234):
        m = sd.coordinate_uniform(sponge_234)
        back = sd.measure_from_json(sponge_234, sd.weights_to_json(m))
        assert back.weights == m.weights

    def test_sum_enforced(self, carpet_23):
        with pytest.raises(sd.SpongeError):
            sd.measure_from_json(
                carpet_23, '{"0,0": "1/2", "0,2": "1/4", "1,1": "1/3"}'
            )

    def test_decimal_weights_accepted(self, carpet_23):
        m = sd.measure_from_json(
            carpet_23, '{"0,0": "0.5", "0,2": "0.25", "1,1": "0.25"}'
        )
        assert m.weights[(0, 0)] == Fraction(1, 2)

    def test_invalid_json_reported(self, carpet_23):
        with pytest.raises(sd.SpongeFileError, match="line"):
            sd.measure_from_json(carpet_23, "{oops")


class TestWeightGrid:
    def test_simplex_count_for_three_digits(self, carpet_24):
        vectors = list(sd.positive_weight_grid(carpet_24, Fraction(1, 8)))
        assert len(vectors) == 21  # compositions of 8 into 3 positive parts
        for m in vectors:
            assert sum(m.weights.values()) == 1
            assert all(w >= Fraction(1, 8) for w in m.weights.values())

    def test_tightest_grid_is_uniform(self, carpet_24):
        vectors = list(sd.positive_weight_grid(carpet_24, Fraction(1, 3)))
        assert len(vectors) == 1
        assert set(vectors[0].weights.values()) == {Fraction(1, 3)}

    def test_step_must_be_unit_fraction(self, carpet_24):
        with pytest.raises(sd.ScaleOutOfRange):
            list(sd.positive_weight_grid(carpet_24, Fraction(2, 5)))

    def test_step_must_leave_room(self, carpet_24):
        with pytest.raises(sd.ScaleOutOfRange):
            list(sd.positive_weight_grid(carpet_24, Fraction(1, 2)))

    def test_deterministic_order(self, carpet_24):
        first = [m.weights for m in sd.positive_weight_grid(carpet_24, Fraction(1, 8))]
        second = [m.weights for m in sd.positive_weight_grid(carpet_24, Fraction(1, 8))]
        assert first == second
