import csv
import io

import pytest
from hypothesis import given, strategies as st

from ellspiral import DomainError
from ellspiral.holder import (
    NOT_APPLICABLE,
    TRIVIAL,
    DeformationPair,
    best_bound,
    box_dim_bound,
    box_dim_bound_raw,
    grid,
    hyperbolic_bound,
    is_nontrivial,
    profile_bound,
    profile_bound_raw,
    sweep,
    sweep_csv,
)

TOL = 1e-12
GRID = grid(0.05, 0.95, 0.05)
PAIR = DeformationPair.of(0.4, 0.7, 0.2, 0.3)


class TestBoxBound:
    def test_generic(self):
        # 2.3 * 1.3 / (2.1 * 1.7)
        assert abs(box_dim_bound(PAIR).value - 2.99 / 3.57) < TOL

    def test_fast_source(self):
        assert abs(box_dim_bound(DeformationPair.of(1.5, 2, 0.5, 0.5)).value - 0.75) < TOL

    @given(st.floats(0.01, 1.0), st.floats(0, 3))
    def test_identity_is_one(self, p, dq):
        b = box_dim_bound(DeformationPair.of(p, p + dq, p, p + dq))
        assert b.value == pytest.approx(1.0, abs=1e-14)

    def test_rejects_fast_target(self):
        with pytest.raises(DomainError):
            box_dim_bound(DeformationPair.of(0.4, 0.7, 1.2, 1.3))

    def test_clamp_reported(self):
        b = box_dim_bound(DeformationPair.of(0.1, 0.1, 0.9, 0.9))
        assert b.raw == pytest.approx(2.0 * 1.9 / (2.0 * 1.1))
        assert b.value == 1.0 and b.clamped


class TestProfileBound:
    def test_hyperbolic_cross_check(self):
        pair = DeformationPair.of(0.5, 0.5, 0.25, 0.25)
        assert abs(profile_bound(pair).value - 0.75) < TOL
        assert abs(hyperbolic_bound(0.5, 0.25) - 0.75) < TOL

    def test_generic(self):
        assert abs(profile_bound(PAIR).value - 1.73 / 2.31) < TOL

    def test_beats_box(self):
        assert profile_bound(PAIR).value < box_dim_bound(PAIR).value

    @pytest.mark.parametrize("pqrs", [(1.2, 1.3, 0.4, 0.5), (0.4, 0.5, 1.2, 1.3)])
    def test_rejects_fast(self, pqrs):
        with pytest.raises(DomainError):
            profile_bound(DeformationPair.of(*pqrs))

    def test_above_half_on_grid(self):
        for p, q, r, s, _, prof in sweep(GRID, GRID, GRID, GRID):
            assert prof > 0.5

    def test_identity_is_one(self):
        for p in GRID:
            for q in GRID:
                if p <= q:
                    assert profile_bound(DeformationPair.of(p, q, p, q)).value == pytest.approx(1.0, abs=1e-14)


class TestHyperbolic:
    def test_examples(self):
        assert abs(hyperbolic_bound(0.8, 0.2) - 0.625) < TOL
        assert hyperbolic_bound(1.0, 1.0 - 1e-12) == pytest.approx(1.0, abs=1e-11)

    @pytest.mark.parametrize("p,q", [(0.5, 0.5), (0.3, 0.6), (1.2, 0.5)])
    def test_domain(self, p, q):
        with pytest.raises(DomainError):
            hyperbolic_bound(p, q)

    @given(st.floats(0.02, 1.0), st.floats(0.01, 0.99))
    def test_equals_profile_bound(self, p, frac):
        q = p * frac
        pair = DeformationPair.of(p, p, q, q)
        assert hyperbolic_bound(p, q) == pytest.approx(profile_bound_raw(pair), rel=1e-13)


class TestDominanceAndMonotonicity:
    def test_profile_below_box_whenever_box_is_nontrivial(self):
        checked = 0
        for p, q, r, s, box, prof in sweep(GRID, GRID, GRID, GRID):
            if is_nontrivial(box):
                assert prof < box
                checked += 1
        assert checked > 1000

    def test_raw_gap_has_the_sign_of_one_minus_box(self):
        # profile < box exactly when box < 1; both exceed 1 together otherwise
        for p, q, r, s, _, _ in sweep(GRID, GRID, GRID, GRID):
            pair = DeformationPair.of(p, q, r, s)
            box, prof = box_dim_bound_raw(pair), profile_bound_raw(pair)
            if box < 1 - 1e-12:
                assert prof < box
            elif box > 1 + 1e-12:
                assert prof > 1.0

    def test_monotone_in_target(self):
        for p in GRID[::3]:
            for q in GRID[::3]:
                if p > q:
                    continue
                for s in GRID[::3]:
                    rs = [r for r in GRID if r <= s]
                    box = [box_dim_bound_raw(DeformationPair.of(p, q, r, s)) for r in rs]
                    prof = [profile_bound_raw(DeformationPair.of(p, q, r, s)) for r in rs]
                    assert all(b <= c + 1e-15 for b, c in zip(box, box[1:]))
                    assert all(b <= c + 1e-15 for b, c in zip(prof, prof[1:]))
                for r in GRID[::3]:
                    ss = [s for s in GRID if s >= r]
                    box = [box_dim_bound_raw(DeformationPair.of(p, q, r, s)) for s in ss]
                    prof = [profile_bound_raw(DeformationPair.of(p, q, r, s)) for s in ss]
                    assert all(b <= c + 1e-15 for b, c in zip(box, box[1:]))
                    assert all(b <= c + 1e-15 for b, c in zip(prof, prof[1:]))


class TestBestBound:
    def test_profile_binds(self):
        rep = best_bound(PAIR)
        assert rep.best == pytest.approx(1.73 / 2.31, abs=TOL)
        assert rep.binding == "profile"

    def test_no_nontrivial_bound(self):
        rep = best_bound(DeformationPair.of(0.1, 0.1, 0.9, 0.9))
        assert rep.box_bound == TRIVIAL
        assert rep.binding == "no nontrivial bound" and rep.best == 1.0

    def test_box_binds_for_fast_source(self):
        rep = best_bound(DeformationPair.of(1.5, 2, 0.5, 0.5))
        assert rep.best == pytest.approx(0.75, abs=TOL)
        assert rep.binding == "box" and rep.profile_bound == NOT_APPLICABLE

    def test_fast_target(self):
        rep = best_bound(DeformationPair.of(0.4, 0.7, 1.2, 1.3))
        assert rep.box_bound == NOT_APPLICABLE and rep.best == 1.0

    def test_json_fields(self):
        d = best_bound(PAIR).to_dict()
        assert set(d) == {"schema", "p", "q", "r", "s", "box_bound", "profile_bound", "best", "binding"}
        assert d["schema"] == 1


class TestSweep:
    def test_respects_constraints(self):
        rows = sweep(GRID, GRID, GRID, GRID)
        assert all(p <= q and r <= s for p, q, r, s, *_ in rows)
        assert len(rows) == (19 * 20 // 2) ** 2

    def test_csv(self):
        rows = sweep([0.4], [0.7], [0.2], [0.3])
        text = sweep_csv(rows)
        parsed = list(csv.reader(io.StringIO(text)))
        assert parsed[0] == ["p", "q", "r", "s", "box_bound", "profile_bound"]
        assert float(parsed[1][5]) == pytest.approx(1.73 / 2.31, abs=TOL)

    def test_grid_labels_exact(self):
        assert GRID[0] == 0.05 and GRID[-1] == 0.95 and len(GRID) == 19
        assert 0.3 in GRID
