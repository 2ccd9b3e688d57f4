import math
import os

import numpy as np
import pytest

from relaysec.acceptance import favorable_model, random_coupling
from relaysec.bounds import AuxiliaryCoupling, corollary_constraints
from relaysec.dmc import DMCModel
from relaysec.errors import BudgetExceededError, UsageError
from relaysec.pmf import JointPMF
from relaysec.regionsearch import (
    brute_force_best,
    coupling_grid,
    estimate_grid_size,
    secrecy_region_extremes,
    simplex_grid,
    simplex_grid_count,
)


def bsc(p):
    return np.array([[1 - p, p], [p, 1 - p]])


def product_channel(py=0.1, py1=0.2, pz=0.3):
    t = np.einsum("xy,xw,xz->xywz", bsc(py), bsc(py1), bsc(pz))
    return DMCModel(np.repeat(t[:, None, :, :, :], 2, axis=1))


def z_copies_y_channel(py=0.15):
    t = np.zeros((2, 2, 2, 2, 2))
    for x in range(2):
        for x1 in range(2):
            for y in range(2):
                for y1 in range(2):
                    t[x, x1, y, y1, y] = bsc(py)[x, y] * bsc(0.2)[x, y1]
    return DMCModel(t)


def z_noise_channel(py=0.1):
    """Receiver 2 sees an unbiased coin regardless of the inputs."""
    t = np.zeros((2, 2, 2, 2, 2))
    for x in range(2):
        for x1 in range(2):
            for y in range(2):
                for y1 in range(2):
                    for z in range(2):
                        t[x, x1, y, y1, z] = bsc(py)[x, y] * bsc(0.2)[x, y1] * 0.5
    return DMCModel(t)


def v1_copies_x_coupling(theorem_id="T3"):
    probs = np.zeros((1, 2, 1, 2, 2))
    for i in range(2):
        for k in range(2):
            probs[0, i, 0, i, k] = 0.25
    return AuxiliaryCoupling(JointPMF(("U", "V1", "V2", "X", "X1"), probs), theorem_id)


class TestSimplexGrid:
    def test_steps_one_is_single_uniform(self):
        assert list(simplex_grid(4, 1)) == [(0.25, 0.25, 0.25, 0.25)]

    def test_steps_two_gives_point_masses(self):
        got = set(simplex_grid(3, 2))
        assert got == {(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)}

    def test_counts_match_enumeration(self):
        for cells in (2, 3, 4):
            for steps in (1, 2, 3, 5):
                grid = list(simplex_grid(cells, steps))
                assert len(grid) == simplex_grid_count(cells, steps)
                assert len(set(grid)) == len(grid)
                for w in grid:
                    assert sum(w) == pytest.approx(1.0, abs=1e-12)

    def test_deterministic_order(self):
        assert list(simplex_grid(3, 3)) == list(simplex_grid(3, 3))


class TestExtremes:
    def test_all_constant_coupling_gives_origin(self):
        model = product_channel()
        probs = np.full((1, 1, 1, 2, 2), 0.25)
        coupling = AuxiliaryCoupling(JointPMF(("U", "V1", "V2", "X", "X1"), probs), "T2")
        for objective in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)):
            ext = secrecy_region_extremes("T2", model, coupling, objective)
            assert ext.rates.as_tuple() == (0.0, 0.0, 0.0, 0.0, 0.0)
            assert not ext.empty_interior

    def test_single_active_cap_is_returned(self):
        # V1 = X through a clean/noisy pair: the R1 cap binds alone.
        model = product_channel(py=0.05, pz=0.4)
        coupling = v1_copies_x_coupling("T2")
        branches = corollary_constraints("T2", model, coupling)
        r1_cap = next(
            lc.bound for lc in branches[0].constraints if lc.coefs == (0.0, 1.0, 0.0)
        )
        ext = secrecy_region_extremes("T2", model, coupling, (0, 1, 0))
        assert ext.objective_value == pytest.approx(r1_cap, abs=1e-12)
        assert ext.rates.r1 == pytest.approx(r1_cap, abs=1e-12)

    def test_negative_cap_empties_the_region(self):
        # Eavesdropper strictly better: the R1 cap is negative, origin fails.
        model = product_channel(py=0.4, pz=0.05)
        coupling = v1_copies_x_coupling("T2")
        ext = secrecy_region_extremes("T2", model, coupling, (0, 1, 0))
        assert ext.empty_interior
        assert ext.rates.as_tuple() == (0.0, 0.0, 0.0, 0.0, 0.0)
        assert ext.branch_id == "none"

    def test_objective_must_be_three_dimensional(self):
        with pytest.raises(UsageError, match="direction"):
            secrecy_region_extremes(
                "T2", product_channel(), v1_copies_x_coupling("T2"), (1, 0)
            )

    def test_vertex_result_dominates_grid_scan(self):
        rng = np.random.default_rng(8)
        hits = 0
        for _ in range(6):
            model = favorable_model(rng)
            coupling = random_coupling(
                rng, "T11", model, aux_sizes=None, independent_aux=True
            )
            ext = secrecy_region_extremes("T11", model, coupling, (0.4, 1.0, 0.0))
            branches = corollary_constraints("T11", model, coupling)
            box = max(
                (lc.bound for br in branches if br.applicable for lc in br.constraints),
                default=0.0,
            )
            if box <= 0.0:
                continue
            hits += 1
            axis = np.linspace(0.0, box, 50)
            g0, g1 = np.meshgrid(axis, axis, indexing="ij")
            pts = np.stack([g0.ravel(), g1.ravel()], axis=1)
            best = -np.inf
            for br in branches:
                if not br.applicable:
                    continue
                a = np.array([[lc.coefs[0], lc.coefs[1]] for lc in br.constraints])
                b = np.array([lc.bound for lc in br.constraints])
                feas = np.all(pts @ a.T <= b + 1e-9, axis=1)
                if np.any(feas):
                    best = max(best, float((pts[feas] @ np.array([0.4, 1.0])).max()))
            if best == -np.inf:
                continue
            assert ext.objective_value >= best - 1e-9
            assert ext.objective_value <= best + 1.4 * box / 49 + 1e-9
        assert hits >= 3

    def test_tie_breaks_to_lexicographically_largest(self):
        # Degenerate objective (0,0,0): every vertex ties at 0; the reported
        # point must then be the lexicographically largest vertex.
        model = product_channel(py=0.05, pz=0.4)
        coupling = v1_copies_x_coupling("T2")
        ext = secrecy_region_extremes("T2", model, coupling, (0.0, 0.0, 0.0))
        best = secrecy_region_extremes("T2", model, coupling, (1.0, 1.0, 1.0))
        assert ext.rates.as_tuple() == best.rates.as_tuple()


class TestBruteForce:
    def test_symmetric_eavesdropper_is_hopeless(self):
        model = z_copies_y_channel()
        res = brute_force_best(model, {"U": 1, "V1": 2, "V2": 1}, 3, "T2", (0, 1, 0))
        assert res.best.objective_value == pytest.approx(0.0, abs=1e-9)

    def test_pure_noise_eavesdropper_recovers_channel_capacity(self):
        model = z_noise_channel(py=0.1)
        steps = 4
        res = brute_force_best(model, {"U": 1, "V1": 2, "V2": 1}, steps, "T2", (0, 1, 0))
        # Direct capacity grid search on the x -> y marginal at fine resolution.
        p_y_given_x = bsc(0.1)
        cap = 0.0
        for w in np.linspace(0.0, 1.0, 2001):
            px = np.array([w, 1 - w])
            py = px @ p_y_given_x
            mi = 0.0
            for x in range(2):
                for y in range(2):
                    joint = px[x] * p_y_given_x[x, y]
                    if joint > 0 and py[y] > 0:
                        mi += joint * math.log2(p_y_given_x[x, y] / py[y])
            cap = max(cap, mi)
        # Same-resolution grid capacity is achievable by the search...
        coarse = 0.0
        for w in [i / (steps - 1) for i in range(steps)]:
            px = np.array([w, 1 - w])
            py = px @ p_y_given_x
            mi = 0.0
            for x in range(2):
                for y in range(2):
                    joint = px[x] * p_y_given_x[x, y]
                    if joint > 0 and py[y] > 0:
                        mi += joint * math.log2(p_y_given_x[x, y] / py[y])
            coarse = max(coarse, mi)
        assert res.best.objective_value >= coarse - 1e-9
        # ... and nothing in the region exceeds the true capacity.
        assert res.best.objective_value <= cap + 1e-6

    def test_steps_one_equals_singleton_evaluation(self):
        model = product_channel()
        res = brute_force_best(model, {"U": 1, "V1": 2, "V2": 1}, 1, "T2", (0, 1, 0))
        assert res.couplings_scanned == 1
        the_one = next(iter(coupling_grid("T2", model, {"U": 1, "V1": 2, "V2": 1}, 1)))
        direct = secrecy_region_extremes("T2", model, the_one, (0, 1, 0))
        assert res.best.objective_value == direct.objective_value
        assert res.best.rates.as_tuple() == direct.rates.as_tuple()

    def test_budget_refusal_reports_estimate(self):
        model = product_channel()
        sizes = {"U": 2, "V1": 2, "V2": 2}
        estimated = estimate_grid_size("T2", model, sizes, 4)
        with pytest.raises(BudgetExceededError, match=str(estimated)):
            brute_force_best(model, sizes, 4, "T2", (0, 1, 0), budget=10)

    def test_aux_cap_enforced(self):
        with pytest.raises(UsageError, match="cap of 3"):
            brute_force_best(product_channel(), {"U": 4, "V1": 1, "V2": 1}, 2, "T2", (0, 1, 0))

    def test_deterministic_and_thread_invariant(self):
        model = product_channel()
        sizes = {"U": 1, "V1": 2, "V2": 1}
        a = brute_force_best(model, sizes, 4, "T3", (0, 1, 0))
        b = brute_force_best(model, sizes, 4, "T3", (0, 1, 0))
        assert a.best == b.best and a.couplings_scanned == b.couplings_scanned
        os.environ["RBC_THREADS"] = "4"
        try:
            c = brute_force_best(model, sizes, 4, "T3", (0, 1, 0))
        finally:
            del os.environ["RBC_THREADS"]
        assert c.best == a.best

    def test_grid_respects_factorization(self):
        model = product_channel()
        for coupling in coupling_grid("T11", model, {"U": 1, "V": 2}, 2):
            pass  # AuxiliaryCoupling construction already checks the pattern

    def test_cf_grid_pins_the_relay_observation_leg(self):
        model = product_channel()
        count = 0
        for coupling in coupling_grid("T12", model, {"U": 1, "V": 2, "Yh": 2}, 2):
            count += 1
            if count > 3:
                break
        assert count > 0
