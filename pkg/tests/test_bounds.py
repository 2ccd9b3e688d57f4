import numpy as np
import pytest

from literal_tables import LITERAL, oracle_member
from relaysec.acceptance import (
    favorable_model,
    naive_cond_mutual_info,
    random_coupling,
    random_model,
    random_rates,
)
from relaysec.bounds import (
    AuxiliaryCoupling,
    THEOREMS,
    branch_condition,
    build_cf_coupling,
    compose_full_joint,
    evaluate_membership,
    mi_terms,
    theorem_spec,
)
from relaysec.dmc import DMCModel, RateTuple
from relaysec.errors import UsageError, ValidationError
from relaysec.pmf import JointPMF


def bsc(p):
    return np.array([[1 - p, p], [p, 1 - p]])


def product_channel(py=0.1, py1=0.2, pz=0.3):
    """x drives three independent binary symmetric legs; x1 is ignored."""
    t = np.einsum("xy,xw,xz->xywz", bsc(py), bsc(py1), bsc(pz))
    return DMCModel(np.repeat(t[:, None, :, :, :], 2, axis=1))


def z_copies_y_channel(py=0.15):
    """z is the identical observation to y; no secrecy is possible."""
    t = np.zeros((2, 2, 2, 2, 2))
    for x in range(2):
        for x1 in range(2):
            for y in range(2):
                for y1 in range(2):
                    t[x, x1, y, y1, y] = bsc(py)[x, y] * bsc(0.2)[x, y1]
    return DMCModel(t)


def v1_copies_x_coupling(theorem_id="T3"):
    probs = np.zeros((1, 2, 1, 2, 2))
    for i in range(2):
        for k in range(2):
            probs[0, i, 0, i, k] = 0.25
    return AuxiliaryCoupling(JointPMF(("U", "V1", "V2", "X", "X1"), probs), theorem_id)


def degenerate_coupling(theorem_id):
    """All auxiliaries constant; inputs uniform."""
    spec = theorem_spec(theorem_id)
    if spec.uses_compressor:
        base_vars = tuple(v for v in spec.coupling_vars if v not in ("Y1", "Yh"))
        sizes = tuple(2 if v in ("X", "X1") else 1 for v in base_vars)
        probs = np.full(sizes, 0.25)
        base = JointPMF(base_vars, probs)
        q = np.full((2, 2, 1), 1.0)  # constant quantizer output
        return build_cf_coupling(theorem_id, base, product_channel(), q)
    sizes = tuple(2 if v in ("X", "X1") else 1 for v in spec.coupling_vars)
    return AuxiliaryCoupling(
        JointPMF(spec.coupling_vars, np.full(sizes, 0.25)), theorem_id
    )


class TestCouplingValidation:
    def test_wrong_axes_rejected(self):
        with pytest.raises(ValidationError, match="must carry axes"):
            AuxiliaryCoupling(JointPMF(("U", "X"), np.full((1, 2), 0.5)), "T3")

    def test_factorization_violation_reports_deviation(self):
        # X1 correlated with V1 violates the relay-independence factorization.
        probs = np.zeros((1, 2, 1, 2, 2))
        for i in range(2):
            probs[0, i, 0, i, i] = 0.5
        with pytest.raises(ValidationError, match="max deviation"):
            AuxiliaryCoupling(JointPMF(("U", "V1", "V2", "X", "X1"), probs), "T3")

    def test_unknown_theorem(self):
        with pytest.raises(UsageError, match="unknown theorem"):
            AuxiliaryCoupling(JointPMF(("X",), np.array([1.0, 0.0])), "T99")

    def test_cf_coupling_y1_must_match_channel(self):
        model = product_channel()
        rng = np.random.default_rng(3)
        good = random_coupling(rng, "T12", model)
        # Perturb the Y1 leg: rebuild against a different channel.
        other = product_channel(py1=0.45)
        base_probs = good.joint.probs.sum(axis=(-2, -1))
        base = JointPMF(good.joint.axis_names[:-2], base_probs)
        q = np.full((2, 2, 2), 0.5)
        bad = build_cf_coupling("T12", base, other, q)
        with pytest.raises(ValidationError, match="inconsistent with the channel"):
            compose_full_joint(model, bad)

    def test_alphabet_mismatch_is_usage_error(self):
        model = DMCModel(np.full((3, 2, 2, 2, 2), 1.0 / 8.0))
        with pytest.raises(UsageError, match="alphabet"):
            compose_full_joint(model, v1_copies_x_coupling())


class TestMITerms:
    def test_constant_auxiliary_kills_its_terms(self):
        model = product_channel()
        coupling = degenerate_coupling("T3")  # V1 constant too
        terms = mi_terms(model, coupling)
        for name, value in terms.items():
            if "V1" in name:
                assert value == pytest.approx(0.0, abs=1e-12)

    def test_z_copy_symmetry(self):
        # z identical to y and V2 constant: the two confidential-layer legs match.
        model = z_copies_y_channel()
        coupling = v1_copies_x_coupling()
        terms = mi_terms(model, coupling)
        assert terms["I(V1;Y|U,X1)"] == pytest.approx(
            terms["I(V1;Z|U,V2,X1)"], abs=1e-12
        )
        assert terms["I(X1;Y)"] == pytest.approx(terms["I(X1;Z)"], abs=1e-12)

    def test_matches_naive_oracle_on_random_instances(self):
        rng = np.random.default_rng(99)
        for theorem_id in ("T2", "T3", "T9", "T11", "T12"):
            model = random_model(rng)
            coupling = random_coupling(rng, theorem_id, model)
            full = compose_full_joint(model, coupling, theorem_id)
            got = mi_terms(model, coupling, theorem_id)
            spec = theorem_spec(theorem_id)
            for term in spec.all_terms():
                want = naive_cond_mutual_info(
                    full.probs, full.axis_names, term.a, term.b, term.c
                )
                assert got[term.name] == pytest.approx(max(want, 0.0), abs=1e-12)

    def test_terms_sorted_by_name(self):
        model = product_channel()
        terms = mi_terms(model, v1_copies_x_coupling())
        names = list(terms)
        assert names == sorted(names)


class TestBranchCondition:
    def test_equality_qualifies_both_branches(self):
        # x1 ignored: both sides of each comparison are 0.
        report = branch_condition("T3", product_channel(), v1_copies_x_coupling())
        assert [b.applicable for b in report.branches] == [True, True]
        for b in report.branches:
            for c in b.conditions:
                assert c.lhs == pytest.approx(0.0, abs=1e-12)
                assert c.rhs == pytest.approx(0.0, abs=1e-12)

    def test_y_copies_x1_only_first_branch(self):
        # y reveals x1 exactly; z ignores it.
        t = np.zeros((2, 2, 2, 2, 2))
        for x in range(2):
            for x1 in range(2):
                for y1 in range(2):
                    for z in range(2):
                        t[x, x1, x1, y1, z] = bsc(0.2)[x, y1] * bsc(0.3)[x, z]
        model = DMCModel(t)
        report = branch_condition("T3", model, v1_copies_x_coupling())
        assert report.branches[0].applicable
        assert not report.branches[1].applicable
        assert report.branches[0].conditions[0].lhs == pytest.approx(1.0, abs=1e-9)

    def test_verdicts_match_direct_comparison_on_random_draws(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            model = random_model(rng)
            coupling = random_coupling(rng, "T11", model)
            report = branch_condition("T11", model, coupling)
            full = compose_full_joint(model, coupling)
            lhs1 = naive_cond_mutual_info(full.probs, full.axis_names, ("X1",), ("Y",))
            rhs1 = naive_cond_mutual_info(
                full.probs, full.axis_names, ("X1",), ("Z",), ("U",)
            )
            assert report.branches[0].applicable == (lhs1 >= rhs1 - 1e-9)
            lhs2 = naive_cond_mutual_info(full.probs, full.axis_names, ("X1",), ("Z",))
            rhs2 = naive_cond_mutual_info(full.probs, full.axis_names, ("X1",), ("Y",))
            assert report.branches[1].applicable == (lhs2 >= rhs2 - 1e-9)

    def test_relabeling_leaves_verdicts_stable(self):
        rng = np.random.default_rng(23)
        model = random_model(rng)
        coupling = random_coupling(rng, "T3", model)
        before = branch_condition("T3", model, coupling)
        # Swap the two symbols of X everywhere (channel and coupling together).
        flipped_model = DMCModel(model.transition[::-1])
        x_axis = coupling.joint.axis_names.index("X")
        flipped_probs = np.flip(coupling.joint.probs, axis=x_axis)
        flipped = AuxiliaryCoupling(
            JointPMF(coupling.joint.axis_names, flipped_probs), "T3"
        )
        after = branch_condition("T3", flipped_model, flipped)
        for b1, b2 in zip(before.branches, after.branches):
            assert b1.applicable == b2.applicable
            for c1, c2 in zip(b1.conditions, b2.conditions):
                assert c1.lhs == pytest.approx(c2.lhs, abs=1e-12)


class TestEvaluateMembership:
    @pytest.mark.parametrize("theorem_id", sorted(THEOREMS))
    def test_degenerate_coupling_accepts_origin(self, theorem_id):
        model = product_channel()
        coupling = degenerate_coupling(theorem_id)
        ev = evaluate_membership(theorem_id, model, coupling, RateTuple.zero())
        assert ev.member
        for branch in ev.branches:
            for rec in branch.inequalities:
                assert rec.bound == pytest.approx(0.0, abs=1e-9)
                assert rec.slack == pytest.approx(0.0, abs=1e-9)

    def test_identical_eavesdropper_refuses_positive_equivocation(self):
        ev = evaluate_membership(
            "T3",
            z_copies_y_channel(),
            v1_copies_x_coupling(),
            RateTuple(r1=0.2, re1=0.2),
        )
        assert not ev.member

    def test_admissibility_enforced_at_construction(self):
        with pytest.raises(ValidationError, match="Re1 <= R1"):
            RateTuple(r1=0.1, re1=0.2)

    def test_config_checks(self):
        model = product_channel()
        with pytest.raises(UsageError, match="r0"):
            evaluate_membership(
                "T7", model, v1_copies_x_coupling("T7"), RateTuple(r0=0.1)
            )

    def test_no_branch_applicable_reports_none(self):
        # Both receivers see only x XOR x1: unconditionally the relay input is
        # perfectly masked (I(X1;Y) = I(X1;Z) = 0), but conditioned on the
        # confidential layers (V1 = V2 = X) it is fully revealed, so neither
        # less-noisy comparison holds.
        t = np.zeros((2, 2, 2, 2, 2))
        for x in range(2):
            for x1 in range(2):
                t[x, x1, x ^ x1, x, x ^ x1] = 1.0
        model = DMCModel(t)
        probs = np.zeros((1, 2, 2, 2, 2))
        for i in range(2):
            for k in range(2):
                probs[0, i, i, i, k] = 0.25
        coupling = AuxiliaryCoupling(JointPMF(("U", "V1", "V2", "X", "X1"), probs), "T3")
        report = branch_condition("T3", model, coupling)
        assert [b.applicable for b in report.branches] == [False, False]
        ev = evaluate_membership("T3", model, coupling, RateTuple.zero())
        assert not ev.member
        assert ev.branch_taken == "none"

    def test_clamp_equivocation_floors_caps(self):
        # Eavesdropper-favored channel (z clean, y noisy): raw equivocation
        # caps go negative.
        favored = product_channel(py=0.3, pz=0.02)
        ev_raw = evaluate_membership(
            "T3", favored, v1_copies_x_coupling(), RateTuple.zero()
        )
        ev_clamped = evaluate_membership(
            "T3",
            favored,
            v1_copies_x_coupling(),
            RateTuple.zero(),
            clamp_equivocation=True,
        )
        raw_bounds = [
            rec.bound
            for br in ev_raw.branches
            for rec in br.inequalities
            if rec.name.startswith("Re")
        ]
        clamped_bounds = [
            rec.bound
            for br in ev_clamped.branches
            for rec in br.inequalities
            if rec.name.startswith("Re")
        ]
        assert any(b < 0 for b in raw_bounds)
        assert all(b >= 0 for b in clamped_bounds)
        assert ev_clamped.member  # origin is always achievable once floored

    def test_rstar_on_noncompress_bound_rejected(self):
        with pytest.raises(UsageError, match="pure-noise"):
            evaluate_membership(
                "T3",
                product_channel(),
                v1_copies_x_coupling(),
                RateTuple.zero(),
                rstar=0.1,
            )

    def test_explicit_rstar_feasibility(self):
        # Relay input drives both receivers hard (so the relay has rate to
        # spend) and the quantizer is nearly useless (cheap to describe).
        t = np.zeros((2, 2, 2, 2, 2))
        for x in range(2):
            for x1 in range(2):
                t[x, x1] = (
                    bsc(0.1)[x1][:, None, None]
                    * bsc(0.2)[x][None, :, None]
                    * bsc(0.2)[x1][None, None, :]
                )
        model = DMCModel(t)
        base = np.zeros((1, 2, 2, 2))
        for i in range(2):
            for k in range(2):
                base[0, i, i, k] = 0.25
        q = np.broadcast_to(bsc(0.45)[None, :, :], (2, 2, 2)).copy()
        coupling = build_cf_coupling(
            "T12", JointPMF(("U", "V", "X", "X1"), base), model, q
        )
        report = branch_condition("T12", model, coupling)
        limit = report.branches[0].rstar_max
        assert limit is not None and limit > 0.2
        ok = evaluate_membership(
            "T12", model, coupling, RateTuple.zero(), rstar=limit / 2
        )
        assert ok.branches[0].state.applicable
        assert ok.branches[0].state.rstar_used == pytest.approx(limit / 2)
        too_big = evaluate_membership(
            "T12", model, coupling, RateTuple.zero(), rstar=limit + 0.5
        )
        assert not too_big.branches[0].state.applicable
        # Omitting rstar takes the largest feasible value (union semantics).
        default = evaluate_membership("T12", model, coupling, RateTuple.zero())
        assert default.branches[0].state.rstar_used == pytest.approx(limit)

    def test_pure_evaluation_is_deterministic(self):
        rng = np.random.default_rng(37)
        model = random_model(rng)
        coupling = random_coupling(rng, "T7", model)
        r = random_rates(rng, "B")
        a = evaluate_membership("T7", model, coupling, r)
        b = evaluate_membership("T7", model, coupling, r)
        assert a == b


class TestLiteralOracle:
    """Membership verdicts agree with the flat, separately transcribed tables."""

    @pytest.mark.parametrize("theorem_id", sorted(LITERAL))
    def test_agreement_on_random_draws(self, theorem_id):
        rng = np.random.default_rng(abs(hash(theorem_id)) % 2**32)
        spec = theorem_spec(theorem_id)
        draws = 42  # 42 x 12 theorems > 500 total draws
        for _ in range(draws):
            model = random_model(rng) if rng.uniform() < 0.5 else favorable_model(rng)
            coupling = random_coupling(
                rng, theorem_id, model, independent_aux=rng.uniform() < 0.5
            )
            rates = random_rates(rng, spec.config, scale=0.35)
            got = evaluate_membership(theorem_id, model, coupling, rates).member
            want = oracle_member(theorem_id, model, coupling, rates)
            assert got == want, f"{theorem_id} disagrees at {rates.as_tuple()}"


class TestReductions:
    """The no-common-message bounds equal their parents at R0 = 0."""

    @pytest.mark.parametrize(
        "reduced_id,parent_id", [("T5", "T1"), ("T6", "T2"), ("T7", "T3"), ("T8", "T4")]
    )
    def test_r0_zero_reduction(self, reduced_id, parent_id):
        rng = np.random.default_rng(abs(hash(reduced_id)) % 2**32)
        for _ in range(40):
            model = random_model(rng)
            aux_sizes = {"U": 1} if reduced_id == "T5" else None
            coupling = random_coupling(rng, reduced_id, model, aux_sizes=aux_sizes)
            r = random_rates(rng, "B")
            reduced = evaluate_membership(reduced_id, model, coupling, r)
            parent = evaluate_membership(parent_id, model, coupling, r)
            assert reduced.member == parent.member
