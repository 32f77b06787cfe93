import math

import numpy as np
import pytest

from wba import dense_ops, entanglement as ent
from wba.dense_ops import DenseOperator, random_matrix, sup_norm
from wba.entanglement import (
    PartitionSpec,
    SearchBudget,
    WernerParams,
    bcs_alpha_threshold,
    bcs_kernel,
    bcs_positivity_condition,
    check_block_positive,
    eggeling_werner_map,
    eggeling_werner_map_trace,
    proposition1_check,
    r_operators,
    random_valid_werner,
    scan_bcs_region,
    werner_ppt_conditions,
    werner_state,
)


@pytest.fixture
def rng():
    return np.random.default_rng(31)


class TestBcsKernel:
    def test_hermitian(self):
        for alpha, beta in ((0.0, 0.0), (0.25, -0.1), (1.3, 0.4)):
            assert bcs_kernel(alpha, beta, 3).is_hermitian(1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_trace_matches_term_traces(self, d):
        # term-by-term oracle: tr (12)^{T2} = tr (12) = d^2 (trace is
        # invariant under partial transposition), tr (13) = d^2, tr id = d^3
        alpha, beta = 0.3, -0.2
        kernel = bcs_kernel(alpha, beta, d)
        expect = d * d + d * d + alpha * d ** 3 + beta * d * d
        assert np.isclose(kernel.trace(), expect)

    def test_witness_point_spectrum(self):
        kernel = bcs_kernel(0.25, -0.1, 3)
        assert dense_ops.min_eigenvalue(kernel) < -1e-3


class TestBcsCondition:
    def test_beta_zero_threshold(self):
        assert bcs_alpha_threshold(0.0, 3) == 0.0
        assert bcs_positivity_condition(0.0, 0.0, 3)
        assert not bcs_positivity_condition(-1e-6, 0.0, 3)

    def test_paper_threshold_value(self):
        th = bcs_alpha_threshold(-0.1, 3)
        assert th == pytest.approx((-(2 + 3 * -0.1) + math.sqrt(9 * 0.01 + 0.4 + 4)) / 2)
        assert abs(th - 0.2095) < 2e-4
        assert round(th, 2) == 0.21

    def test_witness_point_is_positive_map(self):
        assert bcs_positivity_condition(0.25, -0.1, 3)
        assert not bcs_positivity_condition(0.20, -0.1, 3)

    def test_monotone_in_alpha(self):
        for beta in (-0.4, -0.1, 0.0, 0.3):
            th = bcs_alpha_threshold(beta, 3)
            assert bcs_positivity_condition(th + 0.01, beta, 3)
            assert not bcs_positivity_condition(th - 0.01, beta, 3)


class TestBlockPositive:
    def test_identity_is_psd(self):
        verdict = check_block_positive(dense_ops.identity(2, 2),
                                       PartitionSpec.parse("1|2"), SearchBudget(seed=0))
        assert verdict.classification == ent.PSD

    def test_negative_identity(self):
        m = DenseOperator(2, 2, -np.eye(4, dtype=complex))
        verdict = check_block_positive(m, PartitionSpec.parse("1|2"),
                                       SearchBudget(seed=0, restarts=4, samples=16))
        assert verdict.classification == ent.NOT_BLOCK_POSITIVE
        assert verdict.violating_product_state is not None
        value = ent.product_state_value(m, PartitionSpec.parse("1|2"),
                                        verdict.violating_product_state)
        assert value < -1e-7

    def test_witness_point(self):
        kernel = bcs_kernel(0.25, -0.1, 3)
        verdict = check_block_positive(kernel, PartitionSpec.parse("1|23"),
                                       SearchBudget(seed=5, restarts=16, samples=64))
        assert verdict.classification == ent.WITNESS_CANDIDATE
        assert verdict.min_eig < -1e-6
        assert verdict.product_min_estimate >= -1e-7

    def test_swap_witness_three_blocks(self):
        # the swap operator is negative on no product state but not PSD
        swap = DenseOperator(2, 2, np.array(
            [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex))
        verdict = check_block_positive(swap, PartitionSpec.parse("1|2"),
                                       SearchBudget(seed=1, restarts=8, samples=32))
        assert verdict.classification == ent.WITNESS_CANDIDATE

    def test_rejects_non_hermitian(self):
        m = DenseOperator(1, 2, np.array([[0, 1], [0, 0]], dtype=complex))
        with pytest.raises(ValueError):
            check_block_positive(m, PartitionSpec.parse("1"), SearchBudget())

    def test_partition_validation(self):
        with pytest.raises(ValueError):
            PartitionSpec.parse("1|3")


class TestWernerParams:
    def test_projector_basis_traces(self):
        d = 3
        rk = r_operators(d)
        assert np.isclose(np.trace(rk["+"]), d * (d ** 2 + 3 * d + 2) / 6)
        assert np.isclose(np.trace(rk["-"]), d * (d ** 2 - 3 * d + 2) / 6)
        assert np.isclose(np.trace(rk["0"]), 2 * d * (d ** 2 - 1) / 3)
        for key in ("1", "2", "3"):
            assert abs(np.trace(rk[key])) < 1e-12

    def test_rk_gram_matrix_diagonal(self):
        d = 3
        rk = r_operators(d)
        keys = list(rk)
        for i, a in enumerate(keys):
            for b in keys[i + 1:]:
                assert abs(np.trace(rk[a] @ rk[b])) < 1e-10

    def test_symmetrizer_state(self):
        d = 3
        params = WernerParams.from_rs((1, 0, 0, 0, 0, 0), d)
        rho = werner_state(params)
        rk = r_operators(d)
        assert sup_norm(rho.mat - rk["+"] / np.trace(rk["+"]).real) < 1e-12

    def test_maximally_mixed(self):
        d = 3
        params = WernerParams.from_alphas((1 / d ** 3, 0, 0, 0, 0, 0), d)
        rho = werner_state(params)
        assert sup_norm(rho.mat - np.eye(d ** 3) / d ** 3) < 1e-14
        rk = r_operators(d)
        for r_val, key in zip(params.rs, ent.R_KEYS):
            assert np.isclose(r_val, np.trace(rk[key]).real / d ** 3)

    def test_expectations_recovered_from_state(self, rng):
        d = 3
        rk = r_operators(d)
        for _ in range(20):
            params = random_valid_werner(rng, d)
            rho = werner_state(params)
            for r_val, key in zip(params.rs, ent.R_KEYS):
                assert np.isclose(r_val, np.trace(rho.mat @ rk[key]).real, atol=1e-10)

    def test_conversion_roundtrips(self, rng):
        for _ in range(50):
            params = random_valid_werner(rng, 3)
            again = WernerParams.from_alphas(params.alphas, 3)
            assert np.allclose(again.rs, params.rs, atol=1e-12)
            assert np.allclose(again.cs, params.cs, atol=1e-12)
            via_cs = WernerParams.from_cs(params.cs, 3)
            assert np.allclose(via_cs.rs, params.rs, atol=1e-12)

    def test_hermitian_iff_coefficient_symmetry(self, rng):
        params = random_valid_werner(rng, 3)
        a = params.alphas
        assert abs(a[4] - np.conj(a[5])) < 1e-12
        assert all(abs(x.imag) < 1e-12 for x in a[:4])
        assert werner_state(params).is_hermitian(1e-12)

    def test_trace_one(self, rng):
        for _ in range(10):
            params = random_valid_werner(rng, 3)
            assert np.isclose(werner_state(params).trace(), 1.0)

    def test_d2_conversion_rejected(self):
        with pytest.raises(ValueError):
            WernerParams.from_rs((1, 0, 0, 0, 0, 0), 2)

    def test_inconsistent_coefficient_sets_rejected(self):
        good = WernerParams.from_rs((0.4, 0.1, 0.5, 0, 0, 0), 3)
        tampered = WernerParams(good.alphas, tuple(2 * c for c in good.cs),
                                good.rs, 3)
        with pytest.raises(ValueError, match="disagree"):
            werner_state(tampered)


class TestPptConditions:
    def test_maximally_mixed_all_true(self):
        d = 3
        rk = r_operators(d)
        rs = [np.trace(rk[key]).real / d ** 3 for key in ent.R_KEYS]
        checks, overall = werner_ppt_conditions(rs)
        assert overall and all(checks)

    def test_negative_r_minus_fails_first(self):
        checks, overall = werner_ppt_conditions((0.5, -0.1, 0.6, 0, 0, 0))
        assert not checks[0] and not overall

    @pytest.mark.parametrize("seed", [2, 77])
    def test_equivalence_with_eigensolver(self, seed):
        rng = np.random.default_rng(seed)
        for _ in range(200):
            params = random_valid_werner(rng, 3)
            _, analytic = werner_ppt_conditions(params.rs)
            rho_t1 = dense_ops.partial_transpose(werner_state(params), (1,))
            assert analytic == (dense_ops.min_eigenvalue(rho_t1) >= -1e-8)


class TestInvariantStateMaps:
    @pytest.mark.parametrize("row", ent.F_ROWS + ent.G_ROWS)
    def test_closed_form_equals_trace_form(self, row, rng):
        for _ in range(10):
            params = random_valid_werner(rng, 3)
            a = random_matrix(3, 1, rng)
            b = random_matrix(3, 1, rng) if row.startswith("g") else None
            closed = eggeling_werner_map(row, params, a, b)
            trace = eggeling_werner_map_trace(row, params, a, b)
            assert sup_norm(closed.mat - trace.mat) < 1e-10

    def test_symmetry_identities(self, rng):
        for _ in range(10):
            params = random_valid_werner(rng, 3)
            a = random_matrix(3, 1, rng)
            b = random_matrix(3, 1, rng)
            pairs = [
                (eggeling_werner_map("f3", params, a.T),
                 eggeling_werner_map("f13", params, a)),
                (eggeling_werner_map("f2", params, a.T),
                 eggeling_werner_map("f12", params, a)),
                (eggeling_werner_map("g13", params, a.T, b.T),
                 eggeling_werner_map("g23", params, a, b)),
                (eggeling_werner_map("g1", params, a.T, b.T),
                 eggeling_werner_map("g2", params, a, b)),
            ]
            for lhs, rhs in pairs:
                assert sup_norm(lhs.mat - rhs.mat) < 1e-12


class TestProposition1:
    def test_maximally_mixed_coherent(self):
        params = WernerParams.from_alphas((1 / 27, 0, 0, 0, 0, 0), 3)
        report = proposition1_check(params, (1,),
                                    SearchBudget(seed=3, restarts=8, samples=64))
        assert report["contradictions"] == []
        assert report["f_verdict"].classification == ent.PSD

    def test_random_states_coherent(self, rng):
        budget = SearchBudget(seed=9, restarts=8, samples=64)
        for _ in range(3):
            params = random_valid_werner(rng, 3)
            for s in ((1,), (3,)):
                report = proposition1_check(params, s, budget, n_inputs=10)
                assert report["contradictions"] == []

    def test_witness_regime_point_exists(self, rng):
        # search the sampled states for one with negative partial transpose
        # whose single-input map still looks positive (block-positive kernel)
        budget = SearchBudget(seed=13, restarts=16, samples=128)
        found = False
        for _ in range(200):
            params = random_valid_werner(rng, 3)
            _, ppt = werner_ppt_conditions(params.rs)
            if ppt:
                continue
            report = proposition1_check(params, (1,), budget, n_inputs=10)
            if report["f_verdict"].classification == ent.WITNESS_CANDIDATE:
                assert report["f_sample_min"] >= -budget.band
                found = True
                break
        assert found, "no witness-regime point located in 200 samples"


class TestVerdictInvariants:
    def test_random_hermitian_operators(self, rng):
        budget = SearchBudget(seed=6, restarts=6, samples=48)
        partition = PartitionSpec.parse("1|2")
        for i in range(12):
            g = random_matrix(2, 2, rng)
            m = DenseOperator(2, 2, (g + g.conj().T) / 2 + (i - 6) * 0.2 * np.eye(4))
            verdict = check_block_positive(m, partition, budget)
            if verdict.classification == ent.PSD:
                assert verdict.min_eig >= -budget.eig_tol
            else:
                assert verdict.min_eig < -budget.eig_tol
            if verdict.classification == ent.NOT_BLOCK_POSITIVE:
                value = ent.product_state_value(m, partition,
                                                verdict.violating_product_state)
                assert value < -budget.band


class TestScan:
    def test_parallel_matches_serial(self):
        budget = SearchBudget(seed=8, restarts=4, samples=32)
        serial = scan_bcs_region([0.0, 0.3], [-0.2, 0.1], 3, budget)
        parallel = scan_bcs_region([0.0, 0.3], [-0.2, 0.1], 3, budget, parallelism=3)
        assert serial == parallel

    def test_small_grid(self):
        budget = SearchBudget(seed=21, restarts=8, samples=64)
        rows = scan_bcs_region([0.25, 5.0], [-0.1], 3, budget)
        by_point = {(r["alpha"], r["beta"]): r for r in rows}
        witness = by_point[(0.25, -0.1)]
        assert witness["analytic_positive"] and witness["class"] == ent.WITNESS_CANDIDATE
        far = by_point[(5.0, -0.1)]
        assert far["analytic_positive"]
        # deep in the positive region the kernel is actually PSD
        assert far["class"] == ent.PSD and far["min_eig"] >= -1e-9

    def test_condition_boundary_at_beta_zero(self):
        assert bcs_alpha_threshold(0.0, 3) == 0.0
