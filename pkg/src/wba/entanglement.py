"""Positivity and block-positivity machinery on three tensor factors.

Covers the Bardet-Collins-Sapra kernel and its witness region, the
Eggeling-Werner parametrization of U (x) U (x) U - invariant states with the
analytic conditions for positivity of the partial transpose, the twelve
closed-form maps obtained by tracing such states against one or two inputs,
and a see-saw search for the minimum of a hermitian form over product states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dense_ops
from .dense_ops import DenseOperator
from .sym_core import Permutation, parse_permutation
from .wba_algebra import from_permutation, realize

EIG_TOL = 1e-9
PRODUCT_BAND = 1e-7

PSD = "PSD"
WITNESS_CANDIDATE = "WITNESS_CANDIDATE"
NOT_BLOCK_POSITIVE = "NOT_BLOCK_POSITIVE"
INCONCLUSIVE = "INCONCLUSIVE"

_PERM_NAMES = ("()", "(1 2)", "(2 3)", "(3 1)", "(1 2 3)", "(3 2 1)")


def _perms3() -> list[Permutation]:
    return [parse_permutation(t, 3) for t in _PERM_NAMES]


def permutation_operators(d: int) -> list[np.ndarray]:
    """Dense id, (12), (23), (31), (123), (321) on three factors."""
    return [realize(p, d) for p in _perms3()]


def r_operators(d: int) -> dict[str, np.ndarray]:
    """The orthogonal operator basis R_+, R_-, R_0, R_1, R_2, R_3."""
    one, p12, p23, p31, p123, p321 = permutation_operators(d)
    s3 = math.sqrt(3.0)
    return {
        "+": (one + p12 + p23 + p31 + p123 + p321) / 6.0,
        "-": (one - p12 - p23 - p31 + p123 + p321) / 6.0,
        "0": (2.0 * one - p123 - p321) / 3.0,
        "1": (2.0 * p23 - p31 - p12) / 3.0,
        "2": (p12 - p31) / s3,
        "3": 1j * (p123 - p321) / s3,
    }


R_KEYS = ("+", "-", "0", "1", "2", "3")


# ---------------------------------------------------------------------------
# Werner parameters: alpha (permutation basis), c (R_k basis), r (expectations)
# ---------------------------------------------------------------------------

def cs_from_rs(rs, d: int):
    """Invert r_k = tr(rho R_k); needs d >= 3 so no R_k vanishes."""
    if d < 3:
        raise ValueError("the r <-> c conversion needs d >= 3")
    rp, rm, r0, r1, r2, r3 = rs
    return (
        6.0 * rp / (d * (d * d + 3 * d + 2)),
        6.0 * rm / (d * (d * d - 3 * d + 2)),
        3.0 * r0 / (2 * d * (d * d - 1)),
        3.0 * r1 / (2 * d * (d * d - 1)),
        3.0 * r2 / (2 * d * (d * d - 1)),
        3.0 * r3 / (2 * d * (d * d - 1)),
    )


def rs_from_cs(cs, d: int):
    cp, cm, c0, c1, c2, c3 = cs
    return (
        cp * d * (d * d + 3 * d + 2) / 6.0,
        cm * d * (d * d - 3 * d + 2) / 6.0,
        c0 * 2 * d * (d * d - 1) / 3.0,
        c1 * 2 * d * (d * d - 1) / 3.0,
        c2 * 2 * d * (d * d - 1) / 3.0,
        c3 * 2 * d * (d * d - 1) / 3.0,
    )


def alphas_from_cs(cs):
    """Expand sum_k c_k R_k in the permutation basis.

    The (1 2) coefficient is c+/6 - c-/6 - c1/3 + c2/sqrt(3): R_1 contributes
    -c1/3 and R_2 contributes +c2/sqrt(3) there, mirroring the (3 1)
    coefficient up to the sign of c2.
    """
    cp, cm, c0, c1, c2, c3 = cs
    s3 = math.sqrt(3.0)
    return (
        complex(cp / 6 + cm / 6 + 2 * c0 / 3),
        complex(cp / 6 - cm / 6 - c1 / 3 + c2 / s3),
        complex(cp / 6 - cm / 6 + 2 * c1 / 3),
        complex(cp / 6 - cm / 6 - c1 / 3 - c2 / s3),
        complex(cp / 6 + cm / 6 - c0 / 3 + 1j * c3 / s3),
        complex(cp / 6 + cm / 6 - c0 / 3 - 1j * c3 / s3),
    )


def cs_from_alphas(alphas, tol: float = 1e-9):
    a1, a2, a3, a4, a5, a6 = (complex(a) for a in alphas)
    s3 = math.sqrt(3.0)
    cp = a1 + a2 + a3 + a4 + a5 + a6
    cm = a1 - a2 - a3 - a4 + a5 + a6
    c0 = a1 - (a5 + a6) / 2
    c1 = a3 - (a2 + a4) / 2
    c2 = s3 * (a2 - a4) / 2
    c3 = s3 * (a5 - a6) / 2j
    cs = (cp, cm, c0, c1, c2, c3)
    if any(abs(c.imag) > tol for c in cs):
        raise ValueError("alphas are not hermitian-compatible (complex c_k)")
    return tuple(c.real for c in cs)


@dataclass(frozen=True)
class WernerParams:
    """A U (x) U (x) U - invariant operator in all three coordinate systems."""

    alphas: tuple[complex, ...]
    cs: tuple[float, ...]
    rs: tuple[float, ...]
    d: int

    @staticmethod
    def from_rs(rs, d: int) -> "WernerParams":
        rs = tuple(float(r) for r in rs)
        cs = cs_from_rs(rs, d)
        return WernerParams(alphas_from_cs(cs), cs, rs, d)

    @staticmethod
    def from_cs(cs, d: int) -> "WernerParams":
        cs = tuple(float(c) for c in cs)
        return WernerParams(alphas_from_cs(cs), cs, rs_from_cs(cs, d), d)

    @staticmethod
    def from_alphas(alphas, d: int) -> "WernerParams":
        cs = cs_from_alphas(alphas)
        return WernerParams(tuple(complex(a) for a in alphas), cs, rs_from_cs(cs, d), d)

    def is_valid_state(self, tol: float = 1e-10) -> bool:
        rp, rm, r0, r1, r2, r3 = self.rs
        return (rp >= -tol and rm >= -tol and r0 >= -tol
                and abs(rp + rm + r0 - 1.0) <= tol
                and r1 * r1 + r2 * r2 + r3 * r3 <= r0 * r0 + tol)


def random_valid_werner(rng: np.random.Generator, d: int = 3) -> WernerParams:
    """Uniform-ish sample of a valid parameter vector: simplex weights for
    (r+, r-, r0) and a uniform point of the radius-r0 ball for (r1, r2, r3)."""
    rp, rm, r0 = rng.dirichlet((1.0, 1.0, 1.0))
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    radius = r0 * rng.random() ** (1.0 / 3.0)
    r1, r2, r3 = radius * direction
    return WernerParams.from_rs((rp, rm, r0, r1, r2, r3), d)


def werner_state(params: WernerParams, tol: float = 1e-10) -> DenseOperator:
    """Dense operator from the alpha coefficients; cross-checked against the
    R_k expansion, so inconsistent parameter sets are rejected."""
    d = params.d
    perms = permutation_operators(d)
    mat = sum(a * p for a, p in zip(params.alphas, perms))
    rk = r_operators(d)
    mat_c = sum(c * rk[key] for c, key in zip(params.cs, R_KEYS))
    if dense_ops.sup_norm(mat - mat_c) > tol * max(1.0, dense_ops.sup_norm(mat)):
        raise ValueError("alpha and c coefficient sets disagree")
    return DenseOperator(3, d, mat)


def werner_ppt_conditions(rs) -> tuple[list[bool], bool]:
    """Six analytic inequalities equivalent, for valid states at d = 3, to
    positivity of the partial transpose on the first factor.

    The partially transposed invariant state splits into two scalar sectors
    (the symmetric and antisymmetric parts of the complement of the
    contraction ideal) and one 2 x 2 block.  Conditions: (a) r- >= 0;
    (b) the symmetric-sector eigenvalue; (c), (d) the block diagonal;
    (e) the block determinant, r2^2 + r3^2 <= F1 with
    F1 = (1 - r1 - 5 r- - r+)(-1 - r1 + r- + 5 r+)/3;
    (f) the antisymmetric-sector eigenvalue.  (b) and (f) are the forms a
    direct eigensolver comparison confirms; (e) keeps F1 exactly.  The
    equivalence is asserted for valid states only, though the inequalities
    evaluate on any parameter vector.
    """
    rp, rm, _r0, r1, r2, r3 = (float(x) for x in rs)
    slack = 1e-12
    f1 = (1 - r1 - 5 * rm - rp) * (-1 - r1 + rm + 5 * rp) / 3.0
    quad = r2 * r2 + r3 * r3
    checks = [
        rm >= -slack,
        5 + 5 * r1 - rp - 5 * rm >= -slack,
        1 - r1 - 5 * rm - rp >= -slack,
        -1 - r1 + rm + 5 * rp >= -slack,
        quad <= f1 + slack,
        1 - r1 + 7 * rm - rp >= -slack,
    ]
    return checks, all(checks)


# ---------------------------------------------------------------------------
# the twelve closed-form maps f_S, g_S
# ---------------------------------------------------------------------------

F_ROWS = ("f1", "f2", "f3", "f12", "f13", "f23")
G_ROWS = ("g1", "g2", "g3", "g12", "g13", "g23")
ROW_SUBSETS = {"1": (1,), "2": (2,), "3": (3,), "12": (1, 2), "13": (1, 3), "23": (2, 3)}


def _row_subset(row: str) -> tuple[int, ...]:
    return ROW_SUBSETS[row.lstrip("fg")]


def eggeling_werner_map_trace(row: str, params: WernerParams, a, b=None) -> DenseOperator:
    """Defining trace formula: tr over the input slots of rho^{T_S} inputs."""
    d = params.d
    rho = werner_state(params)
    rho_ts = dense_ops.partial_transpose(rho, _row_subset(row))
    a = np.asarray(a, dtype=complex)
    if row.startswith("f"):
        big = np.kron(a, np.eye(d * d, dtype=complex))
        return dense_ops.partial_trace(DenseOperator(3, d, rho_ts.mat @ big), (1,))
    b = np.asarray(b, dtype=complex)
    big = np.kron(np.kron(a, b), np.eye(d, dtype=complex))
    return dense_ops.partial_trace(DenseOperator(3, d, rho_ts.mat @ big), (1, 2))


def eggeling_werner_map(row: str, params: WernerParams, a, b=None) -> DenseOperator:
    """Closed form of the same map: alpha-weighted sums of products,
    transposes, reshufflings, and partially transposed reshufflings."""
    d = params.d
    a1, a2, a3, a4, a5, a6 = params.alphas
    a = np.asarray(a, dtype=complex)
    eye = np.eye(d, dtype=complex)

    if row.startswith("f"):
        def two(x, y):
            return DenseOperator(2, d, np.kron(x, y))

        def r(x):
            return dense_ops.reshuffle_bipartite(x)

        def rt2(x):
            return dense_ops.partial_transpose(r(x), (2,))

        tr_a = np.trace(a)
        ee, eer, eert = two(eye, eye), r(two(eye, eye)), rt2(two(eye, eye))
        table = {
            "f1": (a2 * two(a.T, eye).mat + a3 * tr_a * eert.mat + a4 * two(eye, a.T).mat
                   + a5 * rt2(two(a.T, eye)).mat + a6 * rt2(two(eye, a)).mat),
            "f2": (a2 * two(a.T, eye).mat + a3 * tr_a * eer.mat + a4 * two(eye, a).mat
                   + a5 * r(two(eye, a)).mat + a6 * r(two(a.T, eye)).mat),
            "f3": (a2 * two(a, eye).mat + a3 * tr_a * eer.mat + a4 * two(eye, a.T).mat
                   + a5 * r(two(a, eye)).mat + a6 * r(two(eye, a.T)).mat),
            "f12": (a2 * two(a, eye).mat + a3 * tr_a * eer.mat + a4 * two(eye, a.T).mat
                    + a5 * r(two(eye, a.T)).mat + a6 * r(two(a, eye)).mat),
            "f13": (a2 * two(a.T, eye).mat + a3 * tr_a * eer.mat + a4 * two(eye, a).mat
                    + a5 * r(two(a.T, eye)).mat + a6 * r(two(eye, a)).mat),
            "f23": (a2 * two(a.T, eye).mat + a3 * tr_a * eert.mat + a4 * two(eye, a.T).mat
                    + a5 * rt2(two(eye, a)).mat + a6 * rt2(two(a.T, eye)).mat),
        }
        return DenseOperator(2, d, a1 * tr_a * ee.mat + table[row])

    b = np.asarray(b, dtype=complex)
    tr_a, tr_b = np.trace(a), np.trace(b)
    table = {
        "g1": (a2 * np.trace(a.T @ b) * eye + a3 * tr_a * b + a4 * tr_b * a.T
               + a5 * b @ a.T + a6 * a.T @ b),
        "g2": (a2 * np.trace(a @ b.T) * eye + a3 * tr_a * b.T + a4 * tr_b * a
               + a5 * b.T @ a + a6 * a @ b.T),
        "g3": (a2 * np.trace(a @ b) * eye + a3 * tr_a * b.T + a4 * tr_b * a.T
               + a5 * a.T @ b.T + a6 * b.T @ a.T),
        "g12": (a2 * np.trace(a.T @ b.T) * eye + a3 * tr_a * b.T + a4 * tr_b * a.T
                + a5 * b.T @ a.T + a6 * a.T @ b.T),
        "g13": (a2 * np.trace(a.T @ b) * eye + a3 * tr_a * b.T + a4 * tr_b * a
                + a5 * a @ b.T + a6 * b.T @ a),
        "g23": (a2 * np.trace(a.T @ b) * eye + a3 * tr_a * b + a4 * tr_b * a.T
                + a5 * a.T @ b + a6 * b @ a.T),
    }
    return DenseOperator(1, d, a1 * tr_a * tr_b * eye + table[row])


# ---------------------------------------------------------------------------
# Bardet-Collins-Sapra kernel and positivity condition
# ---------------------------------------------------------------------------

def bcs_kernel(alpha: float, beta: float, d: int) -> DenseOperator:
    """(1 2)^{T_2} + (1 3) + alpha * id + beta * (2 3)^{T_2} on three factors."""
    if d < 2:
        raise ValueError("need d >= 2")
    p = parse_permutation
    mat = (realize(from_permutation(p("(1 2)", 3), {2}), d)
           + realize(p("(3 1)", 3), d)
           + alpha * realize(p("()", 3), d)
           + beta * realize(from_permutation(p("(2 3)", 3), {2}), d))
    return DenseOperator(3, d, mat)


def bcs_alpha_threshold(beta: float, d: int) -> float:
    """Smallest alpha making the induced single-input map positive at this beta."""
    if beta >= 0:
        return 0.0
    disc = d * d * beta * beta - 4 * (d - 2) * beta + 4
    return (-(2 + d * beta) + math.sqrt(disc)) / 2.0


def bcs_positivity_condition(alpha: float, beta: float, d: int) -> bool:
    """Positivity of the induced map: alpha >= 0 for beta >= 0, else alpha
    above the square-root threshold."""
    if d < 3:
        raise ValueError("the analytic condition is stated for d >= 3")
    return alpha >= bcs_alpha_threshold(beta, d)


# ---------------------------------------------------------------------------
# block-positivity via sampling + see-saw
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionSpec:
    """Ordered disjoint site blocks covering 1..n, e.g. 1|23."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        flat = [s for b in self.blocks for s in b]
        if sorted(flat) != list(range(1, len(flat) + 1)):
            raise ValueError(f"blocks must partition 1..n: {self.blocks}")

    @staticmethod
    def parse(text: str) -> "PartitionSpec":
        """Parse "1|23" style."""
        blocks = tuple(tuple(int(ch) for ch in part) for part in text.split("|"))
        return PartitionSpec(blocks)

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __str__(self) -> str:
        return "|".join("".join(str(s) for s in b) for b in self.blocks)


@dataclass(frozen=True)
class SearchBudget:
    restarts: int = 64
    iterations: int = 200
    samples: int = 512
    improve_tol: float = 1e-12
    band: float = PRODUCT_BAND
    eig_tol: float = EIG_TOL
    seed: int = 0


@dataclass(frozen=True)
class PositivityVerdict:
    classification: str
    min_eig: float
    product_min_estimate: float
    violating_product_state: tuple[np.ndarray, ...] | None = None


def _blocked_tensor(m: DenseOperator, partition: PartitionSpec) -> np.ndarray:
    order = [s for b in partition.blocks for s in b]
    axes = [s - 1 for s in order] + [m.n + s - 1 for s in order]
    dims = [m.d ** len(b) for b in partition.blocks]
    return m.tensor.transpose(axes).reshape(dims + dims)


def _random_block_vectors(dims, rng) -> list[np.ndarray]:
    out = []
    for dim in dims:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        out.append(v / np.linalg.norm(v))
    return out


def product_state_value(m: DenseOperator, partition: PartitionSpec, vectors) -> float:
    """<v_1 ... v_l| M |v_1 ... v_l> with the blocks in partition order."""
    full = vectors[0]
    for v in vectors[1:]:
        full = np.kron(full, v)
    # full lives on block-reordered sites; bring M into the same order
    t = _blocked_tensor(m, partition)
    dim = int(np.prod([m.d ** len(b) for b in partition.blocks]))
    mat = t.reshape(dim, dim)
    return float(np.real(full.conj() @ mat @ full))


def _effective_block_operator(t: np.ndarray, vectors, i: int) -> np.ndarray:
    ell = len(vectors)
    operands = [t, list(range(2 * ell))]
    for j, v in enumerate(vectors):
        if j == i:
            continue
        operands += [v.conj(), [j], v, [ell + j]]
    return np.einsum(*operands, [i, ell + i])


def product_state_minimize(m: DenseOperator, partition: PartitionSpec,
                           budget: SearchBudget) -> tuple[float, tuple[np.ndarray, ...]]:
    """Estimate min over product states by random sampling plus alternating
    ground-eigenvector sweeps (see-saw), multi-restart."""
    rng = np.random.default_rng(budget.seed)
    t = _blocked_tensor(m, partition)
    dims = [m.d ** len(b) for b in partition.blocks]
    ell = len(dims)

    best_val = math.inf
    best_vecs: tuple[np.ndarray, ...] | None = None

    def consider(val, vecs):
        nonlocal best_val, best_vecs
        if val < best_val:
            best_val = val
            best_vecs = tuple(v.copy() for v in vecs)

    for _ in range(budget.samples):
        vecs = _random_block_vectors(dims, rng)
        consider(product_state_value(m, partition, vecs), vecs)

    for _ in range(budget.restarts):
        vecs = _random_block_vectors(dims, rng)
        current = product_state_value(m, partition, vecs)
        for _ in range(budget.iterations):
            for i in range(ell):
                eff = _effective_block_operator(t, vecs, i)
                eff = (eff + eff.conj().T) / 2.0
                w, u = np.linalg.eigh(eff)
                vecs[i] = u[:, 0]
                value = w[0]
            if current - value < budget.improve_tol:
                current = value
                break
            current = value
        consider(current, vecs)

    assert best_vecs is not None
    return best_val, best_vecs


def check_block_positive(m: DenseOperator, partition: PartitionSpec,
                         budget: SearchBudget | None = None) -> PositivityVerdict:
    """Classify a hermitian operator as PSD / witness candidate / negative on
    a product state / inconclusive, for the given site partition.

    The product minimum is only an estimate (no certificate exists for
    block-positivity), but a NOT_BLOCK_POSITIVE verdict always carries a
    concrete violating product state whose value is re-evaluated
    independently of the search.
    """
    budget = budget or SearchBudget()
    if not m.is_hermitian():
        raise ValueError("block-positivity is defined for hermitian operators")
    lam = dense_ops.min_eigenvalue(m)
    if lam >= -budget.eig_tol:
        return PositivityVerdict(PSD, lam, lam)
    value, vecs = product_state_minimize(m, partition, budget)
    if value >= -budget.band:
        return PositivityVerdict(WITNESS_CANDIDATE, lam, value)
    recheck = product_state_value(m, partition, vecs)
    if recheck < -budget.band:
        return PositivityVerdict(NOT_BLOCK_POSITIVE, lam, value, vecs)
    return PositivityVerdict(INCONCLUSIVE, lam, value)


# ---------------------------------------------------------------------------
# cross-validation and scans
# ---------------------------------------------------------------------------

def proposition1_check(params: WernerParams, s, budget: SearchBudget | None = None,
                       n_inputs: int = 20) -> dict:
    """Positivity of f_S / g_S on random PSD inputs against block-positivity
    of rho^{T_S} for 1|23 and 1|2|3 respectively; lists any contradiction."""
    budget = budget or SearchBudget()
    d = params.d
    rng = np.random.default_rng(budget.seed)
    s = tuple(sorted(set(s)))
    row = "".join(str(x) for x in s)
    rho_ts = dense_ops.partial_transpose(werner_state(params), s)

    f_min = math.inf
    g_min = math.inf
    for _ in range(n_inputs):
        a = dense_ops.random_psd(d, 1, rng).mat
        b = dense_ops.random_psd(d, 1, rng).mat
        f_min = min(f_min, dense_ops.min_eigenvalue(eggeling_werner_map("f" + row, params, a)))
        g_min = min(g_min, dense_ops.min_eigenvalue(eggeling_werner_map("g" + row, params, a, b)))

    verdict_f = check_block_positive(rho_ts, PartitionSpec.parse("1|23"), budget)
    verdict_g = check_block_positive(rho_ts, PartitionSpec.parse("1|2|3"), budget)

    block_pos = {PSD, WITNESS_CANDIDATE}
    contradictions = []
    if (f_min >= -budget.band) != (verdict_f.classification in block_pos):
        contradictions.append(
            f"f_{row}: sampled map minimum {f_min:.3g} vs verdict {verdict_f.classification}")
    if (g_min >= -budget.band) != (verdict_g.classification in block_pos):
        contradictions.append(
            f"g_{row}: sampled map minimum {g_min:.3g} vs verdict {verdict_g.classification}")
    # fully-product vectors are a subset of the 1|23 product vectors, so
    # positivity of f_S implies positivity of g_S (not the other way around)
    if (verdict_f.classification in block_pos
            and verdict_g.classification not in block_pos):
        contradictions.append("f_S block-positive but g_S not: ordering violated")
    return {
        "f_sample_min": f_min,
        "g_sample_min": g_min,
        "f_verdict": verdict_f,
        "g_verdict": verdict_g,
        "contradictions": contradictions,
    }


def scan_bcs_region(alpha_values, beta_values, d: int,
                    budget: SearchBudget | None = None,
                    parallelism: int = 1) -> list[dict]:
    """Grid scan: analytic condition, minimum eigenvalue, product-state
    minimum estimate and classification per (alpha, beta) point.

    Points are independent; each derives its own seed from the grid indices,
    so the result is identical whether evaluated serially or in parallel.
    """
    budget = budget or SearchBudget()
    partition = PartitionSpec.parse("1|23")

    def scan_point(point):
        i, alpha, j, beta = point
        point_budget = SearchBudget(
            restarts=budget.restarts, iterations=budget.iterations,
            samples=budget.samples, improve_tol=budget.improve_tol,
            band=budget.band, eig_tol=budget.eig_tol,
            seed=budget.seed + 7919 * i + 104729 * j)
        kernel = bcs_kernel(alpha, beta, d)
        verdict = check_block_positive(kernel, partition, point_budget)
        return {
            "alpha": float(alpha),
            "beta": float(beta),
            "analytic_positive": bcs_positivity_condition(alpha, beta, d),
            "min_eig": verdict.min_eig,
            "product_min": verdict.product_min_estimate,
            "class": verdict.classification,
        }

    points = [(i, alpha, j, beta)
              for i, alpha in enumerate(alpha_values)
              for j, beta in enumerate(beta_values)]
    if parallelism > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            return list(pool.map(scan_point, points))
    return [scan_point(p) for p in points]
