"""Evaluation of the multilinear maps induced by kernel operators.

A kernel P on n = n_in + n_out sites defines
    Lambda(X_1, ..., X_{n_in}) = tr_{1..n_in}[ P (X_1 (x) ... (x) X_{n_in}
                                                 (x) 1^{n_out}) ].
``evaluate_oracle`` computes this literally and is the ground truth for the
closed forms below: single-cycle kernels with one transposed site reduce to
matrix products with a transpose inserted, those with a transposed subset to
products with transposes on the subset (or on its complement, in reversed
order, when the last site is transposed), and forward cycles with a single
input to a chain of site reshufflings or a single index permutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import dense_ops
from .dense_ops import DenseOperator
from .sym_core import Partition, Permutation
from .wba_algebra import WbaDiagram, WbaElement, from_permutation, gamma, realize

ATOL = 1e-10


def forward_cycle(k: int) -> Permutation:
    """(1 2 ... k)."""
    return Permutation.from_cycles([tuple(range(1, k + 1))], k)


def backward_cycle(k: int) -> Permutation:
    """(k ... 2 1) = (1 2 ... k)^-1."""
    return Permutation.from_cycles([tuple(range(k, 0, -1))], k)


def _as_matrix(x, d: int) -> np.ndarray:
    if isinstance(x, DenseOperator):
        if x.n != 1 or x.d != d:
            raise ValueError("inputs must be single-site d x d operators")
        return x.mat
    mat = np.asarray(x, dtype=complex)
    if mat.shape != (d, d):
        raise ValueError(f"input shape {mat.shape} != ({d}, {d})")
    return mat


@dataclass(frozen=True)
class MapSpec:
    """Kernel plus slot layout: n_in input sites (traced), n_out output sites."""

    kernel: object  # WbaElement | WbaDiagram | DenseOperator
    n_in: int
    n_out: int
    d: int

    def __post_init__(self):
        if self.n_in < 1 or self.n_out < 0:
            raise ValueError("need n_in >= 1 and n_out >= 0")
        if self.sites != self._kernel_sites():
            raise ValueError(
                f"kernel has {self._kernel_sites()} sites, expected {self.sites}")

    @property
    def sites(self) -> int:
        return self.n_in + self.n_out

    def _kernel_sites(self) -> int:
        return self.kernel.n

    def kernel_matrix(self) -> np.ndarray:
        if isinstance(self.kernel, DenseOperator):
            if self.kernel.d != self.d:
                raise ValueError("kernel local dimension mismatch")
            return self.kernel.mat
        return realize(self.kernel, self.d)


@dataclass(frozen=True)
class TransposedCycleForm:
    """Recognized kernel shape (full cycle)^{T_S}; dispatch target."""

    cycle_direction: str  # "forward" | "backward"
    transposed_set: frozenset[int]


def evaluate_oracle(spec: MapSpec, inputs) -> DenseOperator:
    """Literal contraction: realize, kron with identities, multiply, trace.

    This is the ground-truth evaluation every closed form is tested against.
    """
    if len(inputs) != spec.n_in:
        raise ValueError(f"expected {spec.n_in} inputs, got {len(inputs)}")
    d = spec.d
    mats = [_as_matrix(x, d) for x in inputs]
    big = np.eye(1, dtype=complex)
    for mat in mats:
        big = np.kron(big, mat)
    big = np.kron(big, np.eye(d ** spec.n_out, dtype=complex))
    prod = DenseOperator(spec.sites, d, spec.kernel_matrix() @ big)
    if spec.n_out == 0:
        return DenseOperator(0, d, np.array([[prod.trace()]], dtype=complex))
    return dense_ops.partial_trace(prod, range(1, spec.n_in + 1))


# ---------------------------------------------------------------------------
# cycle kernels with transposed sites -> matrix products
# ---------------------------------------------------------------------------

def evaluate_cycle_to_one(direction: str, j: int, inputs, d: int | None = None) -> DenseOperator:
    """Closed form of tr over all sites but one of (cycle)^{T_j} X_1...X_k.

    backward (k..1), output on site k:
        j != k:  X_1 ... X_j^T ... X_k        j == k:  (X_1 ... X_{k-1})^T X_k
    forward (1..k), output on site 1:
        j != 1:  X_k ... X_j^T ... X_1        j == 1:  (X_k ... X_2)^T X_1
    (the two j-on-the-kept-site cases are mirror images of each other).
    """
    k = len(inputs)
    if d is None:
        d = inputs[0].shape[0] if not isinstance(inputs[0], DenseOperator) else inputs[0].d
    mats = [_as_matrix(x, d) for x in inputs]
    if not 1 <= j <= k:
        raise ValueError(f"transposed site {j} out of range 1..{k}")
    if direction == "backward":
        if j == k:
            left = np.eye(d, dtype=complex)
            for m in mats[:-1]:
                left = left @ m
            out = left.T @ mats[-1]
        else:
            out = np.eye(d, dtype=complex)
            for i, m in enumerate(mats, start=1):
                out = out @ (m.T if i == j else m)
    elif direction == "forward":
        if j == 1:
            out = np.eye(d, dtype=complex)
            for m in mats[1:]:
                out = out @ m.T
            out = out @ mats[0]
        else:
            out = np.eye(d, dtype=complex)
            for i in range(k, 0, -1):
                out = out @ (mats[i - 1].T if i == j else mats[i - 1])
    else:
        raise ValueError(f"direction must be forward or backward, got {direction!r}")
    return DenseOperator(1, d, out)


def theta_product(kind: str, s, inputs, d: int | None = None) -> DenseOperator:
    """Products with transposes steered by a site subset.

    plain: X_1' ... X_k' with X_i' = X_i^T iff i in S -- the value of
        tr_{1..k-1}[(k..1)^{T_S} X_1 (x) ... (x) X_k] when k is not in S.
    bar: the k-in-S case; product in the order (X_{k-1}, ..., X_1, X_k)
        with exactly the factors whose index is NOT in S transposed.  (The
        subset, not the tuple positions, decides the transposes; this is the
        reading the contraction oracle confirms.)
    """
    k = len(inputs)
    if d is None:
        d = inputs[0].shape[0] if not isinstance(inputs[0], DenseOperator) else inputs[0].d
    mats = [_as_matrix(x, d) for x in inputs]
    s = frozenset(s)
    if any(not 1 <= i <= k for i in s):
        raise ValueError(f"subset out of range 1..{k}: {sorted(s)}")
    out = np.eye(d, dtype=complex)
    if kind == "plain":
        for i in range(1, k + 1):
            out = out @ (mats[i - 1].T if i in s else mats[i - 1])
    elif kind == "bar":
        order = list(range(k - 1, 0, -1)) + [k]
        for i in order:
            out = out @ (mats[i - 1].T if i not in s else mats[i - 1])
    else:
        raise ValueError(f"kind must be plain or bar, got {kind!r}")
    return DenseOperator(1, d, out)


def cycle_subset_to_one(s, inputs, d: int | None = None) -> DenseOperator:
    """tr_{1..k-1}[(k..1)^{T_S} X_1 (x) ... (x) X_k] for any S."""
    k = len(inputs)
    s = frozenset(s)
    return theta_product("bar" if k in s else "plain", s, inputs, d)


# ---------------------------------------------------------------------------
# forward cycle with one input -> reshuffling chain / single permutation
# ---------------------------------------------------------------------------

def _one_input_start(a: DenseOperator, k: int) -> DenseOperator:
    if k < 2:
        raise ValueError("need k >= 2")
    if a.n != 1:
        raise ValueError("the input must be a single-site operator")
    eyes = [dense_ops.identity(1, a.d) for _ in range(k - 2)]
    return dense_ops.kron([a] + eyes) if eyes else a


def evaluate_one_to_many(a: DenseOperator, k: int) -> DenseOperator:
    """tr_1[(1..k)^{T_k} A (x) 1 (x) ... (x) 1] via reshufflings on k-1 sites.

    Chain: reshuffle site k-1's ket with the bras of sites k-2, ..., 1 in
    turn.  k = 2 degenerates to the single-site transpose (the empty chain
    would return A itself, which the contraction oracle refutes).
    """
    out = _one_input_start(a, k)
    if k == 2:
        return dense_ops.reshuffle_sites(out, 1, 1)
    for l in range(k - 2, 0, -1):
        out = dense_ops.reshuffle_sites(out, k - 1, l)
    return out


def reshuffling_chain_permutation(k: int) -> Permutation:
    """The S_{2(k-1)} permutation equivalent to the reshuffling chain.

    For kp = k-1 >= 2 it is the cycle (2kp-1, 2kp-2, ..., kp+1, kp) on the
    flattened slots (rows 1..kp, columns kp+1..2kp); for k = 2 it is the
    transposition of the two slots.
    """
    kp = k - 1
    if kp < 1:
        raise ValueError("need k >= 2")
    if kp == 1:
        return Permutation.from_cycles([(1, 2)], 2)
    cycle = tuple(range(2 * kp - 1, kp - 1, -1))
    return Permutation.from_cycles([cycle], 2 * kp)


def evaluate_one_to_many_via_pi(a: DenseOperator, k: int) -> DenseOperator:
    """Same map as evaluate_one_to_many, done as one index permutation."""
    out = _one_input_start(a, k)
    return dense_ops.permutation_on_operator(reshuffling_chain_permutation(k), out)


# ---------------------------------------------------------------------------
# dispatcher
# ---------------------------------------------------------------------------

def _untranspose(diag: WbaDiagram, s: frozenset[int]) -> Permutation | None:
    """If swapping top/bot on S turns diag into a permutation diagram,
    return that permutation."""
    n = diag.n

    def relabel(e: int) -> int:
        site = e % n + 1
        if site in s:
            return e + n if e < n else e - n
        return e

    images = [0] * n
    for e, f in diag.pairs():
        u, v = relabel(e), relabel(f)
        if u > v:
            u, v = v, u
        if u < n <= v:
            images[v - n] = u + 1
        else:
            return None
    return Permutation(tuple(images))


def recognize(spec: MapSpec) -> TransposedCycleForm | None:
    """Detect kernels of the closed-form shapes.

    backward full cycle with n_out = 1 -> subset product (Props for k->1);
    forward full cycle transposed exactly on the last site with n_in = 1
    -> reshuffling chain.  Anything else falls back to the oracle.
    """
    kernel = spec.kernel
    if isinstance(kernel, WbaDiagram):
        kernel = WbaElement.from_diagram(kernel)
    if not isinstance(kernel, WbaElement) or len(kernel.terms) != 1:
        return None
    diag = next(iter(kernel.terms))
    n = spec.sites
    fwd, bwd = forward_cycle(n), backward_cycle(n)
    if spec.n_in == 1 and diag == from_permutation(fwd, frozenset({n})):
        return TransposedCycleForm("forward", frozenset({n}))
    if spec.n_out == 1:
        for size in range(n + 1):
            for subset in combinations(range(1, n + 1), size):
                s = frozenset(subset)
                if _untranspose(diag, s) == bwd:
                    return TransposedCycleForm("backward", s)
    return None


def fast_evaluate(spec: MapSpec, inputs) -> DenseOperator:
    """Closed form when the kernel shape allows it, oracle otherwise."""
    form = recognize(spec)
    if form is None:
        return evaluate_oracle(spec, inputs)
    kernel = spec.kernel
    if isinstance(kernel, WbaDiagram):
        kernel = WbaElement.from_diagram(kernel)
    coeff = next(iter(kernel.terms.values())).evaluate(spec.d)
    if form.cycle_direction == "forward":
        a = inputs[0]
        if not isinstance(a, DenseOperator):
            a = DenseOperator(1, spec.d, _as_matrix(a, spec.d))
        out = evaluate_one_to_many(a, spec.sites)
    else:
        eye = np.eye(spec.d, dtype=complex)
        mats = [_as_matrix(x, spec.d) for x in inputs] + [eye] * spec.n_out
        out = cycle_subset_to_one(form.transposed_set, mats, spec.d)
    return DenseOperator(out.n, out.d, coeff * out.mat)


# ---------------------------------------------------------------------------
# hand-coded closed forms of the (n=4, k=1) mixed-symmetry projector maps
# ---------------------------------------------------------------------------

def _mixed_symmetry_scale(d: int) -> float:
    # the unnormalized projector expansion is dimension-generic; only the
    # scalar normalization (1 at d=2) varies with d
    return 1.0 / float(gamma(Partition((2, 1)), Partition((2,)), 4, 1, d))


def f_projector_map_2to2(a: np.ndarray, b: np.ndarray) -> DenseOperator:
    """Two-input map of the mixed-symmetry projector on 3+1 sites.

    Closed form of tr_12[F (A (x) B (x) 1 (x) 1)] for F = F_{(2,1)}((2)),
    whose unnormalized expansion carries +1/3 on the six order-two
    permutations that move the transposed site and -1/6 on the twelve
    order-three-and-four ones.  Symmetric in A <-> B.
    """
    d = a.shape[0]
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    eye = np.eye(d, dtype=complex)

    def two(x, y):
        return DenseOperator(2, d, np.kron(x, y))

    r = dense_ops.reshuffle_bipartite
    tra, trb = np.trace(a), np.trace(b)
    pos = (trb * two(eye, a.T).mat + tra * two(eye, b.T).mat
           + (tra * trb + np.trace(a @ b)) * r(two(eye, eye)).mat
           + two(b, a.T).mat + two(a, b.T).mat)
    neg = (r(two(b @ a, eye)).mat + r(two(a @ b, eye)).mat
           + r(two(b, a.T)).mat + r(two(a, b.T)).mat
           + r(two(eye, b.T @ a.T)).mat + r(two(eye, a.T @ b.T)).mat
           + two(eye, a.T @ b.T).mat + two(eye, b.T @ a.T).mat
           + trb * (r(two(a, eye)).mat + r(two(eye, a.T)).mat)
           + tra * (r(two(b, eye)).mat + r(two(eye, b.T)).mat))
    return DenseOperator(2, d, _mixed_symmetry_scale(d) * (pos / 3.0 - neg / 6.0))


def f_projector_map_3to1(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> DenseOperator:
    """Three-input map of the same projector: tr_123[F (A (x) B (x) C (x) 1)].

    Fully symmetric: +1/3 on each transposed factor weighted by the other
    traces (single and pair), -1/6 on the transposed three-letter words and
    the trace-weighted transposed pair products.
    """
    d = a.shape[0]
    a, b, c = (np.asarray(x, dtype=complex) for x in (a, b, c))
    tra, trb, trc = np.trace(a), np.trace(b), np.trace(c)
    pos = ((trb * trc + np.trace(b @ c)) * a.T
           + (tra * trc + np.trace(a @ c)) * b.T
           + (tra * trb + np.trace(a @ b)) * c.T)
    words = [a @ c @ b, b @ a @ c, c @ b @ a, a @ b @ c, b @ c @ a, c @ a @ b]
    neg = sum(w.T for w in words)
    neg = neg + (trc * (a.T @ b.T + b.T @ a.T)
                 + trb * (a.T @ c.T + c.T @ a.T)
                 + tra * (b.T @ c.T + c.T @ b.T))
    return DenseOperator(1, d, _mixed_symmetry_scale(d) * (pos / 3.0 - neg / 6.0))
