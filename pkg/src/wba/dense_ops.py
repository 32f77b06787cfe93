"""Dense operators on (C^d)^{tensor n} and their index gymnastics.

Row/column indices pack big-endian in site order (site 1 most significant),
so <i|sigma|j> = prod_t delta(i_{sigma(t)}, j_t) holds literally and kron
is the plain numpy Kronecker product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sym_core import Permutation

ATOL = 1e-10
EIG_TOL = 1e-9

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class DenseOperator:
    """Complex matrix on (C^d)^{tensor n} remembering its factor shape."""

    n: int
    d: int
    mat: np.ndarray

    def __post_init__(self):
        dim = self.d ** self.n
        if self.mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.mat.shape} != ({dim}, {dim})")

    @property
    def tensor(self) -> np.ndarray:
        """View with 2n axes: row axes 1..n then column axes 1..n."""
        return self.mat.reshape((self.d,) * (2 * self.n))

    def is_hermitian(self, tol: float = ATOL) -> bool:
        return sup_norm(self.mat - self.mat.conj().T) <= tol

    def trace(self) -> complex:
        return complex(np.trace(self.mat))


def from_matrix(mat: np.ndarray, d: int, n: int | None = None) -> DenseOperator:
    mat = np.asarray(mat, dtype=complex)
    if n is None:
        n = round(np.log(mat.shape[0]) / np.log(d)) if d > 1 else 1
    return DenseOperator(n, d, mat)


def identity(n: int, d: int) -> DenseOperator:
    return DenseOperator(n, d, np.eye(d ** n, dtype=complex))


def sup_norm(mat: np.ndarray) -> float:
    """Largest entry magnitude; the tolerance norm used throughout."""
    return float(np.max(np.abs(mat))) if mat.size else 0.0


def _validate_sites(sites, n: int) -> tuple[int, ...]:
    sites = tuple(sorted(set(sites)))
    if any(not 1 <= s <= n for s in sites):
        raise ValueError(f"sites out of range 1..{n}: {sites}")
    return sites


def kron(factors: list[DenseOperator]) -> DenseOperator:
    """Tensor product in listed order; site 1 comes from the first factor."""
    if not factors:
        raise ValueError("need at least one factor")
    d = factors[0].d
    if any(f.d != d for f in factors):
        raise ValueError("local dimension mismatch among factors")
    mat = factors[0].mat
    for f in factors[1:]:
        mat = np.kron(mat, f.mat)
    return DenseOperator(sum(f.n for f in factors), d, mat)


def partial_trace(m: DenseOperator, over) -> DenseOperator:
    """Trace out the listed sites; kept sites re-pack preserving their order."""
    over = _validate_sites(over, m.n)
    if not over:
        raise ValueError("empty site set; nothing to trace")
    if len(over) == m.n:
        raise ValueError("tracing all sites: use the full trace instead")
    keep = [s for s in range(1, m.n + 1) if s not in over]
    row = list(_LETTERS[: m.n])
    col = list(_LETTERS[m.n: 2 * m.n])
    for s in over:
        col[s - 1] = row[s - 1]
    out = "".join(row[s - 1] for s in keep) + "".join(col[s - 1] for s in keep)
    spec = "".join(row) + "".join(col) + "->" + out
    dim = m.d ** len(keep)
    return DenseOperator(len(keep), m.d, np.einsum(spec, m.tensor).reshape(dim, dim))


def partial_transpose(m: DenseOperator, over) -> DenseOperator:
    """Swap row and column indices on the listed sites (computational basis)."""
    over = _validate_sites(over, m.n)
    axes = list(range(2 * m.n))
    for s in over:
        axes[s - 1], axes[m.n + s - 1] = axes[m.n + s - 1], axes[s - 1]
    dim = m.d ** m.n
    return DenseOperator(m.n, m.d, m.tensor.transpose(axes).reshape(dim, dim))


def reshuffle_bipartite(m: DenseOperator) -> DenseOperator:
    """|i><j| (x) |k><l|  ->  |i><k| (x) |j><l|  (two sites only)."""
    if m.n != 2:
        raise ValueError("reshuffle_bipartite needs n = 2; use reshuffle_sites")
    dim = m.d ** 2
    return DenseOperator(2, m.d, m.tensor.transpose(0, 2, 1, 3).reshape(dim, dim))


def reshuffle_sites(m: DenseOperator, ket_site: int, bra_site: int) -> DenseOperator:
    """Exchange the ket (row) index of one site with the bra (column) index
    of another: row slot ket_site takes what column slot bra_site held and
    vice versa.  reshuffle_sites(m, 2, 1) equals reshuffle_bipartite(m), and
    ket_site == bra_site is the single-site partial transpose."""
    for s in (ket_site, bra_site):
        if not 1 <= s <= m.n:
            raise ValueError(f"site {s} out of range 1..{m.n}")
    axes = list(range(2 * m.n))
    a, b = ket_site - 1, m.n + bra_site - 1
    axes[a], axes[b] = axes[b], axes[a]
    dim = m.d ** m.n
    return DenseOperator(m.n, m.d, m.tensor.transpose(axes).reshape(dim, dim))


def tau(m: DenseOperator) -> np.ndarray:
    """Flatten |i><j| -> |i>|j>: vector of length d**(2n), row block first."""
    return m.mat.reshape(-1).copy()


def tau_inverse(vec: np.ndarray, n: int, d: int) -> DenseOperator:
    dim = d ** n
    if vec.shape != (dim * dim,):
        raise ValueError(f"vector length {vec.shape} != d^(2n) = {dim * dim}")
    return DenseOperator(n, d, vec.reshape(dim, dim).astype(complex))


def permutation_on_operator(pi: Permutation, m: DenseOperator) -> DenseOperator:
    """Act with pi in S_{2n} on the flattened operator: tau^-1 pi tau.

    Slots 1..n are the row indices, n+1..2n the column indices; slot t of the
    image holds what slot pi^-1(t) held.
    """
    if pi.n != 2 * m.n:
        raise ValueError(f"need a permutation of degree 2n = {2 * m.n}, got {pi.n}")
    inv = pi.inverse()
    axes = [inv(t) - 1 for t in range(1, 2 * m.n + 1)]
    dim = m.d ** m.n
    return DenseOperator(m.n, m.d, m.tensor.transpose(axes).reshape(dim, dim))


def embed_on_sites(small: DenseOperator, sites, n: int) -> DenseOperator:
    """Operator acting as ``small`` on the given sites and as identity elsewhere."""
    sites = tuple(sites)
    if len(sites) != small.n or len(set(sites)) != len(sites):
        raise ValueError("sites must be distinct and match the operator's site count")
    d = small.d
    rest = [s for s in range(1, n + 1) if s not in sites]
    big = np.kron(small.mat, np.eye(d ** len(rest), dtype=complex))
    # big currently lives on (sites..., rest...); permute to natural site order
    order = list(sites) + rest
    tensor = big.reshape((d,) * (2 * n))
    axes = [order.index(s) for s in range(1, n + 1)]
    axes = axes + [a + n for a in axes]
    return DenseOperator(n, d, tensor.transpose(axes).reshape(d ** n, d ** n))


def random_matrix(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Square complex Gaussian matrix (entries N(0,1/2) + i N(0,1/2))."""
    dim = d ** n
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)


def random_psd(d: int, n: int, seed) -> DenseOperator:
    """G G^dagger for a seeded complex Gaussian G; hermitian and PSD."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = random_matrix(d, n, rng)
    return DenseOperator(n, d, g @ g.conj().T)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def min_eigenvalue(m: DenseOperator, herm_tol: float = ATOL) -> float:
    dev = sup_norm(m.mat - m.mat.conj().T)
    if dev > herm_tol:
        raise ValueError(f"matrix is not hermitian (deviation {dev:.3g})")
    return float(np.linalg.eigvalsh(m.mat)[0])


def matrix_to_json_rows(mat: np.ndarray) -> list[list[dict]]:
    """Array-of-rows with {re, im} entries, the matrix wire format."""
    return [[{"re": float(v.real), "im": float(v.imag)} for v in row] for row in mat]


def matrix_from_json_rows(rows) -> np.ndarray:
    return np.array([[complex(v["re"], v["im"]) for v in row] for row in rows])
