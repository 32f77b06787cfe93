"""Walled Brauer algebra of partially transposed permutation operators.

A diagram is a perfect matching on 2n endpoints, n "top" (output/row index)
and n "bot" (input/column index).  A permutation sigma is the matching
bot_t <-> top_{sigma(t)}; partially transposing at site s swaps that site's
two endpoints.  Stacking two diagrams and following the lines composes them;
every closed loop that forms contributes one factor of the local dimension d,
so coefficients live in C[d] and results stay dimension-generic until they
are realized as dense matrices.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, factorial

import numpy as np

from .sym_core import (
    GroupAlgebraElement,
    Partition,
    Permutation,
    coset_representatives,
    irrep_dimension,
    parse_permutation,
    permutation_to_text,
    schur_weyl_multiplicity,
    young_projector,
)

DEFAULT_SIZE_GUARD = 4096
COEFF_EPS = 1e-14


def size_guard_limit() -> int:
    """Dense-realization guard on d**n; WBA_SIZE_GUARD overrides."""
    env = os.environ.get("WBA_SIZE_GUARD")
    return int(env) if env else DEFAULT_SIZE_GUARD


# ---------------------------------------------------------------------------
# coefficients: polynomials in the formal dimension symbol
# ---------------------------------------------------------------------------

class DPolynomial:
    """Polynomial in the formal dimension d with complex coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, complex]):
        self.coeffs = {k: complex(v) for k, v in coeffs.items() if abs(v) > COEFF_EPS}
        if any(k < 0 for k in self.coeffs):
            raise ValueError("powers must be non-negative")

    @staticmethod
    def constant(c: complex) -> "DPolynomial":
        return DPolynomial({0: c})

    @staticmethod
    def monomial(power: int, c: complex = 1.0) -> "DPolynomial":
        return DPolynomial({power: c})

    def __add__(self, other: "DPolynomial") -> "DPolynomial":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return DPolynomial(out)

    def __mul__(self, other: "DPolynomial") -> "DPolynomial":
        out: dict[int, complex] = {}
        for a, va in self.coeffs.items():
            for b, vb in other.coeffs.items():
                out[a + b] = out.get(a + b, 0.0) + va * vb
        return DPolynomial(out)

    def scale(self, c: complex) -> "DPolynomial":
        return DPolynomial({k: c * v for k, v in self.coeffs.items()})

    def shift(self, power: int) -> "DPolynomial":
        """Multiply by d**power."""
        return DPolynomial({k + power: v for k, v in self.coeffs.items()})

    def evaluate(self, d: int) -> complex:
        return sum(v * d ** k for k, v in self.coeffs.items())

    def is_zero(self, tol: float = COEFF_EPS) -> bool:
        return all(abs(v) <= tol for v in self.coeffs.values())

    def approx_eq(self, other: "DPolynomial", tol: float = 1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(abs(self.coeffs.get(k, 0.0) - other.coeffs.get(k, 0.0)) <= tol for k in keys)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({v:.6g})*d^{k}" for k, v in sorted(self.coeffs.items()))


# ---------------------------------------------------------------------------
# diagrams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WbaDiagram:
    """Perfect matching on endpoints 0..2n-1 (0..n-1 top, n..2n-1 bot).

    ``pairing[e]`` is the partner of endpoint e; the matching is a
    fixed-point-free involution.
    """

    n: int
    pairing: tuple[int, ...]

    def __post_init__(self):
        if len(self.pairing) != 2 * self.n:
            raise ValueError("pairing must cover all 2n endpoints")
        for e, f in enumerate(self.pairing):
            if f == e or not 0 <= f < 2 * self.n or self.pairing[f] != e:
                raise ValueError(f"pairing is not a fixed-point-free involution: {self.pairing}")

    def top(self, site: int) -> int:
        return site - 1

    def bot(self, site: int) -> int:
        return self.n + site - 1

    def pairs(self) -> list[tuple[int, int]]:
        return [(e, f) for e, f in enumerate(self.pairing) if e < f]

    def __str__(self) -> str:
        return diagram_to_text(self)


def from_permutation(p: Permutation, transposed=frozenset()) -> WbaDiagram:
    """Diagram of p^{T_S}: the permutation matching with top/bot swapped on S."""
    n = p.n
    transposed = frozenset(transposed)
    if any(not 1 <= s <= n for s in transposed):
        raise ValueError(f"transposed sites out of range 1..{n}: {sorted(transposed)}")

    def relabel(e: int) -> int:
        site = e % n + 1
        if site in transposed:
            return e + n if e < n else e - n
        return e

    pairing = [0] * (2 * n)
    for t in range(1, n + 1):
        a, b = relabel(p(t) - 1), relabel(n + t - 1)
        pairing[a], pairing[b] = b, a
    return WbaDiagram(n, tuple(pairing))


def identity_diagram(n: int) -> WbaDiagram:
    return from_permutation(Permutation.identity(n))


def compose_diagrams(a: WbaDiagram, b: WbaDiagram) -> tuple[WbaDiagram, int]:
    """Diagram of a*b (b applied first) and the number of closed loops.

    a is stacked above b and a's bot row is glued to b's top row; paths
    between the outer rows give the matching of the product, and every
    closed loop in the glued middle contributes a factor d:
    realize(a) @ realize(b) == d**loops * realize(a*b).
    """
    if a.n != b.n:
        raise ValueError(f"site count mismatch: {a.n} vs {b.n}")
    n = a.n
    # vertex ids: 0..2n-1 = a's endpoints, 2n..4n-1 = b's endpoints
    match = list(a.pairing) + [2 * n + e for e in b.pairing]

    def glue(v: int):
        if n <= v < 2 * n:      # a-bot t  <->  b-top t
            return v + n
        if 2 * n <= v < 3 * n:
            return v - n
        return None

    def ext_id(v: int) -> int:  # a-top keeps its id, b-bot becomes result bot
        return v if v < n else v - 2 * n

    seen: set[int] = set()
    pairing = [0] * (2 * n)
    for v0 in list(range(n)) + list(range(3 * n, 4 * n)):
        if v0 in seen:
            continue
        seen.add(v0)
        cur = match[v0]
        seen.add(cur)
        while (g := glue(cur)) is not None:
            cur = g
            seen.add(cur)
            cur = match[cur]
            seen.add(cur)
        u, w = ext_id(v0), ext_id(cur)
        pairing[u], pairing[w] = w, u

    loops = 0
    visited: set[int] = set()
    for v0 in range(n, 3 * n):
        if v0 in seen or v0 in visited:
            continue
        loops += 1
        cur = v0
        while cur not in visited:
            visited.add(cur)
            partner = match[cur]
            visited.add(partner)
            cur = glue(partner)
    return WbaDiagram(n, tuple(pairing)), loops


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

class WbaElement:
    """Formal combination of diagrams with coefficients in C[d]."""

    __slots__ = ("terms", "n")

    def __init__(self, terms: dict[WbaDiagram, DPolynomial], n: int):
        self.n = n
        clean = {}
        for diag, poly in terms.items():
            if diag.n != n:
                raise ValueError("site count mismatch among terms")
            if not poly.is_zero():
                clean[diag] = poly
        self.terms = clean

    @staticmethod
    def zero(n: int) -> "WbaElement":
        return WbaElement({}, n)

    @staticmethod
    def from_diagram(diag: WbaDiagram, coeff: complex = 1.0) -> "WbaElement":
        return WbaElement({diag: DPolynomial.constant(coeff)}, diag.n)

    @staticmethod
    def from_permutation(p: Permutation, transposed=frozenset(), coeff: complex = 1.0) -> "WbaElement":
        return WbaElement.from_diagram(from_permutation(p, transposed), coeff)

    @staticmethod
    def from_group_algebra(x: GroupAlgebraElement, n: int | None = None) -> "WbaElement":
        n = n if n is not None else x.n
        lifted = x.extend(n) if n > x.n else x
        return WbaElement(
            {from_permutation(p): DPolynomial.constant(c) for p, c in lifted.terms.items()}, n)

    @staticmethod
    def identity(n: int) -> "WbaElement":
        return WbaElement.from_diagram(identity_diagram(n))

    def __add__(self, other: "WbaElement") -> "WbaElement":
        if self.n != other.n:
            raise ValueError("site count mismatch")
        terms = dict(self.terms)
        for diag, poly in other.terms.items():
            terms[diag] = terms.get(diag, DPolynomial({})) + poly
        return WbaElement(terms, self.n)

    def scale(self, c: complex) -> "WbaElement":
        return WbaElement({d: p.scale(c) for d, p in self.terms.items()}, self.n)

    def __mul__(self, other: "WbaElement") -> "WbaElement":
        """Bilinear extension of diagram composition; loops become d powers."""
        if self.n != other.n:
            raise ValueError("site count mismatch")
        terms: dict[WbaDiagram, DPolynomial] = {}
        for da, pa in self.terms.items():
            for db, pb in other.terms.items():
                diag, loops = compose_diagrams(da, db)
                contrib = (pa * pb).shift(loops)
                terms[diag] = terms.get(diag, DPolynomial({})) + contrib
        return WbaElement(terms, self.n)

    def approx_eq(self, other: "WbaElement", tol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        empty = DPolynomial({})
        return all(
            self.terms.get(k, empty).approx_eq(other.terms.get(k, empty), tol) for k in keys)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = [f"[{poly!r}] {diagram_to_text(diag)}"
                for diag, poly in sorted(self.terms.items(), key=lambda t: t[0].pairing)]
        return "  +  ".join(bits)


# ---------------------------------------------------------------------------
# dense realization
# ---------------------------------------------------------------------------

_REALIZE_CACHE: dict[tuple[tuple[int, ...], int], np.ndarray] = {}


def _realize_diagram(diag: WbaDiagram, d: int) -> np.ndarray:
    key = (diag.pairing, d)
    cached = _REALIZE_CACHE.get(key)
    if cached is not None:
        return cached
    n = diag.n
    # Entry <i|D|j> is 1 iff the 2n indices agree along every matched pair;
    # enumerate the d**n joint values of the n pairs and scatter.
    pairs = diag.pairs()
    vals = np.indices((d,) * n).reshape(n, -1)
    idx = np.empty((2 * n, d ** n), dtype=np.intp)
    for p, (e, f) in enumerate(pairs):
        idx[e] = vals[p]
        idx[f] = vals[p]
    tensor = np.zeros((d,) * (2 * n), dtype=complex)
    tensor[tuple(idx)] = 1.0
    mat = tensor.reshape(d ** n, d ** n)
    mat.flags.writeable = False
    _REALIZE_CACHE[key] = mat
    return mat


def realize(x, d: int, size_guard: int | None = None) -> np.ndarray:
    """Dense matrix on (C^d)^{tensor n} for a diagram, element, permutation,
    or group-algebra element.  Guarded by d**n <= size_guard."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if isinstance(x, Permutation):
        x = from_permutation(x)
    if isinstance(x, GroupAlgebraElement):
        x = WbaElement.from_group_algebra(x)
    n = x.n
    guard = size_guard if size_guard is not None else size_guard_limit()
    if d ** n > guard:
        raise ValueError(f"d^n = {d ** n} exceeds the size guard {guard}")
    if isinstance(x, WbaDiagram):
        return _realize_diagram(x, d).copy()
    if isinstance(x, WbaElement):
        out = np.zeros((d ** n, d ** n), dtype=complex)
        for diag, poly in x.terms.items():
            out += poly.evaluate(d) * _realize_diagram(diag, d)
        return out
    raise TypeError(f"cannot realize object of type {type(x).__name__}")


# ---------------------------------------------------------------------------
# the distinguished generator sigma^(k) and the projectors F_mu(alpha)
# ---------------------------------------------------------------------------

def sigma_diagram(n: int, k: int) -> WbaDiagram:
    """Product of k disjoint cup/cap pairs linking sites n-2k+j and n-j+1."""
    if not n >= 2 * k >= 2:
        raise ValueError(f"need n >= 2k >= 2, got n={n}, k={k}")
    pairing = list(from_permutation(Permutation.identity(n)).pairing)
    for j in range(1, k + 1):
        a, b = n - 2 * k + j, n - j + 1
        ta, tb, ba, bb = a - 1, b - 1, n + a - 1, n + b - 1
        pairing[ta], pairing[tb] = tb, ta
        pairing[ba], pairing[bb] = bb, ba
    return WbaDiagram(n, tuple(pairing))


def sigma_k(n: int, k: int) -> WbaElement:
    """(n-2k+1,n)^{T_n} (n-2k+2,n-1)^{T_{n-1}} ... as a one-diagram element."""
    return WbaElement.from_diagram(sigma_diagram(n, k))


def gamma(mu: Partition, alpha: Partition, n: int, k: int, d: int) -> Fraction:
    """Normalization k! C(n-k,k) (m_mu/m_alpha) (d_alpha/d_mu) of F_mu(alpha)."""
    if alpha.n != n - 2 * k or mu.n != n - k:
        raise ValueError(
            f"need alpha |- n-2k and mu |- n-k, got |alpha|={alpha.n}, |mu|={mu.n}")
    if not mu.contains(alpha):
        raise ValueError(f"{mu} cannot be obtained from {alpha} by adding boxes")
    m_alpha = schur_weyl_multiplicity(alpha, d)
    m_mu = schur_weyl_multiplicity(mu, d)
    if m_alpha == 0:
        raise ValueError(f"irrep {alpha} not represented at d={d}")
    if m_mu == 0:
        raise ValueError(f"irrep {mu} not represented at d={d}")
    return (Fraction(factorial(k) * comb(n - k, k))
            * Fraction(m_mu, m_alpha)
            * Fraction(irrep_dimension(alpha), irrep_dimension(mu)))


def f_projector(mu: Partition, alpha: Partition, n: int, k: int, d: int,
                representatives: list[Permutation] | None = None) -> WbaElement:
    """Irreducible projector F_mu(alpha) of the walled Brauer algebra.

    F = (1/gamma) P_mu sum_eta eta^-1 (P_alpha (x) sigma^(k)) eta, with P_mu
    supported on sites 1..n-k, P_alpha on sites 1..n-2k, and eta running over
    a transversal of S(n-2k) in S(n-k).  Its dense realization is an
    orthogonal projector commuting with U^(n-k) (x) conj(U)^(k).
    """
    g = gamma(mu, alpha, n, k, d)
    p_mu = WbaElement.from_group_algebra(young_projector(mu), n)
    p_alpha = WbaElement.from_group_algebra(young_projector(alpha), n) \
        if alpha.n > 0 else WbaElement.identity(n)
    core = p_alpha * sigma_k(n, k)
    reps = representatives if representatives is not None else coset_representatives(n, k)
    total = WbaElement.zero(n)
    for eta in reps:
        eta_n = eta.extend(n)
        left = WbaElement.from_permutation(eta_n.inverse())
        right = WbaElement.from_permutation(eta_n)
        total = total + left * core * right
    return (p_mu * total).scale(1.0 / float(g))


def admissible_pairs(n: int, k: int, d: int) -> list[tuple[Partition, Partition]]:
    """(alpha, mu) label pairs whose projector exists at local dimension d."""
    from .sym_core import additions_of_boxes, partitions

    out = []
    for alpha in partitions(n - 2 * k):
        if schur_weyl_multiplicity(alpha, d) == 0:
            continue
        for mu in additions_of_boxes(alpha, k):
            if schur_weyl_multiplicity(mu, d) > 0:
                out.append((alpha, mu))
    return out


# ---------------------------------------------------------------------------
# text and JSON forms
# ---------------------------------------------------------------------------

def as_transposed_permutation(diag: WbaDiagram) -> tuple[Permutation, frozenset[int]]:
    """Canonical (sigma, S) with diag == sigma^{T_S}.

    Every matching admits such a form (not uniquely); subsets are scanned by
    size then lexicographically and the first valid one wins.
    """
    n = diag.n
    for size in range(n + 1):
        for subset in combinations(range(1, n + 1), size):
            s = frozenset(subset)

            def relabel(e: int) -> int:
                site = e % n + 1
                if site in s:
                    return e + n if e < n else e - n
                return e

            images = [0] * n
            ok = True
            for e, f in diag.pairs():
                u, v = relabel(e), relabel(f)
                if u > v:
                    u, v = v, u
                if u < n <= v:          # top_{u+1} paired with bot_{v-n+1}
                    images[v - n] = u + 1
                else:
                    ok = False
                    break
            if ok:
                return Permutation(tuple(images)), s
    raise AssertionError("unreachable: every matching has a transposed-permutation form")


def diagram_to_text(diag: WbaDiagram) -> str:
    sigma, s = as_transposed_permutation(diag)
    text = permutation_to_text(sigma)
    if s:
        text += "^T{" + ",".join(str(x) for x in sorted(s)) + "}"
    return text


def parse_diagram(text: str, n: int) -> WbaDiagram:
    """Parse "(1 2 3 4)^T{4}" style diagram text."""
    text = text.strip()
    transposed: frozenset[int] = frozenset()
    if "^T" in text:
        body, _, suffix = text.partition("^T")
        suffix = suffix.strip()
        if not (suffix.startswith("{") and suffix.endswith("}")):
            raise ValueError(f"bad transpose suffix in {text!r}")
        transposed = frozenset(int(tok) for tok in suffix[1:-1].split(",") if tok.strip())
        text = body.strip()
    return from_permutation(parse_permutation(text, n), transposed)


def element_to_json(x: WbaElement) -> str:
    entries = []
    for diag, poly in sorted(x.terms.items(), key=lambda t: t[0].pairing):
        coeff = [{"power": k, "re": v.real, "im": v.imag}
                 for k, v in sorted(poly.coeffs.items())]
        entries.append({"diagram": diagram_to_text(diag), "coeff": coeff})
    return json.dumps({"n": x.n, "terms": entries}, sort_keys=True)


def element_from_json(text: str) -> WbaElement:
    data = json.loads(text)
    n = data["n"]
    terms = {}
    for entry in data["terms"]:
        diag = parse_diagram(entry["diagram"], n)
        poly = DPolynomial({c["power"]: complex(c["re"], c["im"]) for c in entry["coeff"]})
        terms[diag] = poly
    return WbaElement(terms, n)
