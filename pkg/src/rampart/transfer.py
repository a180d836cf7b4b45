"""Clock-model partition functions on H x A_l lattices via transfer matrices.

Spins take values in Z_q and an edge {i, j} contributes f(s_i - s_j) to the
energy.  Partition functions are polynomials in u = exp(beta); they are held
as integer coefficient arrays (index = power of u) during the layer sweep.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Sequence

import numpy as np

from .algebra import AlgebraElement, PartitionAlgebra
from .errors import CapExceededError, ValidationError
from .potts import ColorSpace, SparseOperator, potts_rep
from .ramified import CHAIN2
from .rings import MultiPoly, PolyMatrix, relative_residuals, roots_univariate

STATE_CAP = 4 ** 8
BRUTE_CAP = 10 ** 6


@dataclass(frozen=True)
class Graph:
    nv: int
    edges: tuple[tuple[int, int], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.nv < 0:
            raise ValidationError("vertex count must be >= 0")
        seen = set()
        norm = []
        for e in self.edges:
            i, j = e
            if not (0 <= i < self.nv and 0 <= j < self.nv):
                raise ValidationError(f"edge {e} has an endpoint outside 0..{self.nv - 1}")
            if i == j:
                raise ValidationError(f"loop at vertex {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValidationError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))


def path(l: int) -> Graph:
    """A_l: l vertices, l - 1 edges."""
    if l < 1:
        raise ValidationError("path needs l >= 1")
    return Graph(l, tuple((k, k + 1) for k in range(l - 1)), f"path:{l}")


def cycle(l: int) -> Graph:
    if l < 3:
        raise ValidationError("cycle needs l >= 3")
    return Graph(l, tuple((k, (k + 1) % l) for k in range(l)), f"cycle:{l}")


def single_vertex() -> Graph:
    return Graph(1, (), "path:1")


def product(H: Graph, l: int, periodic: bool = False) -> Graph:
    """H x A_l (or H x cycle(l)); vertex (a, k) is numbered k * |H| + a."""
    line = cycle(l) if periodic else path(l)
    h = H.nv
    edges = [(k * h + a, k * h + b) for k in range(l) for a, b in H.edges]
    edges += [(k * h + a, m * h + a) for k, m in line.edges for a in range(h)]
    return Graph(h * l, tuple(edges), f"{H.name}x{line.name}")


def parse_graph(spec: str) -> Graph:
    """``path:L``, ``cycle:L`` or ``point``."""
    if spec in ("point", "vertex"):
        return single_vertex()
    kind, _, size = spec.partition(":")
    try:
        m = int(size)
    except ValueError:
        raise ValidationError(f"bad graph spec {spec!r}; expected path:L or cycle:L") from None
    if kind == "path":
        return path(m)
    if kind == "cycle":
        return cycle(m)
    raise ValidationError(f"unknown graph kind {kind!r}")


@dataclass(frozen=True)
class EdgeHamiltonian:
    q: int
    values: tuple[int, ...]

    def __post_init__(self):
        if self.q < 1:
            raise ValidationError("q must be >= 1")
        vals = tuple(self.values)
        if len(vals) != self.q:
            raise ValidationError(f"need f(0..{self.q - 1}), got {len(vals)} values")
        if any(not isinstance(v, (int, np.integer)) for v in vals):
            raise ValidationError("f must be integer valued")
        if any(v < 0 for v in vals):
            raise ValidationError("negative f would make Z a Laurent polynomial")
        for k in range(1, self.q):
            if vals[k] != vals[self.q - k]:
                raise ValidationError(f"f is not even: f({k}) != f({self.q - k})")
        object.__setattr__(self, "values", tuple(int(v) for v in vals))

    @classmethod
    def from_half(cls, q: int, half: Sequence[int]) -> "EdgeHamiltonian":
        """Build f from f(0..q//2) by reflection f(k) = f(q - k)."""
        if len(half) != q // 2 + 1:
            raise ValidationError(f"q={q} needs {q // 2 + 1} values f(0..{q // 2}), got {len(half)}")
        return cls(q, tuple(half[min(k, q - k)] for k in range(q)))

    def __call__(self, d: int) -> int:
        return self.values[d % self.q]


@dataclass(frozen=True)
class PartitionFunction:
    poly: MultiPoly
    graph: str
    f: tuple[int, ...]
    bc: str

    @property
    def coefficients(self) -> list[int]:
        return [int(c) for c in self.poly.univariate_coefficients()]

    @property
    def degree(self) -> int:
        return self.poly.degree(0)

    def at_one(self) -> int:
        return int(self.poly.evaluate((1,)))


def _poly_from_coeffs(coeffs) -> MultiPoly:
    return MultiPoly.from_univariate([int(c) for c in coeffs], name="u")


def _states(h: int, q: int) -> np.ndarray:
    """All colourings of h sites, big-endian, shape (q**h, h)."""
    if h == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((q,) * h).reshape(h, -1).T


def _lateral_energy(H: Graph, f: EdgeHamiltonian) -> np.ndarray:
    S = _states(H.nv, f.q)
    vals = np.array(f.values, dtype=np.int64)
    E = np.zeros(S.shape[0], dtype=np.int64)
    for i, j in H.edges:
        E += vals[(S[:, i] - S[:, j]) % f.q]
    return E


def _check_states(H: Graph, q: int):
    if q ** H.nv > STATE_CAP:
        raise CapExceededError(f"transfer space q^|H| = {q ** H.nv} exceeds cap {STATE_CAP}")


def layer_matrices(H: Graph, f: EdgeHamiltonian) -> tuple[PolyMatrix, PolyMatrix]:
    """(V1, Tm): diagonal lateral weights and transverse weights u^sum f(s_i - t_i)."""
    _check_states(H, f.q)
    vs = ("u",)
    S = _states(H.nv, f.q)
    E = _lateral_energy(H, f)
    vals = np.array(f.values, dtype=np.int64)
    N = S.shape[0]
    mono = {}

    def u(k: int) -> MultiPoly:
        if k not in mono:
            mono[k] = MultiPoly.monomial((k,), vs)
        return mono[k]

    zero = MultiPoly(vs)
    V1 = [[u(int(E[r])) if r == c else zero for c in range(N)] for r in range(N)]
    T = vals[(S[:, None, :] - S[None, :, :]) % f.q].sum(axis=2) if H.nv else np.zeros((1, 1), dtype=np.int64)
    Tm = [[u(int(T[r, c])) for c in range(N)] for r in range(N)]
    return PolyMatrix(V1, vs), PolyMatrix(Tm, vs)


# coefficient-array sweep

def _apply_diag(v: np.ndarray, E: np.ndarray, width: int) -> np.ndarray:
    # v has shape (N, batch, D)
    # the true degree never exceeds width - 1, so truncation drops only zeros
    out = np.zeros(v.shape[:-1] + (width,), dtype=v.dtype)
    D = v.shape[-1]
    for e in np.unique(E):
        sel = E == e
        k = min(D, width - e)
        out[sel, :, e:e + k] = v[sel][..., :k]
    return out


def _apply_transverse(v: np.ndarray, h: int, f: EdgeHamiltonian, width: int) -> np.ndarray:
    """Apply Tm = (x)_sites M, M[s, t] = u^f(s - t), one site axis at a time."""
    q = f.q
    N, batch, D = v.shape
    cur = v.reshape((q,) * h + (batch, D))
    for site in range(h):
        moved = np.moveaxis(cur, site, 0)
        new = np.zeros((q,) + moved.shape[1:-1] + (width,), dtype=v.dtype)
        for s in range(q):
            for t in range(q):
                e = f(s - t)
                k = min(moved.shape[-1], width - e)
                new[s, ..., e:e + k] += moved[t][..., :k]
        cur = np.moveaxis(new, 0, site)
    return cur.reshape(N, batch, width)


def _dtype(q: int, nv: int):
    return np.int64 if q ** nv < 2 ** 62 else object


def partition_function(H: Graph, l: int, f: EdgeHamiltonian, bc: str = "free") -> PartitionFunction:
    """Z for H x A_l (free) or H x cycle(l) (periodic) by layer transfer."""
    if l < 1:
        raise ValidationError("l must be >= 1")
    if bc not in ("free", "periodic"):
        raise ValidationError(f"boundary condition must be free or periodic, got {bc!r}")
    if bc == "periodic" and l < 3:
        raise ValidationError("periodic boundary needs l >= 3 (cycle(l) must be a simple graph)")
    _check_states(H, f.q)
    h = H.nv
    N = f.q ** h
    E = _lateral_energy(H, f)
    emax = max(f.values)
    nedges = len(H.edges) * l + h * (l if bc == "periodic" else l - 1)
    width = emax * nedges + 1
    dt = _dtype(f.q, h * l)
    if bc == "free":
        v = np.zeros((N, 1, 1), dtype=dt)
        v[:, 0, 0] = 1
        v = _apply_diag(v, E, width)
        for _ in range(l - 1):
            v = _apply_diag(_apply_transverse(v, h, f, width), E, width)
        coeffs = v.sum(axis=(0, 1))
    else:
        # trace((Tm V1)^l): propagate every basis vector and read off diagonals
        v = np.zeros((N, N, 1), dtype=dt)
        v[np.arange(N), np.arange(N), 0] = 1
        for _ in range(l):
            v = _apply_transverse(_apply_diag(v, E, width), h, f, width)
        coeffs = v[np.arange(N), np.arange(N)].sum(axis=0)
    name = f"{H.name}x{'cycle' if bc == 'periodic' else 'path'}:{l}"
    return PartitionFunction(_poly_from_coeffs(coeffs), name, f.values, bc)


def partition_function_bruteforce(G: Graph, f: EdgeHamiltonian) -> PartitionFunction:
    if f.q ** G.nv > BRUTE_CAP:
        raise CapExceededError(f"{f.q}^{G.nv} configurations exceed brute-force cap {BRUTE_CAP}")
    E = _lateral_energy(G, f)
    coeffs = np.bincount(E, minlength=1) if E.size else np.array([1])
    return PartitionFunction(_poly_from_coeffs(coeffs), G.name or "graph", f.values, "graph")


# algebraic edge factors in P_n^<2>

def algebraic_edge_factor(kind: str, couplings: Sequence, n: int, i: int, j: int | None = None,
                          algebra: PartitionAlgebra | None = None) -> AlgebraElement:
    """Edge weights as algebra elements, couplings = (e^gamma, e^beta).

    in_layer(i, j):  (1 + (x - 1)(Aij, Aij)) (1 + (y - 1)(1, Aij))
    transverse(i):   y (x - 1) 1 + (y - 1)(Ai, 1) + (Ai, Ai)
    """
    if algebra is None:
        algebra = PartitionAlgebra(n, CHAIN2, q=(1, 1))
    if algebra.poset != CHAIN2:
        raise ValidationError("edge factors live in the two-level chain algebra")
    if algebra.n != n:
        raise ValidationError(f"algebra has n={algebra.n}, expected {n}")
    x, y = couplings
    one = algebra.one()
    if kind == "in_layer":
        if j is None:
            raise ValidationError("in_layer needs two sites i, j")
        first = one + algebra.special("Aij_Aij", i, j) * (x - 1)
        second = one + algebra.special("1_Aij", i, j) * (y - 1)
        return first * second
    if kind == "transverse":
        return (one * (y * (x - 1)) + algebra.special("Ai_1", i) * (y - 1)
                + algebra.special("Ai_Ai", i))
    raise ValidationError(f"unknown edge factor kind {kind!r}")


def cyclic_to_product_index(q: Sequence[int]):
    """Map a Z_{prod q} spin to its ColorSpace site index under Z_m = prod Z_{q_t} (CRT)."""
    space = ColorSpace(1, tuple(q))
    m = space.site_dim
    return [space.index([tuple(s % qt for qt in q)]) for s in range(m)]


def _weight_targets(f: EdgeHamiltonian, q: Sequence[int], u: Fraction):
    perm = cyclic_to_product_index(q)
    m = f.q
    inlayer = {}
    for s in range(m):
        for t in range(m):
            idx = perm[s] * m + perm[t]
            inlayer[(idx, idx)] = u ** f(s - t)
    trans = {(perm[s], perm[t]): u ** f(s - t) for s in range(m) for t in range(m)}
    return inlayer, trans


def derive_edge_couplings(f: EdgeHamiltonian, q: Sequence[int], search: int = 3,
                          probes: Sequence[Fraction] = (Fraction(3), Fraction(5, 7))):
    """Brute-force the exponents (a, b, c) with e^gamma = u^a, e^beta = u^b and an
    overall factor u^c such that both edge factors reproduce u^f(s_i - s_j)
    entry by entry, for every probe value of u.  Returns all solutions."""
    q = tuple(q)
    m = 1
    for x in q:
        m *= x
    if m != f.q:
        raise ValidationError(f"colour counts {q} do not multiply to q={f.q}")
    rng = range(-search, search + 1)
    sols = []
    for a, b, c in cartesian(rng, rng, rng):
        ok = True
        for u in probes:
            inl, tr = _weight_targets(f, q, u)
            x, y, scale = u ** a, u ** b, u ** c
            A = potts_rep(algebraic_edge_factor("in_layer", (x, y), 2, 1, 2), q).scale(scale)
            T = potts_rep(algebraic_edge_factor("transverse", (x, y), 1, 1), q).scale(scale)
            if A.entries != inl or T.entries != tr:
                ok = False
                break
        if ok:
            sols.append((a, b, c))
    return sols


def algebraic_layer_operators(H: Graph, q: Sequence[int], couplings: Sequence, scale=1
                              ) -> tuple[SparseOperator, SparseOperator]:
    """(V1, Tm) assembled from Potts images of the edge factors: one in-layer
    factor per edge of H and one transverse factor per vertex, each times ``scale``."""
    q = tuple(q)
    n = H.nv
    dim = ColorSpace(n, q).dim
    alg = PartitionAlgebra(n, CHAIN2, q=q)
    V1 = SparseOperator.identity(dim)
    for i, j in H.edges:
        V1 = V1 @ potts_rep(algebraic_edge_factor("in_layer", couplings, n, i + 1, j + 1, alg), q).scale(scale)
    Tm = SparseOperator.identity(dim)
    for i in range(n):
        Tm = Tm @ potts_rep(algebraic_edge_factor("transverse", couplings, n, i + 1, algebra=alg), q).scale(scale)
    return V1, Tm


def spin_layer_operators(H: Graph, f: EdgeHamiltonian, u, q: Sequence[int] | None = None
                         ) -> tuple[SparseOperator, SparseOperator]:
    """(V1, Tm) from layer_matrices evaluated at numeric u; with ``q`` given, the
    Z_q spins are relabelled onto the product colour space (Chinese remaindering)."""
    V1, Tm = layer_matrices(H, f)
    n = H.nv
    if q is None:
        relabel = list(range(f.q ** n))
    else:
        perm = cyclic_to_product_index(q)
        m = f.q
        relabel = []
        for s in range(m ** n):
            digits = [(s // m ** (n - 1 - k)) % m for k in range(n)]
            relabel.append(sum(perm[d] * m ** (n - 1 - k) for k, d in enumerate(digits)))
    dim = len(relabel)

    def op(M: PolyMatrix) -> SparseOperator:
        vals = M.evaluate((u,))
        return SparseOperator(dim, {(relabel[r], relabel[c]): vals[r][c]
                                    for r in range(dim) for c in range(dim) if vals[r][c]})

    return op(V1), op(Tm)


# zeros

def zeros(pf: PartitionFunction | MultiPoly, tol: float = 1e-10) -> np.ndarray:
    poly = pf.poly if isinstance(pf, PartitionFunction) else pf
    if poly.is_zero():
        raise ValidationError("zero polynomial")
    return roots_univariate(poly, tol)


def max_residual(pf: PartitionFunction, roots: np.ndarray) -> float:
    res = relative_residuals(pf.coefficients, roots)
    return float(res.max()) if res.size else 0.0


def roots_csv(roots: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im"])
    for z in roots:
        w.writerow([repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def gnuplot_script(csv_path: str, title: str, png_path: str | None = None) -> str:
    lines = []
    if png_path:
        lines += ["set terminal pngcairo size 800,800", f"set output '{png_path}'"]
    lines += [
        f"set title '{title}'",
        "set datafile separator ','",
        "set size square",
        "set xlabel 'Re u'",
        "set ylabel 'Im u'",
        "set xzeroaxis",
        "set yzeroaxis",
        f"plot '{csv_path}' every ::1 using 1:2 with points pt 7 ps 0.5 notitle",
        "",
    ]
    return "\n".join(lines)
