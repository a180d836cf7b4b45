"""The ramified partition algebra: sparse elements, special elements, the
order on propagating indices, ideals and idempotent constructions."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable, Mapping, Sequence

from . import setpart as sp
from .errors import CapExceededError, ValidationError
from .ramified import (
    CHAIN1,
    CHAIN2,
    Poset,
    RamifiedPartition,
    compose_ramified,
    diagonal,
    enumerate_basis,
    envelope,
    juxtapose,
    juxtapose_all,
    make_ramified,
    opposite,
    parse_serial,
    print_serial,
    prop_index,
    prop_indices,
    prop_profile,
    unit,
)
from .rings import MultiPoly, variables_q


class PartitionAlgebra:
    """P_n^(T)(Q) with either symbolic parameters Q1..Qd (``q=None``) or an
    exact numeric parameter point.

    Symbolic algebras carry MultiPoly coefficients; numeric ones carry
    rationals.
    """

    def __init__(self, n: int, poset: Poset = CHAIN2, q: Sequence | None = None):
        if n < 0:
            raise ValidationError("n must be >= 0")
        self.n = n
        self.poset = poset
        self.variables = variables_q(poset.d)
        if q is not None:
            q = tuple(Fraction(x) if not isinstance(x, int) else x for x in q)
            if len(q) != poset.d:
                raise ValidationError(f"expected {poset.d} parameters, got {len(q)}")
        self.q = q
        self._mono: dict[tuple[int, ...], object] = {}

    @property
    def symbolic(self) -> bool:
        return self.q is None

    def __eq__(self, other):
        return (isinstance(other, PartitionAlgebra) and self.n == other.n
                and self.poset == other.poset and self.q == other.q)

    def __hash__(self):
        return hash((self.n, self.poset, self.q))

    def __repr__(self):
        qs = "Q" if self.q is None else str(tuple(str(x) for x in self.q))
        return f"PartitionAlgebra(n={self.n}, d={self.poset.d}, q={qs})"

    def scalar(self, exps: tuple[int, ...]):
        """prod_t Q_t**exps[t] in the coefficient ring."""
        hit = self._mono.get(exps)
        if hit is None:
            if self.q is None:
                hit = MultiPoly.monomial(exps, self.variables)
            else:
                hit = 1
                for x, e in zip(self.q, exps):
                    hit = hit * x ** e
            self._mono[exps] = hit
        return hit

    def coerce_scalar(self, c):
        if self.q is None:
            if isinstance(c, MultiPoly):
                return c
            return MultiPoly.constant(c, self.variables)
        if isinstance(c, MultiPoly):
            if c.variables == self.variables:
                return c.evaluate(self.q)
            # coefficients in auxiliary variables are allowed in numeric algebras
            return c
        return c

    def q_pi(self):
        return self.scalar((1,) * self.poset.d)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def one(self) -> "AlgebraElement":
        return self.basis_element(unit(self.n, self.poset))

    def basis_element(self, a: RamifiedPartition, coeff=1) -> "AlgebraElement":
        if a.poset != self.poset or a.ground != sp.double(self.n):
            raise ValidationError(f"{a!r} is not a basis element of {self!r}")
        return AlgebraElement(self, {a: self.coerce_scalar(coeff)})

    __call__ = basis_element

    def element(self, terms: Mapping[RamifiedPartition, object]) -> "AlgebraElement":
        out = {}
        for a, c in terms.items():
            if a.poset != self.poset or a.ground != sp.double(self.n):
                raise ValidationError(f"{a!r} is not a basis element of {self!r}")
            out[a] = self.coerce_scalar(c)
        return AlgebraElement(self, out)

    def basis(self) -> tuple[RamifiedPartition, ...]:
        return enumerate_basis(self.n, self.poset)

    def special(self, name: str, *indices: int) -> "AlgebraElement":
        return self.basis_element(special_diagram(name, self.n, *indices, poset=self.poset))

    def multiply_basis(self, a: RamifiedPartition, b: RamifiedPartition):
        d, exps = compose_ramified(a, b)
        return d, self.scalar(exps)


class AlgebraElement:
    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: PartitionAlgebra, terms: Mapping[RamifiedPartition, object]):
        self.algebra = algebra
        self.terms = {a: c for a, c in terms.items() if c}

    def _check(self, other: "AlgebraElement"):
        if self.algebra != other.algebra:
            raise ValidationError(f"algebra mismatch: {self.algebra!r} vs {other.algebra!r}")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            other = self.algebra.one() * other
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out[a] + c if a in out else c
        return AlgebraElement(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "AlgebraElement":
        c = self.algebra.coerce_scalar(c)
        return AlgebraElement(self.algebra, {a: v * c for a, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        self._check(other)
        alg = self.algebra
        out: dict[RamifiedPartition, object] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                d, s = alg.multiply_basis(a, b)
                v = ca * cb * s
                out[d] = out[d] + v if d in out else v
        return AlgebraElement(alg, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.algebra == other.algebra and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, a: RamifiedPartition):
        return self.terms.get(a, 0)

    def support(self) -> list[RamifiedPartition]:
        return sorted(self.terms)

    def opposite(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, {opposite(a): c for a, c in self.terms.items()})

    def map_coefficients(self, fn: Callable) -> "AlgebraElement":
        return AlgebraElement(self.algebra, {a: fn(c) for a, c in self.terms.items()})

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{a!r}" for a, c in sorted(self.terms.items(), key=lambda t: t[0]))

    def to_json(self) -> list[dict]:
        return [{"diagram": print_serial(a), "coeff": str(c)} for a, c in sorted(self.terms.items(),
                                                                              key=lambda t: t[0])]


def element_from_json(data, algebra: PartitionAlgebra | None = None) -> AlgebraElement:
    """Inverse of AlgebraElement.to_json; infers n and the chain from the diagrams."""
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, list):
        raise ValidationError("element must be a JSON list of {diagram, coeff}")
    diagrams = []
    for k, item in enumerate(data):
        if not isinstance(item, dict) or "diagram" not in item:
            raise ValidationError(f"term {k}: expected an object with a 'diagram' key")
        n = algebra.n if algebra is not None else None
        diagrams.append((parse_serial(item["diagram"], n=n), item.get("coeff", "1")))
    if algebra is None:
        if not diagrams:
            raise ValidationError("cannot infer the algebra of an empty element")
        n = max(a.n for a, _ in diagrams)
        diagrams = [(parse_serial(print_serial(a), n=n), c) for a, c in diagrams]
        algebra = PartitionAlgebra(n, diagrams[0][0].poset)
    terms: dict[RamifiedPartition, object] = {}
    for a, c in diagrams:
        coeff = MultiPoly.parse(str(c), algebra.variables)
        coeff = algebra.coerce_scalar(coeff)
        terms[a] = terms[a] + coeff if a in terms else coeff
    return algebra.element(terms)


# special elements

def _part(blocks: Iterable[Iterable[int]], n: int) -> sp.SetPartition:
    return sp.make_partition(blocks, sp.double(n))


def A_i(n: int, i: int) -> sp.SetPartition:
    """Identity with the pair {i, i'} cut (1-based i)."""
    _check_index(n, i)
    blocks = [(k, n + k) for k in range(n) if k != i - 1] + [(i - 1,), (n + i - 1,)]
    return _part(blocks, n)


def A_ij(n: int, i: int, j: int) -> sp.SetPartition:
    """Identity with {i, i'} and {j, j'} merged."""
    _check_index(n, i)
    _check_index(n, j)
    if i == j:
        raise ValidationError("A^ij needs i != j")
    a, b = i - 1, j - 1
    blocks = [(k, n + k) for k in range(n) if k not in (a, b)] + [(a, b, n + a, n + b)]
    return _part(blocks, n)


def sigma(n: int, i: int, j: int | None = None) -> sp.SetPartition:
    """The transposition (i j) as a diagram; sigma_i = (i i+1)."""
    if j is None:
        j = i + 1
    _check_index(n, i)
    _check_index(n, j)
    perm = list(range(n))
    perm[i - 1], perm[j - 1] = perm[j - 1], perm[i - 1]
    return _part([(k, n + perm[k]) for k in range(n)], n)


def _check_index(n: int, i: int) -> None:
    if not 1 <= i <= n:
        raise ValidationError(f"site index {i} out of range 1..{n}")


def special_diagram(name: str, n: int, *idx: int, poset: Poset = CHAIN2) -> RamifiedPartition:
    """Named basis elements on 1-based sites.

    ``unit``, ``Ai_1`` (A^i, 1), ``Ai_Ai``, ``1_Aij``, ``Aij_Aij``,
    ``si_si`` (sigma_i, sigma_i) and ``sij_sij``.
    """
    one = sp.identity(n)
    if name == "unit":
        return unit(n, poset)
    if name in ("Ai_Ai", "Aij_Aij", "si_si", "sij_sij") and poset.d != 2:
        base = {"Ai_Ai": lambda: A_i(n, *idx), "Aij_Aij": lambda: A_ij(n, *idx),
                "si_si": lambda: sigma(n, *idx), "sij_sij": lambda: sigma(n, *idx)}[name]()
        return diagonal(base, poset)
    if poset != CHAIN2:
        raise ValidationError(f"special element {name!r} is defined for the chain <2> only")
    try:
        if name == "Ai_1":
            levels = (A_i(n, *idx), one)
        elif name == "Ai_Ai":
            levels = (A_i(n, *idx),) * 2
        elif name == "1_Aij":
            levels = (one, A_ij(n, *idx))
        elif name == "Aij_Aij":
            levels = (A_ij(n, *idx),) * 2
        elif name == "si_si":
            (i,) = idx
            if not 1 <= i < n:
                raise ValidationError(f"sigma_{i} needs 1 <= i < n")
            levels = (sigma(n, i),) * 2
        elif name == "sij_sij":
            levels = (sigma(n, *idx),) * 2
        else:
            raise ValidationError(f"unknown special element {name!r}")
    except TypeError:
        raise ValidationError(f"wrong number of indices for {name!r}") from None
    return make_ramified(levels, poset)


def x_diagram(m: int) -> RamifiedPartition:
    """x_m: one outer part holding m propagating inner pairs; x_0 lives on one site."""
    if m == 0:
        return parse_serial("{{1}{1'}}")
    inner = sp.identity(m)
    return make_ramified((inner, sp.trivial(sp.double(m))), CHAIN2)


_CUT = None


def _cut_site() -> RamifiedPartition:
    global _CUT
    if _CUT is None:
        _CUT = parse_serial("{{1}}{{1'}}")
    return _CUT


def I_lambda(lam: Sequence[int], n: int) -> RamifiedPartition:
    lam = prop_index(lam)
    env = envelope(lam)
    if env > n:
        raise ValidationError(f"envelope {env} of {lam} exceeds n={n}")
    return juxtapose_all([x_diagram(v) for v in lam] + [_cut_site()] * (n - env))


def I_lambda_prime(lam: Sequence[int], n: int) -> RamifiedPartition:
    """I_lambda with the non-propagating tail absorbed into the last outer part."""
    lam = prop_index(lam)
    if not lam:
        raise ValidationError("I'_lambda needs a nonempty lambda")
    base = I_lambda(lam, n)
    env = envelope(lam)
    if env == n:
        return base
    inner, outer = base.levels
    tail = [k for k in range(env, n)] + [n + k for k in range(env, n)]
    blocks = [list(b) for b in outer.blocks if b[0] < env - lam_last_width(lam)]
    last = [b for b in outer.blocks if env - lam_last_width(lam) <= b[0] < env][0]
    blocks.append(list(last) + tail)
    return make_ramified((inner, sp.make_partition(blocks, sp.double(n))), CHAIN2)


def lam_last_width(lam: Sequence[int]) -> int:
    return lam[-1] if lam[-1] else 1


def pre_idempotent_exponents(a: RamifiedPartition) -> tuple[int, ...]:
    """Exponents e with a*a = Q^e a; raises if a is not pre-idempotent."""
    d, exps = compose_ramified(a, a)
    if d != a:
        raise ValidationError(f"{a!r} is not pre-idempotent")
    return exps


def normalized_idempotent(algebra: PartitionAlgebra, a: RamifiedPartition) -> AlgebraElement:
    if algebra.symbolic:
        raise ValidationError("normalization needs a numeric parameter point")
    s = algebra.scalar(pre_idempotent_exponents(a))
    if not s:
        raise ValidationError("pre-idempotent scalar vanishes at this parameter point")
    return algebra.basis_element(a, Fraction(1) / s)


def diagonal_embed(x: AlgebraElement, poset: Poset | None = None,
                   target: PartitionAlgebra | None = None) -> AlgebraElement:
    """Send a -> (a, ..., a), with Q of the ordinary algebra going to Q1*...*Qd.

    A symbolic source embeds into the symbolic algebra over ``poset``; a
    numeric target may be given instead, in which case Q is read as the
    target's product of parameters.
    """
    src = x.algebra
    if src.poset != CHAIN1:
        raise ValidationError("diagonal embedding takes an ordinary partition algebra element")
    if target is None:
        if poset is None or not src.symbolic:
            raise ValidationError("give a poset for symbolic input or an explicit target algebra")
        target = PartitionAlgebra(src.n, poset)
    if target.n != src.n:
        raise ValidationError(f"size mismatch: {src.n} vs {target.n}")
    out = {}
    for a, c in x.terms.items():
        if isinstance(c, MultiPoly):
            if target.symbolic:
                c = c.substitute({"Q1": target.q_pi()}, target.variables)
            else:
                c = c.evaluate((target.q_pi(),))
        out[diagonal(a.levels[0], target.poset)] = c
    return target.element(out)


def e_T(algebra: PartitionAlgebra) -> AlgebraElement:
    """D(A^n): every level cut at site n."""
    return algebra.basis_element(diagonal(A_i(algebra.n, algebra.n), algebra.poset))


def include_lower(x: AlgebraElement) -> AlgebraElement:
    """Append the pair {n, n'} at every level."""
    src = x.algebra
    tgt = PartitionAlgebra(src.n + 1, src.poset, src.q)
    site = unit(1, src.poset)
    return tgt.element({juxtapose(a, site): c for a, c in x.terms.items()})


def inner_include(p: sp.SetPartition) -> RamifiedPartition:
    """Inner level p, trivial outer level."""
    return make_ramified((p, sp.trivial(p.ground)), CHAIN2)


def localize(x: AlgebraElement) -> AlgebraElement:
    """Image of e x e under e P_n e = P_{n-1} e ~ P_{n-1}, normalized by Q^pi."""
    alg = x.algebra
    if alg.symbolic:
        raise ValidationError("localize needs a numeric parameter point")
    if alg.n < 1:
        raise ValidationError("localize needs n >= 1")
    qpi = alg.q_pi()
    if not qpi:
        raise ValidationError("Q^pi is not invertible at this parameter point")
    e = e_T(alg)
    y = e * x * e
    n = alg.n
    lower = PartitionAlgebra(n - 1, alg.poset, alg.q)
    out = {}
    for a, c in y.terms.items():
        levels = []
        for p in a.levels:
            if (n - 1,) not in p.blocks or (2 * n - 1,) not in p.blocks:
                raise AssertionError("e x e term without the cut site")
            blocks = [[k if k < n - 1 else k - 1 for k in b] for b in p.blocks
                      if b not in ((n - 1,), (2 * n - 1,))]
            levels.append(sp.make_partition(blocks, sp.double(n - 1)))
        out[make_ramified(levels, alg.poset)] = Fraction(c) / qpi
    return lower.element(out)


# order on propagating indices

def _down_moves(lam: tuple[int, ...]) -> set[tuple[int, ...]]:
    out = set()
    k = len(lam)
    for i in range(k):
        if lam[i] >= 1:
            out.add(prop_index(lam[:i] + (lam[i] - 1,) + lam[i + 1:]))
        else:
            # dropping an outer propagating part that carries no inner line
            out.add(lam[:i] + lam[i + 1:])
    for i in range(k):
        for j in range(i + 1, k):
            rest = [lam[t] for t in range(k) if t not in (i, j)]
            out.add(prop_index(rest + [lam[i] + lam[j]]))
    out.discard(lam)
    return out


_below_cache: dict[tuple[int, ...], frozenset] = {}


def _below(lam: tuple[int, ...]) -> frozenset:
    hit = _below_cache.get(lam)
    if hit is None:
        acc = {lam}
        for m in _down_moves(lam):
            acc |= _below(m)
        hit = frozenset(acc)
        _below_cache[lam] = hit
    return hit


def lambda_leq(lower: Sequence[int], upper: Sequence[int]) -> bool:
    return prop_index(lower) in _below(prop_index(upper))


@dataclass(frozen=True)
class LambdaOrder:
    n: int
    elements: tuple[tuple[int, ...], ...]
    leq: frozenset  # pairs (lower, upper)

    def covers(self) -> set[tuple[tuple[int, ...], tuple[int, ...]]]:
        out = set()
        for lo, hi in self.leq:
            if lo == hi:
                continue
            if not any(m not in (lo, hi) and (lo, m) in self.leq and (m, hi) in self.leq
                       for m in self.elements):
                out.add((lo, hi))
        return out

    def layer(self, m: int) -> list[tuple[int, ...]]:
        """Indices with #P inner + #P outer = m."""
        return [lam for lam in self.elements if sum(lam) + len(lam) == m]


def lambda_order(n: int) -> LambdaOrder:
    els = tuple(prop_indices(n))
    leq = frozenset((a, b) for b in els for a in _below(b))
    return LambdaOrder(n, els, leq)


# ideals

IDEAL_ORACLE_CAP = 2


def ideal_membership_oracle(n: int, poset: Poset = CHAIN2) -> dict[tuple[RamifiedPartition, RamifiedPartition], bool]:
    """For basis diagrams a, b: is a = d(c b d) for some basis c, d?"""
    if n > IDEAL_ORACLE_CAP:
        raise CapExceededError(f"exhaustive ideal search is capped at n={IDEAL_ORACLE_CAP}")
    basis = enumerate_basis(n, poset)
    table = {}
    for b in basis:
        left = {compose_ramified(c, b)[0] for c in basis}
        both = {compose_ramified(x, d)[0] for x in left for d in basis}
        for a in basis:
            table[(a, b)] = a in both
    return table


def generators(n: int) -> list[RamifiedPartition]:
    """(A^1,1), (A^1,A^1), (1,A^12), (A^12,A^12) and (sigma_i, sigma_i)."""
    gens = [special_diagram("Ai_1", n, 1), special_diagram("Ai_Ai", n, 1)]
    if n >= 2:
        gens += [special_diagram("1_Aij", n, 1, 2), special_diagram("Aij_Aij", n, 1, 2)]
        gens += [special_diagram("si_si", n, i) for i in range(1, n)]
    return gens


def generated_diagrams(n: int, max_length: int = 8) -> set[RamifiedPartition]:
    """Diagrams reachable as words of length <= max_length in the generators."""
    gens = generators(n)
    seen = {unit(n)}
    frontier = deque([(unit(n), 0)])
    while frontier:
        x, depth = frontier.popleft()
        if depth == max_length:
            continue
        for g in gens:
            y = compose_ramified(x, g)[0]
            if y not in seen:
                seen.add(y)
                frontier.append((y, depth + 1))
    return seen


# heredity idempotents

def layer_indices(m: int, n: int) -> list[tuple[int, ...]]:
    return [lam for lam in prop_indices(n) if sum(lam) + len(lam) == m]


def heredity_idempotent(m: int, algebra: PartitionAlgebra) -> AlgebraElement:
    """Combine normalized I'_lambda over the layer m via e v f = e + f - ef."""
    n = algebra.n
    if algebra.symbolic:
        raise ValidationError("heredity idempotents need a numeric parameter point")
    if algebra.poset != CHAIN2:
        raise ValidationError("heredity idempotents are built for the chain <2>")
    if not 1 <= m <= 2 * n:
        raise ValidationError(f"layer {m} out of range 1..{2 * n}")
    q1, q2 = algebra.q
    if not q1 * q2:
        raise ValidationError("Q1*Q2 must be invertible")
    parts = [normalized_idempotent(algebra, I_lambda_prime(lam, n)) for lam in layer_indices(m, n)]
    E = parts[0]
    for f in parts[1:]:
        E = E + f - E * f
    return E
