"""Exact multivariate polynomials, polynomial matrices, determinants and
univariate root finding."""
from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from functools import reduce
from math import gcd, isqrt, prod
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError

Scalar = int | Fraction


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class MultiPoly:
    """Polynomial with rational coefficients in a fixed tuple of variables.

    ``terms`` maps exponent tuples to nonzero coefficients.  Instances are
    treated as immutable.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], Scalar] | None = None):
        self.variables = tuple(variables)
        k = len(self.variables)
        clean = {}
        if terms:
            for e, c in terms.items():
                if c:
                    if len(e) != k:
                        raise ValidationError(f"exponent {e} does not match {k} variables")
                    clean[tuple(e)] = _norm(c)
        self.terms = clean
        self._hash = None

    # constructors

    @classmethod
    def constant(cls, c: Scalar, variables: Sequence[str]) -> "MultiPoly":
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        if name not in variables:
            raise ValidationError(f"{name} is not one of {variables}")
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(variables, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], variables: Sequence[str], coeff: Scalar = 1) -> "MultiPoly":
        return cls(variables, {tuple(exps): coeff})

    @classmethod
    def from_univariate(cls, coeffs: Sequence[Scalar], name: str = "u") -> "MultiPoly":
        """Coefficients listed from the constant term upward."""
        return cls((name,), {(i,): c for i, c in enumerate(coeffs) if c})

    # coercion

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.variables != self.variables:
                raise ValidationError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return MultiPoly.constant(other, self.variables)
        return NotImplemented

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return MultiPoly(self.variables)
            return MultiPoly(self.variables, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[tuple[int, ...], Scalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(1, self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: Scalar) -> "MultiPoly":
        return self * c

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return MultiPoly(self.variables, {e: Fraction(c) / other for e, c in self.terms.items()})
        return self.divexact(self._coerce(other))

    # comparison

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self.terms
            return self.terms == {(0,) * len(self.variables): other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValidationError("polynomial is not constant")
        return self.terms.get((0,) * len(self.variables), 0)

    # queries

    def degree(self, var: str | int | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self.variables.index(var) if isinstance(var, str) else var
        return max(e[i] for e in self.terms)

    def monomial_content(self) -> tuple[int, ...]:
        """Componentwise minimum exponent: the largest monomial dividing every term."""
        if not self.terms:
            return (0,) * len(self.variables)
        return tuple(min(col) for col in zip(*self.terms))

    def norm1(self) -> Fraction:
        return sum((abs(c) for c in self.terms.values()), Fraction(0))

    def evaluate(self, point) -> Scalar:
        """Substitute exact values; ``point`` is a sequence or a name->value map."""
        if isinstance(point, Mapping):
            try:
                vals = [point[v] for v in self.variables]
            except KeyError as exc:
                raise ValidationError(f"no value for {exc.args[0]}") from None
        else:
            vals = list(point)
            if len(vals) != len(self.variables):
                raise ValidationError(f"expected {len(self.variables)} values, got {len(vals)}")
        total = 0
        cache: dict[tuple[int, int], Scalar] = {}
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = vals[i] ** k
                    t = t * cache[key]
            total += t
        return _norm(total) if isinstance(total, Fraction) else total

    def substitute(self, mapping: Mapping[str, "MultiPoly | Scalar"], variables: Sequence[str]) -> "MultiPoly":
        """Replace each variable by a polynomial in ``variables``."""
        variables = tuple(variables)
        images = []
        for v in self.variables:
            img = mapping.get(v, None)
            if img is None:
                img = MultiPoly.var(v, variables)
            elif not isinstance(img, MultiPoly):
                img = MultiPoly.constant(img, variables)
            images.append(img)
        out = MultiPoly(variables)
        for e, c in self.terms.items():
            t = MultiPoly.constant(c, variables)
            for img, k in zip(images, e):
                if k:
                    t = t * img ** k
            out = out + t
        return out

    def univariate_coefficients(self) -> list[Scalar]:
        if len(self.variables) != 1:
            raise ValidationError("polynomial is not univariate")
        deg = self.degree()
        out = [0] * (deg + 1)
        for (k,), c in self.terms.items():
            out[k] = c
        return out

    # exact division

    def _leading(self) -> tuple[tuple[int, ...], Scalar]:
        e = max(self.terms)
        return e, self.terms[e]

    def divexact(self, other: "MultiPoly") -> "MultiPoly":
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        rem = dict(self.terms)
        le, lc = other._leading()
        quot: dict[tuple[int, ...], Scalar] = {}
        oterms = list(other.terms.items())
        while rem:
            e = max(rem)
            c = rem[e]
            qe = tuple(a - b for a, b in zip(e, le))
            if any(x < 0 for x in qe):
                raise ValidationError("polynomial division is not exact")
            qc = Fraction(c) / lc if not isinstance(c, int) or not isinstance(lc, int) or c % lc else c // lc
            quot[qe] = qc
            for oe, oc in oterms:
                te = tuple(a + b for a, b in zip(qe, oe))
                v = rem.get(te, 0) - qc * oc
                if v:
                    rem[te] = v
                else:
                    rem.pop(te, None)
        return MultiPoly(self.variables, quot)

    # text

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Scalar]]:
        """Graded lexicographic order, highest first."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for i, (e, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            a = -c if neg else c
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if i == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"MultiPoly({str(self)!r}, {self.variables})"

    @classmethod
    def parse(cls, text: str, variables: Sequence[str]) -> "MultiPoly":
        variables = tuple(variables)
        s = text.replace(" ", "")
        if not s:
            raise ValidationError("empty polynomial")
        if s[0] not in "+-":
            s = "+" + s
        pieces = re.findall(r"[+-][^+-]+", s)
        if "".join(pieces) != s:
            raise ValidationError(f"cannot parse polynomial {text!r}")
        out = MultiPoly(variables)
        for piece in pieces:
            sign = -1 if piece[0] == "-" else 1
            coeff: Scalar = sign
            e = [0] * len(variables)
            for factor in piece[1:].split("*"):
                if not factor:
                    raise ValidationError(f"empty factor in {text!r}")
                m = re.fullmatch(r"(\d+)(?:/(\d+))?", factor)
                if m:
                    coeff = coeff * (Fraction(int(m.group(1)), int(m.group(2))) if m.group(2) else int(m.group(1)))
                    continue
                m = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?", factor)
                if not m or m.group(1) not in variables:
                    raise ValidationError(f"unknown factor {factor!r} in {text!r}")
                e[variables.index(m.group(1))] += int(m.group(2) or 1)
            out = out + MultiPoly(variables, {tuple(e): coeff})
        return out


def variables_q(d: int) -> tuple[str, ...]:
    return tuple(f"Q{t + 1}" for t in range(d))


class PolyMatrix:
    """Dense rectangular matrix of MultiPoly entries over common variables."""

    def __init__(self, entries: Sequence[Sequence[MultiPoly]], variables: Sequence[str] | None = None):
        rows = [list(r) for r in entries]
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValidationError("matrix rows have different lengths")
        if variables is None:
            if not rows or not rows[0]:
                raise ValidationError("variables required for an empty matrix")
            variables = rows[0][0].variables
        self.variables = tuple(variables)
        self.entries = [[e if isinstance(e, MultiPoly) else MultiPoly.constant(e, self.variables)
                         for e in r] for r in rows]
        for r in self.entries:
            for e in r:
                if e.variables != self.variables:
                    raise ValidationError("matrix entries use different variables")
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
                          self.variables)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValidationError("shape mismatch")
        zero = MultiPoly(self.variables)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a:
                        b = other.entries[k][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(out, self.variables)

    def evaluate(self, point) -> list[list[Scalar]]:
        return [[e.evaluate(point) for e in r] for r in self.entries]

    def det(self, strategy: str = "auto", threads: int = 1) -> MultiPoly:
        return det_exact(self, strategy=strategy, threads=threads)

    @classmethod
    def identity(cls, k: int, variables: Sequence[str]) -> "PolyMatrix":
        return cls([[MultiPoly.constant(int(i == j), variables) for j in range(k)] for i in range(k)],
                   variables)


# determinants

def bareiss(rows: Sequence[Sequence], exact_div) -> object:
    """Fraction-free elimination; ``exact_div(a, b)`` must divide exactly."""
    a = [list(r) for r in rows]
    k = len(a)
    if any(len(r) != k for r in a):
        raise ValidationError("determinant needs a square matrix")
    if k == 0:
        return 1
    sign = 1
    prev = 1
    for c in range(k - 1):
        if not a[c][c]:
            for r in range(c + 1, k):
                if a[r][c]:
                    a[c], a[r] = a[r], a[c]
                    sign = -sign
                    break
            else:
                return a[c][c] * 0
        p = a[c][c]
        for i in range(c + 1, k):
            for j in range(c + 1, k):
                a[i][j] = exact_div(a[i][j] * p - a[i][c] * a[c][j], prev)
        prev = p
    d = a[k - 1][k - 1]
    return d if sign > 0 else -d


def det_numeric(rows: Sequence[Sequence[Scalar]]) -> Scalar:
    """Exact determinant of an integer or rational matrix."""
    rows = [list(r) for r in rows]
    if all(isinstance(x, int) for r in rows for x in r):
        return bareiss(rows, lambda x, y: x // y)
    return _norm(bareiss([[Fraction(x) for x in r] for r in rows], lambda x, y: x / y))


def det_exact(M: PolyMatrix, strategy: str = "auto", threads: int = 1) -> MultiPoly:
    """Exact determinant by fraction-free elimination, by evaluation and
    interpolation, or both (which must agree)."""
    if M.rows != M.cols:
        raise ValidationError(f"determinant of a {M.rows}x{M.cols} matrix")
    if strategy == "auto":
        strategy = "elimination" if M.rows <= 6 else "interpolation"
    if strategy == "elimination":
        return _det_elimination(M)
    if strategy == "interpolation":
        return _det_interpolation(M, threads=threads)
    if strategy == "both":
        a = _det_elimination(M)
        b = _det_interpolation(M, threads=threads)
        if a != b:
            raise AssertionError("elimination and interpolation determinants disagree")
        return a
    raise ValidationError(f"unknown determinant strategy {strategy!r}")


def _det_elimination(M: PolyMatrix) -> MultiPoly:
    one = MultiPoly.constant(1, M.variables)
    if M.rows == 0:
        return one

    def div(x, y):
        if isinstance(y, int):
            y = MultiPoly.constant(y, M.variables)
        return x.divexact(y)

    return bareiss(M.entries, div)


def degree_bounds(M: PolyMatrix) -> list[int]:
    """Per-variable degree bound: sum over rows of the row's maximal entry degree."""
    out = []
    for v in range(len(M.variables)):
        total = 0
        for r in M.entries:
            total += max((e.degree(v) for e in r if e), default=0)
        out.append(total)
    return out


_PRIME_CACHE: list[int] = []


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13):
        if p % q == 0:
            return p == q
    for f in range(17, isqrt(p) + 1, 2):
        if p % f == 0:
            return False
    return True


def _primes():
    """Primes below 2**31 in decreasing order (memoized)."""
    yield from list(_PRIME_CACHE)
    p = (1 << 31) - 1 if not _PRIME_CACHE else _PRIME_CACHE[-1] - 2
    while p > 2:
        if _is_prime(p):
            _PRIME_CACHE.append(p)
            yield p
        p -= 2


def _modinv_vec(x: np.ndarray, p: int) -> np.ndarray:
    result = np.ones_like(x)
    base = x % p
    e = p - 2
    while e:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


def det_mod_batch(A: np.ndarray, p: int) -> np.ndarray:
    """Determinants modulo ``p`` of a batch ``A`` with shape (B, k, k)."""
    A = np.array(A, dtype=np.int64) % p
    B, k, _ = A.shape
    det = np.ones(B, dtype=np.int64)
    ar = np.arange(B)
    for c in range(k):
        nz = A[:, c:, c] != 0
        has = nz.any(axis=1)
        piv = c + np.argmax(nz, axis=1)
        det[~has] = 0
        swap = (piv != c) & has
        if swap.any():
            idx = ar[swap]
            rc = A[idx, c, :].copy()
            A[idx, c, :] = A[idx, piv[swap], :]
            A[idx, piv[swap], :] = rc
            det[swap] = (p - det[swap]) % p
        pv = A[:, c, c]
        det = det * pv % p
        if c + 1 < k:
            f = A[:, c + 1:, c] * _modinv_vec(pv, p)[:, None] % p
            A[:, c + 1:, c:] = (A[:, c + 1:, c:] - f[:, :, None] * A[:, None, c, c:] % p) % p
    return det


def _inverse_vandermonde(points: Sequence[int], p: int) -> np.ndarray:
    """Matrix W with coeffs = W @ values for interpolation at ``points`` mod p."""
    m = len(points)
    master = [1]  # coefficients low->high of prod (x - x_i)
    for x in points:
        nxt = [0] * (len(master) + 1)
        for i, c in enumerate(master):
            nxt[i + 1] = (nxt[i + 1] + c) % p
            nxt[i] = (nxt[i] - x * c) % p
        master = nxt
    W = np.zeros((m, m), dtype=np.int64)
    for j, xj in enumerate(points):
        # synthetic division master / (x - xj)
        q = [0] * m
        carry = 0
        for i in range(m, 0, -1):
            carry = (master[i] + carry * xj) % p
            q[i - 1] = carry
        denom = 1
        for i, xi in enumerate(points):
            if i != j:
                denom = denom * (xj - xi) % p
        inv = pow(denom, p - 2, p)
        for i in range(m):
            W[i, j] = q[i] * inv % p
    return W


def _matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    lo = B & 0xFFFF
    hi = B >> 16
    r_lo = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    r_hi = np.zeros_like(r_lo)
    # chunk the contraction so partial sums stay below 2**63
    step = 64
    for s in range(0, A.shape[1], step):
        r_lo = (r_lo + A[:, s:s + step] @ lo[s:s + step]) % p
        r_hi = (r_hi + A[:, s:s + step] @ hi[s:s + step]) % p
    return (r_lo + (r_hi << 16) % p) % p


def _det_interpolation(M: PolyMatrix, threads: int = 1) -> MultiPoly:
    k = M.rows
    nv = len(M.variables)
    if k == 0:
        return MultiPoly.constant(1, M.variables)
    # clear denominators row by row
    scale = Fraction(1)
    int_rows = []
    for r in M.entries:
        den = 1
        for e in r:
            for c in e.terms.values():
                if isinstance(c, Fraction):
                    den = den * c.denominator // gcd(den, c.denominator)
        scale /= den
        int_rows.append([{ex: int(c * den) for ex, c in e.terms.items()} for e in r])
    if nv == 0:
        d = det_numeric([[t.get((), 0) for t in r] for r in int_rows])
        return MultiPoly.constant(d * scale, M.variables)
    bounds = degree_bounds(M)
    # ||det||_1 <= prod of row sums of entry 1-norms
    bound = 1
    for r in int_rows:
        bound *= max(1, sum(sum(abs(c) for c in t.values()) for t in r))
    primes = []
    modulus = 1
    for p in _primes():
        if modulus > 2 * bound:
            break
        primes.append(p)
        modulus *= p
    grids = [list(range(b + 1)) for b in bounds]
    shape = tuple(b + 1 for b in bounds)

    def solve(p: int) -> np.ndarray:
        npts = prod(shape)
        mesh = np.indices(shape).reshape(nv, npts)
        maxdeg = max(bounds) + 1
        tables = []
        for v in range(nv):
            pts = np.arange(shape[v], dtype=np.int64)
            t = np.ones((maxdeg + 1, shape[v]), dtype=np.int64)
            for e in range(1, maxdeg + 1):
                t[e] = t[e - 1] * pts % p
            tables.append(t)
        values = np.empty(npts, dtype=np.int64)
        chunk = max(1, 2_000_000 // (k * k))
        for s in range(0, npts, chunk):
            sel = mesh[:, s:s + chunk]
            A = np.zeros((sel.shape[1], k, k), dtype=np.int64)
            for i, r in enumerate(int_rows):
                for j, t in enumerate(r):
                    acc = np.zeros(sel.shape[1], dtype=np.int64)
                    for ex, c in t.items():
                        term = np.full(sel.shape[1], c % p, dtype=np.int64)
                        for v, e in enumerate(ex):
                            if e:
                                term = term * tables[v][e][sel[v]] % p
                        acc = (acc + term) % p
                    A[:, i, j] = acc
            values[s:s + chunk] = det_mod_batch(A, p)
        coeffs = values.reshape(shape)
        for v in range(nv):
            W = _inverse_vandermonde(grids[v], p)
            moved = np.moveaxis(coeffs, v, 0)
            flat = moved.reshape(shape[v], -1)
            flat = _matmul_mod(W, flat, p)
            coeffs = np.moveaxis(flat.reshape(moved.shape), 0, v)
        return coeffs

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            residues = list(ex.map(solve, primes))
    else:
        residues = [solve(p) for p in primes]
    # Chinese remaindering, coefficientwise
    result: dict[tuple[int, ...], Scalar] = {}
    it = np.nditer(residues[0], flags=["multi_index"])
    partial = [(p, modulus // p, pow(modulus // p, -1, p)) for p in primes]
    for _ in it:
        idx = it.multi_index
        x = 0
        for (p, mp, inv), res in zip(partial, residues):
            r = int(res[idx])
            if r:
                x += r * inv % p * mp
        x %= modulus
        if x > modulus // 2:
            x -= modulus
        if x:
            result[idx] = x * scale
    return MultiPoly(M.variables, result)


# roots

def _horner(coeffs_hi: np.ndarray, z: np.ndarray):
    p = np.full_like(z, coeffs_hi[0])
    dp = np.zeros_like(z)
    # far-out iterates may overflow; callers treat non-finite values as unconverged
    with np.errstate(over="ignore", invalid="ignore"):
        for c in coeffs_hi[1:]:
            dp = dp * z + p
            p = p * z + c
    return p, dp


def _aberth(coeffs_hi: np.ndarray, maxiter: int = 2000) -> tuple[np.ndarray, bool]:
    n = len(coeffs_hi) - 1
    a = np.abs(coeffs_hi)
    # initial radius from the Fujiwara bound, clipped below by the root of smallest size estimate
    ratios = [(a[k] / a[0]) ** (1.0 / k) for k in range(1, n + 1) if a[k] > 0]
    upper = 2 * max(ratios)
    lower = 0.5 * min((a[-1] / a[k]) ** (1.0 / (n - k)) for k in range(n) if a[k] > 0)
    radius = float(np.sqrt(upper * lower)) if lower > 0 else upper
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)
    done = np.zeros(n, dtype=bool)
    for _ in range(maxiter):
        p, dp = _horner(coeffs_hi, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1)
            s = (1.0 / diff).sum(axis=1) - 1.0
            corr = ratio / (1 - ratio * s)
        corr = np.where(np.isfinite(corr), corr, 0)
        corr[done] = 0
        z = z - corr
        small = np.abs(corr) <= 1e-15 * np.maximum(1.0, np.abs(z))
        done |= small
        if done.all():
            return z, True
    return z, False


def relative_residuals(coeffs_low: Sequence, roots: np.ndarray) -> np.ndarray:
    """|p(r)| / sum |c_i| |r|^i for each root."""
    c = np.array([complex(x) for x in coeffs_low])[::-1]
    p, _ = _horner(c, np.asarray(roots, dtype=complex))
    scale, _ = _horner(np.abs(c).astype(complex), np.abs(np.asarray(roots, dtype=complex)).astype(complex))
    return np.abs(p) / np.maximum(scale.real, np.finfo(float).tiny)


def _pair_conjugates(z: np.ndarray, tol: float) -> np.ndarray:
    z = z.copy()
    scale = np.maximum(1.0, np.abs(z))
    real = np.abs(z.imag) <= tol * 1e2 * scale
    z[real] = z[real].real
    upper = list(np.where(~real & (z.imag > 0))[0])
    lower = list(np.where(~real & (z.imag < 0))[0])
    if len(upper) != len(lower):
        return z
    for i in sorted(upper, key=lambda i: (z[i].real, z[i].imag)):
        j = min(lower, key=lambda j: abs(z[j] - np.conj(z[i])))
        m = 0.5 * (z[i] + np.conj(z[j]))
        z[i], z[j] = m, np.conj(m)
        lower.remove(j)
    return z


def roots_univariate(p: MultiPoly | Sequence[Scalar], tol: float = 1e-10) -> np.ndarray:
    """All complex roots, with multiplicity, of a univariate polynomial."""
    coeffs = list(p.univariate_coefficients()) if isinstance(p, MultiPoly) else list(p)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    if not coeffs:
        raise ValidationError("zero polynomial has no finite root set")
    nzero = 0
    while not coeffs[nzero]:
        nzero += 1
    core = coeffs[nzero:]
    deg = len(coeffs) - 1
    if deg < 1:
        raise ValidationError("constant polynomial has no roots")
    real = all(isinstance(c, (int, Fraction, float)) or (isinstance(c, complex) and c.imag == 0)
               for c in coeffs)
    found = np.zeros(0, dtype=complex)
    if len(core) > 1:
        # scale the variable so the extreme coefficients balance
        c = np.array([complex(x) for x in core])
        k = len(core) - 1
        s = (abs(c[0]) / abs(c[-1])) ** (1.0 / k)
        cs = c * s ** np.arange(k + 1)
        cs = cs / np.abs(cs).max()
        hi = cs[::-1]
        z, ok = _aberth(hi)
        if not ok or not np.all(np.isfinite(z)):
            z = np.roots(hi)
            for _ in range(5):
                pz, dpz = _horner(hi, z)
                with np.errstate(divide="ignore", invalid="ignore"):
                    step = np.where(dpz != 0, pz / dpz, 0)
                z = z - step
        found = z * s
        if real:
            found = _pair_conjugates(found, tol)
        res = relative_residuals(core, found)
        if np.any(res > tol):
            # polish with Newton in the original scaling
            hi0 = c[::-1]
            for _ in range(10):
                pz, dpz = _horner(hi0, found)
                with np.errstate(divide="ignore", invalid="ignore"):
                    step = np.where(dpz != 0, pz / dpz, 0)
                found = found - step
            if real:
                found = _pair_conjugates(found, tol)
    out = np.concatenate([np.zeros(nzero, dtype=complex), found])
    return out[np.lexsort((out.imag, out.real))]
