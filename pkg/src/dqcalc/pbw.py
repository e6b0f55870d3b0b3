"""PBW symmetrization, the PBW star product and Duflo-type corrections.

Symmetric-algebra elements are polynomials in a sympy ring whose generators
are named after the Lie algebra basis.  Enveloping-algebra elements are dicts
``{exponent tuple: Fraction}`` in the PBW basis ``e_0^a0 ... e_{d-1}^a(d-1)``.
Generator indices are 0-based in code and 1-based in the JSON format.
"""
from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from sympy import QQ
from sympy.polys.rings import PolyElement, PolyRing
from sympy.utilities.iterables import multiset_permutations

from .series import bernoulli

UEAElement = dict  # {exponents: Fraction}


class LieAlgebraData:
    """Structure constants ``[e_a, e_b] = sum_c f[a][b][c] e_c``."""

    def __init__(self, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, object]], names: Sequence[str] | None = None):
        self.dim = dim
        self.names = tuple(names) if names else tuple(f"x{i + 1}" for i in range(dim))
        if len(self.names) != dim:
            raise ValueError("one name per basis vector")
        f = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for (a, b), vals in brackets.items():
            for c, v in vals.items():
                v = Fraction(v)
                if a == b and v:
                    raise ValueError(f"[e{a}, e{a}] must vanish")
                f[a][b][c] = v
                if f[b][a][c] not in (0, -v) and (b, a) in brackets:
                    raise ValueError(f"brackets ({a},{b}) and ({b},{a}) are not antisymmetric")
                f[b][a][c] = -v
        self.f = tuple(tuple(tuple(row) for row in mat) for mat in f)
        self._check_jacobi()
        self._straightened: dict[tuple[int, ...], dict] = {}

    def _check_jacobi(self) -> None:
        d, f = self.dim, self.f
        for a, b, c in itertools.combinations(range(d), 3):
            for x in range(d):
                s = sum(f[a][b][e] * f[e][c][x] + f[b][c][e] * f[e][a][x] + f[c][a][e] * f[e][b][x] for e in range(d))
                if s:
                    raise ValueError(f"Jacobi identity fails for ({a}, {b}, {c})")

    def bracket(self, a: int, b: int) -> dict[int, Fraction]:
        return {c: v for c, v in enumerate(self.f[a][b]) if v}

    @property
    def is_abelian(self) -> bool:
        return not any(v for mat in self.f for row in mat for v in row)

    @classmethod
    def from_json(cls, text: str) -> "LieAlgebraData":
        data = json.loads(text)
        dim = data["dim"]
        brackets = {}
        for a, b, coeffs in data["brackets"]:
            if len(coeffs) != dim:
                raise ValueError("bracket needs one coefficient per basis vector")
            brackets[(a - 1, b - 1)] = {c: Fraction(v) for c, v in enumerate(coeffs) if Fraction(v)}
        return cls(dim, brackets, data.get("names"))

    def to_json(self) -> str:
        rows = []
        for a, b in itertools.combinations(range(self.dim), 2):
            if any(self.f[a][b]):
                rows.append([a + 1, b + 1, [str(v) for v in self.f[a][b]]])
        return json.dumps({"dim": self.dim, "names": list(self.names), "brackets": rows})

    def __repr__(self):
        return f"LieAlgebraData(dim={self.dim}, names={self.names})"


def _build(dim, brackets, names):
    return LieAlgebraData(dim, {k: dict(v) for k, v in brackets.items()}, names)


def abelian(dim: int = 2) -> LieAlgebraData:
    return LieAlgebraData(dim, {})


def heisenberg() -> LieAlgebraData:
    """``[x, y] = z``."""
    return _build(3, {(0, 1): {2: 1}}, ("x", "y", "z"))


def sl2() -> LieAlgebraData:
    """Basis ``h, e, f``: ``[h,e] = 2e, [h,f] = -2f, [e,f] = h``."""
    return _build(3, {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}, ("h", "e", "f"))


def so3() -> LieAlgebraData:
    """``[x, y] = z`` and cyclic."""
    return _build(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}, ("x", "y", "z"))


def affine2() -> LieAlgebraData:
    """The non-unimodular 2-dimensional algebra ``[x, y] = y``."""
    return _build(2, {(0, 1): {1: 1}}, ("x", "y"))


FIXTURES = {"abelian": abelian, "heisenberg": heisenberg, "sl2": sl2, "so3": so3, "affine2": affine2}


# ---------------------------------------------------------------------------
# polynomials


@lru_cache(maxsize=None)
def _ring(names: tuple[str, ...]) -> PolyRing:
    return PolyRing(list(names), QQ)


def sym_ring(L: LieAlgebraData) -> PolyRing:
    """Polynomial ring ``S(g)`` over QQ."""
    return _ring(L.names)


def _q(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _poly_dict(p: PolyElement) -> dict[tuple[int, ...], Fraction]:
    return {m: _q(c) for m, c in p.terms()}


def _from_dict(R: PolyRing, d: Mapping[tuple[int, ...], Fraction]) -> PolyElement:
    return R({m: QQ(c.numerator, c.denominator) for m, c in d.items() if c})


# ---------------------------------------------------------------------------
# enveloping algebra


def _word(exps: Sequence[int]) -> tuple[int, ...]:
    return tuple(i for i, k in enumerate(exps) for _ in range(k))


def _exps(word: Sequence[int], dim: int) -> tuple[int, ...]:
    out = [0] * dim
    for i in word:
        out[i] += 1
    return tuple(out)


def _uea_add(out: dict, key, v) -> None:
    t = out.get(key, 0) + v
    if t:
        out[key] = t
    else:
        out.pop(key, None)


def normal_order(L: LieAlgebraData, word: Sequence[int]) -> UEAElement:
    """Straighten a word in the generators to the PBW basis."""
    return dict(_normal_order(L, tuple(word)))


def _normal_order(L: LieAlgebraData, word: tuple[int, ...]) -> dict:
    cache = L._straightened
    hit = cache.get(word)
    if hit is not None:
        return hit
    out: dict = {}
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a > b:
            swapped = word[:i] + (b, a) + word[i + 2:]
            for k, v in _normal_order(L, swapped).items():
                _uea_add(out, k, v)
            for c, fc in L.bracket(a, b).items():
                for k, v in _normal_order(L, word[:i] + (c,) + word[i + 2:]).items():
                    _uea_add(out, k, fc * v)
            break
    else:
        out = {_exps(word, L.dim): Fraction(1)}
    cache[word] = out
    return out


def uea_multiply(L: LieAlgebraData, u: UEAElement, v: UEAElement) -> UEAElement:
    out: dict = {}
    for ku, cu in u.items():
        wu = _word(ku)
        for kv, cv in v.items():
            for k, c in _normal_order(L, wu + _word(kv)).items():
                _uea_add(out, k, cu * cv * c)
    return out


def uea_sub(u: UEAElement, v: UEAElement) -> UEAElement:
    out = dict(u)
    for k, c in v.items():
        _uea_add(out, k, -c)
    return out


def pbw_symmetrize(L: LieAlgebraData, p: PolyElement) -> UEAElement:
    """``x_i1 ... x_ik -> (1/k!) sum_sigma e_i(sigma 1) ... e_i(sigma k)`` in PBW order."""
    out: dict = {}
    for exps, c in _poly_dict(p).items():
        word = _word(exps)
        perms = list(multiset_permutations(list(word)))
        scale = c / len(perms)
        for w in perms:
            for k, v in _normal_order(L, tuple(w)).items():
                _uea_add(out, k, scale * v)
    return out


def pbw_unsymmetrize(L: LieAlgebraData, u: UEAElement) -> PolyElement:
    """Inverse of ``pbw_symmetrize``: peel off the top filtration degree repeatedly."""
    R = sym_ring(L)
    result: dict = {}
    rest = dict(u)
    while rest:
        top = max(sum(k) for k in rest)
        lead = {k: c for k, c in rest.items() if sum(k) == top}
        for k, c in lead.items():
            result[k] = result.get(k, 0) + c
        rest = uea_sub(rest, pbw_symmetrize(L, _from_dict(R, lead)))
    return _from_dict(R, result)


def star_pbw(L: LieAlgebraData, p: PolyElement, q: PolyElement) -> PolyElement:
    """``phi^-1(phi(p) phi(q))`` with ``phi`` the symmetrization map."""
    return pbw_unsymmetrize(L, uea_multiply(L, pbw_symmetrize(L, p), pbw_symmetrize(L, q)))


# ---------------------------------------------------------------------------
# trace operators and Duflo-type corrections


def _ad(L: LieAlgebraData, k: int) -> list[list[Fraction]]:
    """Matrix of ``ad e_k``: entry ``[c][i] = f^{k i}_c``."""
    d = L.dim
    return [[L.f[k][i][c] for i in range(d)] for c in range(d)]


def _matmul(a, b):
    n = len(a)
    return [[sum(a[i][t] * b[t][j] for t in range(n)) for j in range(n)] for i in range(n)]


def operator_ring(L: LieAlgebraData) -> PolyRing:
    """Ring of constant-coefficient operators, generators ``d_<name>``."""
    return _ring(tuple(f"d_{n}" for n in L.names))


def trace_power_operator(L: LieAlgebraData, j: int) -> PolyElement:
    """``tr(ad_d^j) = sum_k tr(ad_kj ... ad_k1) d_k1 ... d_kj`` as an operator polynomial."""
    if j < 2:
        raise ValueError("j must be at least 2")
    d = L.dim
    ads = [_ad(L, k) for k in range(d)]
    coeffs: dict = {}
    # products ad_kj ... ad_k1, built one factor at a time
    layer = {(): [[Fraction(int(i == c)) for i in range(d)] for c in range(d)]}
    for _ in range(j):
        nxt = {}
        for ks, m in layer.items():
            for k in range(d):
                nxt[ks + (k,)] = _matmul(ads[k], m)
        layer = nxt
    for ks, m in layer.items():
        tr = sum(m[i][i] for i in range(d))
        if tr:
            e = _exps(ks, d)
            coeffs[e] = coeffs.get(e, 0) + tr
    return _from_dict(operator_ring(L), coeffs)


def apply_operator(L: LieAlgebraData, op: PolyElement, p: PolyElement) -> PolyElement:
    """Apply a constant-coefficient operator in ``d_<name>`` to ``p``."""
    R = sym_ring(L)
    total = R(0)
    gens = R.gens
    for exps, c in _poly_dict(op).items():
        term = p
        for i, k in enumerate(exps):
            for _ in range(k):
                term = term.diff(gens[i])
        if term:
            total += QQ(c.numerator, c.denominator) * term
    return total


def _total_degree(p: PolyElement) -> int:
    return max((sum(m) for m in p.monoms()), default=0) if p else 0


def _truncate(p: PolyElement, maxdeg: int) -> PolyElement:
    return p.ring({m: c for m, c in p.terms() if sum(m) <= maxdeg})


def duflo_operator(L: LieAlgebraData, coeffs: Mapping[int, object], maxdeg: int) -> PolyElement:
    """``exp(sum_j c_j tr(ad_d^j))`` truncated at operator order ``maxdeg``."""
    O = operator_ring(L)
    x = O(0)
    for j, c in coeffs.items():
        c = Fraction(c)
        if c and 2 <= j <= maxdeg:
            x += QQ(c.numerator, c.denominator) * trace_power_operator(L, j)
    total = O(1)
    power = O(1)
    for n in range(1, maxdeg // 2 + 1):
        power = _truncate(power * x, maxdeg)
        total += power * QQ(1, math.factorial(n))
    return _truncate(total, maxdeg)


def duflo_coefficients(maxdeg: int, denominator: str = "one") -> dict[int, Fraction]:
    """Coefficients ``c_j`` with ``-sum_j ((-1)^j / D_j) c_j x^j`` equal to the Duflo series.

    ``denominator="one"`` (default) gives ``c_2k = B_2k / (4k (2k)!)``;
    ``denominator="j"`` is the alternative reading ``D_j = j``.
    """
    out = {}
    for k in range(1, maxdeg // 2 + 1):
        lam = -bernoulli(2 * k) / (4 * k * math.factorial(2 * k))
        if denominator == "one":
            out[2 * k] = -lam
        elif denominator == "j":
            out[2 * k] = -2 * k * lam
        else:
            raise ValueError(f"unknown denominator reading {denominator!r}")
    return out


def coadjoint_derivation(L: LieAlgebraData, a: int, p: PolyElement) -> PolyElement:
    """``sum_{b,c} f^{ab}_c x_c d p / d x_b``."""
    R = sym_ring(L)
    gens = R.gens
    out = R(0)
    for b in range(L.dim):
        db = p.diff(gens[b])
        if not db:
            continue
        for c, v in L.bracket(a, b).items():
            out += QQ(v.numerator, v.denominator) * gens[c] * db
    return out


def is_invariant(L: LieAlgebraData, p: PolyElement) -> bool:
    return all(not coadjoint_derivation(L, a, p) for a in range(L.dim))


def duflo_multiplicativity_residual(
    L: LieAlgebraData, p: PolyElement, q: PolyElement, coeffs: Mapping[int, object]
) -> UEAElement:
    """``phi(Psi p) phi(Psi q) - phi(Psi(p q))`` for invariant ``p, q``."""
    for name, poly in (("p", p), ("q", q)):
        if not is_invariant(L, poly):
            raise ValueError(f"{name} is not invariant under the coadjoint action")
    maxdeg = _total_degree(p) + _total_degree(q)
    psi = duflo_operator(L, coeffs, maxdeg)
    lhs = uea_multiply(L, pbw_symmetrize(L, apply_operator(L, psi, p)), pbw_symmetrize(L, apply_operator(L, psi, q)))
    rhs = pbw_symmetrize(L, apply_operator(L, psi, p * q))
    return uea_sub(lhs, rhs)


def casimir(L: LieAlgebraData) -> PolyElement:
    """Quadratic invariant from the inverse Killing form (semisimple ``L`` only)."""
    from sympy import Matrix, Rational

    kill = trace_power_operator(L, 2)
    d = L.dim
    K = Matrix.zeros(d, d)
    for exps, c in _poly_dict(kill).items():
        idx = _word(exps)
        r = Rational(c.numerator, c.denominator)
        if idx[0] == idx[1]:
            K[idx[0], idx[0]] = r
        else:
            K[idx[0], idx[1]] = r / 2
            K[idx[1], idx[0]] = r / 2
    if K.det() == 0:
        raise ValueError("Killing form is degenerate")
    Kinv = K.inv()
    R = sym_ring(L)
    gens = R.gens
    out = R(0)
    for a in range(d):
        for b in range(d):
            if Kinv[a, b] != 0:
                out += QQ(int(Kinv[a, b].p), int(Kinv[a, b].q)) * gens[a] * gens[b]
    return out


def uea_to_text(L: LieAlgebraData, u: UEAElement) -> str:
    if not u:
        return "0"
    parts = []
    for k in sorted(u):
        mono = "*".join(f"{L.names[i]}^{e}" if e > 1 else L.names[i] for i, e in enumerate(k) if e) or "1"
        parts.append(f"{u[k]}*{mono}")
    return " + ".join(parts)
