"""Polynomial polyvector fields, polydifferential operators, forms and chains on R^n.

Polynomials are elements of a sympy ``PolyRing`` over QQ in ``x1..xn``.
Directions are 0-based internally (``0`` is ``x1``) and 1-based in the text
format.

Sign conventions, fixed once here:

* A polyvector field of degree ``d`` is a superfunction in odd variables
  ``theta_i``; ``(i1 < ... < id) -> c`` stands for ``c theta_i1 ... theta_id``.
  The Schouten bracket is
  ``[P, Q] = sum_i dP/dtheta_i dQ/dx_i - (-1)^((p-1)(q-1)) dQ/dtheta_i dP/dx_i``
  with right derivatives in ``theta``.  On vector fields it is the Lie bracket.
* Gerstenhaber: ``A o B = sum_i (-1)^((i-1)(b-1)) A o_i B`` (slots 1-based),
  ``[A, B] = A o B - (-1)^((a-1)(b-1)) B o A``.
* Hochschild: ``dA(f0..fa) = f0 A(f1..) + sum_i (-1)^i A(.., f_{i-1} f_i, ..)
  + (-1)^(a+1) A(..f_{a-1}) fa``, which equals ``(-1)^(a+1) [mu, A]``.
* HKR carries ``1/k!``, CHKR carries ``1/m!``.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from sympy import QQ
from sympy.polys.rings import PolyElement, PolyRing

from .graphs import Graph, GraphError


@lru_cache(maxsize=None)
def poly_ring(n: int) -> PolyRing:
    """The polynomial ring ``QQ[x1..xn]``."""
    if n < 1:
        raise ValueError("dimension must be positive")
    return PolyRing([f"x{i + 1}" for i in range(n)], QQ)


def to_poly(n: int, value) -> PolyElement:
    """Coerce an int, Fraction, string expression or ring element into ``QQ[x1..xn]``."""
    R = poly_ring(n)
    if isinstance(value, PolyElement):
        if value.ring == R:
            return value
        return R.from_expr(value.as_expr())
    if isinstance(value, Fraction):
        return R(QQ(value.numerator, value.denominator))
    if isinstance(value, str):
        from sympy import sympify

        return R.from_expr(sympify(value))
    return R(value)


def derivative(p: PolyElement, alpha: Sequence[int]) -> PolyElement:
    """``d^alpha p`` for a multi-index ``alpha``."""
    gens = p.ring.gens
    for i, k in enumerate(alpha):
        for _ in range(k):
            if not p:
                return p
            p = p.diff(gens[i])
    return p


def _unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(1 if j == i else 0 for j in range(n))


def _add_multi(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


def _splits(alpha: Sequence[int], parts: int):
    """All ways to write ``alpha`` as an ordered sum of ``parts`` multi-indices,
    with the multinomial weight ``alpha! / prod(gamma!)``."""
    per_var = []
    for k in alpha:
        options = []
        for combo in itertools.product(range(k + 1), repeat=parts - 1):
            if sum(combo) <= k:
                pieces = combo + (k - sum(combo),)
                w = math.factorial(k)
                for c in pieces:
                    w //= math.factorial(c)
                options.append((pieces, w))
        per_var.append(options)
    for choice in itertools.product(*per_var):
        weight = 1
        for _, w in choice:
            weight *= w
        yield tuple(tuple(c[0][t] for c in choice) for t in range(parts)), weight


def _sort_sign(seq: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the permutation sorting ``seq`` and the sorted tuple; sign 0 on repeats."""
    if len(set(seq)) != len(seq):
        return 0, ()
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return (-1) ** inversions, tuple(sorted(seq))


def _clean(terms: Mapping) -> dict:
    return {k: v for k, v in terms.items() if v}


# ---------------------------------------------------------------------------
# data types


class PolyVectorField:
    """Antisymmetric polyvector field of fixed degree with polynomial coefficients."""

    def __init__(self, n: int, degree: int, coeffs: Mapping[Sequence[int], object] | None = None):
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        self.n = n
        self.degree = degree
        terms: dict[tuple[int, ...], PolyElement] = {}
        for dirs, c in (coeffs or {}).items():
            dirs = tuple(dirs)
            if len(dirs) != degree:
                raise ValueError(f"direction tuple {dirs} does not have length {degree}")
            if any(not 0 <= d < n for d in dirs):
                raise ValueError(f"direction out of range in {dirs}")
            sign, key = _sort_sign(dirs)
            if sign == 0:
                continue
            terms[key] = terms.get(key, poly_ring(n)(0)) + sign * to_poly(n, c)
        self.coeffs = _clean(terms)

    @classmethod
    def function(cls, n: int, p) -> "PolyVectorField":
        return cls(n, 0, {(): p})

    def component(self, dirs: Sequence[int]) -> PolyElement:
        """Antisymmetric component for any (possibly unsorted) direction tuple."""
        sign, key = _sort_sign(dirs)
        if sign == 0:
            return poly_ring(self.n)(0)
        return sign * self.coeffs.get(key, poly_ring(self.n)(0))

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.coeffs
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        if not self.coeffs and not other.coeffs:
            return self.n == other.n
        return (self.n, self.degree, self.coeffs) == (other.n, other.degree, other.coeffs)

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        _check_same(self, other)
        if self.degree != other.degree:
            raise ValueError("cannot add polyvector fields of different degrees")
        terms = dict(self.coeffs)
        for k, v in other.coeffs.items():
            terms[k] = terms.get(k, 0) + v
        return PolyVectorField(self.n, self.degree, _clean(terms))

    def __neg__(self):
        return PolyVectorField(self.n, self.degree, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        s = to_poly(self.n, scalar)
        return PolyVectorField(self.n, self.degree, {k: s * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __repr__(self):
        return f"PolyVectorField(n={self.n}, degree={self.degree}, {to_text(self)})"

    def __hash__(self):
        return hash((self.n, self.degree, tuple(sorted((k, str(v)) for k, v in self.coeffs.items()))))


class PolyDiffOperator:
    """Multidifferential operator ``(f1..fm) -> sum c * prod d^alpha_i f_i``."""

    def __init__(self, n: int, arity: int, terms: Mapping[Sequence[Sequence[int]], object] | None = None):
        if arity < 0:
            raise ValueError("arity must be nonnegative")
        self.n = n
        self.arity = arity
        out: dict[tuple[tuple[int, ...], ...], PolyElement] = {}
        for alphas, c in (terms or {}).items():
            key = tuple(tuple(a) for a in alphas)
            if len(key) != arity or any(len(a) != n for a in key):
                raise ValueError(f"bad multi-index shape {alphas}")
            out[key] = out.get(key, poly_ring(n)(0)) + to_poly(n, c)
        self.terms = _clean(out)

    @classmethod
    def multiplication(cls, n: int) -> "PolyDiffOperator":
        zero = (0,) * n
        return cls(n, 2, {(zero, zero): 1})

    @classmethod
    def partial(cls, n: int, i: int, coeff=1) -> "PolyDiffOperator":
        return cls(n, 1, {(_unit(n, i),): coeff})

    def __call__(self, *fs) -> PolyElement:
        if len(fs) != self.arity:
            raise ValueError(f"operator takes {self.arity} arguments")
        fs = [to_poly(self.n, f) for f in fs]
        total = poly_ring(self.n)(0)
        for alphas, c in self.terms.items():
            prod = c
            for a, f in zip(alphas, fs):
                prod = prod * derivative(f, a)
                if not prod:
                    break
            total += prod
        return total

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, PolyDiffOperator):
            return NotImplemented
        if not self.terms and not other.terms:
            return self.n == other.n
        return (self.n, self.arity, self.terms) == (other.n, other.arity, other.terms)

    def __add__(self, other: "PolyDiffOperator") -> "PolyDiffOperator":
        if not other.terms:
            return self
        if not self.terms:
            return other
        _check_same(self, other)
        if self.arity != other.arity:
            raise ValueError("cannot add operators of different arity")
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms.get(k, 0) + v
        return PolyDiffOperator(self.n, self.arity, _clean(terms))

    def __neg__(self):
        return PolyDiffOperator(self.n, self.arity, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        s = to_poly(self.n, scalar)
        return PolyDiffOperator(self.n, self.arity, {k: s * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __repr__(self):
        return f"PolyDiffOperator(n={self.n}, arity={self.arity}, {len(self.terms)} terms)"


class DiffForm:
    """Differential form of degree ``p`` with polynomial coefficients."""

    def __init__(self, n: int, degree: int, coeffs: Mapping[Sequence[int], object] | None = None):
        self.n = n
        self.degree = degree
        terms: dict[tuple[int, ...], PolyElement] = {}
        for dirs, c in (coeffs or {}).items():
            sign, key = _sort_sign(tuple(dirs))
            if len(dirs) != degree:
                raise ValueError(f"direction tuple {dirs} does not have length {degree}")
            if sign == 0:
                continue
            terms[key] = terms.get(key, poly_ring(n)(0)) + sign * to_poly(n, c)
        self.coeffs = _clean(terms)

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.coeffs
        if not isinstance(other, DiffForm):
            return NotImplemented
        if not self.coeffs and not other.coeffs:
            return self.n == other.n
        return (self.n, self.degree, self.coeffs) == (other.n, other.degree, other.coeffs)

    def __add__(self, other: "DiffForm") -> "DiffForm":
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degrees")
        terms = dict(self.coeffs)
        for k, v in other.coeffs.items():
            terms[k] = terms.get(k, 0) + v
        return DiffForm(self.n, self.degree, _clean(terms))

    def __mul__(self, scalar):
        s = to_poly(self.n, scalar)
        return DiffForm(self.n, self.degree, {k: s * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __repr__(self):
        body = " + ".join(
            f"({v.as_expr()})" + "".join(f"*dx{d + 1}" for d in k) for k, v in sorted(self.coeffs.items())
        )
        return f"DiffForm(n={self.n}, degree={self.degree}, {body or 0})"


class HochschildChain:
    """Chain ``a0 (x) a1 (x) ... (x) am`` of polynomials."""

    def __init__(self, n: int, factors: Iterable):
        self.n = n
        self.factors = tuple(to_poly(n, f) for f in factors)
        if not self.factors:
            raise ValueError("a chain needs at least a0")

    @property
    def length(self) -> int:
        return len(self.factors) - 1


def _check_same(a, b) -> None:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


# ---------------------------------------------------------------------------
# Schouten bracket


def _theta_right_derivative(dirs: tuple[int, ...], i: int) -> tuple[int, tuple[int, ...]]:
    if i not in dirs:
        return 0, ()
    r = dirs.index(i)
    return (-1) ** (len(dirs) - 1 - r), dirs[:r] + dirs[r + 1:]


def _half_bracket(a: PolyVectorField, b: PolyVectorField) -> dict:
    """``sum_i dA/dtheta_i * dB/dx_i`` as a coefficient dict."""
    out: dict = {}
    gens = poly_ring(a.n).gens
    for da, ca in a.coeffs.items():
        for i in da:
            s1, rest = _theta_right_derivative(da, i)
            for db, cb in b.coeffs.items():
                dcb = cb.diff(gens[i])
                if not dcb:
                    continue
                s2, key = _sort_sign(rest + db)
                if s2 == 0:
                    continue
                out[key] = out.get(key, 0) + s1 * s2 * ca * dcb
    return out


def schouten_bracket(a: PolyVectorField, b: PolyVectorField) -> PolyVectorField:
    """Schouten-Nijenhuis bracket; degree ``deg a + deg b - 1``."""
    _check_same(a, b)
    deg = a.degree + b.degree - 1
    if deg < 0:
        return PolyVectorField(a.n, 0)
    sign = (-1) ** ((a.degree - 1) * (b.degree - 1))
    terms = _half_bracket(a, b)
    for k, v in _half_bracket(b, a).items():
        terms[k] = terms.get(k, 0) - sign * v
    return PolyVectorField(a.n, deg, _clean(terms))


# ---------------------------------------------------------------------------
# Gerstenhaber bracket and Hochschild differential


def _compose_at(a: PolyDiffOperator, b: PolyDiffOperator, i: int) -> dict:
    """``A o_i B`` (``i`` 0-based) as a term dict."""
    out: dict = {}
    nb = b.arity
    for alphas, ca in a.terms.items():
        alpha = alphas[i]
        for betas, cb in b.terms.items():
            for pieces, w in _splits(alpha, nb + 1):
                coeff = derivative(cb, pieces[0])
                if not coeff:
                    continue
                inner = tuple(_add_multi(beta, p) for beta, p in zip(betas, pieces[1:]))
                key = alphas[:i] + inner + alphas[i + 1:]
                out[key] = out.get(key, 0) + w * ca * coeff
    return out


def composition(a: PolyDiffOperator, b: PolyDiffOperator) -> PolyDiffOperator:
    """Signed pre-Lie composition ``sum_i (-1)^((i-1)(b-1)) A o_i B``."""
    _check_same(a, b)
    arity = a.arity + b.arity - 1
    if arity < 0:
        return PolyDiffOperator(a.n, 0)
    terms: dict = {}
    for i in range(a.arity):
        s = (-1) ** (i * (b.arity - 1))
        for k, v in _compose_at(a, b, i).items():
            terms[k] = terms.get(k, 0) + s * v
    return PolyDiffOperator(a.n, arity, _clean(terms))


def gerstenhaber_bracket(a: PolyDiffOperator, b: PolyDiffOperator) -> PolyDiffOperator:
    """``[A, B] = A o B - (-1)^((a-1)(b-1)) B o A``; arity ``a + b - 1``."""
    _check_same(a, b)
    sign = (-1) ** ((a.arity - 1) * (b.arity - 1))
    return composition(a, b) - composition(b, a) * sign


def hochschild_differential(a: PolyDiffOperator) -> PolyDiffOperator:
    """Hochschild coboundary; arity goes up by one."""
    n, m = a.n, a.arity
    zero = (0,) * n
    terms: dict = {}

    def add(key, v):
        terms[key] = terms.get(key, 0) + v

    for alphas, c in a.terms.items():
        add((zero,) + alphas, c)
        for i in range(1, m + 1):
            # slots i-1 and i of the output merge into slot i-1 of A
            for (g, h), w in _splits(alphas[i - 1], 2):
                add(alphas[:i - 1] + (g, h) + alphas[i:], (-1) ** i * w * c)
        add(alphas + (zero,), (-1) ** (m + 1) * c)
    return PolyDiffOperator(n, m + 1, _clean(terms))


# ---------------------------------------------------------------------------
# HKR and CHKR


def hkr(a: PolyVectorField) -> PolyDiffOperator:
    """``(f1..fk) -> (1/k!) sum a^{i1..ik} d_i1 f1 ... d_ik fk``."""
    k, n = a.degree, a.n
    scale = QQ(1, math.factorial(k))
    terms: dict = {}
    for dirs, c in a.coeffs.items():
        for perm in itertools.permutations(range(k)):
            s, _ = _sort_sign(perm)
            key = tuple(_unit(n, dirs[p]) for p in perm)
            terms[key] = terms.get(key, 0) + s * scale * c
    return PolyDiffOperator(n, k, _clean(terms))


def _d(p: PolyElement) -> dict:
    gens = p.ring.gens
    return {(i,): p.diff(g) for i, g in enumerate(gens) if p.diff(g)}


def _wedge(a: Mapping[tuple[int, ...], PolyElement], b: Mapping[tuple[int, ...], PolyElement]) -> dict:
    out: dict = {}
    for da, ca in a.items():
        for db, cb in b.items():
            s, key = _sort_sign(da + db)
            if s:
                out[key] = out.get(key, 0) + s * ca * cb
    return _clean(out)


def _chkr_factors(n: int, a0: PolyElement, rest: Sequence[PolyElement]) -> DiffForm:
    form = {(): a0}
    for f in rest:
        form = _wedge(form, _d(f))
        if not form:
            break
    scale = QQ(1, math.factorial(len(rest)))
    return DiffForm(n, len(rest), {k: scale * v for k, v in form.items()})


def chkr(c: HochschildChain) -> DiffForm:
    """``(a0, .., am) -> (1/m!) a0 da1 ^ ... ^ dam``."""
    return _chkr_factors(c.n, c.factors[0], c.factors[1:])


# ---------------------------------------------------------------------------
# graph operators


def _labelings(g: Graph, fields: Sequence[PolyVectorField], n: int):
    """Yield ``(coefficient, in-derivative multi-index per ground vertex)``
    over all assignments of directions to edges."""
    k = g.aerial
    R = poly_ring(n)
    outs = [g.out_edges(v) for v in range(k)]
    ins = [g.in_edges(v) for v in range(g.n_vertices)]
    for labels in itertools.product(range(n), repeat=g.n_edges):
        coeff = R(1)
        for v in range(k):
            comp = fields[v].component(tuple(labels[e] for e in outs[v]))
            if not comp:
                coeff = None
                break
            alpha = [0] * n
            for e in ins[v]:
                alpha[labels[e]] += 1
            coeff = coeff * derivative(comp, alpha)
            if not coeff:
                coeff = None
                break
        if coeff is None:
            continue
        ground = []
        for v in range(k, g.n_vertices):
            alpha = [0] * n
            for e in ins[v]:
                alpha[labels[e]] += 1
            ground.append(tuple(alpha))
        yield coeff, tuple(ground)


def _check_fields(g: Graph, fields: Sequence[PolyVectorField], n: int) -> None:
    if len(fields) != g.aerial:
        raise ValueError(f"graph has {g.aerial} aerial vertices but {len(fields)} fields were given")
    for v, f in enumerate(fields):
        if f.n != n:
            raise ValueError(f"field {v} lives in dimension {f.n}, expected {n}")
        if f.coeffs and f.degree != g.out_degree(v):
            raise ValueError(f"field {v} has degree {f.degree} but vertex {v} has out-degree {g.out_degree(v)}")


def evaluate_kontsevich_operator(g: Graph, fields: Sequence[PolyVectorField], n: int) -> PolyDiffOperator:
    """The polydifferential operator ``D_Gamma`` of a Kontsevich graph.

    Each aerial vertex contributes its field's component indexed by its
    out-edges in edge order, differentiated along its in-edges; each ground
    vertex is an argument slot differentiated along its in-edges.
    """
    if g.species not in ("kontsevich", "brane"):
        raise GraphError("expected a kontsevich graph")
    _check_fields(g, fields, n)
    terms: dict = {}
    for coeff, ground in _labelings(g, fields, n):
        terms[ground] = terms.get(ground, 0) + coeff
    return PolyDiffOperator(n, g.ground, _clean(terms))


def evaluate_shoikhet_operator(g: Graph, fields: Sequence[PolyVectorField], c: HochschildChain) -> DiffForm:
    """The form ``D~_Gamma(fields)(a0, .., am)`` of a Shoikhet graph.

    Slot 0 enters as a function and slots ``1..m`` through the de Rham
    differential of their derived factors, wedged in slot order, with the
    CHKR factor ``1/m!``; with no aerial vertices this is ``chkr``.
    """
    if g.species != "shoikhet":
        raise GraphError("expected a shoikhet graph")
    n = c.n
    _check_fields(g, fields, n)
    if len(c.factors) != g.ground:
        raise ValueError(f"graph has {g.ground} boundary slots but the chain has {len(c.factors)} factors")
    total = DiffForm(n, c.length)
    for coeff, ground in _labelings(g, fields, n):
        derived = [derivative(f, a) for f, a in zip(c.factors, ground)]
        if not derived[0]:
            continue
        total = total + _chkr_factors(n, coeff * derived[0], derived[1:])
    return total


def edge_grouping_sign(g: Graph) -> int:
    """Parity of the edge order relative to the order grouped by source vertex.

    ``c_Gamma`` and ``D_Gamma`` both change sign under edge reordering only
    through this parity for fields of even degree, so ``sign * c * D`` is
    independent of the chosen representative.
    """
    order = sorted(range(g.n_edges), key=lambda e: (g.edges[e][0], e))
    s, _ = _sort_sign(order)
    return s


# ---------------------------------------------------------------------------
# text format


def to_text(field: PolyVectorField) -> list:
    """``[["p/q", [exponents], [directions 1-based]], ...]`` sorted."""
    rows = []
    for dirs, p in sorted(field.coeffs.items()):
        for mono, c in sorted(p.terms()):
            rows.append([str(Fraction(int(c.numerator), int(c.denominator))), list(mono), [d + 1 for d in dirs]])
    return rows


def from_text(n: int, degree: int, rows: Iterable) -> PolyVectorField:
    R = poly_ring(n)
    coeffs: dict = {}
    for coeff, mono, dirs in rows:
        f = Fraction(coeff)
        term = R({tuple(mono): QQ(f.numerator, f.denominator)})
        key = tuple(d - 1 for d in dirs)
        coeffs[key] = coeffs.get(key, R(0)) + term
    return PolyVectorField(n, degree, coeffs)


def operator_to_text(op: PolyDiffOperator) -> list:
    """``[["p/q", [exponents], [[alpha_1], .., [alpha_m]]], ...]`` sorted."""
    rows = []
    for alphas, p in sorted(op.terms.items()):
        for mono, c in sorted(p.terms()):
            rows.append([str(Fraction(int(c.numerator), int(c.denominator))), list(mono), [list(a) for a in alphas]])
    return rows


def operator_from_text(n: int, arity: int, rows: Iterable) -> PolyDiffOperator:
    R = poly_ring(n)
    terms: dict = {}
    for coeff, mono, alphas in rows:
        f = Fraction(coeff)
        key = tuple(tuple(a) for a in alphas)
        terms[key] = terms.get(key, R(0)) + R({tuple(mono): QQ(f.numerator, f.denominator)})
    return PolyDiffOperator(n, arity, terms)
