"""Truncated power series, Bernoulli numbers and the reference characteristic series.

Every characteristic function here has the shape ``sum_{j>=2} lambda_j x^j``.
Exact series carry ``Fraction`` coefficients; the zeta-type series carry
complex floats.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np
from scipy import special


class TruncatedSeries:
    """``sum_{j=2..order} lambda_j x^j`` with exact or complex coefficients."""

    def __init__(self, order: int, coeffs: Mapping[int, object] | None = None, exact: bool = True):
        if order < 2:
            raise ValueError("truncation order must be at least 2")
        self.order = order
        self.exact = exact
        self._c: dict[int, object] = {}
        for j, v in (coeffs or {}).items():
            if j < 2:
                if v:
                    raise ValueError("characteristic series start at x^2")
                continue
            if j > order:
                continue
            v = Fraction(v) if exact else complex(v)
            if v:
                self._c[j] = v

    def __getitem__(self, j: int):
        zero = Fraction(0) if self.exact else 0j
        return self._c.get(j, zero)

    def coefficients(self) -> list:
        """``[lambda_2, ..., lambda_order]``."""
        return [self[j] for j in range(2, self.order + 1)]

    def _combine(self, other: "TruncatedSeries", sign: int) -> "TruncatedSeries":
        order = min(self.order, other.order)
        exact = self.exact and other.exact
        coeffs = {j: self[j] + sign * other[j] for j in range(2, order + 1)}
        if not exact:
            coeffs = {j: complex(v) for j, v in coeffs.items()}
        return TruncatedSeries(order, coeffs, exact)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __mul__(self, scalar):
        return TruncatedSeries(self.order, {j: v * scalar for j, v in self._c.items()}, self.exact)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and self.coefficients() == other.coefficients()

    def max_abs_diff(self, other: "TruncatedSeries") -> float:
        order = min(self.order, other.order)
        return max(abs(complex(self[j]) - complex(other[j])) for j in range(2, order + 1))

    def close_to(self, other: "TruncatedSeries", tol: float | None) -> bool:
        """Exact equality when ``tol`` is None, else coefficientwise within ``tol``."""
        if tol is None:
            order = min(self.order, other.order)
            return all(self[j] == other[j] for j in range(2, order + 1))
        return self.max_abs_diff(other) <= tol

    def tsv_rows(self) -> list[tuple[int, str]]:
        rows = []
        for j in range(2, self.order + 1):
            v = self[j]
            rows.append((j, str(v) if self.exact else f"{v.real!r},{v.imag!r}"))
        return rows

    def __repr__(self):
        terms = " + ".join(f"({v})x^{j}" for j, v in sorted(self._c.items()))
        return f"TruncatedSeries(order={self.order}, {terms or 0})"


class AssociatorCoefficients:
    """``b_j``: coefficient of ``X^(j-1) Y`` in an associator, ``2 <= j <= order``."""

    def __init__(self, order: int, values: Mapping[int, object], exact: bool = False):
        self.order = order
        self.exact = exact
        self.values = {j: (Fraction(v) if exact else complex(v)) for j, v in values.items() if 2 <= j <= order}


# ---------------------------------------------------------------------------
# Bernoulli numbers


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """``B_k`` with ``B_1 = -1/2``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 1:
        return Fraction(-1, 2)
    from sympy import bernoulli as sympy_bernoulli

    b = sympy_bernoulli(k)
    return Fraction(int(b.p), int(b.q))


# ---------------------------------------------------------------------------
# exact power series helpers (coefficient lists from x^0)


def _mul(a: list[Fraction], b: list[Fraction], n: int) -> list[Fraction]:
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def _inverse(a: list[Fraction], n: int) -> list[Fraction]:
    if not a[0]:
        raise ZeroDivisionError("series has no constant term")
    out = [Fraction(0)] * n
    out[0] = 1 / a[0]
    for k in range(1, n):
        out[k] = -sum(a[i] * out[k - i] for i in range(1, min(k, len(a) - 1) + 1)) / a[0]
    return out


def _log(a: list[Fraction], n: int) -> list[Fraction]:
    """``log a`` for ``a(0) = 1`` via ``(log a)' = a'/a``."""
    if a[0] != 1:
        raise ValueError("log needs constant term 1")
    deriv = [i * a[i] for i in range(1, len(a))] + [Fraction(0)]
    q = _mul(deriv, _inverse(a, n), n)
    return [Fraction(0)] + [q[i - 1] / i for i in range(1, n)]


def _sinhc_half(n: int) -> list[Fraction]:
    """``sinh(x/2)/(x/2) = (e^(x/2) - e^(-x/2))/x``."""
    out = [Fraction(0)] * n
    for k in range(0, n, 2):
        out[k] = Fraction(1, 2**k * math.factorial(k + 1))
    return out


# ---------------------------------------------------------------------------
# reference series


def duflo_reference_series(order: int, route: str = "bernoulli") -> TruncatedSeries:
    """``-1/2 log((e^(x/2) - e^(-x/2))/x)``.

    ``route="bernoulli"`` uses ``-B_2k/(4k(2k)!)`` on ``x^2k``;
    ``route="log"`` expands the closed form with exact series arithmetic.
    """
    if order < 2:
        raise ValueError("order must be at least 2")
    if route == "bernoulli":
        coeffs = {2 * k: -bernoulli(2 * k) / (4 * k * math.factorial(2 * k)) for k in range(1, order // 2 + 1)}
    elif route == "log":
        logs = _log(_sinhc_half(order + 1), order + 1)
        coeffs = {j: -logs[j] / 2 for j in range(2, order + 1)}
    else:
        raise ValueError(f"unknown route {route!r}")
    return TruncatedSeries(order, coeffs)


def duflo_routes_agree(order: int) -> bool:
    return duflo_reference_series(order, "bernoulli") == duflo_reference_series(order, "log")


def zeta(k: int) -> float:
    return float(special.zeta(k, 1))


ZETA_VARIANTS = ("kz", "half_propagator", "at")


def zeta_reference_series(variant: str, order: int) -> TruncatedSeries:
    """``sum_k zeta(k)/(k (2 pi i)^k) x^k``; ``at`` keeps the even part."""
    if variant not in ZETA_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if order < 2:
        raise ValueError("order must be at least 2")
    s = TruncatedSeries(order, {k: zeta(k) / (k * (2j * math.pi) ** k) for k in range(2, order + 1)}, exact=False)
    return even_part(s) if variant == "at" else s


def log_gamma_identity(z: complex, terms: int = 40) -> tuple[complex, complex]:
    """``(sum_{k=2..terms} zeta(k) z^k / k, log Gamma(1-z) - gamma z)``."""
    series = sum(zeta(k) * z**k / k for k in range(2, terms + 1))
    closed = complex(special.loggamma(complex(1 - z))) - np.euler_gamma * z
    return complex(series), closed


def even_part(s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(s.order, {j: s[j] for j in range(2, s.order + 1) if j % 2 == 0}, s.exact)


def associator_characteristic(phi: AssociatorCoefficients) -> TruncatedSeries:
    """``lambda_j = b_j / j``."""
    return TruncatedSeries(phi.order, {j: v / j for j, v in phi.values.items()}, phi.exact)


def kz_associator_coefficients(order: int) -> AssociatorCoefficients:
    """Built-in table ``b_j = zeta(j)/(2 pi i)^j``."""
    return AssociatorCoefficients(order, {j: zeta(j) / (2j * math.pi) ** j for j in range(2, order + 1)})


def at_associator_coefficients(order: int) -> AssociatorCoefficients:
    """Even part of the KZ table."""
    kz = kz_associator_coefficients(order)
    return AssociatorCoefficients(order, {j: v for j, v in kz.values.items() if j % 2 == 0})


def series_from_pairs(order: int, pairs: Iterable[tuple[int, object]], exact: bool = True) -> TruncatedSeries:
    return TruncatedSeries(order, dict(pairs), exact)
