"""Truncated Taylor series (jets) and closed-form complex Gaussian integrals.

Jets carry the Taylor coefficients of a function around a fixed expansion
point, ``coeffs[j] = f^(j)(x0) / j!``.  Arithmetic on jets propagates the
coefficients exactly up to the truncation order, which turns the repeated
parameter derivatives appearing in the photon-added and photon-subtracted
closed forms into plain array algebra.

Coefficient arrays may carry trailing batch dimensions: a ``Jet1`` of order
``d`` has ``coeffs.shape == (d + 1,) + batch``.  All operations broadcast over
the batch, which lets a whole phase-space grid be pushed through one jet
expression.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import (
    DivergentIntegralError,
    InvalidParameterError,
    NonFiniteError,
    SingularExpansionError,
)

__all__ = [
    "Jet1",
    "Jet2",
    "as_complex",
    "check_finite",
    "jet_product",
    "jet_reciprocal",
    "jet_pow",
    "jet_inv_sqrt",
    "jet_exp",
    "jet_compose",
    "jet_derivative_shift",
    "jet2_pow",
    "jet2_inv_sqrt",
    "jet2_exp",
    "gaussian_moment_integral",
    "gaussian_quadratic_integral",
    "quadratic_integral_converges",
    "FACTORIAL_LIMIT",
]

# Largest n for which n! is finite in double precision.
FACTORIAL_LIMIT = 170


def as_complex(z) -> complex:
    """Coerce ``z`` to a finite Python complex.

    Raises
    ------
    NonFiniteError
        If either component is NaN or infinite.
    """
    w = complex(z)
    if not (np.isfinite(w.real) and np.isfinite(w.imag)):
        raise NonFiniteError(f"non-finite complex value {w!r}")
    return w


def check_finite(x, what: str = "value"):
    """Return ``x`` unchanged, raising if any entry is NaN or infinite."""
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"non-finite {what}")
    return x


# ---------------------------------------------------------------------------
# Univariate jets


def _align(a: np.ndarray, b: np.ndarray):
    # Insert unit batch axes after axis 0 so both arrays have equal ndim.
    if a.ndim < b.ndim:
        a = a.reshape(a.shape[:1] + (1,) * (b.ndim - a.ndim) + a.shape[1:])
    elif b.ndim < a.ndim:
        b = b.reshape(b.shape[:1] + (1,) * (a.ndim - b.ndim) + b.shape[1:])
    return a, b


def _cauchy(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Truncated Cauchy product along axis 0 with broadcasting over batch axes.
    d = a.shape[0] - 1
    if a.ndim == 1 and b.ndim == 1:
        return np.convolve(a, b)[: d + 1]
    a, b = _align(a, b)
    shape = (d + 1,) + np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = np.zeros(shape, dtype=complex)
    for k in range(d + 1):
        acc = out[k]
        for i in range(k + 1):
            acc = acc + a[i] * b[k - i]
        out[k] = acc
    return out


@dataclass(frozen=True, eq=False)
class Jet1:
    """Truncated Taylor expansion of a function of one variable.

    Parameters
    ----------
    coeffs : array_like
        Taylor coefficients; axis 0 runs over the power, any further axes
        are batch axes.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim == 0:
            c = c.reshape(1)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def value(self):
        """Value at the expansion point."""
        return self.coeffs[0]

    @classmethod
    def variable(cls, x0, order: int) -> "Jet1":
        """Jet of the identity function expanded around ``x0``."""
        x0 = np.asarray(x0, dtype=complex)
        c = np.zeros((order + 1,) + x0.shape, dtype=complex)
        c[0] = x0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, c0, order: int) -> "Jet1":
        c0 = np.asarray(c0, dtype=complex)
        c = np.zeros((order + 1,) + c0.shape, dtype=complex)
        c[0] = c0
        return cls(c)

    def derivative(self, k: int):
        """k-th derivative at the expansion point, ``k! * coeffs[k]``."""
        return factorial(k) * self.coeffs[k]

    def truncate(self, order: int) -> "Jet1":
        return Jet1(self.coeffs[: order + 1])

    # arithmetic ---------------------------------------------------------
    def _lift(self, other) -> "Jet1":
        if isinstance(other, Jet1):
            if other.order != self.order:
                raise InvalidParameterError("jet order mismatch")
            return other
        return Jet1.constant(other, self.order)

    def __add__(self, other):
        a, b = _align(self.coeffs, self._lift(other).coeffs)
        return Jet1(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = _align(self.coeffs, self._lift(other).coeffs)
        return Jet1(a - b)

    def __rsub__(self, other):
        a, b = _align(self.coeffs, self._lift(other).coeffs)
        return Jet1(b - a)

    def __neg__(self):
        return Jet1(-self.coeffs)

    def _scale(self, factor):
        f = np.asarray(factor, dtype=complex)
        a, b = _align(self.coeffs, f[None])
        return a, b

    def __mul__(self, other):
        if isinstance(other, Jet1):
            return jet_product(self, other)
        a, b = self._scale(other)
        return Jet1(a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet1):
            return jet_product(self, jet_reciprocal(other))
        a, b = self._scale(other)
        return Jet1(a / b)

    def __rtruediv__(self, other):
        return jet_reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = Jet1.constant(1.0, self.order)
            for _ in range(p):
                out = out * self
            return out
        return jet_pow(self, p)


def jet_product(a: Jet1, b: Jet1) -> Jet1:
    """Cauchy product of two jets of equal order."""
    if a.order != b.order:
        raise InvalidParameterError(
            f"jet order mismatch: {a.order} != {b.order}")
    return Jet1(_cauchy(a.coeffs, b.coeffs))


def jet_pow(a: Jet1, p) -> Jet1:
    """Jet of ``a**p`` for real or complex ``p`` (principal branch).

    Uses the recurrence ``a0 k b_k = sum_j (p j - (k - j)) a_j b_{k-j}``,
    which follows from ``a b' = p a' b``.
    """
    c = a.coeffs
    a0 = c[0]
    if np.any(a0 == 0):
        raise SingularExpansionError("zero constant term in jet power")
    d = a.order
    out = np.zeros_like(c, dtype=complex)
    out[0] = np.power(a0, p)
    for k in range(1, d + 1):
        acc = np.zeros_like(out[0])
        for j in range(1, k + 1):
            acc = acc + (p * j - (k - j)) * c[j] * out[k - j]
        out[k] = acc / (k * a0)
    return Jet1(out)


def jet_reciprocal(a: Jet1) -> Jet1:
    """Jet of ``1 / a``."""
    return jet_pow(a, -1)


def jet_inv_sqrt(a: Jet1) -> Jet1:
    """Jet of ``a**(-1/2)`` on the principal branch.

    Raises
    ------
    SingularExpansionError
        If the constant term vanishes.
    """
    return jet_pow(a, -0.5)


def jet_exp(a: Jet1) -> Jet1:
    """Jet of ``exp(a)`` from ``k b_k = sum_j j a_j b_{k-j}``."""
    c = a.coeffs
    d = a.order
    out = np.zeros_like(c, dtype=complex)
    out[0] = np.exp(c[0])
    for k in range(1, d + 1):
        acc = np.zeros_like(out[0])
        for j in range(1, k + 1):
            acc = acc + j * c[j] * out[k - j]
        out[k] = acc / k
    return Jet1(out)


def jet_compose(outer: Jet1, inner: Jet1) -> Jet1:
    """Taylor coefficients of ``outer(inner(u))``.

    ``outer`` must be expanded around ``inner.coeffs[0]``; only the
    nilpotent part ``inner - inner(0)`` enters, through Horner's scheme.
    """
    if outer.order != inner.order:
        raise InvalidParameterError("jet order mismatch in composition")
    delta = Jet1(inner.coeffs.copy())
    delta.coeffs[0] = 0.0
    d = outer.order
    res = Jet1.constant(outer.coeffs[d], d)
    for k in range(d - 1, -1, -1):
        res = res * delta + outer.coeffs[k]
    return res


def jet_derivative_shift(a: Jet1, m: int) -> Jet1:
    """Jet of the m-th derivative of the expanded function.

    The result has order ``a.order - m`` and coefficients
    ``(m + j)! / j! * a_{m+j}``.
    """
    if m > a.order:
        raise InvalidParameterError("derivative order exceeds jet order")
    d = a.order - m
    scale = np.array([factorial(m + j) / factorial(j) for j in range(d + 1)])
    scale = scale.reshape((d + 1,) + (1,) * (a.coeffs.ndim - 1))
    return Jet1(a.coeffs[m:] * scale)


# ---------------------------------------------------------------------------
# Bivariate jets


@dataclass(frozen=True, eq=False)
class Jet2:
    """Truncated Taylor expansion in two variables ``(x, u)``.

    ``coeffs[i, j]`` is the coefficient of ``dx**i * du**j``; the expansion
    is rectangular, keeping powers up to ``orders = (d1, d2)``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 2:
            raise InvalidParameterError("Jet2 coefficients must be 2-D")
        object.__setattr__(self, "coeffs", c)

    @property
    def orders(self) -> tuple[int, int]:
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    @property
    def value(self) -> complex:
        return complex(self.coeffs[0, 0])

    @classmethod
    def constant(cls, c0, orders) -> "Jet2":
        c = np.zeros((orders[0] + 1, orders[1] + 1), dtype=complex)
        c[0, 0] = c0
        return cls(c)

    @classmethod
    def variable(cls, x0, orders, axis: int) -> "Jet2":
        c = np.zeros((orders[0] + 1, orders[1] + 1), dtype=complex)
        c[0, 0] = x0
        if orders[axis] >= 1:
            if axis == 0:
                c[1, 0] = 1.0
            else:
                c[0, 1] = 1.0
        return cls(c)

    def derivative(self, i: int, j: int) -> complex:
        """Mixed derivative ``d^i/dx^i d^j/du^j`` at the expansion point."""
        return factorial(i) * factorial(j) * complex(self.coeffs[i, j])

    def _lift(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            if other.orders != self.orders:
                raise InvalidParameterError("jet order mismatch")
            return other
        return Jet2.constant(other, self.orders)

    def __add__(self, other):
        return Jet2(self.coeffs + self._lift(other).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return Jet2(self.coeffs - self._lift(other).coeffs)

    def __rsub__(self, other):
        return Jet2(self._lift(other).coeffs - self.coeffs)

    def __neg__(self):
        return Jet2(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            return Jet2(_product2(self.coeffs, self._lift(other).coeffs))
        return Jet2(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * jet2_pow(other, -1)
        return Jet2(self.coeffs / complex(other))

    def __rtruediv__(self, other):
        return jet2_pow(self, -1) * other

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = Jet2.constant(1.0, self.orders)
            for _ in range(p):
                out = out * self
            return out
        return jet2_pow(self, p)


def _product2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d1, d2 = a.shape[0] - 1, a.shape[1] - 1
    out = np.zeros_like(a)
    for i in range(d1 + 1):
        for k in range(i + 1):
            out[i] += np.convolve(a[k], b[i - k])[: d2 + 1]
    return out


def _xprod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Truncated product of two x-jets stored as 1-D coefficient arrays.
    return np.convolve(a, b)[: a.shape[0]]


def _xinv(a: np.ndarray) -> np.ndarray:
    return jet_pow(Jet1(a), -1).coeffs


def jet2_pow(a: Jet2, p) -> Jet2:
    """Jet of ``a**p`` for a bivariate jet (principal branch).

    The univariate power recurrence is run along the second variable with
    truncated first-variable jets as coefficients, which avoids the
    cancellations of a nilpotent power series at high order.
    """
    c = a.coeffs
    if c[0, 0] == 0:
        raise SingularExpansionError("zero constant term in jet power")
    d2 = a.orders[1]
    out = np.zeros_like(c)
    out[:, 0] = jet_pow(Jet1(c[:, 0]), p).coeffs
    inv0 = _xinv(c[:, 0])
    for k in range(1, d2 + 1):
        acc = np.zeros(c.shape[0], dtype=complex)
        for j in range(1, k + 1):
            acc += (p * j - (k - j)) * _xprod(c[:, j], out[:, k - j])
        out[:, k] = _xprod(acc, inv0) / k
    return Jet2(out)


def jet2_inv_sqrt(a: Jet2) -> Jet2:
    return jet2_pow(a, -0.5)


def jet2_exp(a: Jet2) -> Jet2:
    """Jet of ``exp(a)`` from ``k b_k = sum_j j a_j b_{k-j}`` along the second variable."""
    c = a.coeffs
    d2 = a.orders[1]
    out = np.zeros_like(c)
    out[:, 0] = jet_exp(Jet1(c[:, 0])).coeffs
    for k in range(1, d2 + 1):
        acc = np.zeros(c.shape[0], dtype=complex)
        for j in range(1, k + 1):
            acc += j * _xprod(c[:, j], out[:, k - j])
        out[:, k] = acc / k
    return Jet2(out)


# ---------------------------------------------------------------------------
# Gaussian integrals over the complex plane, measure d^2z / pi


def gaussian_moment_integral(n: int, m: int, A, B, C):
    """Closed form of ``int d^2z/pi z^n z*^m exp(A|z|^2 + B z + C z*)``.

    Evaluates ``exp(-BC/A) sum_l n! m! / (l! (n-l)! (m-l)!) B^{m-l} C^{n-l}
    / (-A)^{n+m-l+1}``.  ``B`` and ``C`` may be arrays; ``A`` must satisfy
    ``Re(A) < 0``.

    Raises
    ------
    DivergentIntegralError
        If ``Re(A) >= 0``.
    """
    if n < 0 or m < 0:
        raise InvalidParameterError("moment orders must be non-negative")
    A = np.asarray(A, dtype=complex)
    if np.any(A.real >= 0):
        raise DivergentIntegralError("Gaussian moment integral needs Re(A) < 0")
    B = np.asarray(B, dtype=complex)
    C = np.asarray(C, dtype=complex)
    total = np.zeros(np.broadcast_shapes(A.shape, B.shape, C.shape), dtype=complex)
    for l in range(min(n, m) + 1):
        coef = factorial(n) * factorial(m) / (
            factorial(l) * factorial(n - l) * factorial(m - l))
        total = total + coef * B ** (m - l) * C ** (n - l) / (-A) ** (n + m - l + 1)
    out = np.exp(-B * C / A) * total
    return out[()] if out.ndim == 0 else out


def quadratic_integral_converges(zeta, f, g) -> bool:
    """Convergence conditions of the quadratic Gaussian integral.

    Requires ``Re(zeta -+ f -+ g) < 0`` and
    ``Re((zeta^2 - 4fg) / (zeta -+ f -+ g)) < 0`` for both signs.
    """
    zeta, f, g = complex(zeta), complex(f), complex(g)
    det = zeta * zeta - 4 * f * g
    for sign in (1, -1):
        lin = zeta - sign * (f + g)
        if not lin.real < 0:
            return False
        if not (det / lin).real < 0:
            return False
    return True


def gaussian_quadratic_integral(zeta, xi, eta, f, g):
    """Closed form of ``int d^2z/pi exp(zeta|z|^2 + xi z + eta z* + f z^2 + g z*^2)``.

    Returns ``(zeta^2 - 4fg)^(-1/2) exp[(-zeta xi eta + xi^2 g + eta^2 f)
    / (zeta^2 - 4fg)]`` with the principal square root.  ``xi`` and ``eta``
    may be arrays.

    Raises
    ------
    DivergentIntegralError
        If the convergence conditions fail.
    """
    if not quadratic_integral_converges(zeta, f, g):
        raise DivergentIntegralError("quadratic Gaussian integral diverges")
    zeta, f, g = complex(zeta), complex(f), complex(g)
    det = zeta * zeta - 4 * f * g
    if det.real <= 0 and det.imag == 0:
        raise DivergentIntegralError("determinant on the branch cut")
    xi = np.asarray(xi, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    out = np.exp((-zeta * xi * eta + xi * xi * g + eta * eta * f) / det) / np.sqrt(det)
    return out[()] if out.ndim == 0 else out
