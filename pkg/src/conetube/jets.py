"""Truncated complex power series (jets) with explicit branch control.

A ``Jet`` holds the coefficients ``c0 + c1*t + ... + ck*t**k`` of a function
of one variable, truncated at order ``k <= 4``. Coefficients above the
truncation order are unknown rather than zero, so arithmetic truncates every
result to the shortest operand, the same convention as any power-series
calculus.

Two things distinguish this implementation from a generic power-series
class and both exist because downstream code analytically continues around
branch points:

* ``sqrt`` and ``log`` never choose a branch. The caller passes the value at
  the constant term (a number whose square, or exponential, matches ``c0``)
  and the series is built on that sheet.
* Scalar branch continuation helpers (``continue_sqrt``, ``continue_log``,
  ``sqrt_along_path``, ``log_along_path``) carry a branch along a path of
  arguments, refusing steps large enough to be ambiguous.

Leading powers of the variable are moved explicitly with ``shift_down`` and
``shift_up``; ``real_modulus_jet`` expands ``|f(t)|`` for real ``t`` given
the declared leading power of ``f``.
"""

from __future__ import annotations

import cmath
import dataclasses
from typing import Callable, Iterable, Sequence

from .config import ensure_finite

MAX_ORDER = 4


class JetError(ValueError):
    pass


class BranchError(JetError):
    pass


def _as_complex_tuple(coeffs: Iterable[complex]) -> tuple[complex, ...]:
    out = tuple(complex(c) for c in coeffs)
    ensure_finite(*out)
    return out


@dataclasses.dataclass(frozen=True)
class Jet:
    """Truncated power series in one named variable."""

    coeffs: tuple[complex, ...]
    var: str = "t"

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _as_complex_tuple(self.coeffs))
        if not 1 <= len(self.coeffs) <= MAX_ORDER + 1:
            raise JetError(f"jet order must be 0..{MAX_ORDER}, got {len(self.coeffs) - 1}")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> complex:
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    # derivative value f^(k)(0), not the series coefficient
    def derivative(self, k: int) -> complex:
        fact = 1
        for j in range(2, k + 1):
            fact *= j
        return self.coeffs[k] * fact

    def evaluate(self, x: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _check_var(self, other: "Jet") -> None:
        if self.var != other.var:
            raise JetError(f"mixed jet variables {self.var!r} and {other.var!r}")

    def _binary(self, other, op: Callable[[tuple, tuple, int], list]) -> "Jet":
        if isinstance(other, Jet):
            self._check_var(other)
            n = min(self.order, other.order)
            return Jet(tuple(op(self.coeffs, other.coeffs, n)), self.var)
        other = complex(other)
        return Jet(tuple(op(self.coeffs, (other,) + (0j,) * self.order, self.order)), self.var)

    def __add__(self, other) -> "Jet":
        return self._binary(other, lambda a, b, n: [a[k] + b[k] for k in range(n + 1)])

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self._binary(other, lambda a, b, n: [a[k] - b[k] for k in range(n + 1)])

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __neg__(self) -> "Jet":
        return Jet(tuple(-c for c in self.coeffs), self.var)

    def __mul__(self, other) -> "Jet":
        if isinstance(other, Jet):
            self._check_var(other)
            n = min(self.order, other.order)
            out = [0j] * (n + 1)
            for i in range(n + 1):
                for j in range(n + 1 - i):
                    out[i + j] += self.coeffs[i] * other.coeffs[j]
            return Jet(tuple(out), self.var)
        z = complex(other)
        return Jet(tuple(c * z for c in self.coeffs), self.var)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return self * (1.0 / complex(other))
        self._check_var(other)
        if other.coeffs[0] == 0:
            raise JetError("division by a jet with zero constant term; shift_down first")
        n = min(self.order, other.order)
        out = [0j] * (n + 1)
        for k in range(n + 1):
            acc = self.coeffs[k]
            for j in range(k):
                acc -= out[j] * other.coeffs[k - j]
            out[k] = acc / other.coeffs[0]
        return Jet(tuple(out), self.var)

    def __rtruediv__(self, other) -> "Jet":
        return constant(complex(other), self.order, self.var) / self

    def __pow__(self, n: int) -> "Jet":
        if not isinstance(n, int):
            raise JetError("only integer powers; use jet_sqrt/jet_log for fractional")
        if n < 0:
            return 1.0 / (self ** (-n))
        acc = constant(1.0, self.order, self.var)
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise JetError("cannot extend a jet; higher coefficients are unknown")
        return Jet(self.coeffs[: order + 1], self.var)

    def shift_down(self, k: int, rel_tol: float = 1e-9) -> "Jet":
        """Divide by var**k; the first k coefficients must already vanish."""
        if k == 0:
            return self
        if k > self.order:
            raise JetError("shift_down exceeds jet order")
        scale = max(abs(c) for c in self.coeffs)
        if scale == 0:
            scale = 1.0
        for c in self.coeffs[:k]:
            if abs(c) > rel_tol * scale:
                raise JetError(
                    f"declared leading power {k} but coefficient {c!r} does not vanish"
                )
        return Jet(self.coeffs[k:], self.var)

    def shift_up(self, k: int) -> "Jet":
        """Multiply by var**k, truncating at MAX_ORDER."""
        if k == 0:
            return self
        coeffs = (0j,) * k + self.coeffs
        return Jet(coeffs[: MAX_ORDER + 1], self.var)

    def rename(self, var: str) -> "Jet":
        """Same coefficients as a series in another variable."""
        return Jet(self.coeffs, var)

    def conjugate_coefficients(self) -> "Jet":
        """Coefficient-wise conjugate: equals conj(f(t)) only for real t."""
        return Jet(tuple(c.conjugate() for c in self.coeffs), self.var)

    def real_part(self) -> "Jet":
        """Coefficient-wise real part: equals Re f(t) only for real t."""
        return Jet(tuple(complex(c.real, 0.0) for c in self.coeffs), self.var)

    def imag_max(self) -> float:
        return max(abs(c.imag) for c in self.coeffs)

    def __repr__(self) -> str:
        return f"Jet({list(self.coeffs)!r}, var={self.var!r})"


def constant(value: complex, order: int = MAX_ORDER, var: str = "t") -> Jet:
    return Jet((complex(value),) + (0j,) * order, var)


def variable(var: str = "t", order: int = MAX_ORDER) -> Jet:
    if order < 1:
        raise JetError("variable jet needs order >= 1")
    return Jet((0j, 1.0 + 0j) + (0j,) * (order - 1), var)


def jet_exp(f: Jet) -> Jet:
    u = f - f.coeffs[0]
    acc = constant(1.0, f.order, f.var)
    # Horner form of sum u^k / k!
    for n in range(f.order, 0, -1):
        acc = acc * u * (1.0 / n) + 1.0
    return acc * cmath.exp(f.coeffs[0])


def jet_log(f: Jet, log_of_c0: complex) -> Jet:
    """Series of log f on the sheet where log(c0) = log_of_c0."""
    c0 = f.coeffs[0]
    if c0 == 0:
        raise JetError("log of a jet with zero constant term")
    if abs(cmath.exp(log_of_c0) - c0) > 1e-8 * abs(c0):
        raise BranchError(f"exp({log_of_c0!r}) does not match constant term {c0!r}")
    u = (f - c0) / c0
    acc = constant(0.0, f.order, f.var)
    un = constant(1.0, f.order, f.var)
    for n in range(1, f.order + 1):
        un = un * u
        acc = acc + un * ((-1.0) ** (n + 1) / n)
    return acc + log_of_c0


def jet_sqrt(f: Jet, branch_of_c0: complex) -> Jet:
    """Series of sqrt f on the sheet where sqrt(c0) = branch_of_c0."""
    c0 = f.coeffs[0]
    s0 = complex(branch_of_c0)
    if s0 == 0:
        raise BranchError("branch value 0 is a branch point, not a branch")
    if abs(s0 * s0 - c0) > 1e-8 * max(1.0, abs(c0)):
        raise BranchError(f"square of branch {s0!r} does not match constant term {c0!r}")
    n = f.order
    out = [0j] * (n + 1)
    out[0] = s0
    for k in range(1, n + 1):
        acc = f.coeffs[k]
        for j in range(1, k):
            acc -= out[j] * out[k - j]
        out[k] = acc / (2.0 * s0)
    return Jet(tuple(out), f.var)


def compose(outer: Jet, inner: Jet) -> Jet:
    """outer(inner(t)); inner must have zero constant term."""
    if inner.coeffs[0] != 0:
        raise JetError("composition needs inner jet with zero constant term")
    n = min(outer.order, inner.order)
    acc = constant(outer.coeffs[n], n, inner.var)
    for k in range(n - 1, -1, -1):
        acc = acc * inner.truncate(n) + outer.coeffs[k]
    return acc


def reversion(f: Jet) -> Jet:
    """Inverse series of f with f(0)=0: reversion(f)(f(t)) = t."""
    if f.coeffs[0] != 0:
        raise JetError("reversion needs zero constant term")
    if f.coeffs[1] == 0:
        raise JetError("reversion needs a nonzero linear coefficient")
    n = f.order
    out = [0j, 1.0 / f.coeffs[1]] + [0j] * (n - 1)
    for k in range(2, n + 1):
        # coefficient of t^k in sum_{j<k} out[j] * f^j must cancel
        partial = Jet(tuple(out[:k]) + (0j,) * (n + 1 - k), f.var)
        acc = compose(partial, f).coeffs[k]
        out[k] = -acc / f.coeffs[1] ** k
    return Jet(tuple(out), f.var)


def real_modulus_jet(f: Jet, leading_power: int) -> Jet:
    """Expand |f(t)| for real t, where f = t**leading_power * g with g(0) != 0.

    Returns the jet of |f| with the t**leading_power factor reattached. The
    order drops by ``leading_power`` during the factorization and the result
    is only as long as what remains known.
    """
    g = f.shift_down(leading_power)
    if g.coeffs[0] == 0:
        raise JetError(
            f"leading power {leading_power} declared but next coefficient vanishes too"
        )
    gg = g * g.conjugate_coefficients()
    if gg.imag_max() > 1e-9 * max(1.0, abs(gg.coeffs[0])):
        raise JetError("modulus square has stray imaginary part")
    mod = jet_sqrt(gg.real_part(), abs(g.coeffs[0]))
    return mod.shift_up(leading_power)


# ---------------------------------------------------------------------------
# scalar branch continuation

_MAX_REL_STEP = 0.5
_MAX_DEPTH = 60


def continue_sqrt(arg: complex, anchor_arg: complex, anchor_value: complex) -> complex:
    """One continuation step of sqrt from a known (argument, value) anchor."""
    if anchor_arg == 0 or arg == 0:
        raise BranchError("square-root argument hit the branch point 0")
    ratio = arg / anchor_arg
    if abs(ratio - 1.0) > _MAX_REL_STEP:
        raise BranchError(
            f"relative step {abs(ratio - 1.0):.3f} exceeds {_MAX_REL_STEP}; subdivide the path"
        )
    return anchor_value * cmath.sqrt(ratio)


def continue_log(arg: complex, anchor_arg: complex, anchor_value: complex) -> complex:
    """One continuation step of log from a known (argument, value) anchor."""
    if anchor_arg == 0 or arg == 0:
        raise BranchError("log argument hit the branch point 0")
    ratio = arg / anchor_arg
    if abs(ratio - 1.0) > _MAX_REL_STEP:
        raise BranchError(
            f"relative step {abs(ratio - 1.0):.3f} exceeds {_MAX_REL_STEP}; subdivide the path"
        )
    return anchor_value + cmath.log(ratio)


def _walk(path: Sequence[complex], start: complex, step: Callable) -> complex:
    value = complex(start)
    prev = complex(path[0])
    for target in path[1:]:
        target = complex(target)
        # subdivide straight segments until each hop is unambiguous
        stack = [target]
        depth = 0
        while stack:
            nxt = stack[-1]
            try:
                value = step(nxt, prev, value)
            except BranchError:
                depth += 1
                if depth > _MAX_DEPTH:
                    raise BranchError("path passes too close to a branch point")
                stack.append((prev + nxt) / 2.0)
                continue
            prev = nxt
            stack.pop()
    return value


def sqrt_along_path(path: Sequence[complex], start_value: complex) -> complex:
    """Continue sqrt along a path of arguments, starting from a known value."""
    if abs(start_value**2 - path[0]) > 1e-8 * max(1.0, abs(path[0])):
        raise BranchError("start value is not a square root of the first path point")
    return _walk(path, start_value, continue_sqrt)


def log_along_path(path: Sequence[complex], start_value: complex) -> complex:
    """Continue log along a path of arguments, starting from a known value."""
    if abs(cmath.exp(start_value) - path[0]) > 1e-8 * abs(path[0]):
        raise BranchError("start value is not a logarithm of the first path point")
    return _walk(path, start_value, continue_log)
