"""Exact arithmetic on truncated Taylor expansions over a polarized chart.

A chart of complex dimension ``n`` carries ``2n`` formally independent
variables: ``n`` holomorphic offsets and ``n`` antiholomorphic ones.  A
:class:`Jet` stores the Taylor coefficients of a function around a base
point up to a prescribed total degree ``trunc``.  Every retained
coefficient is exact, so truncating first and operating afterwards gives
the same result as operating first and truncating afterwards.

Coefficient keys are flat integer tuples of length ``2n``: the first ``n``
entries are the holomorphic multi-index, the last ``n`` the
antiholomorphic one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from operator import add as _add
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "MultiIndex",
    "Jet",
    "iter_multi_indices",
    "iter_multi_indices_upto",
    "multi_factorial",
    "multi_binomial",
    "solve_linear_system",
    "jet_matrix_inverse",
]

MultiIndex = tuple[int, ...]

_SCALARS = (int, float, complex)


def iter_multi_indices(n: int, order: int) -> Iterator[MultiIndex]:
    """Yield every length-``n`` multi-index of total order ``order``.

    The order of iteration is deterministic (ascending first entry).
    """
    if n == 0:
        if order == 0:
            yield ()
        return
    if n == 1:
        yield (order,)
        return
    for head in range(order + 1):
        for tail in iter_multi_indices(n - 1, order - head):
            yield (head,) + tail


def iter_multi_indices_upto(n: int, max_order: int) -> Iterator[MultiIndex]:
    """Yield every length-``n`` multi-index of total order ``<= max_order``."""
    for order in range(max_order + 1):
        yield from iter_multi_indices(n, order)


def multi_factorial(mi: Sequence[int]) -> int:
    return math.prod(math.factorial(e) for e in mi)


def multi_binomial(a: Sequence[int], b: Sequence[int]) -> int:
    """Product of componentwise binomial coefficients ``C(a_i, b_i)``."""
    return math.prod(math.comb(x, y) for x, y in zip(a, b))


@dataclass(frozen=True)
class Jet:
    """Truncated Taylor expansion at a base point.

    ``coeffs`` maps flat keys (holomorphic part followed by antiholomorphic
    part) to complex Taylor coefficients; the represented germ is
    ``sum(c[key] * dz**key_hol * dzb**key_anti)``.  Jets are immutable;
    arithmetic between two jets requires equal ``n`` and ``trunc``.
    """

    n: int
    trunc: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("chart dimension must be non-negative")
        if self.trunc < 0:
            raise ValueError("truncation order must be non-negative")
        width = 2 * self.n
        clean: dict[MultiIndex, complex] = {}
        for key, val in self.coeffs.items():
            if len(key) != width:
                raise ValueError(f"coefficient key {key!r} does not have length {width}")
            if any(e < 0 for e in key):
                raise ValueError(f"coefficient key {key!r} has a negative entry")
            if sum(key) > self.trunc:
                raise ValueError(
                    f"coefficient key {key!r} exceeds truncation order {self.trunc}"
                )
            if val != 0:
                clean[key] = complex(val)
        object.__setattr__(self, "coeffs", clean)

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value: complex, n: int, trunc: int) -> Jet:
        return cls(n, trunc, {(0,) * (2 * n): complex(value)})

    @classmethod
    def zero(cls, n: int, trunc: int) -> Jet:
        return cls(n, trunc, {})

    @classmethod
    def coordinate(cls, n: int, trunc: int, axis: int, base: complex, barred: bool = False) -> Jet:
        """Jet of the coordinate function ``z_axis`` (or ``zb_axis``) shifted to ``base``."""
        if not 0 <= axis < n:
            raise ValueError(f"axis {axis} out of range for dimension {n}")
        coeffs = {(0,) * (2 * n): complex(base)}
        if trunc >= 1:
            unit = [0] * (2 * n)
            unit[axis + (n if barred else 0)] = 1
            coeffs[tuple(unit)] = 1.0 + 0j
        return cls(n, trunc, coeffs)

    # -- inspection --------------------------------------------------------

    def value(self) -> complex:
        """Function value at the base point."""
        return self.coeffs.get((0,) * (2 * self.n), 0j)

    def coeff(self, alpha: Sequence[int], beta: Sequence[int]) -> complex:
        """Taylor coefficient on ``dz**alpha * dzb**beta``."""
        key = self._key(alpha, beta)
        return self.coeffs.get(key, 0j)

    def derivative_at(self, alpha: Sequence[int], beta: Sequence[int]) -> complex:
        """Value of the mixed partial derivative at the base point.

        Equals ``alpha! * beta!`` times the corresponding coefficient.
        """
        key = self._key(alpha, beta)
        return self.coeffs.get(key, 0j) * multi_factorial(alpha) * multi_factorial(beta)

    def _key(self, alpha: Sequence[int], beta: Sequence[int]) -> MultiIndex:
        if len(alpha) != self.n or len(beta) != self.n:
            raise ValueError("multi-indices must have length equal to the chart dimension")
        if any(e < 0 for e in alpha) or any(e < 0 for e in beta):
            raise ValueError("multi-index entries must be non-negative")
        if sum(alpha) + sum(beta) > self.trunc:
            raise ValueError("requested order exceeds the truncation order")
        return tuple(alpha) + tuple(beta)

    def max_abs(self) -> float:
        """Largest coefficient magnitude; zero for the zero jet."""
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    # -- structural operations ---------------------------------------------

    def truncated(self, trunc: int) -> Jet:
        """Forget all coefficients of total degree above ``trunc``."""
        if trunc > self.trunc:
            raise ValueError("cannot extend a jet to a higher truncation order")
        if trunc == self.trunc:
            return self
        return Jet(self.n, trunc, {k: v for k, v in self.coeffs.items() if sum(k) <= trunc})

    def deriv(self, axis: int) -> Jet:
        """Holomorphic partial derivative; the result loses one degree."""
        return self._deriv(axis, barred=False)

    def deriv_bar(self, axis: int) -> Jet:
        """Antiholomorphic partial derivative; the result loses one degree."""
        return self._deriv(axis, barred=True)

    def _deriv(self, axis: int, barred: bool) -> Jet:
        if not 0 <= axis < self.n:
            raise ValueError(f"axis {axis} out of range for dimension {self.n}")
        if self.trunc == 0:
            raise ValueError("cannot differentiate a jet of truncation order 0")
        pos = axis + (self.n if barred else 0)
        out: dict[MultiIndex, complex] = {}
        for key, val in self.coeffs.items():
            e = key[pos]
            if e:
                down = key[:pos] + (e - 1,) + key[pos + 1 :]
                out[down] = val * e
        return Jet(self.n, self.trunc - 1, out)

    # -- ring operations -----------------------------------------------------

    def _require_compatible(self, other: Jet) -> None:
        if self.n != other.n or self.trunc != other.trunc:
            raise ValueError(
                f"incompatible jets: (n={self.n}, trunc={self.trunc}) vs "
                f"(n={other.n}, trunc={other.trunc})"
            )

    def __add__(self, other):
        if isinstance(other, _SCALARS):
            other = Jet.constant(other, self.n, self.trunc)
        if not isinstance(other, Jet):
            return NotImplemented
        self._require_compatible(other)
        out = dict(self.coeffs)
        for key, val in other.coeffs.items():
            out[key] = out.get(key, 0j) + val
        return Jet(self.n, self.trunc, out)

    __radd__ = __add__

    def __neg__(self) -> Jet:
        return Jet(self.n, self.trunc, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, _SCALARS):
            other = Jet.constant(other, self.n, self.trunc)
        if not isinstance(other, Jet):
            return NotImplemented
        return self.__add__(-other)

    def __rsub__(self, other):
        if isinstance(other, _SCALARS):
            return Jet.constant(other, self.n, self.trunc).__sub__(self)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, _SCALARS):
            return Jet(self.n, self.trunc, {k: v * other for k, v in self.coeffs.items()})
        if not isinstance(other, Jet):
            return NotImplemented
        self._require_compatible(other)
        trunc = self.trunc
        right = sorted(((sum(k), k, v) for k, v in other.coeffs.items()), key=lambda t: t[0])
        out: dict[MultiIndex, complex] = {}
        for ka, va in self.coeffs.items():
            budget = trunc - sum(ka)
            for ob, kb, vb in right:
                if ob > budget:
                    break
                key = tuple(map(_add, ka, kb))
                out[key] = out.get(key, 0j) + va * vb
        return Jet(self.n, trunc, out)

    def __rmul__(self, other):
        if isinstance(other, _SCALARS):
            return self.__mul__(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, _SCALARS):
            return self.__mul__(1.0 / other)
        if isinstance(other, Jet):
            return self.__mul__(other.reciprocal())
        return NotImplemented

    def __pow__(self, exponent: int) -> Jet:
        if not isinstance(exponent, int):
            raise TypeError("jet exponents must be integers")
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        result = Jet.constant(1.0, self.n, self.trunc)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- analytic operations -------------------------------------------------

    def reciprocal(self) -> Jet:
        """Multiplicative inverse, solved order by order; needs a nonzero value."""
        c0 = self.value()
        if c0 == 0:
            raise ArithmeticError("reciprocal of a jet with zero constant term")
        neg_u = -(self / c0 - 1.0)
        acc = Jet.constant(1.0, self.n, self.trunc)
        pw = acc
        for _ in range(self.trunc):
            pw = pw * neg_u
            acc = acc + pw
        return acc / c0

    def log(self) -> Jet:
        """Principal-branch logarithm; the value must stay off ``(-inf, 0]``."""
        c0 = self.value()
        if c0.imag == 0 and c0.real <= 0:
            raise ArithmeticError(
                "log of a jet whose value lies on the branch cut (-inf, 0]"
            )
        u = self / c0 - 1.0
        acc = Jet.constant(cmath.log(c0), self.n, self.trunc)
        pw = Jet.constant(1.0, self.n, self.trunc)
        for m in range(1, self.trunc + 1):
            pw = pw * u
            acc = acc + pw * ((-1.0) ** (m + 1) / m)
        return acc

    def exp(self) -> Jet:
        u = self - self.value()
        acc = Jet.constant(1.0, self.n, self.trunc)
        pw = acc
        for m in range(1, self.trunc + 1):
            pw = pw * u
            acc = acc + pw * (1.0 / math.factorial(m))
        return acc * cmath.exp(self.value())

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Jet(n={self.n}, trunc={self.trunc}, terms={len(self.coeffs)})"


def _degree_slices(jet: Jet) -> dict[int, list[tuple[MultiIndex, complex]]]:
    slices: dict[int, list[tuple[MultiIndex, complex]]] = {}
    for key, val in jet.coeffs.items():
        slices.setdefault(sum(key), []).append((key, val))
    return slices


def solve_linear_system(matrix: Sequence[Sequence[Jet]], rhs: Sequence[Jet]) -> list[Jet]:
    """Solve ``matrix @ x = rhs`` over the jet ring, degree by degree.

    All entries must share ``n`` and ``trunc``; the constant-term matrix
    must be numerically invertible.  The solution is exact up to the shared
    truncation order.
    """
    size = len(rhs)
    if len(matrix) != size or any(len(row) != size for row in matrix):
        raise ValueError("system matrix must be square and match the right-hand side")
    first = rhs[0]
    n, trunc = first.n, first.trunc
    for entry in (*[e for row in matrix for e in row], *rhs):
        if entry.n != n or entry.trunc != trunc:
            raise ValueError("all system entries must share chart dimension and truncation")

    m0 = np.array([[matrix[i][j].value() for j in range(size)] for i in range(size)], dtype=complex)
    try:
        m0_inv = np.linalg.inv(m0)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError("constant term of the system matrix is singular") from exc

    mat_slices = [[_degree_slices(matrix[i][j]) for j in range(size)] for i in range(size)]
    rhs_slices = [_degree_slices(rhs[i]) for i in range(size)]
    sol: list[dict[MultiIndex, complex]] = [{} for _ in range(size)]
    sol_slices: list[dict[int, list[tuple[MultiIndex, complex]]]] = [{} for _ in range(size)]

    for degree in range(trunc + 1):
        residual: list[dict[MultiIndex, complex]] = [{} for _ in range(size)]
        for i in range(size):
            for key, val in rhs_slices[i].get(degree, ()):
                residual[i][key] = residual[i].get(key, 0j) + val
            for j in range(size):
                for mdeg, mslice in mat_slices[i][j].items():
                    # only strictly positive matrix degrees hit already-known
                    # solution degrees
                    if not 1 <= mdeg <= degree:
                        continue
                    lower = sol_slices[j].get(degree - mdeg)
                    if not lower:
                        continue
                    res_i = residual[i]
                    for mk, mv in mslice:
                        for sk, sv in lower:
                            key = tuple(map(_add, mk, sk))
                            res_i[key] = res_i.get(key, 0j) - mv * sv
        keys = sorted(set().union(*residual))
        for key in keys:
            b = np.array([residual[i].get(key, 0j) for i in range(size)], dtype=complex)
            x = m0_inv @ b
            for j in range(size):
                if x[j] != 0:
                    sol[j][key] = x[j]
                    sol_slices[j].setdefault(degree, []).append((key, x[j]))

    return [Jet(n, trunc, sol[j]) for j in range(size)]


def jet_matrix_inverse(matrix: Sequence[Sequence[Jet]]) -> list[list[Jet]]:
    """Inverse of a square jet matrix, exact up to the shared truncation."""
    size = len(matrix)
    sample = matrix[0][0]
    columns = []
    for m in range(size):
        unit = [
            Jet.constant(1.0 if k == m else 0.0, sample.n, sample.trunc)
            for k in range(size)
        ]
        columns.append(solve_linear_system(matrix, unit))
    return [[columns[m][l] for m in range(size)] for l in range(size)]
