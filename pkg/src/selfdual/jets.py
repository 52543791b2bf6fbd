"""Truncated multivariate Taylor arithmetic.

A jet of order q in m variables stores the Taylor coefficients of a smooth
function at a point, on the monomial basis of total degree <= q, in graded
lexicographic order.  Arithmetic on jets propagates derivatives exactly, so
higher derivatives of composite expressions come out to machine precision
instead of finite-difference accuracy.

Derivative bookkeeping caveat: differentiating a jet loses one order, so
build sources with enough headroom for every partial you plan to take.
"""

from functools import lru_cache
from itertools import product
from math import factorial

import numpy as np

__all__ = ["JetSpace", "Jet", "jet_space", "variables", "jet_matrix_inverse"]


def _monomials(nvars, order):
    out = []
    for total in range(order + 1):
        block = [m for m in product(range(total + 1), repeat=nvars)
                 if sum(m) == total]
        block.sort(reverse=True)
        out.extend(block)
    return out


class JetSpace:
    """Shared tables for all jets of a fixed (nvars, order)."""

    def __init__(self, nvars, order):
        self.nvars = nvars
        self.order = order
        self.monomials = _monomials(nvars, order)
        self.size = len(self.monomials)
        self.index = {m: i for i, m in enumerate(self.monomials)}
        self.degrees = np.array([sum(m) for m in self.monomials])

        mi, mj, mk = [], [], []
        for i, a in enumerate(self.monomials):
            da = sum(a)
            for j, b in enumerate(self.monomials):
                if da + sum(b) > order:
                    continue
                mi.append(i)
                mj.append(j)
                mk.append(self.index[tuple(x + y for x, y in zip(a, b))])
        self._mi = np.array(mi)
        self._mj = np.array(mj)
        self._mk = np.array(mk)

        # partial derivative: coefficient of x^m picks up factor m[v]
        self._dsrc, self._ddst, self._dscale = [], [], []
        for v in range(nvars):
            src, dst, scale = [], [], []
            for i, m in enumerate(self.monomials):
                if m[v] == 0:
                    continue
                lower = list(m)
                lower[v] -= 1
                src.append(i)
                dst.append(self.index[tuple(lower)])
                scale.append(m[v])
            self._dsrc.append(np.array(src, dtype=int))
            self._ddst.append(np.array(dst, dtype=int))
            self._dscale.append(np.array(scale, dtype=float))

    def zero(self):
        return Jet(self, np.zeros(self.size))

    def constant(self, c):
        coeffs = np.zeros(self.size)
        coeffs[0] = c
        return Jet(self, coeffs)

    def variable(self, v, value=0.0):
        coeffs = np.zeros(self.size)
        coeffs[0] = value
        if self.order >= 1:
            unit = tuple(1 if i == v else 0 for i in range(self.nvars))
            coeffs[self.index[unit]] = 1.0
        return Jet(self, coeffs)

    def mul_coeffs(self, a, b):
        prod_terms = a[self._mi] * b[self._mj]
        return np.bincount(self._mk, weights=prod_terms, minlength=self.size)


@lru_cache(maxsize=None)
def jet_space(nvars, order):
    return JetSpace(nvars, order)


def variables(space, values):
    return [space.variable(i, float(v)) for i, v in enumerate(values)]


class Jet:
    __slots__ = ("space", "c")

    def __init__(self, space, coeffs):
        self.space = space
        self.c = np.asarray(coeffs, dtype=float)

    @property
    def value(self):
        return float(self.c[0])

    def coefficient(self, exponents):
        return float(self.c[self.space.index[tuple(exponents)]])

    def derivative(self, exponents):
        """Mixed partial of the represented function at the base point."""
        scale = 1.0
        for e in exponents:
            scale *= factorial(e)
        return scale * self.coefficient(exponents)

    def partial(self, v):
        sp = self.space
        out = np.zeros(sp.size)
        np.add.at(out, sp._ddst[v], sp._dscale[v] * self.c[sp._dsrc[v]])
        return Jet(sp, out)

    def truncated(self, order):
        out = self.c.copy()
        out[self.space.degrees > order] = 0.0
        return Jet(self.space, out)

    def embed(self, target, var_map):
        """Reinterpret in a larger space, source variable i -> var_map[i]."""
        sp = self.space
        out = np.zeros(target.size)
        for i, m in enumerate(sp.monomials):
            if self.c[i] == 0.0 or sum(m) > target.order:
                continue
            big = [0] * target.nvars
            for v, e in enumerate(m):
                big[var_map[v]] += e
            out[target.index[tuple(big)]] += self.c[i]
        return Jet(target, out)

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.space, self.c + other.c)
        out = self.c.copy()
        out[0] += other
        return Jet(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(self.space, self.space.mul_coeffs(self.c, other.c))
        return Jet(self.space, self.c * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.inverse()
        return Jet(self.space, self.c / float(other))

    def __rtruediv__(self, other):
        return self.inverse() * float(other)

    def __pow__(self, k):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise ValueError("jet powers must be nonnegative integers")
        out = self.space.constant(1.0)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- nilpotent series -------------------------------------------------

    def _split(self):
        c0 = self.value
        n = self.c.copy()
        n[0] = 0.0
        return c0, Jet(self.space, n)

    def inverse(self):
        c0, n = self._split()
        if c0 == 0.0:
            raise ZeroDivisionError("jet has zero value part")
        u = n * (-1.0 / c0)
        acc = self.space.constant(1.0)
        term = self.space.constant(1.0)
        for _ in range(self.space.order):
            term = term * u
            acc = acc + term
        return acc * (1.0 / c0)

    def exp(self):
        c0, n = self._split()
        acc = self.space.constant(1.0)
        term = self.space.constant(1.0)
        for k in range(1, self.space.order + 1):
            term = term * n * (1.0 / k)
            acc = acc + term
        return acc * float(np.exp(c0))

    def log(self):
        c0, n = self._split()
        if c0 <= 0.0:
            raise ValueError("jet log needs a positive value part")
        u = n * (1.0 / c0)
        acc = self.space.constant(float(np.log(c0)))
        term = self.space.constant(1.0)
        for k in range(1, self.space.order + 1):
            term = term * u
            acc = acc + term * ((-1.0) ** (k + 1) / k)
        return acc

    def sqrt(self):
        return (self.log() * 0.5).exp()

    def __repr__(self):
        sp = self.space
        bits = [f"{self.c[i]:+.6g}*x^{m}" for i, m in enumerate(sp.monomials)
                if abs(self.c[i]) > 1e-300]
        return "Jet(" + (" ".join(bits) or "0") + ")"


def jet_matrix_inverse(M):
    """Invert a square array of jets by Gaussian elimination.

    Pivots on value parts, so the matrix of values must be invertible.
    """
    M = [row[:] for row in M]
    n = len(M)
    space = M[0][0].space
    inv = [[space.constant(1.0 if i == j else 0.0) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col].value))
        if abs(M[piv][col].value) < 1e-300:
            raise ZeroDivisionError("jet matrix has singular value part")
        M[col], M[piv] = M[piv], M[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        scale = M[col][col].inverse()
        M[col] = [e * scale for e in M[col]]
        inv[col] = [e * scale for e in inv[col]]
        for r in range(n):
            if r == col:
                continue
            f = M[r][col]
            if not np.any(f.c):
                continue
            M[r] = [a - f * b for a, b in zip(M[r], M[col])]
            inv[r] = [a - f * b for a, b in zip(inv[r], inv[col])]
    return inv
