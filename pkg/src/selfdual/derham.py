"""Truncated Fourier de Rham complex on flat tori.

Forms on the unit torus carry finitely many frequency modes; each mode
holds a coefficient per axis set against the L2-orthonormal basis
sqrt(2)cos(2 pi k.x), sqrt(2)sin(2 pi k.x) (constant 1 for k = 0), so
the L2 inner product is the coefficient dot product and adjointness is
a transpose. The constant operator algebra acts pointwise, mode by
mode, which is what makes the commutation identities checkable here.
"""

import numpy as np

from . import exterior as ext
from . import liealg

TWO_PI = 2.0 * np.pi


def _canonical(k, a, b):
    for entry in k:
        if entry > 0:
            return k, a, b
        if entry < 0:
            return tuple(-x for x in k), a, -b
    return k, a, 0.0


class FourierForm:
    """terms: {frequency tuple: {axis mask: (cos coeff, sin coeff)}}."""

    def __init__(self, dim, max_freq, terms=None):
        self.dim = int(dim)
        self.max_freq = int(max_freq)
        table = {}
        for k, masks in (terms or {}).items():
            k = tuple(int(x) for x in k)
            if len(k) != self.dim:
                raise ValueError("frequency arity mismatch")
            if max(abs(x) for x in k) > self.max_freq:
                raise ValueError(
                    f"frequency {k} beyond the stated bound {self.max_freq}")
            for mask, ab in masks.items():
                if mask >> self.dim:
                    raise ValueError("axis mask outside the carrier")
                a, b = (ab, 0.0) if np.isscalar(ab) else ab
                kk, a, b = _canonical(k, float(a), float(b))
                slot = table.setdefault(kk, {})
                old = slot.get(mask, (0.0, 0.0))
                slot[mask] = (old[0] + a, old[1] + b)
        self.terms = {
            k: kept for k, masks in table.items()
            if (kept := {m: ab for m, ab in masks.items()
                         if max(abs(ab[0]), abs(ab[1])) > 1e-15})
        }

    @classmethod
    def zero(cls, dim, max_freq=0):
        return cls(dim, max_freq)

    @classmethod
    def random(cls, rng, dim, max_freq, n_modes=5, terms_per_mode=3):
        table = {}
        for _ in range(n_modes):
            k = tuple(int(x) for x in rng.integers(-max_freq, max_freq + 1,
                                                   size=dim))
            slot = table.setdefault(k, {})
            for _ in range(terms_per_mode):
                mask = int(rng.integers(0, 1 << dim))
                slot[mask] = (rng.normal(), rng.normal())
        return cls(dim, max_freq, table)

    def grades(self):
        return sorted({m.bit_count() for masks in self.terms.values()
                       for m in masks})

    def inner(self, other):
        """L2 inner product, equal to the coefficient dot product."""
        if self.dim != other.dim:
            raise ValueError("carrier mismatch")
        tot = 0.0
        for k, masks in self.terms.items():
            omasks = other.terms.get(k)
            if not omasks:
                continue
            for mask, (a, b) in masks.items():
                oa, ob = omasks.get(mask, (0.0, 0.0))
                tot += a * oa + b * ob
        return tot

    def norm(self):
        return float(np.sqrt(self.inner(self)))

    def evaluate(self, point):
        """Multivector of coefficient values at the point."""
        x = np.asarray(point, dtype=float)
        out = {}
        for k, masks in self.terms.items():
            phase = TWO_PI * float(np.dot(k, x))
            if any(k):
                c, s = np.sqrt(2.0) * np.cos(phase), np.sqrt(2.0) * np.sin(phase)
            else:
                c, s = 1.0, 0.0
            for mask, (a, b) in masks.items():
                out[mask] = out.get(mask, 0.0) + a * c + b * s
        return ext.Multivector(self.dim, out)

    def __add__(self, other):
        if self.dim != other.dim:
            raise ValueError("carrier mismatch")
        table = {}
        for src in (self.terms, other.terms):
            for k, masks in src.items():
                slot = table.setdefault(k, {})
                for mask, (a, b) in masks.items():
                    old = slot.get(mask, (0.0, 0.0))
                    slot[mask] = (old[0] + a, old[1] + b)
        return FourierForm(self.dim, max(self.max_freq, other.max_freq),
                           table)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, c):
        c = float(c)
        return FourierForm(self.dim, self.max_freq, {
            k: {m: (c * a, c * b) for m, (a, b) in masks.items()}
            for k, masks in self.terms.items()})


def partial(F, j):
    """Coordinate derivative along axis j, mode by mode."""
    table = {}
    for k, masks in F.terms.items():
        factor = TWO_PI * k[j]
        if factor == 0.0:
            continue
        table[k] = {m: (factor * b, -factor * a)
                    for m, (a, b) in masks.items()}
    return FourierForm(F.dim, F.max_freq, table)


def d(F):
    """Exterior derivative; exact on trig polynomials."""
    table = {}
    for k, masks in F.terms.items():
        slot = {}
        for j in range(F.dim):
            factor = TWO_PI * k[j]
            if factor == 0.0:
                continue
            for mask, (a, b) in masks.items():
                hit = ext.wedge_axis(mask, j)
                if hit is None:
                    continue
                m2, sign = hit
                old = slot.get(m2, (0.0, 0.0))
                slot[m2] = (old[0] + sign * factor * b,
                            old[1] - sign * factor * a)
        if slot:
            table[k] = slot
    return FourierForm(F.dim, F.max_freq, table)


def codifferential(F):
    """Adjoint of d for the flat metric: minus contraction of the
    coordinate derivatives."""
    table = {}
    for k, masks in F.terms.items():
        slot = {}
        for j in range(F.dim):
            factor = TWO_PI * k[j]
            if factor == 0.0:
                continue
            for mask, (a, b) in masks.items():
                hit = ext.contract_axis(mask, j)
                if hit is None:
                    continue
                m2, sign = hit
                old = slot.get(m2, (0.0, 0.0))
                slot[m2] = (old[0] - sign * factor * b,
                            old[1] + sign * factor * a)
        if slot:
            table[k] = slot
    return FourierForm(F.dim, F.max_freq, table)


def laplacian(F):
    """dd* + d*d; diagonal with eigenvalue (2 pi |k|)^2 per mode."""
    return d(codifferential(F)) + codifferential(d(F))


def laplacian_direct(F):
    """The mode formula, kept separate as the oracle for the composed one."""
    table = {}
    for k, masks in F.terms.items():
        lam = TWO_PI ** 2 * float(np.dot(k, k))
        if lam == 0.0:
            continue
        table[k] = {m: (lam * a, lam * b) for m, (a, b) in masks.items()}
    return FourierForm(F.dim, F.max_freq, table)


def apply_operator(M, F):
    """A constant operator on the exterior fibre, acting pointwise."""
    dim_fibre = 1 << F.dim
    if M.shape != (dim_fibre, dim_fibre):
        raise ValueError("operator does not match the exterior fibre")
    table = {}
    for k, masks in F.terms.items():
        va = np.zeros(dim_fibre)
        vb = np.zeros(dim_fibre)
        for mask, (a, b) in masks.items():
            va[mask], vb[mask] = a, b
        wa, wb = M @ va, M @ vb
        slot = {m: (wa[m], wb[m]) for m in range(dim_fibre)
                if abs(wa[m]) > 1e-15 or abs(wb[m]) > 1e-15}
        if slot:
            table[k] = slot
    return FourierForm(F.dim, F.max_freq, table)


def dc(M, F):
    """The twisted differential [M, d*] applied to F."""
    return apply_operator(M, codifferential(F)) - codifferential(
        apply_operator(M, F))


UNBARRED_PAIRS = ((0, 1), (0, 2), (1, 2))


def verify_skaid(n, N, samples=50, seed=0, tol=1e-10):
    """Residuals of the four commutation identities on random forms.

    Returns a report with one row per identity family; each row carries
    the worst relative residual over the random sample.
    """
    rng = np.random.default_rng(seed)
    dim = 3 * n
    labels = range(6)
    Ls = {(a, b): liealg.L(n, a, b) for a in labels for b in labels}
    forms = [FourierForm.random(rng, dim, N) for _ in range(samples)]

    def rel(res, F):
        return res / max(1.0, F.norm())

    rows = []

    worst = 0.0
    for (h, k) in UNBARRED_PAIRS:
        M = Ls[h, k]
        for F in forms:
            res = (apply_operator(M, d(F)) - d(apply_operator(M, F))).norm()
            worst = max(worst, rel(res, F))
    rows.append({"identity": "pairing operators commute with d",
                 "residual": worst, "pass": worst < tol})

    worst = 0.0
    for (h, k) in UNBARRED_PAIRS:
        M = Ls[h, k]
        for F in forms:
            res = (d(dc(M, F)) + dc(M, d(F))).norm()
            worst = max(worst, rel(res, F))
    rows.append({"identity": "twisted differentials anticommute with d",
                 "residual": worst, "pass": worst < tol})

    worst = 0.0
    for (h, k) in UNBARRED_PAIRS:
        for M in (Ls[h, k], Ls[liealg.bar(k), liealg.bar(h)]):
            for F in forms:
                res = (apply_operator(M, laplacian(F))
                       - laplacian(apply_operator(M, F))).norm()
                worst = max(worst, rel(res, F))
    rows.append({"identity": "pairing operators and adjoints commute "
                             "with the Laplacian",
                 "residual": worst, "pass": worst < tol})

    worst = 0.0
    for a in labels:
        for b in labels:
            M = Ls[a, b]
            for F in forms[:10]:
                res = (apply_operator(M, laplacian(F))
                       - laplacian(apply_operator(M, F))).norm()
                worst = max(worst, rel(res, F))
    rows.append({"identity": "every index pair commutes with the Laplacian",
                 "residual": worst, "pass": worst < tol})

    return {"n": n, "max_freq": N, "samples": samples,
            "rows": rows, "pass": all(r["pass"] for r in rows)}


def harmonic_action(n, alpha, beta):
    """Matrix of the (alpha, beta) operator on the zero-frequency modes.

    The harmonic subspace of the flat torus is the k = 0 table; the
    operator acts on it exactly through its fibre matrix, which is the
    induced representation on harmonic forms.
    """
    dim = 3 * n
    fibre = 1 << dim
    M = liealg.L(n, alpha, beta)
    out = np.zeros((fibre, fibre))
    k0 = (0,) * dim
    for col in range(fibre):
        F = FourierForm(dim, 0, {k0: {col: (1.0, 0.0)}})
        G = apply_operator(M, F)
        if laplacian(G).norm() > 1e-12:
            raise AssertionError("harmonic subspace was not preserved")
        for mask, (a, _) in G.terms.get(k0, {}).items():
            out[mask, col] = a
    return out
