"""Assembly of the linearized chain operators and their strain-space twins.

Linearizing the three force laws about the uniformly strained state gives
operators acting on displacements:

  * atomistic: second differences of both neighbor ranges, with one-sided
    next-nearest stencils on the first and last free atom;
  * local: a single tridiagonal stencil with spring constant
    phiF + 4*phi2F;
  * coupled: atomistic rows on |j| <= K, local rows elsewhere, extended by
    zero to the boundary sites so pairings against fields vanishing at
    +-N are well defined.

Each displacement operator has a conjugate acting on strains that puts it
in divergence form: <E Dv, Dw> = <L v, w> for all test fields w vanishing
at the boundary.  The conjugate of the coupled operator is not banded:
interface and far-field rows carry three extra entries in the interface
columns, the fingerprint of the coupling being non-conservative.

Matrices are dense; at desk scale (2N <= a few thousand) assembly and
application cost nothing compared to the eigensolves downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .lattice import DomainSpec, Field, diff, diff3, inner
from .potentials import Coefficients


@dataclass(frozen=True)
class DenseOperator:
    """Dense matrix with explicit signed index ranges for rows and columns."""

    entries: np.ndarray
    row_lo: int
    col_lo: int

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2:
            raise ValueError("entries must be a 2-D array")
        object.__setattr__(self, "entries", e)

    @property
    def row_hi(self) -> int:
        return self.row_lo + self.entries.shape[0] - 1

    @property
    def col_hi(self) -> int:
        return self.col_lo + self.entries.shape[1] - 1

    def at(self, i: int, j: int) -> float:
        return float(self.entries[i - self.row_lo, j - self.col_lo])

    def apply(self, f: Field) -> Field:
        if f.lo != self.col_lo or len(f) != self.entries.shape[1]:
            raise ValueError(
                f"operator columns {self.col_lo}..{self.col_hi} do not match "
                f"field range {f.lo}..{f.hi}"
            )
        return Field(self.entries @ f.values, self.row_lo)

    def transpose(self) -> "DenseOperator":
        return DenseOperator(self.entries.T, self.col_lo, self.row_lo)

    def interior_block(self) -> np.ndarray:
        """Square block obtained by dropping the boundary columns.

        Valid for displacement operators whose rows cover the free atoms
        and whose columns include the two constrained boundary sites.
        """
        n_rows, n_cols = self.entries.shape
        if n_cols != n_rows + 2 or self.col_lo != self.row_lo - 1:
            raise ValueError("operator is not in free-rows / full-columns form")
        return self.entries[:, 1:-1]

    def to_triples(self):
        """(row, col, value) for every stored nonzero, row-major."""
        rows, cols = np.nonzero(self.entries)
        return [
            (int(r + self.row_lo), int(c + self.col_lo), float(self.entries[r, c]))
            for r, c in zip(rows, cols)
        ]


def assemble_la(c: Coefficients, m: int, eps: float) -> DenseOperator:
    """Linearized atomistic operator: rows -m+1..m-1, columns -m..m.

    Interior rows carry both second-difference stencils; the first and
    last row lose the out-of-range half of the next-nearest stencil.
    """
    if m < 2:
        raise ValueError("half-width must be at least 2")
    s1 = c.phiF / eps**2
    s2 = c.phi2F / eps**2
    A = np.zeros((2 * m - 1, 2 * m + 1))
    for j in range(-m + 1, m):
        i = j + m - 1
        o = j + m
        A[i, o - 1] += -s1
        A[i, o] += 2.0 * s1
        A[i, o + 1] += -s1
        if j == -m + 1:
            A[i, o] += s2
            A[i, o + 2] += -s2
        elif j == m - 1:
            A[i, o] += s2
            A[i, o - 2] += -s2
        else:
            A[i, o - 2] += -s2
            A[i, o] += 2.0 * s2
            A[i, o + 2] += -s2
    return DenseOperator(A, -m + 1, -m)


def assemble_llqc(c: Coefficients, n: int, eps: float) -> DenseOperator:
    """Linearized local operator: one tridiagonal stencil, rows -n+1..n-1."""
    if n < 2:
        raise ValueError("half-width must be at least 2")
    s = (c.phiF + 4.0 * c.phi2F) / eps**2
    A = np.zeros((2 * n - 1, 2 * n + 1))
    for i in range(2 * n - 1):
        A[i, i] = -s
        A[i, i + 1] = 2.0 * s
        A[i, i + 2] = -s
    return DenseOperator(A, -n + 1, -n)


def assemble_lqcf(c: Coefficients, spec: DomainSpec) -> DenseOperator:
    """Coupled operator: atomistic rows on |j| <= K, local rows elsewhere.

    Rows cover the free atoms -N+1..N-1 only; the zero extension to +-N
    is realized by omitting those rows, which pair to zero against any
    field vanishing at the boundary.
    """
    n, k = spec.N, spec.K
    eps = spec.eps
    s1 = c.phiF / eps**2
    s2 = c.phi2F / eps**2
    slqc = (c.phiF + 4.0 * c.phi2F) / eps**2
    A = np.zeros((2 * n - 1, 2 * n + 1))
    for j in range(-n + 1, n):
        i = j + n - 1
        o = j + n
        if abs(j) <= k:
            A[i, o - 1] += -s1
            A[i, o] += 2.0 * s1
            A[i, o + 1] += -s1
            A[i, o - 2] += -s2
            A[i, o] += 2.0 * s2
            A[i, o + 2] += -s2
        else:
            A[i, o - 1] += -slqc
            A[i, o] += 2.0 * slqc
            A[i, o + 1] += -slqc
    return DenseOperator(A, -n + 1, -n)


def assemble_l1(n: int, eps: float) -> DenseOperator:
    """Nearest-neighbor part: plain second difference on every free atom."""
    return assemble_llqc(Coefficients(1.0, 0.0), n, eps)


def assemble_l2(spec: DomainSpec) -> DenseOperator:
    """Next-nearest part of the coupled operator.

    Wide second differences on |j| <= K, four times the narrow one on the
    continuum rows; the coupled operator is phiF * L1 + phi2F * L2.
    """
    n, k = spec.N, spec.K
    s = 1.0 / spec.eps**2
    A = np.zeros((2 * n - 1, 2 * n + 1))
    for j in range(-n + 1, n):
        i = j + n - 1
        o = j + n
        if abs(j) <= k:
            A[i, o - 2] += -s
            A[i, o] += 2.0 * s
            A[i, o + 2] += -s
        else:
            A[i, o - 1] += -4.0 * s
            A[i, o] += 8.0 * s
            A[i, o + 1] += -4.0 * s
    return DenseOperator(A, -n + 1, -n)


def assemble_ea(c: Coefficients, m: int, eps: float) -> DenseOperator:
    """Conjugate of the atomistic operator, on bonds -m+1..m.

    phiF on the diagonal plus phi2F times the symmetric [1,2,1] band whose
    corner rows degenerate to [1,1].
    """
    nb = 2 * m
    B = np.zeros((nb, nb))
    for i in range(nb):
        B[i, i] = 2.0
        if i > 0:
            B[i, i - 1] = 1.0
        if i < nb - 1:
            B[i, i + 1] = 1.0
    B[0, 0] = 1.0
    B[nb - 1, nb - 1] = 1.0
    E = c.phiF * np.eye(nb) + c.phi2F * B
    return DenseOperator(E, -m + 1, -m + 1)


def assemble_eqcf(c: Coefficients, spec: DomainSpec) -> DenseOperator:
    """Conjugate of the coupled operator, on bonds -N+1..N.

    The atomistic band -K..K+1 keeps the symmetric tridiagonal rows; the
    interface rows -K-1 and K+2 and every far-field row pick up entries in
    the three interface columns, connecting each strain to the boundary
    through as few nonzeros as possible.  Every row has at most 4 nonzeros.
    """
    n, k = spec.N, spec.K
    nb = 2 * n
    off = n - 1  # bond j sits at offset j + off
    B = np.zeros((nb, nb))
    for j in range(-n + 1, n + 1):
        i = j + off
        if j <= -k - 2:
            B[i, i] += 4.0
            B[i, -k - 1 + off] += 1.0
            B[i, -k + off] += -2.0
            B[i, -k + 1 + off] += 1.0
        elif j == -k - 1:
            B[i, -k - 1 + off] += 5.0
            B[i, -k + off] += -2.0
            B[i, -k + 1 + off] += 1.0
        elif j <= k + 1:
            B[i, i - 1] += 1.0
            B[i, i] += 2.0
            B[i, i + 1] += 1.0
        elif j == k + 2:
            B[i, k + off] += 1.0
            B[i, k + 1 + off] += -2.0
            B[i, k + 2 + off] += 5.0
        else:
            B[i, i] += 4.0
            B[i, k + off] += 1.0
            B[i, k + 1 + off] += -2.0
            B[i, k + 2 + off] += 1.0
    E = c.phiF * np.eye(nb) + c.phi2F * B
    return DenseOperator(E, -n + 1, -n + 1)


def pair_with_test(L: DenseOperator, v: Field, w: Field, eps: float) -> float:
    """<L v, w> where w vanishes on the rows L omits."""
    return inner(L.apply(v), w.restrict(L.row_lo, L.row_hi), eps)


def l2_decomposition(v: Field, w: Field, spec: DomainSpec) -> Tuple[float, float, float]:
    """Split <L2 v, w> into a strain-pairing part plus two interface terms.

    Returns (regular, left_interface, right_interface); the interface
    terms are eps^2 * (third difference of v at bond -K+1) * w_{-K} and
    minus the mirror expression at bond K+2.  Their sum reconstructs the
    direct pairing for every v and every w vanishing at +-N.
    """
    n, k = spec.N, spec.K
    eps = spec.eps
    if v.half_width != n or w.half_width != n:
        raise ValueError(f"fields must cover -N..N with N={n}")
    if not w.is_homogeneous:
        raise ValueError("test field must vanish at the boundary sites")
    dv = diff(v, eps)
    dw = diff(w, eps)
    off = n - 1  # bond j at offset j + off
    left = slice(0, -k + off + 1)           # bonds -N+1..-K
    mid = np.arange(-k + 1 + off, k + off + 1)  # bonds -K+1..K
    right = slice(k + 1 + off, 2 * n)       # bonds K+1..N
    regular = 4.0 * eps * float(dv.values[left] @ dw.values[left])
    regular += eps * float(
        (dv.values[mid - 1] + 2.0 * dv.values[mid] + dv.values[mid + 1])
        @ dw.values[mid]
    )
    regular += 4.0 * eps * float(dv.values[right] @ dw.values[right])
    d3 = diff3(v, eps)
    left_interface = eps**2 * d3.at(-k + 1) * w.at(-k)
    right_interface = -(eps**2) * d3.at(k + 2) * w.at(k)
    return regular, left_interface, right_interface
