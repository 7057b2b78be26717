"""Coercivity loss and inf-sup stability of the coupled operator.

The coupled operator keeps a uniform inf-sup constant only for one norm
pairing: testing max-norm strains against summed-strain test fields.
There the row diagonal-dominance margin gamma of its conjugate certifies
an inf-sup constant of at least gamma/2, with gamma = phiF + 8*phi2F
independently of domain sizes.  In every other strain pairing the
constant decays like N^(-1/p), and the quadratic form itself takes values
as low as -const * sqrt(N): both effects come from the interface columns
of the conjugate operator and are reproduced here by explicit
constructions.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .lattice import DomainSpec, Field, diff, inner, lp_norm
from .operators import DenseOperator, assemble_eqcf, assemble_lqcf
from .potentials import Coefficients

EIG_TOL = 1e-10


def _strain_gram(n: int, eps: float) -> np.ndarray:
    """Matrix of ||Dv||^2 (weighted) in the interior values of v."""
    T = np.zeros((2 * n - 1, 2 * n - 1))
    idx = np.arange(2 * n - 1)
    T[idx, idx] = 2.0
    T[idx[:-1], idx[:-1] + 1] = -1.0
    T[idx[1:], idx[1:] - 1] = -1.0
    return T / eps


def quadratic_form(c: Coefficients, spec: DomainSpec, v: Field) -> float:
    """<L v, v> for the coupled operator and a field vanishing at +-N."""
    if not v.is_homogeneous:
        raise ValueError("quadratic form is defined on fields vanishing at +-N")
    L = assemble_lqcf(c, spec)
    return inner(L.apply(v), v.restrict(L.row_lo, L.row_hi), spec.eps)


def rayleigh_min(c: Coefficients, spec: DomainSpec) -> float:
    """Minimum of <L v, v> over fields vanishing at +-N with ||Dv|| = 1.

    Only the symmetric part of the operator enters a quadratic form, so
    this is the smallest eigenvalue of the symmetrized interior block
    against the strain Gram matrix.
    """
    n = spec.N
    eps = spec.eps
    Li = assemble_lqcf(c, spec).interior_block()
    A = eps * 0.5 * (Li + Li.T)
    B = _strain_gram(n, eps)
    try:
        vals, vecs = scipy.linalg.eigh(A, B, subset_by_index=(0, 0), driver="gvx")
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise RuntimeError(f"generalized eigensolve failed: {exc}") from exc
    lam = float(vals[0])
    x = vecs[:, 0]
    resid = np.linalg.norm(A @ x - lam * (B @ x))
    scale = (
        np.linalg.norm(A, "fro") + abs(lam) * np.linalg.norm(B, "fro")
    ) * np.linalg.norm(x)
    if scale > 0 and resid > EIG_TOL * scale:
        raise RuntimeError(
            f"eigensolve residual {resid:.3e} exceeds {EIG_TOL:.1e} * {scale:.3e}"
        )
    return lam


def unstable_candidate(spec: DomainSpec, sign: str = "-", normalize: bool = True) -> Field:
    """Explicit low-energy candidate: plateau plus one sqrt(eps) spike.

    The field is 1 on -K-2..K+2, ramps linearly to 0 at +-N, and carries a
    spike of height +-sqrt(eps) at site K+1.  Its strain stays bounded
    while the interface term of the quadratic form grows like sqrt(N),
    which is what makes the form indefinite for large N.  With
    normalize=True the field is rescaled to ||Dv|| = 1.
    """
    n, k = spec.N, spec.K
    if n - k - 2 < 1:
        raise ValueError(f"domain too small for the ramp: N={n}, K={k}")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    j = np.arange(-n, n + 1)
    ramp = n - np.abs(j)
    v = np.where(np.abs(j) <= k + 2, 1.0, ramp / (n - k - 2.0))
    v = v.astype(float)
    v[(k + 1) + n] += (1.0 if sign == "+" else -1.0) * np.sqrt(spec.eps)
    f = Field(v, -n)
    if normalize:
        f = f * (1.0 / lp_norm(diff(f, spec.eps), spec.eps, 2))
    return f


def rdd_margin(A) -> float:
    """Row diagonal-dominance margin gamma of a square matrix.

    gamma = min_i (A_ii + sum of negative off-diagonals in row i)
            - max_i (sum of positive off-diagonals in row i).
    When gamma > 0 the mean-zero max-norm/1-norm inf-sup constant of A is
    at least gamma/2.
    """
    M = A.entries if isinstance(A, DenseOperator) else np.asarray(A, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("rdd_margin needs a square matrix")
    d = np.diag(M).copy()
    off = M - np.diag(d)
    neg = np.minimum(off, 0.0).sum(axis=1)
    pos = np.maximum(off, 0.0).sum(axis=1)
    return float(np.min(d + neg) - np.max(pos))


def infsup_2(A) -> float:
    """Inf-sup constant of A over mean-zero strains in the 2-norm pairing.

    Equals the smallest singular value of A compressed to the mean-zero
    subspace (the eps-weights cancel between trial and test norms).
    """
    M = A.entries if isinstance(A, DenseOperator) else np.asarray(A, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("infsup_2 needs a square matrix")
    n = M.shape[0]
    Q = scipy.linalg.null_space(np.ones((1, n)))
    return float(scipy.linalg.svdvals(Q.T @ M @ Q)[-1])


def interface_probe(c: Coefficients, spec: DomainSpec) -> Field:
    """Mean-zero strain that the conjugate operator nearly annihilates.

    Piecewise constant -1 / 0 / 1 with values -alpha and alpha at the two
    bonds flanking the atomistic band, alpha chosen so the far-field rows
    of the image cancel exactly.
    """
    if c.phi2F == 0.0:
        raise ValueError("the probe needs phi2F != 0")
    n, k = spec.N, spec.K
    alpha = (c.phiF + 5.0 * c.phi2F) / (2.0 * c.phi2F)
    xi = np.zeros(2 * n)
    j = np.arange(-n + 1, n + 1)
    xi[j <= -k - 1] = -1.0
    xi[j == -k] = -alpha
    xi[j == k + 1] = alpha
    xi[j >= k + 2] = 1.0
    return Field(xi, -n + 1)


def infsup_p_upper(c: Coefficients, spec: DomainSpec, p: float) -> float:
    """Upper bound ||E xi|| / ||xi|| in the p-norm at the interface probe.

    Closed form: the image keeps exactly four nonzero entries (two per
    interface) while the probe itself has about 2(N-K) unit entries, so
    the quotient decays like N^(-1/p).
    """
    if not (1.0 <= float(p) < np.inf):
        raise ValueError(f"p must satisfy 1 <= p < inf, got {p}")
    if c.phi2F == 0.0:
        raise ValueError("upper bound needs phi2F != 0")
    p = float(p)
    n, k = spec.N, spec.K
    eps = spec.eps
    alpha = (c.phiF + 5.0 * c.phi2F) / (2.0 * c.phi2F)
    num_p = 2.0 * eps * (
        abs(alpha * c.phi2F) ** p
        + abs(alpha * c.phiF + (1.0 + 2.0 * alpha) * c.phi2F) ** p
    )
    den_p = 2.0 * eps * (n - k - 1 + abs(alpha) ** p)
    return (num_p / den_p) ** (1.0 / p)


def dual_norm_star(f: Field, eps: float) -> float:
    """Dual norm of a load: sup <f, w> over w in V0 with ||Dw||_1 = 1.

    Closed form: half the oscillation of the weighted suffix sums
    g_i = eps * sum_{j=i}^{N-1} f_j (with g_N = 0).  The boundary samples
    f_{+-N} never pair with an admissible w and are ignored.
    """
    n = f.half_width
    if n < 1:
        raise ValueError("field too short")
    interior = f.values[1:-1]
    g = np.empty(2 * n)
    g[-1] = 0.0
    g[:-1] = eps * np.cumsum(interior[::-1])[::-1]
    return 0.5 * float(g.max() - g.min())
