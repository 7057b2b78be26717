"""Energies and force fields of the chain with first and second neighbors.

The chain of 2L+1 atoms at positions y_j carries a nearest-neighbor bond
for every adjacent pair and a next-nearest bond for every pair two sites
apart.  Three force laws act on the free atoms j = -L+1..L-1:

  * the atomistic law, minus the position gradient of the full two-bond
    energy (per lattice spacing);
  * the local law, obtained by replacing the next-nearest bond strain
    y_j - y_{j-2} with 2(y_j - y_{j-1}) in the energy before
    differentiating;
  * the coupled law, which evaluates the atomistic formula on sites
    |j| <= K and the local formula on the remaining interior sites.

The coupled field passes the patch test (it vanishes identically at a
uniformly strained state) but is not a gradient: its Jacobian is not
symmetric.
"""

from __future__ import annotations

import numpy as np

from .lattice import DomainSpec, Field
from .potentials import PairPotential


def _nn_strains(y: Field, eps: float) -> np.ndarray:
    """Bond strains (y_j - y_{j-1})/eps for bonds -L+1..L."""
    return np.diff(y.values) / eps


def _nnn_strains(y: Field, eps: float) -> np.ndarray:
    """Strains (y_j - y_{j-2})/eps of next-nearest pairs ending at -L+2..L."""
    v = y.values
    return (v[2:] - v[:-2]) / eps


def energy_atomistic(y: Field, phi: PairPotential, eps: float) -> float:
    """Total two-bond energy eps * [sum phi(NN strains) + sum phi(NNN strains)]."""
    return eps * float(
        np.sum(phi.eval(_nn_strains(y, eps))) + np.sum(phi.eval(_nnn_strains(y, eps)))
    )


def energy_lqc(y: Field, phi: PairPotential, eps: float) -> float:
    """Local (Cauchy-Born) energy: every bond contributes phi(r) + phi(2r).

    Has one next-nearest term more than the atomistic energy because the
    local density ignores the missing second neighbor at each end.
    """
    r = _nn_strains(y, eps)
    return eps * float(np.sum(phi.eval(r)) + np.sum(phi.eval(2.0 * r)))


def force_atomistic(y: Field, phi: PairPotential, eps: float) -> Field:
    """Atomistic force (per lattice spacing) on the free atoms -L+1..L-1.

    The next-nearest terms that would reach atoms -L-1 or L+1 are taken to
    be zero, which makes the field exactly minus the scaled energy
    gradient on the 2L+1 chain.
    """
    L = y.half_width
    d1 = phi.deriv1(_nn_strains(y, eps))
    d2 = phi.deriv1(_nnn_strains(y, eps))
    zero = np.zeros(1)
    d2_right = np.concatenate([d2[1:], zero])
    d2_left = np.concatenate([zero, d2[:-1]])
    # grouping like terms lets equal neighbor contributions cancel exactly
    f = ((d1[1:] - d1[:-1]) + (d2_right - d2_left)) / eps
    return Field(f, -L + 1)


def force_lqc(y: Field, phi: PairPotential, eps: float) -> Field:
    """Local QC force (per lattice spacing) on the free atoms -L+1..L-1."""
    L = y.half_width
    r = _nn_strains(y, eps)
    g = phi.deriv1(r) + 2.0 * phi.deriv1(2.0 * r)
    return Field((g[1:] - g[:-1]) / eps, -L + 1)


def force_qcf(y: Field, spec: DomainSpec, phi: PairPotential) -> Field:
    """Region-dispatched force on -N+1..N-1.

    Sites |j| <= K get the atomistic formula (all their neighbors lie in
    the computational domain because K <= N-2), the rest the local one.
    """
    if y.half_width != spec.N:
        raise ValueError(f"expected positions over -N..N with N={spec.N}")
    fa = force_atomistic(y, phi, spec.eps)
    fl = force_lqc(y, phi, spec.eps)
    j = fa.indices()
    values = np.where(np.abs(j) <= spec.K, fa.values, fl.values)
    return Field(values, fa.lo)
