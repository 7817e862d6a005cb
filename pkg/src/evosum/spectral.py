"""Eigenstructure of evolution matrices.

Because every column of an evolution matrix sums to one, the all-ones row
is always a left eigenvector with eigenvalue 1, and the matching right
eigenvector (normalized onto the simplex when its entries share one sign)
is the stationary population mix. The second-largest eigenvalue modulus
sets the convergence rate toward that mix, or the divergence rate away
from it when transfers are negative and the modulus exceeds one.

Ordering convention: the eigenvalue pinned at 1 comes first regardless of
modulus, so ``eigenvalues[1]`` is always "the other" mode even in unstable
competitive systems where its modulus is larger than one. The remaining
eigenvalues are sorted by descending modulus, ties broken by descending
real part and then ascending imaginary part, for deterministic output.

Normalization convention: the leading right vector is scaled to sum one,
the leading left vector is stored as the exact all-ones vector, and each
non-leading right vector is scaled so its largest-magnitude component is
exactly 1 (this also fixes the phase of complex vectors). Non-leading
left vectors are taken from the inverse of the right-vector matrix, which
makes each left/right pairing sum to one by construction.

``stationary_by_iteration`` is an independent cross-check: it never looks
at eigenvalues, only at repeated squaring of the matrix, whose columns all
converge to the stationary mix for a positive stochastic matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_TOL,
    EvolutionMatrix,
    MatrixKind,
    PopulationVector,
    ToleranceConfig,
    classify_matrix,
)
from .errors import (
    DegenerateSpectrumError,
    DimensionMismatchError,
    NoConvergenceError,
    ValidationError,
)


@dataclass(frozen=True)
class SpectralSummary:
    """Full eigenstructure of an evolution matrix.

    ``eigenvalues[p]``, ``right_vectors[p]`` and ``left_vectors[p]`` belong
    together. ``stationary`` is None when it cannot be resolved; the flags
    say why: a degenerate leading eigenvalue (multiplicity of 1 above one),
    mixed signs in the leading right vector (possible with negative
    transfers), or a defective eigenvector basis.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    stationary: PopulationVector | None
    lambda2_modulus: float
    leading_degenerate: bool = False
    stationary_mixed_sign: bool = False
    defective: bool = False


@dataclass(frozen=True)
class BiorthogonalityReport:
    max_violation: float
    passed: bool


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    """Scale so the largest-magnitude component is exactly 1 (real, positive)."""
    k = int(np.argmax(np.abs(v)))
    return v / v[k]


def _realify(v: np.ndarray, tol: float) -> np.ndarray:
    if np.max(np.abs(v.imag)) <= tol * max(1.0, np.max(np.abs(v.real))):
        return v.real.astype(complex)
    return v


def _is_defective(w: np.ndarray, vectors: np.ndarray, eig_tol: float) -> bool:
    # A repeated eigenvalue with (nearly) parallel eigenvectors means the
    # geometric multiplicity is deficient.
    n = w.size
    for p in range(n):
        for q in range(p + 1, n):
            if abs(w[p] - w[q]) <= eig_tol:
                pair = np.stack(
                    [
                        vectors[p] / np.linalg.norm(vectors[p]),
                        vectors[q] / np.linalg.norm(vectors[q]),
                    ],
                    axis=1,
                )
                if np.linalg.svd(pair, compute_uv=False)[-1] < 1e-6:
                    return True
    return False


def eigendecompose(matrix: EvolutionMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> SpectralSummary:
    """Eigenvalues and biorthogonal eigenvector pairs of an evolution matrix.

    Never raises on degenerate or defective input; those conditions are
    reported through the summary flags so callers can decide what is usable.
    """
    a = np.asarray(matrix.entries, dtype=float)
    n = matrix.n
    w, v = np.linalg.eig(a)

    lead = int(np.argmin(np.abs(w - 1.0)))
    rest = sorted(
        (p for p in range(n) if p != lead),
        key=lambda p: (-abs(w[p]), -w[p].real, w[p].imag),
    )
    order = [lead, *rest]
    w = w[order]
    v = v[:, order].astype(complex)

    right = np.empty((n, n), dtype=complex)
    for p in range(n):
        vec = _canonical_phase(v[:, p])
        if abs(w[p].imag) <= tol.eig_tol:
            vec = _realify(vec, tol.eig_tol)
        right[p] = vec

    leading_degenerate = int(np.count_nonzero(np.abs(w - 1.0) <= tol.eig_tol)) > 1
    defective = _is_defective(w, right, tol.eig_tol)

    # Leading vector: prefer the sum-one scaling that makes it a population.
    lead_sum = complex(right[0].sum())
    sum_normalized = abs(lead_sum) > tol.eig_tol
    if sum_normalized:
        right[0] = right[0] / lead_sum

    stationary: PopulationVector | None = None
    mixed_sign = False
    if not sum_normalized:
        mixed_sign = True  # a zero-sum leading vector necessarily changes sign
    elif not leading_degenerate:
        candidate = right[0].real
        if np.min(candidate) >= -tol.zero_tol:
            stationary = PopulationVector(np.maximum(candidate, 0.0))
        else:
            mixed_sign = True

    left = np.empty((n, n), dtype=complex)
    try:
        inv = np.linalg.inv(right.T)  # rows pair with right vectors: inv @ right.T = I
        if not np.all(np.isfinite(inv)):
            raise np.linalg.LinAlgError
        left[:] = inv
    except np.linalg.LinAlgError:
        # Defective basis: fall back to left eigenvectors of the transpose,
        # matched greedily by eigenvalue. Pairings may not be normalizable.
        wl, vl = np.linalg.eig(a.T)
        unused = list(range(n))
        for p in range(n):
            q = min(unused, key=lambda q: abs(wl[q] - w[p]))
            unused.remove(q)
            u = _canonical_phase(vl[:, q].astype(complex))
            pairing = complex(u @ right[p])
            if abs(pairing) > tol.eig_tol:
                u = u / pairing
            left[p] = u
    if sum_normalized:
        left[0] = np.ones(n)  # exact: pairs to 1 with the sum-one leading vector

    lambda2_modulus = float(abs(w[1])) if n >= 2 else 0.0

    eigenvalues = w.copy()
    eigenvalues.flags.writeable = False
    right.flags.writeable = False
    left.flags.writeable = False
    return SpectralSummary(
        eigenvalues=eigenvalues,
        right_vectors=right,
        left_vectors=left,
        stationary=stationary,
        lambda2_modulus=lambda2_modulus,
        leading_degenerate=leading_degenerate,
        stationary_mixed_sign=mixed_sign,
        defective=defective,
    )


def stationary_by_iteration(
    matrix: EvolutionMatrix, tol: float = 1e-10, max_iter: int = 64
) -> PopulationVector:
    """Stationary mix via repeated squaring of a stochastic matrix.

    Squares the matrix until all its columns agree entrywise within ``tol``
    and returns the common column. Deliberately eigenvalue-free so it can
    serve as an independent oracle for ``eigendecompose``.

    Raises ``NoConvergenceError`` when the iteration budget runs out, e.g.
    for periodic chains such as permutation matrices.
    """
    if max_iter < 1:
        raise ValidationError("max_iter must be at least 1")
    if classify_matrix(matrix).kind is not MatrixKind.STOCHASTIC:
        raise ValidationError("iterated averaging requires a stochastic matrix")
    power = np.asarray(matrix.entries, dtype=float).copy()
    for _ in range(max_iter):
        spread = float(np.max(power.max(axis=1) - power.min(axis=1)))
        if spread < tol:
            common = power.mean(axis=1)
            return PopulationVector(common / common.sum())
        power = power @ power
    raise NoConvergenceError(
        f"columns did not agree within {tol} after {max_iter} squarings"
    )


def convergence_rate(matrix: EvolutionMatrix, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Modulus of the second eigenvalue: below one means decay toward the
    stationary mix, above one means the mix is unstable."""
    if matrix.n < 2:
        raise DimensionMismatchError("convergence rate needs at least 2 species")
    return eigendecompose(matrix, tol).lambda2_modulus


def check_biorthogonality(
    summary: SpectralSummary, tol: float, eig_tol: float = DEFAULT_TOL.eig_tol
) -> BiorthogonalityReport:
    """Largest cross-pairing between left and right vectors of different modes.

    Pairings are first normalized so each left/right pair sums to one; the
    report passes when every cross term stays below ``tol``. Raises
    ``DegenerateSpectrumError`` when two eigenvalues coincide within
    ``eig_tol``, because the pairing is then ambiguous.
    """
    w = summary.eigenvalues
    n = w.size
    for p in range(n):
        for q in range(p + 1, n):
            if abs(w[p] - w[q]) <= eig_tol:
                raise DegenerateSpectrumError(
                    f"eigenvalues {p} and {q} coincide within {eig_tol}"
                )
    gram = summary.left_vectors @ summary.right_vectors.T
    diag = np.diag(gram).copy()
    if np.any(np.abs(diag) < 1e-300):
        raise DegenerateSpectrumError("a left/right pairing vanished; cannot normalize")
    gram = gram / diag[:, None]
    np.fill_diagonal(gram, 0.0)
    violation = float(np.max(np.abs(gram))) if n > 1 else 0.0
    return BiorthogonalityReport(max_violation=violation, passed=violation < tol)
