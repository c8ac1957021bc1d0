"""Controllability primitives for real matrix pairs ``(A, B)``.

Left eigenvectors are taken with the plain transpose, ``xi^T A = lam xi^T``,
so for a real ``A`` a complex eigenvalue and its conjugate carry conjugate
eigenvectors. Span comparisons are done over the complex field.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, EigenFailure, NotControllable

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "UncontrollableBasis",
    "KalmanDecomposition",
    "numerical_rank",
    "controllability_matrix",
    "kalman_test",
    "left_eigenpairs",
    "uncontrollable_basis",
    "pbh_test",
    "is_xi_uncontrollable",
    "kalman_decomposition",
    "controllable_subspace",
    "to_controllable_canonical",
    "companion",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds used by every rank and eigenvector decision."""

    rank_tol_factor: float = 100.0
    eig_cluster_tol: float = 1e-8
    residual_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol_factor", "eig_cluster_tol", "residual_tol"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be strictly positive, got {v}")

    def to_json(self) -> dict:
        return {"rank_tol_factor": self.rank_tol_factor,
                "eig_cluster_tol": self.eig_cluster_tol,
                "residual_tol": self.residual_tol}


DEFAULT_TOL = ToleranceConfig()


def _pair(A, B):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B.reshape(-1, 1)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    if B.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"B has {B.shape[0]} rows, A is {A.shape[0]}x{A.shape[0]}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
        raise DimensionMismatch("matrix entries must be finite")
    return A, B


def numerical_rank(M, cfg: ToleranceConfig = DEFAULT_TOL) -> int:
    """Number of singular values above ``factor * eps * max(shape) * sigma_max``."""
    M = np.atleast_2d(np.asarray(M))
    if M.size == 0:
        return 0
    s = sla.svdvals(M)
    if s[0] == 0:
        return 0
    thr = cfg.rank_tol_factor * _EPS * max(M.shape) * s[0]
    return int(np.count_nonzero(s > thr))


def controllability_matrix(A, B, scaled: bool = True) -> np.ndarray:
    """``[B, AB, ..., A^(n-1) B]``.

    With ``scaled=True`` every power block is divided by its largest
    absolute entry, which leaves the column space unchanged but keeps
    ``|A|^k`` growth out of the rank decision.
    """
    A, B = _pair(A, B)
    n = A.shape[0]
    blocks = []
    blk = B.copy()
    for _ in range(n):
        if scaled:
            peak = np.max(np.abs(blk)) if blk.size else 0.0
            if peak > 0:
                blk = blk / peak
        blocks.append(blk)
        blk = A @ blk
    return np.hstack(blocks)


def kalman_test(A, B, cfg: ToleranceConfig = DEFAULT_TOL):
    """Rank of the controllability matrix and whether it is full.

    The rank of the block-scaled power matrix is cross-checked against an
    orthogonal staircase computation of the same Krylov space. Roundoff can
    only make either estimate too large, so the smaller one is reported.

    Returns
    -------
    rank : int
    controllable : bool
    """
    A, B = _pair(A, B)
    r = numerical_rank(controllability_matrix(A, B), cfg)
    if r:
        r = min(r, _staircase(A, B, cfg).shape[1])
    return r, r == A.shape[0]


def _cluster(values, tol):
    """Single-linkage clusters of the complex numbers ``values``."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = [sorted(g) for g in groups.values()]
    out.sort(key=lambda g: (np.mean(values[g]).real, np.mean(values[g]).imag))
    return out


def left_eigenpairs(A, cfg: ToleranceConfig = DEFAULT_TOL) -> list:
    """Clustered eigenvalues with orthonormal bases of their left eigenspaces.

    Returns
    -------
    list of (lam, V)
        ``lam`` is the cluster representative (real when the cluster is
        real within tolerance) and the columns of ``V`` are orthonormal
        vectors with ``V^T A ~= lam V^T``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    n = A.shape[0]
    if n == 0:
        return []
    norm_a = np.linalg.norm(A, 2)
    tol = cfg.eig_cluster_tol * (1.0 + norm_a)
    symmetric = np.array_equal(A, A.T)
    try:
        if symmetric:
            w, vecs = np.linalg.eigh(A)
        else:
            w = sla.eigvals(A)
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise EigenFailure(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise EigenFailure("non-finite eigenvalues")
    w = np.asarray(w, dtype=complex)

    out = []
    for members in _cluster(w, tol):
        lam = complex(np.mean(w[members]))
        if abs(lam.imag) <= tol:
            lam = lam.real
        if symmetric:
            V = vecs[:, members]
        else:
            s_dim = len(members)
            _, s, vh = sla.svd(A.T - lam * np.eye(n))
            thr = max(s_dim * tol, cfg.rank_tol_factor * _EPS * n * (1.0 + norm_a))
            k = int(np.count_nonzero(s <= thr))
            k = min(max(k, 1), s_dim)
            V = vh[n - k:].conj().T
        out.append((lam, V))
    return out


@dataclass
class UncontrollableBasis:
    """Groups ``(lam, Xi)`` of left eigenvectors orthogonal to ``B``.

    An empty ``groups`` list encodes a controllable pair.
    """

    groups: list = field(default_factory=list)

    def __bool__(self):
        return bool(self.groups)

    def __len__(self):
        return sum(xi.shape[1] for _, xi in self.groups)

    @property
    def eigenvalues(self) -> list:
        return [lam for lam, xi in self.groups for _ in range(xi.shape[1])]

    def matrix(self, n: int | None = None) -> np.ndarray:
        """All basis vectors stacked as columns."""
        if not self.groups:
            return np.zeros((n or 0, 0))
        cols = [xi for _, xi in self.groups]
        dtype = complex if any(np.iscomplexobj(c) for c in cols) else float
        return np.hstack([c.astype(dtype) for c in cols])

    def to_json(self) -> list:
        return [{"eigenvalue": _cjson(lam),
                 "basis": [[_cjson(x) for x in col] for col in xi.T]}
                for lam, xi in self.groups]


def _cjson(z):
    z = complex(z)
    if z.imag == 0:
        return float(z.real)
    return {"re": float(z.real), "im": float(z.imag)}


def uncontrollable_basis(A, B, cfg: ToleranceConfig = DEFAULT_TOL) -> UncontrollableBasis:
    """Per eigenvalue, an orthonormal basis of left eigenvectors with ``xi^T B = 0``."""
    A, B = _pair(A, B)
    norm_b = np.linalg.norm(B, 2) if B.size else 0.0
    groups = []
    for lam, V in left_eigenpairs(A, cfg):
        g = V.shape[1]
        if norm_b == 0:
            groups.append((lam, V))
            continue
        C = B.T @ V
        _, s, vh = sla.svd(C)
        r = int(np.count_nonzero(s > cfg.residual_tol * norm_b))
        if r == g:
            continue
        coeffs = vh[r:].conj().T
        xi = V @ coeffs
        xi, _ = np.linalg.qr(xi)
        if not np.iscomplexobj(lam):
            xi = np.real_if_close(xi)
        groups.append((lam, xi))
    return UncontrollableBasis(groups)


def pbh_test(A, B, cfg: ToleranceConfig = DEFAULT_TOL):
    """PBH eigenvector test.

    Returns
    -------
    controllable : bool
    certificate : (lam, xi) or None
        A left eigenvector orthogonal to ``B`` when the pair is not
        controllable.
    """
    basis = uncontrollable_basis(A, B, cfg)
    if not basis:
        return True, None
    lam, xi = basis.groups[0]
    return False, (lam, xi[:, 0])


def _orth(M, cfg):
    if M.shape[1] == 0:
        return M
    u, s, _ = sla.svd(M, full_matrices=False)
    r = numerical_rank(M, cfg)
    return u[:, :r]


def span_residual(X, Y) -> float:
    """Largest mutual projection residual between the column spans of X and Y.

    Both inputs are orthonormalized first, so any full-column-rank bases
    may be passed.
    """
    if X.shape[1] == 0 and Y.shape[1] == 0:
        return 0.0
    if X.shape[1] == 0 or Y.shape[1] == 0:
        return 1.0
    X = np.linalg.qr(X)[0]
    Y = np.linalg.qr(Y)[0]
    rx = Y - X @ (X.conj().T @ Y)
    ry = X - Y @ (Y.conj().T @ X)
    return float(max(np.linalg.norm(rx, 2), np.linalg.norm(ry, 2)))


def is_xi_uncontrollable(A, B, xi, cfg: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Decide whether the pair is ``{xi_1, ..., xi_s}``-uncontrollable.

    Every given vector must be a left eigenvector orthogonal to ``B``, the
    vectors must be linearly independent, and their span must coincide
    with the span of all such eigenvectors. An empty ``xi`` asks whether
    the pair is controllable.
    """
    A, B = _pair(A, B)
    n = A.shape[0]
    vecs = [np.asarray(v).reshape(-1) for v in xi]
    for v in vecs:
        if v.shape[0] != n:
            raise DimensionMismatch(f"vector of length {v.shape[0]} for a {n}-state pair")
    U = uncontrollable_basis(A, B, cfg).matrix(n)
    if not vecs:
        return U.shape[1] == 0
    X = np.column_stack(vecs).astype(complex if any(np.iscomplexobj(v) for v in vecs) else float)
    X = X / np.linalg.norm(X, axis=0)
    norm_a = max(np.linalg.norm(A, 2), 1.0)
    norm_b = np.linalg.norm(B, 2)
    for v in X.T:
        lam = np.vdot(v, A.T @ v)
        if np.linalg.norm(A.T @ v - lam * v) > cfg.residual_tol * norm_a:
            return False
        if np.linalg.norm(B.T @ v) > cfg.residual_tol * max(norm_b, 1.0):
            return False
    Qx = _orth(X, cfg)
    if Qx.shape[1] != X.shape[1] or U.shape[1] != Qx.shape[1]:
        return False
    return span_residual(Qx, U) <= cfg.residual_tol


def companion(alpha) -> np.ndarray:
    """Upshift matrix with bottom row ``alpha``."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    n = alpha.size
    M = np.eye(n, k=1)
    if n:
        M[-1] = alpha
    return M


def to_controllable_canonical(A, b, cfg: ToleranceConfig = DEFAULT_TOL):
    """Similarity ``T`` with ``T A T^-1`` companion and ``T b = e_n``.

    The first row of ``T`` is the last row of the inverse controllability
    matrix; the remaining rows are its images under ``A``.

    Returns
    -------
    T : (n, n) ndarray
    alpha : (n,) ndarray
        Bottom row of ``T A T^-1``.
    """
    A, b = _pair(A, b)
    if b.shape[1] != 1:
        raise DimensionMismatch("single input column required")
    n = A.shape[0]
    _, ok = kalman_test(A, b, cfg)
    if not ok:
        raise NotControllable("pair fails the Kalman rank test")
    return _luenberger(A, b)


def _luenberger(A, b):
    n = A.shape[0]
    C = controllability_matrix(A, b, scaled=False)
    q = np.linalg.solve(C.T, np.eye(n)[:, -1])
    rows = [q]
    for _ in range(n - 1):
        rows.append(rows[-1] @ A)
    T = np.vstack(rows)
    alpha = np.linalg.solve(T.T, (rows[-1] @ A))
    return T, alpha


@dataclass
class KalmanDecomposition:
    """``T A T^-1 = [[Ac, Acu], [0, Au]]`` and ``T b = [bc; 0]``.

    ``Ac`` is in controllable canonical form, so ``bc = e_dim_c``.
    """

    T: np.ndarray
    T_inv: np.ndarray
    dim_c: int
    Ac: np.ndarray
    Acu: np.ndarray
    Au: np.ndarray
    bc: np.ndarray
    lower_left: np.ndarray

    @property
    def alpha(self) -> np.ndarray:
        if self.dim_c == 0:
            return np.zeros(0)
        return self.Ac[-1].copy()

    def block_matrix(self) -> np.ndarray:
        n = self.T.shape[0]
        r = self.dim_c
        M = np.zeros((n, n))
        M[:r, :r] = self.Ac
        M[:r, r:] = self.Acu
        M[r:, r:] = self.Au
        return M

    def to_json(self) -> dict:
        return {"T": self.T.tolist(), "dim_c": self.dim_c,
                "Ac": self.Ac.tolist(), "Acu": self.Acu.tolist(),
                "Au": self.Au.tolist(), "bc": self.bc.tolist()}


def _staircase(A, B, cfg):
    """Orthonormal columns spanning the Krylov space of ``B``, block by block.

    Each new block ``A V_k`` is orthogonalized twice against everything
    found so far, and only directions above the rank threshold are kept.
    Working with orthonormal blocks never amplifies roundoff, unlike the
    power matrix when a column of ``B`` is close to an eigenvector for a
    small eigenvalue.
    """
    n = A.shape[0]
    scale = max(np.linalg.norm(A, 2), np.linalg.norm(B, 2), 1e-300)
    thr = cfg.rank_tol_factor * _EPS * max(n, 1) * scale
    basis = np.zeros((n, 0))
    block = B
    while basis.shape[1] < n and block.shape[1]:
        for _ in range(2):
            block = block - basis @ (basis.T @ block)
        u, s, _ = sla.svd(block, full_matrices=False)
        keep = int(np.count_nonzero(s > thr))
        keep = min(keep, n - basis.shape[1])
        if keep == 0:
            break
        new = u[:, :keep]
        basis = np.hstack([basis, new])
        block = A @ new
    return basis


def controllable_subspace(A, b, cfg: ToleranceConfig = DEFAULT_TOL):
    """Orthogonal basis ``U`` whose first ``r`` columns span the controllable subspace.

    For a single input the columns come in Krylov order (an Arnoldi
    staircase), so truncating to the Kalman rank keeps an invariant
    subspace.
    """
    A, b = _pair(A, b)
    n = A.shape[0]
    cols = _staircase(A, b, cfg)
    r = kalman_test(A, b, cfg)[0]
    if r == 0:
        return np.eye(n), 0
    Q, _ = np.linalg.qr(cols[:, :r], mode="complete")
    Q[:, :r] = cols[:, :r]
    return Q, r


def kalman_decomposition(A, b, cfg: ToleranceConfig = DEFAULT_TOL) -> KalmanDecomposition:
    """Split a single-input pair into controllable and uncontrollable parts.

    An orthonormal basis of the controllable subspace comes from
    :func:`controllable_subspace`; the controllable block is then brought
    to companion form.
    """
    A, b = _pair(A, b)
    if b.shape[1] != 1:
        raise DimensionMismatch("single input column required")
    n = A.shape[0]
    U, r = controllable_subspace(A, b, cfg)
    A1 = U.T @ A @ U
    b1 = U.T @ b
    if r > 0:
        Tc, _ = _luenberger(A1[:r, :r], b1[:r])
    else:
        Tc = np.zeros((0, 0))
    S = sla.block_diag(Tc, np.eye(n - r)) if n else np.zeros((0, 0))
    T = S @ U.T
    T_inv = U @ np.linalg.inv(S)
    M = T @ A @ T_inv
    tb = (T @ b).reshape(-1)
    return KalmanDecomposition(T=T, T_inv=T_inv, dim_c=r,
                               Ac=M[:r, :r], Acu=M[:r, r:], Au=M[r:, r:],
                               bc=tb[:r], lower_left=M[r:, :r])
