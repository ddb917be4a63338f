"""Riemannian primitives for the supported manifold families.

Points and tangent vectors are flat float64 buffers whose length is fixed by
the manifold descriptor:

* ``euclidean(m)``: buffers of length m, exp/log are addition/subtraction.
* ``circle()``: one angle in (-pi, pi]; exp wraps, log is the shortest signed
  arc, the antipodal angle is the cut locus.
* ``sphere2()``: unit vectors in R^3; geodesics are great circles, the
  antipode is the cut locus.
* ``spd(n)``: symmetric positive definite n x n matrices stored row-major
  (length n*n) under the affine-invariant metric

      exp_X(V) = X^(1/2) expm(X^(-1/2) V X^(-1/2)) X^(1/2)
      log_X(Y) = X^(1/2) logm(X^(-1/2) Y X^(-1/2)) X^(1/2)
      d(X, Y)  = || logm(X^(-1/2) Y X^(-1/2)) ||_F
      <A, B>_X = trace(X^-1 A X^-1 B)

  with matrix functions evaluated through the Jacobi eigensolver.

Kernels additionally expose "ortho" coordinates: an isometric identification
of the tangent space at x with R^d in which the metric is the standard dot
product (the identity map for the first three families, the whitening
V -> X^(-1/2) V X^(-1/2) for spd).  The batched solver works in these
coordinates so that norms and inner products are plain einsums.

Numerical conventions: tangent norms below 1e-15 short-circuit to exact
zeros, and log maps raise :class:`CutLocusError` within 1e-10 of the cut
locus.  Distances have closed forms everywhere and never raise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .eigen import sym_eig, sym_eig_batch
from .errors import (
    CutLocusError,
    DimensionMismatch,
    NotPositiveDefinite,
    TangentBaseMismatch,
)

__all__ = [
    "ManifoldDescriptor",
    "Tangent",
    "exp_map",
    "log_map",
    "distance",
    "tangent_inner",
    "tangent_norm",
    "sym_eig",
    "random_point",
    "random_tangent",
]

ZERO_TANGENT_TOL = 1e-15
CUT_LOCUS_TOL = 1e-10
SPHERE_NORM_TOL = 1e-10
SPD_SYM_TOL = 1e-12

_KINDS = ("euclidean", "circle", "sphere2", "spd")


@dataclass(frozen=True)
class ManifoldDescriptor:
    """Identifies one manifold family plus its size parameter.

    ``dim`` is m for euclidean(m), n for spd(n) and unused (0) otherwise.
    """

    kind: str
    dim: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise DimensionMismatch(f"unknown manifold kind {self.kind!r}")
        if self.kind == "euclidean" and self.dim < 1:
            raise DimensionMismatch("euclidean manifold needs dim >= 1")
        if self.kind == "spd" and self.dim < 1:
            raise DimensionMismatch("spd manifold needs dim >= 1")
        if self.kind in ("circle", "sphere2") and self.dim != 0:
            raise DimensionMismatch(f"{self.kind} takes no size parameter")

    @classmethod
    def euclidean(cls, m: int) -> "ManifoldDescriptor":
        return cls("euclidean", int(m))

    @classmethod
    def circle(cls) -> "ManifoldDescriptor":
        return cls("circle")

    @classmethod
    def sphere2(cls) -> "ManifoldDescriptor":
        return cls("sphere2")

    @classmethod
    def spd(cls, n: int) -> "ManifoldDescriptor":
        return cls("spd", int(n))

    @property
    def point_len(self) -> int:
        if self.kind == "euclidean":
            return self.dim
        if self.kind == "circle":
            return 1
        if self.kind == "sphere2":
            return 3
        return self.dim * self.dim

    @property
    def tangent_len(self) -> int:
        return self.point_len

    def label(self) -> str:
        if self.kind in ("euclidean", "spd"):
            return f"{self.kind} {self.dim}"
        return self.kind

    @property
    def kernel(self):
        return _kernel_for(self)


@dataclass
class Tangent:
    """A tangent vector together with the point it is anchored at."""

    base: np.ndarray
    vec: np.ndarray


def wrap_angle(a):
    """Wrap angles into (-pi, pi]."""
    b = np.mod(np.asarray(a, dtype=np.float64), 2.0 * np.pi)
    return np.where(b > np.pi, b - 2.0 * np.pi, b)


class _EuclideanKernel:
    def __init__(self, m):
        self.point_len = m
        self.tangent_len = m

    def exp(self, x, v):
        return x + v

    def log(self, x, y):
        return y - x

    def dist2(self, x, y):
        d = y - x
        return np.einsum("...l,...l->...", d, d)

    def dist(self, x, y):
        return np.sqrt(self.dist2(x, y))

    def inner(self, x, a, b):
        return np.einsum("...l,...l->...", a, b)

    # the metric is already the dot product
    log_ortho = log
    exp_ortho = exp

    def tangent_from_ortho(self, x, w):
        return w

    def ortho_from_tangent(self, x, v):
        return v

    def validate_points(self, pts):
        if not np.isfinite(pts).all():
            return int(np.argwhere(~np.isfinite(pts).all(axis=-1))[0][0]), "non-finite entry"
        return None

    def random_point(self, rng, size=()):
        return rng.normal(size=tuple(size) + (self.point_len,))

    def random_ortho(self, rng, x, max_norm):
        v = rng.normal(size=x.shape)
        nrm = np.linalg.norm(v, axis=-1, keepdims=True)
        nrm = np.where(nrm == 0.0, 1.0, nrm)
        scale = rng.uniform(0.0, max_norm, size=nrm.shape)
        return v / nrm * scale


class _CircleKernel:
    point_len = 1
    tangent_len = 1

    def exp(self, x, v):
        return wrap_angle(x + v)

    def log(self, x, y):
        d = wrap_angle(y - x)
        gap = np.pi - np.abs(d)
        bad = gap < CUT_LOCUS_TOL
        if bad.any():
            idx = tuple(np.argwhere(bad)[0])
            raise CutLocusError(
                "log undefined: target angle is numerically antipodal to the base",
                bad_index=idx[:-1],
            )
        return d

    def dist(self, x, y):
        return np.abs(wrap_angle(y - x))[..., 0]

    def dist2(self, x, y):
        d = wrap_angle(y - x)[..., 0]
        return d * d

    def inner(self, x, a, b):
        return np.einsum("...l,...l->...", a, b)

    log_ortho = log
    exp_ortho = exp

    def tangent_from_ortho(self, x, w):
        return w

    def ortho_from_tangent(self, x, v):
        return v

    def validate_points(self, pts):
        if not np.isfinite(pts).all():
            return int(np.argwhere(~np.isfinite(pts).all(axis=-1))[0][0]), "non-finite entry"
        a = pts[..., 0]
        bad = (a <= -np.pi) | (a > np.pi)
        if bad.any():
            return int(np.argwhere(bad)[0][0]), "angle outside (-pi, pi]"
        return None

    def random_point(self, rng, size=()):
        a = rng.uniform(-np.pi, np.pi, size=tuple(size) + (1,))
        return wrap_angle(a)

    def random_ortho(self, rng, x, max_norm):
        return rng.uniform(-max_norm, max_norm, size=x.shape)


class _Sphere2Kernel:
    point_len = 3
    tangent_len = 3

    def exp(self, x, v):
        nrm = np.sqrt(np.einsum("...l,...l->...", v, v))
        small = nrm < ZERO_TANGENT_TOL
        safe = np.where(small, 1.0, nrm)
        y = np.cos(nrm)[..., None] * x + (np.sin(nrm) / safe)[..., None] * v
        y = np.where(small[..., None], x + 0.0 * v, y)
        # renormalize against drift; |y| is already 1 to machine precision
        return y / np.sqrt(np.einsum("...l,...l->...", y, y))[..., None]

    def _angle(self, x, y):
        # atan2 of (sin, cos) keeps full precision at tiny angles, where
        # arccos of the dot product alone loses half the mantissa
        c = np.einsum("...l,...l->...", x, y)
        s = np.linalg.norm(np.cross(x, y), axis=-1)
        return np.arctan2(s, c)

    def log(self, x, y):
        c = np.einsum("...l,...l->...", x, y)
        theta = self._angle(x, y)
        bad = (np.pi - theta) < CUT_LOCUS_TOL
        if bad.any():
            idx = tuple(np.argwhere(bad)[0])
            raise CutLocusError(
                "log undefined: target is numerically antipodal to the base",
                bad_index=idx,
            )
        small = theta < ZERO_TANGENT_TOL
        denom = np.where(small, 1.0, np.sin(theta))
        v = (y - c[..., None] * x) * (theta / denom)[..., None]
        return np.where(small[..., None], 0.0, v)

    def dist(self, x, y):
        return self._angle(x, y)

    def dist2(self, x, y):
        d = self.dist(x, y)
        return d * d

    def inner(self, x, a, b):
        return np.einsum("...l,...l->...", a, b)

    log_ortho = log
    exp_ortho = exp

    def tangent_from_ortho(self, x, w):
        return w

    def ortho_from_tangent(self, x, v):
        return v

    def validate_points(self, pts):
        if not np.isfinite(pts).all():
            return int(np.argwhere(~np.isfinite(pts).all(axis=-1))[0][0]), "non-finite entry"
        nrm = np.linalg.norm(pts, axis=-1)
        bad = np.abs(nrm - 1.0) > SPHERE_NORM_TOL
        if bad.any():
            return int(np.argwhere(bad)[0][0]), "not a unit vector"
        return None

    def random_point(self, rng, size=()):
        v = rng.normal(size=tuple(size) + (3,))
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    def random_ortho(self, rng, x, max_norm):
        v = rng.normal(size=x.shape)
        v = v - np.einsum("...l,...l->...", v, x)[..., None] * x
        nrm = np.linalg.norm(v, axis=-1, keepdims=True)
        nrm = np.where(nrm == 0.0, 1.0, nrm)
        scale = rng.uniform(0.0, max_norm, size=nrm.shape)
        return v / nrm * scale


class _SpdKernel:
    def __init__(self, n):
        self.n = n
        self.point_len = n * n
        self.tangent_len = n * n

    def _mat(self, buf):
        buf = np.asarray(buf)
        return buf.reshape(buf.shape[:-1] + (self.n, self.n))

    def _buf(self, mat):
        return mat.reshape(mat.shape[:-2] + (self.n * self.n,))

    @staticmethod
    def _sym(mat):
        return 0.5 * (mat + np.swapaxes(mat, -1, -2))

    def _eig(self, mats):
        return sym_eig_batch(self._sym(mats), check_symmetry=False)

    def _apply(self, mats, fn, require_pd, what):
        lam, Q = self._eig(mats)
        if require_pd and lam[..., 0].min(initial=np.inf) <= 0.0:
            raise NotPositiveDefinite(f"{what}: eigenvalue <= 0")
        out = np.einsum("...ij,...j,...kj->...ik", Q, fn(lam), Q)
        return self._sym(out)

    def _halves(self, X):
        lam, Q = self._eig(X)
        if lam[..., 0].min(initial=np.inf) <= 0.0:
            raise NotPositiveDefinite("base point is not positive definite")
        s = np.sqrt(lam)
        Xh = self._sym(np.einsum("...ij,...j,...kj->...ik", Q, s, Q))
        Xmh = self._sym(np.einsum("...ij,...j,...kj->...ik", Q, 1.0 / s, Q))
        return Xh, Xmh

    def exp(self, x, v):
        X = self._mat(x)
        Xh, Xmh = self._halves(X)
        W = self._sym(np.einsum("...ij,...jk,...kl->...il", Xmh, self._mat(v), Xmh))
        E = self._apply(W, np.exp, require_pd=False, what="exp")
        Y = self._sym(np.einsum("...ij,...jk,...kl->...il", Xh, E, Xh))
        return self._buf(Y)

    def log(self, x, y):
        X = self._mat(x)
        Xh, Xmh = self._halves(X)
        S = self._log_whitened(Xmh, self._mat(y))
        V = self._sym(np.einsum("...ij,...jk,...kl->...il", Xh, S, Xh))
        return self._buf(V)

    def _log_whitened(self, Xmh, Y):
        W = self._sym(np.einsum("...ij,...jk,...kl->...il", Xmh, Y, Xmh))
        return self._apply(W, np.log, require_pd=True, what="log target")

    def log_ortho(self, x, y):
        X = self._mat(x)
        _, Xmh = self._halves(X)
        return self._buf(self._log_whitened(Xmh, self._mat(y)))

    def exp_ortho(self, x, w):
        X = self._mat(x)
        Xh, _ = self._halves(X)
        E = self._apply(self._mat(w), np.exp, require_pd=False, what="exp")
        Y = self._sym(np.einsum("...ij,...jk,...kl->...il", Xh, E, Xh))
        return self._buf(Y)

    def tangent_from_ortho(self, x, w):
        Xh, _ = self._halves(self._mat(x))
        V = self._sym(np.einsum("...ij,...jk,...kl->...il", Xh, self._mat(w), Xh))
        return self._buf(V)

    def ortho_from_tangent(self, x, v):
        _, Xmh = self._halves(self._mat(x))
        W = self._sym(np.einsum("...ij,...jk,...kl->...il", Xmh, self._mat(v), Xmh))
        return self._buf(W)

    def dist2(self, x, y):
        if self.n == 2:
            return self._dist2_closed2(x, y)
        X = self._mat(x)
        _, Xmh = self._halves(X)
        W = self._sym(np.einsum("...ij,...jk,...kl->...il", Xmh, self._mat(y), Xmh))
        lam, _ = self._eig(W)
        if lam[..., 0].min(initial=np.inf) <= 0.0:
            raise NotPositiveDefinite("distance target is not positive definite")
        ln = np.log(lam)
        return np.einsum("...i,...i->...", ln, ln)

    def _dist2_closed2(self, x, y):
        # eigenvalues of X^-1 Y solve l^2 - tr(X^-1 Y) l + det(Y)/det(X) = 0
        X = self._mat(x)
        Y = self._mat(y)
        a = X[..., 0, 0]
        b = 0.5 * (X[..., 0, 1] + X[..., 1, 0])
        c = X[..., 1, 1]
        p = Y[..., 0, 0]
        q = 0.5 * (Y[..., 0, 1] + Y[..., 1, 0])
        s = Y[..., 1, 1]
        det_x = a * c - b * b
        det_y = p * s - q * q
        if (a <= 0).any() or (det_x <= 0).any():
            raise NotPositiveDefinite("distance base is not positive definite")
        if (p <= 0).any() or (det_y <= 0).any():
            raise NotPositiveDefinite("distance target is not positive definite")
        tr = (c * p - 2.0 * b * q + a * s) / det_x
        det = det_y / det_x
        # discriminant as (m00 - m11)^2 + 4 m01 m10 of X^-1 Y; the tr^2 - 4 det
        # form cancels catastrophically when the eigenvalues coincide (y == x
        # gives exactly 0 here, so equal points come out at distance 0)
        diff = (c * p - a * s) / det_x
        cross = (c * q - b * s) * (a * q - b * p) / (det_x * det_x)
        disc = np.maximum(diff * diff + 4.0 * cross, 0.0)
        lam1 = 0.5 * (tr + np.sqrt(disc))
        lam2 = det / lam1
        l1 = np.log(lam1)
        l2 = np.log(lam2)
        return l1 * l1 + l2 * l2

    def dist(self, x, y):
        return np.sqrt(self.dist2(x, y))

    def inner(self, x, a, b):
        wa = self._mat(self.ortho_from_tangent(x, a))
        wb = self._mat(self.ortho_from_tangent(x, b))
        return np.einsum("...ij,...ij->...", wa, wb)

    def validate_points(self, pts):
        if not np.isfinite(pts).all():
            return int(np.argwhere(~np.isfinite(pts).all(axis=-1))[0][0]), "non-finite entry"
        M = self._mat(pts)
        asym = np.abs(M - np.swapaxes(M, -1, -2)).max(axis=(-1, -2))
        bad = asym > SPD_SYM_TOL
        if bad.any():
            return int(np.argwhere(bad)[0][0]), "not symmetric"
        lam, _ = self._eig(M)
        bad = lam[..., 0] <= 0.0
        if bad.any():
            return int(np.argwhere(bad)[0][0]), "not positive definite"
        return None

    def random_point(self, rng, size=()):
        size = tuple(size)
        g = rng.normal(size=size + (self.n, self.n))
        Qm, _ = np.linalg.qr(g)
        lam = np.exp(rng.uniform(-1.0, 1.0, size=size + (self.n,)))
        X = np.einsum("...ij,...j,...kj->...ik", Qm, lam, Qm)
        return self._buf(self._sym(X))

    def random_ortho(self, rng, x, max_norm):
        W = rng.normal(size=self._mat(x).shape)
        W = self._sym(W)
        nrm = np.sqrt(np.einsum("...ij,...ij->...", W, W))
        nrm = np.where(nrm == 0.0, 1.0, nrm)
        scale = rng.uniform(0.0, max_norm, size=nrm.shape)
        return self._buf(W * (scale / nrm)[..., None, None])


_KERNEL_CACHE: dict = {}


def _kernel_for(desc: ManifoldDescriptor):
    k = _KERNEL_CACHE.get(desc)
    if k is None:
        if desc.kind == "euclidean":
            k = _EuclideanKernel(desc.dim)
        elif desc.kind == "circle":
            k = _CircleKernel()
        elif desc.kind == "sphere2":
            k = _Sphere2Kernel()
        else:
            k = _SpdKernel(desc.dim)
        _KERNEL_CACHE[desc] = k
    return k


def _as_point(desc: ManifoldDescriptor, x, name="point"):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.shape != (desc.point_len,):
        raise DimensionMismatch(
            f"{name} has shape {x.shape}, expected ({desc.point_len},) for {desc.label()}"
        )
    return x


def _check_point(desc: ManifoldDescriptor, x, name="point"):
    bad = desc.kernel.validate_points(x[None, :])
    if bad is not None:
        raise DimensionMismatch(f"{name} invalid for {desc.label()}: {bad[1]}")


def _check_tangent(desc: ManifoldDescriptor, x, xi: Tangent, name="tangent"):
    if not isinstance(xi, Tangent):
        raise TypeError(f"{name} must be a Tangent, got {type(xi).__name__}")
    base = np.asarray(xi.base, dtype=np.float64).reshape(-1)
    if not np.array_equal(base, x):
        raise TangentBaseMismatch(f"{name} is anchored at a different base point")
    vec = np.asarray(xi.vec, dtype=np.float64)
    if vec.ndim == 0:
        vec = vec.reshape(1)
    if vec.shape != (desc.tangent_len,):
        raise DimensionMismatch(
            f"{name} has shape {vec.shape}, expected ({desc.tangent_len},)"
        )
    return vec


def exp_map(desc: ManifoldDescriptor, x, xi: Tangent) -> np.ndarray:
    """Geodesic exponential: follow the geodesic from x with velocity xi for unit time.

    Tangent norms below 1e-15 return x exactly.
    """
    x = _as_point(desc, x)
    _check_point(desc, x)
    vec = _check_tangent(desc, x, xi)
    k = desc.kernel
    if np.sqrt(k.inner(x, vec, vec)) < ZERO_TANGENT_TOL:
        return x.copy()
    return k.exp(x, vec)


def log_map(desc: ManifoldDescriptor, x, y) -> Tangent:
    """Geodesic logarithm: the tangent at x whose exponential reaches y.

    Raises CutLocusError within 1e-10 of the cut locus of x (the antipode for
    the circle and the sphere; spd has none).
    """
    x = _as_point(desc, x)
    y = _as_point(desc, y, name="target")
    _check_point(desc, x)
    _check_point(desc, y, name="target")
    return Tangent(base=x, vec=desc.kernel.log(x, y))


def distance(desc: ManifoldDescriptor, x, y) -> float:
    """Geodesic distance between two points; defined for every point pair."""
    x = _as_point(desc, x)
    y = _as_point(desc, y, name="target")
    _check_point(desc, x)
    _check_point(desc, y, name="target")
    return float(desc.kernel.dist(x, y))


def tangent_inner(desc: ManifoldDescriptor, x, a: Tangent, b: Tangent) -> float:
    """Riemannian inner product of two tangents anchored at the same x."""
    x = _as_point(desc, x)
    va = _check_tangent(desc, x, a, name="a")
    vb = _check_tangent(desc, x, b, name="b")
    return float(desc.kernel.inner(x, va, vb))


def tangent_norm(desc: ManifoldDescriptor, x, a: Tangent) -> float:
    """Riemannian norm of a tangent vector at x."""
    x = _as_point(desc, x)
    va = _check_tangent(desc, x, a, name="a")
    return float(np.sqrt(desc.kernel.inner(x, va, va)))


def random_point(desc: ManifoldDescriptor, rng, size=()) -> np.ndarray:
    """Draw random valid points; intended for tests and examples."""
    return desc.kernel.random_point(rng, size)


def random_tangent(desc: ManifoldDescriptor, rng, x, max_norm: float) -> Tangent:
    """Draw a random tangent at x with norm below max_norm."""
    x = np.asarray(x, dtype=np.float64)
    k = desc.kernel
    w = k.random_ortho(rng, x, max_norm)
    return Tangent(base=x, vec=k.tangent_from_ortho(x, w))
