"""Quaternion phase-spectrum visual saliency.

A color image becomes a field of pure quaternions (RGB on the i, j, k
axes, alpha premultiplied). The field is Fourier-transformed along its
principal color axis, every spectral coefficient is normalized to unit
magnitude, and the inverse transform's squared magnitude — lightly
blurred — is the saliency map. Spectrally irregular structure (edges,
mixing noise) survives the phase-only round trip; smooth regions do not.

The transform is left-sided: F(u, v) = sum exp(-mu*2*pi*(ux/W + vy/H)) q(x, y)
with mu the unit pure transform axis. It reduces to two complex 2-D FFTs
via the orthogonal-plane split q = (a + b*mu) + (c + d*mu)*nu.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .image import resize_max_dim, validate_image

__all__ = [
    "SaliencyParams",
    "SaliencyMetrics",
    "to_quaternion_image",
    "eigen_axis",
    "qdft",
    "iqdft",
    "phase_only",
    "saliency_map",
    "metrics",
    "heatmap_u8",
]

GRAY_AXIS = (0.0, 1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0), 1.0 / np.sqrt(3.0))
_ZERO_NORM = 1e-12


@dataclass(frozen=True)
class SaliencyParams:
    """Working resolution and smoothing of the saliency pipeline."""

    work_max_dim: int = 128
    sigma: float = 3.0


@dataclass(frozen=True)
class SaliencyMetrics:
    integral: float  # sum of all map values
    max: float


def to_quaternion_image(img) -> np.ndarray:
    """RGB -> pure quaternion field (w=0, alpha premultiplied into i, j, k)."""
    arr = validate_image(img)
    q = np.zeros(arr.shape[:2] + (4,), dtype=np.float64)
    q[..., 1:4] = arr[..., :3] * arr[..., 3:4]
    return q


def _validate_quat_image(qimg) -> np.ndarray:
    q = np.asarray(qimg, dtype=np.float64)
    if q.ndim != 3 or q.shape[2] != 4:
        raise ValueError(f"expected (H, W, 4) quaternion field, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise ValueError("quaternion field contains non-finite values")
    return q


def eigen_axis(qimg) -> tuple[float, float, float, float]:
    """Unit pure quaternion along the principal axis of the color covariance.

    Falls back to the gray diagonal for (near-)constant images. The sign is
    fixed so the component sum is >= 0; on a zero sum, the first nonzero
    component is made positive.
    """
    q = _validate_quat_image(qimg)
    vec = q[..., 1:4].reshape(-1, 3)
    centered = vec - vec.mean(axis=0)
    cov = centered.T @ centered / len(vec)
    evals, evecs = np.linalg.eigh(cov)
    if evals[-1] <= 1e-30:
        return GRAY_AXIS
    axis = evecs[:, -1]
    s = axis.sum()
    if s < 0:
        axis = -axis
    elif s == 0:
        nz = axis[np.nonzero(axis)[0]]
        if len(nz) and nz[0] < 0:
            axis = -axis
    return (0.0, float(axis[0]), float(axis[1]), float(axis[2]))


def _axis_frame(axis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal (mu, nu, xi) frame from a unit pure axis, deterministically."""
    a = np.asarray(axis, dtype=np.float64)
    if a.shape != (4,):
        raise ValueError(f"axis must be a quaternion 4-tuple, got {axis!r}")
    if abs(a[0]) > 1e-9 or abs(np.linalg.norm(a[1:]) - 1.0) > 1e-9:
        raise ValueError(f"axis must be a unit pure quaternion, got {axis!r}")
    mu = a[1:4]
    basis = np.eye(3)
    e = basis[int(np.argmin(np.abs(mu)))]
    nu = np.cross(mu, e)
    nu = nu / np.linalg.norm(nu)
    xi = np.cross(mu, nu)
    return mu, nu, xi


def _split_planes(q: np.ndarray, mu, nu, xi) -> tuple[np.ndarray, np.ndarray]:
    vec = q[..., 1:4]
    a = q[..., 0]
    b = vec @ mu
    c = vec @ nu
    d = vec @ xi
    return a + 1j * b, c + 1j * d


def _join_planes(plane_a: np.ndarray, plane_c: np.ndarray, mu, nu, xi) -> np.ndarray:
    out = np.empty(plane_a.shape + (4,), dtype=np.float64)
    out[..., 0] = plane_a.real
    out[..., 1:4] = (
        plane_a.imag[..., None] * mu
        + plane_c.real[..., None] * nu
        + plane_c.imag[..., None] * xi
    )
    return out


def qdft(qimg, axis) -> np.ndarray:
    """Left-sided quaternion DFT along a unit pure axis."""
    q = _validate_quat_image(qimg)
    mu, nu, xi = _axis_frame(axis)
    pa, pc = _split_planes(q, mu, nu, xi)
    return _join_planes(np.fft.fft2(pa), np.fft.fft2(pc), mu, nu, xi)


def iqdft(spec, axis) -> np.ndarray:
    """Inverse of qdft (positive exponent, 1/(W*H) normalization)."""
    q = _validate_quat_image(spec)
    mu, nu, xi = _axis_frame(axis)
    pa, pc = _split_planes(q, mu, nu, xi)
    return _join_planes(np.fft.ifft2(pa), np.fft.ifft2(pc), mu, nu, xi)


def phase_only(spec) -> np.ndarray:
    """Normalize every coefficient to unit quaternion norm; tiny ones to zero."""
    q = _validate_quat_image(spec)
    norm = np.sqrt(np.sum(q * q, axis=-1, keepdims=True))
    return np.where(norm < _ZERO_NORM, 0.0, q / np.where(norm < _ZERO_NORM, 1.0, norm))


def saliency_map(img, params: SaliencyParams = SaliencyParams()) -> np.ndarray:
    """Unnormalized saliency map of an image at the working resolution.

    resize -> quaternion field -> eigen axis -> forward transform ->
    phase-only -> inverse transform -> squared quaternion norm ->
    Gaussian blur (truncated at 3 sigma, reflective borders).
    """
    arr = validate_image(img)
    work = resize_max_dim(arr, params.work_max_dim)
    q = to_quaternion_image(work)
    axis = eigen_axis(q)
    spec = qdft(q, axis)
    recon = iqdft(phase_only(spec), axis)
    energy = np.sum(recon * recon, axis=-1)
    if params.sigma > 0:
        energy = gaussian_filter(energy, sigma=params.sigma, truncate=3.0, mode="reflect")
    return np.maximum(energy, 0.0)


def metrics(sal_map) -> SaliencyMetrics:
    """Scalar summary of a map: total sum and maximum."""
    m = np.asarray(sal_map, dtype=np.float64)
    if m.size == 0:
        return SaliencyMetrics(0.0, 0.0)
    if m.min() < 0 or not np.all(np.isfinite(m)):
        raise ValueError("saliency map must be finite and non-negative")
    return SaliencyMetrics(integral=float(m.sum()), max=float(m.max()))


def heatmap_u8(sal_map) -> np.ndarray:
    """8-bit grayscale view, normalized per-image to max=1 (visualization only)."""
    m = np.asarray(sal_map, dtype=np.float64)
    peak = m.max()
    if peak <= 0:
        return np.zeros(m.shape, dtype=np.uint8)
    return np.round(m / peak * 255.0).astype(np.uint8)
