"""Enhancement cascade: Butterworth and homomorphic frequency filtering
followed by mean -> adaptive Wiener -> Gaussian smoothing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import ndimage

# default cutoff radius as a fraction of the Nyquist radius min(w, h)/2
AUTO_CUTOFF_FRACTION = 0.3


def auto_cutoff(shape) -> float:
    h, w = shape
    return AUTO_CUTOFF_FRACTION * min(w, h) / 2.0


@dataclass(frozen=True)
class ButterworthSpec:
    """Low-pass Butterworth transfer function parameters.

    cutoff=None means "auto": 0.3 * min(w, h) / 2 resolved per image.
    """

    order: int = 2
    cutoff: Optional[float] = None
    dc_gain: float = 1.0

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.cutoff is not None and not self.cutoff > 0:
            raise ValueError("cutoff must be > 0")
        if not self.dc_gain > 0:
            raise ValueError("dc_gain must be > 0")

    def resolved(self, shape) -> "ButterworthSpec":
        if self.cutoff is not None:
            return self
        return ButterworthSpec(self.order, auto_cutoff(shape), self.dc_gain)


@dataclass(frozen=True)
class HomomorphicSpec:
    """High-emphasis transfer in the log-intensity domain."""

    gamma_low: float = 0.5
    gamma_high: float = 1.5
    cutoff: Optional[float] = None
    order: int = 2

    def __post_init__(self):
        if not 0 < self.gamma_low < self.gamma_high:
            raise ValueError("need 0 < gamma_low < gamma_high")
        if self.cutoff is not None and not self.cutoff > 0:
            raise ValueError("cutoff must be > 0")
        if self.order < 1:
            raise ValueError("order must be >= 1")

    def resolved(self, shape) -> "HomomorphicSpec":
        if self.cutoff is not None:
            return self
        return HomomorphicSpec(self.gamma_low, self.gamma_high, auto_cutoff(shape), self.order)


@dataclass(frozen=True)
class SmoothingSpec:
    """Spatial smoothing chain parameters; a None field skips that stage."""

    mean_size: Optional[int] = 15
    wiener_rows: Optional[int] = 10
    wiener_cols: Optional[int] = 10
    gaussian_sigma: Optional[float] = 2.0
    gaussian_size: int = 9

    def __post_init__(self):
        if self.mean_size is not None and (self.mean_size % 2 == 0 or self.mean_size < 3):
            raise ValueError("mean_size must be odd and >= 3")
        if (self.wiener_rows is None) != (self.wiener_cols is None):
            raise ValueError("wiener_rows and wiener_cols must be set together")
        if self.wiener_rows is not None and (self.wiener_rows < 2 or self.wiener_cols < 2):
            raise ValueError("wiener neighborhood dims must be >= 2")
        if self.gaussian_sigma is not None:
            if not self.gaussian_sigma > 0:
                raise ValueError("gaussian_sigma must be > 0")
            if self.gaussian_size % 2 == 0 or self.gaussian_size < 1:
                raise ValueError("gaussian_size must be odd")


def butterworth_gain(spec: ButterworthSpec, d):
    """G(d) with G^2 = g0^2 / (1 + (d/d0)^(2n)); monotone non-increasing."""
    if spec.cutoff is None:
        raise ValueError("gain evaluation needs a concrete cutoff (use spec.resolved)")
    d = np.asarray(d, dtype=np.float64)
    return spec.dc_gain / np.sqrt(1.0 + (d / spec.cutoff) ** (2 * spec.order))


def apply_frequency_filter(img, gain_fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Pointwise radial gain in the 2-D DFT domain; real part, clamped >= 0.

    gain_fn receives the Euclidean distance from the centered DC bin in
    DFT index space.  Works for arbitrary (non power-of-two) dimensions.
    """
    a = np.asarray(img, dtype=np.float64)
    h, w = a.shape
    fy = np.fft.fftfreq(h) * h
    fx = np.fft.fftfreq(w) * w
    d = np.hypot(fy[:, None], fx[None, :])
    out = np.fft.ifft2(np.fft.fft2(a) * gain_fn(d)).real
    return np.maximum(out, 0.0)


def butterworth_filter(img, spec: ButterworthSpec = ButterworthSpec()) -> np.ndarray:
    a = np.asarray(img, dtype=np.float64)
    spec = spec.resolved(a.shape)
    return apply_frequency_filter(a, lambda d: butterworth_gain(spec, d))


def homomorphic_filter(img, spec: HomomorphicSpec = HomomorphicSpec()) -> np.ndarray:
    """High-emphasis filtering of log(1 + pixel); output clamped to [0, 255]."""
    a = np.asarray(img, dtype=np.float64)
    spec = spec.resolved(a.shape)
    gl, gh, d0, n = spec.gamma_low, spec.gamma_high, spec.cutoff, spec.order

    def gain(d):
        return (gh - gl) * (1.0 - 1.0 / (1.0 + (d / d0) ** (2 * n))) + gl

    filtered = apply_frequency_filter(np.log1p(a), gain)
    return np.clip(np.expm1(filtered), 0.0, 255.0)


def _slices(shape, axis, start, stop):
    idx = [slice(None)] * len(shape)
    idx[axis] = slice(start, stop)
    return tuple(idx)


def _correlate1d_symmetric(img, kernel, axis: int) -> np.ndarray:
    """1-D correlation with a symmetric odd kernel, replicated borders.

    Terms are accumulated as k[c]*x + sum_j k[c-j]*(x[-j] + x[+j]) so that
    horizontal mirroring commutes bit-exactly with the filter.
    """
    k = np.asarray(kernel, dtype=np.float64)
    c = len(k) // 2
    pad = [(0, 0)] * img.ndim
    pad[axis] = (c, c)
    xp = np.pad(img, pad, mode="edge")
    n = img.shape[axis]
    out = k[c] * img
    for j in range(1, c + 1):
        lo = xp[_slices(xp.shape, axis, c - j, c - j + n)]
        hi = xp[_slices(xp.shape, axis, c + j, c + j + n)]
        out += k[c - j] * (lo + hi)
    return out


def mean_filter(img, size: int) -> np.ndarray:
    """size x size arithmetic mean, replicated borders."""
    a = np.asarray(img, dtype=np.float64)
    if size % 2 == 0 or size < 3 or size > min(a.shape):
        raise ValueError(f"mean window {size} must be odd, >= 3 and fit the image")
    k = np.full(size, 1.0 / size)
    return _correlate1d_symmetric(_correlate1d_symmetric(a, k, axis=1), k, axis=0)


def gaussian_kernel(sigma: float, size: int) -> np.ndarray:
    if not sigma > 0 or size % 2 == 0:
        raise ValueError("sigma must be > 0 and size odd")
    c = size // 2
    x = np.arange(size, dtype=np.float64) - c
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_filter(img, sigma: float = 2.0, size: int = 9) -> np.ndarray:
    """Separable truncated Gaussian, kernel normalized to 1, replicated borders."""
    a = np.asarray(img, dtype=np.float64)
    k = gaussian_kernel(sigma, size)
    return _correlate1d_symmetric(_correlate1d_symmetric(a, k, axis=1), k, axis=0)


def wiener_filter(img, rows: int = 10, cols: int = 10) -> np.ndarray:
    """Pixel-wise adaptive Wiener denoising from local mean/variance.

    Noise power is estimated as the mean of all local variances.  Even
    windows are anchored so the target pixel sits at offset range
    [-(k//2), k - k//2 - 1] (position (5,5) of a 10x10 block).
    """
    a = np.asarray(img, dtype=np.float64)
    if rows < 2 or cols < 2:
        raise ValueError("wiener neighborhood dims must be >= 2")
    mu = ndimage.uniform_filter(a, size=(rows, cols), mode="nearest")
    mu2 = ndimage.uniform_filter(a * a, size=(rows, cols), mode="nearest")
    var = np.maximum(mu2 - mu * mu, 0.0)
    noise = var.mean()
    den = np.maximum(var, noise)
    with np.errstate(invalid="ignore"):
        coeff = np.where(den > 0, np.maximum(var - noise, 0.0) / den, 0.0)
    return mu + coeff * (a - mu)


def preprocess_pipeline(
    img,
    bw: Optional[ButterworthSpec] = ButterworthSpec(),
    hm: Optional[HomomorphicSpec] = HomomorphicSpec(),
    sm: Optional[SmoothingSpec] = SmoothingSpec(),
) -> np.ndarray:
    """Butterworth -> homomorphic -> mean -> Wiener -> Gaussian, in order.

    Any spec (or any SmoothingSpec field) set to None skips that stage;
    skipping everything returns the input unchanged.
    """
    out = np.asarray(img, dtype=np.float64).copy()
    if bw is not None:
        out = butterworth_filter(out, bw)
    if hm is not None:
        out = homomorphic_filter(out, hm)
    if sm is not None:
        if sm.mean_size is not None:
            out = mean_filter(out, sm.mean_size)
        if sm.wiener_rows is not None:
            out = wiener_filter(out, sm.wiener_rows, sm.wiener_cols)
        if sm.gaussian_sigma is not None:
            out = gaussian_filter(out, sm.gaussian_sigma, sm.gaussian_size)
    return out


def pipeline_stages(img, bw, hm, sm):
    """Like preprocess_pipeline but yields (stage_name, image) after each stage."""
    out = np.asarray(img, dtype=np.float64).copy()
    if bw is not None:
        out = butterworth_filter(out, bw)
        yield "butterworth", out
    if hm is not None:
        out = homomorphic_filter(out, hm)
        yield "homomorphic", out
    if sm is not None:
        if sm.mean_size is not None:
            out = mean_filter(out, sm.mean_size)
            yield "mean", out
        if sm.wiener_rows is not None:
            out = wiener_filter(out, sm.wiener_rows, sm.wiener_cols)
            yield "wiener", out
        if sm.gaussian_sigma is not None:
            out = gaussian_filter(out, sm.gaussian_sigma, sm.gaussian_size)
            yield "gaussian", out
