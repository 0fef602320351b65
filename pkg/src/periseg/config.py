"""Human-readable key=value config file for the segmentation pipeline.

Every default written by default_config_text() matches the module defaults;
"auto" marks image-size-dependent values, "off" disables a stage.
CLI flag > config file > default.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Optional

from .preprocess import ButterworthSpec, HomomorphicSpec, SmoothingSpec
from .rotation import TraceConfig
from .segmentation import SegmentationConfig


class ConfigError(ValueError):
    """Malformed config file contents."""


_DEFAULTS = {
    "butterworth.enabled": "true",
    "butterworth.order": "2",
    "butterworth.cutoff": "auto",
    "butterworth.dc_gain": "1.0",
    "homomorphic.enabled": "true",
    "homomorphic.gamma_low": "0.5",
    "homomorphic.gamma_high": "1.5",
    "homomorphic.cutoff": "auto",
    "homomorphic.order": "2",
    "smoothing.mean_size": "15",
    "smoothing.wiener_rows": "10",
    "smoothing.wiener_cols": "10",
    "smoothing.gaussian_sigma": "2.0",
    "smoothing.gaussian_size": "9",
    "trace.prominence_fraction": "0.05",
    "trace.gating_distance": "3",
    "trace.min_trace_fraction": "0.5",
    "segment.min_separation": "auto",
    "segment.edge_margin": "auto",
    "segment.profile_window": "auto",
    "segment.mode": "image-rotate",
    "segment.tol": "0.25",
    "segment.max_iter": "5",
}


def parse_config_text(text: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def load_config_file(path) -> Dict[str, str]:
    return parse_config_text(Path(path).read_text())


def default_config_text() -> str:
    return "\n".join(f"{k} = {v}" for k, v in _DEFAULTS.items()) + "\n"


def _get(values: Dict[str, str], key: str) -> str:
    return values.get(key, _DEFAULTS[key])


def _maybe_int(s: str) -> Optional[int]:
    return None if s.lower() in ("auto", "off", "none") else int(s)


def _maybe_float(s: str) -> Optional[float]:
    return None if s.lower() in ("auto", "off", "none") else float(s)


def _bool(s: str) -> bool:
    if s.lower() in ("true", "yes", "1", "on"):
        return True
    if s.lower() in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected boolean, got {s!r}")


def build_segmentation_config(
    values: Optional[Dict[str, str]] = None,
    mode: Optional[str] = None,
) -> SegmentationConfig:
    """Assemble a SegmentationConfig from parsed key=value pairs."""
    v = values or {}
    try:
        bw = None
        if _bool(_get(v, "butterworth.enabled")):
            bw = ButterworthSpec(
                order=int(_get(v, "butterworth.order")),
                cutoff=_maybe_float(_get(v, "butterworth.cutoff")),
                dc_gain=float(_get(v, "butterworth.dc_gain")),
            )
        hm = None
        if _bool(_get(v, "homomorphic.enabled")):
            hm = HomomorphicSpec(
                gamma_low=float(_get(v, "homomorphic.gamma_low")),
                gamma_high=float(_get(v, "homomorphic.gamma_high")),
                cutoff=_maybe_float(_get(v, "homomorphic.cutoff")),
                order=int(_get(v, "homomorphic.order")),
            )
        sigma = _maybe_float(_get(v, "smoothing.gaussian_sigma"))
        sm = SmoothingSpec(
            mean_size=_maybe_int(_get(v, "smoothing.mean_size")),
            wiener_rows=_maybe_int(_get(v, "smoothing.wiener_rows")),
            wiener_cols=_maybe_int(_get(v, "smoothing.wiener_cols")),
            gaussian_sigma=sigma,
            gaussian_size=int(_get(v, "smoothing.gaussian_size")),
        )
        if sm.mean_size is None and sm.wiener_rows is None and sm.gaussian_sigma is None:
            sm = None
        trace = TraceConfig(
            prominence_fraction=float(_get(v, "trace.prominence_fraction")),
            gating_distance=float(_get(v, "trace.gating_distance")),
            min_trace_fraction=float(_get(v, "trace.min_trace_fraction")),
        )
        return SegmentationConfig(
            butterworth=bw,
            homomorphic=hm,
            smoothing=sm,
            trace=trace,
            min_separation=_maybe_int(_get(v, "segment.min_separation")),
            edge_margin=_maybe_int(_get(v, "segment.edge_margin")),
            profile_window=_maybe_int(_get(v, "segment.profile_window")),
            mode=mode or _get(v, "segment.mode"),
            tol=float(_get(v, "segment.tol")),
            max_iter=int(_get(v, "segment.max_iter")),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
