"""Synthetic periapical-radiograph phantoms with exact ground truth.

Teeth are rounded rectangles at dentin level on a gum band over an air
background; selected teeth carry a bright vertical root-canal strip.  The
scene is tilted by a known angle and seeded Gaussian noise (numpy PCG64,
``np.random.default_rng(seed)``) is added, so every image is reproducible
bit for bit from its spec.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .imagecore import rotate, round_half_up, save_image, load_image

# scene layout as fractions of the image extent
SIDE_MARGIN_FRAC = 0.055
GUM_TOP_FRAC = 0.06
GUM_BOTTOM_FRAC = 0.94
TOOTH_TOP_FRAC = 0.12
TOOTH_BOTTOM_FRAC = 0.88
CORNER_RADIUS_FRAC = 0.15


@dataclass(frozen=True)
class PhantomSpec:
    width: int = 500
    height: int = 700
    tooth_count: int = 4
    gap_width: int = 16
    tilt_degrees: float = 0.0
    canal_teeth: Tuple[int, ...] = (1,)
    air: float = 30.0
    gum: float = 120.0
    dentin: float = 200.0
    canal: float = 250.0
    canal_width: int = 10
    noise_sigma: float = 8.0
    seed: int = 0

    def __post_init__(self):
        if not (1 <= self.tooth_count <= 6):
            raise ValueError("tooth_count must be in 1..6")
        if not (0 <= self.air < self.gum < self.dentin < self.canal <= 255):
            raise ValueError("need air < gum < dentin < canal within [0, 255]")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if any(not 0 <= t < self.tooth_count for t in self.canal_teeth):
            raise ValueError("canal_teeth indices out of range")

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["canal_teeth"] = list(self.canal_teeth)
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "PhantomSpec":
        d = dict(d)
        d["canal_teeth"] = tuple(d.get("canal_teeth", ()))
        return cls(**d)


@dataclass
class PhantomTruth:
    gap_masks: List[np.ndarray]
    gap_centers: List[float]
    tilt_degrees: float
    canal_centerlines: List[Dict[str, float]]
    tooth_masks: List[np.ndarray]

    @property
    def tooth_count(self) -> int:
        return len(self.tooth_masks)


def _rounded_rect_mask(h, w, r0, r1, c0, c1, radius) -> np.ndarray:
    rr, cc = np.ogrid[0:h, 0:w]
    core = (rr >= r0) & (rr < r1) & (cc >= c0) & (cc < c1)
    if radius <= 0:
        return core
    out = core.copy()
    for cr, ccen in (
        (r0 + radius, c0 + radius),
        (r0 + radius, c1 - 1 - radius),
        (r1 - 1 - radius, c0 + radius),
        (r1 - 1 - radius, c1 - 1 - radius),
    ):
        corner_rows = (rr < r0 + radius) if cr == r0 + radius else (rr > r1 - 1 - radius)
        corner_cols = (cc < c0 + radius) if ccen == c0 + radius else (cc > c1 - 1 - radius)
        quadrant = corner_rows & corner_cols
        keep = (rr - cr) ** 2 + (cc - ccen) ** 2 <= radius * radius
        out &= ~(quadrant & ~keep)
    return out


def _tilt_mask(mask: np.ndarray, degrees: float) -> np.ndarray:
    if degrees == 0:
        return mask.copy()
    return rotate(mask.astype(np.float64), degrees) > 0.5


def generate(spec: PhantomSpec) -> Tuple[np.ndarray, PhantomTruth]:
    """Render one phantom image plus its ground truth (masks in final coords)."""
    h, w, k = spec.height, spec.width, spec.tooth_count
    margin = round_half_up(SIDE_MARGIN_FRAC * w)
    avail = w - 2 * margin
    tooth_w = (avail - (k - 1) * spec.gap_width) / k
    if tooth_w < max(8, spec.canal_width + 4):
        raise ValueError("infeasible geometry: teeth too narrow for the given spec")

    gum_r0, gum_r1 = round_half_up(GUM_TOP_FRAC * h), round_half_up(GUM_BOTTOM_FRAC * h)
    tooth_r0, tooth_r1 = round_half_up(TOOTH_TOP_FRAC * h), round_half_up(TOOTH_BOTTOM_FRAC * h)
    radius = round_half_up(CORNER_RADIUS_FRAC * min(tooth_w, tooth_r1 - tooth_r0))

    scene = np.full((h, w), spec.air, dtype=np.float64)
    scene[gum_r0:gum_r1, margin : w - margin] = spec.gum

    tooth_masks = []
    gap_masks = []
    gap_centers = []
    canal_lines = []
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    tan_t = np.tan(np.radians(spec.tilt_degrees))
    cos_t = np.cos(np.radians(spec.tilt_degrees))

    bounds = []  # integer (c0, c1) per tooth
    for t in range(k):
        c0 = margin + round_half_up(t * (tooth_w + spec.gap_width))
        c1 = margin + round_half_up(t * (tooth_w + spec.gap_width) + tooth_w)
        bounds.append((c0, c1))

    for t, (c0, c1) in enumerate(bounds):
        mask = _rounded_rect_mask(h, w, tooth_r0, tooth_r1, c0, c1, radius)
        scene[mask] = spec.dentin
        tooth_masks.append(mask)

    for t, (c0, c1) in enumerate(bounds):
        if t in spec.canal_teeth:
            xc = (c0 + c1 - 1) / 2.0
            s0 = int(round(xc - spec.canal_width / 2.0))
            strip = np.zeros((h, w), dtype=bool)
            strip[tooth_r0:tooth_r1, s0 : s0 + spec.canal_width] = True
            strip &= tooth_masks[t]
            scene[strip] = spec.canal
            canal_lines.append(
                {
                    "slope": float(tan_t),
                    "col_at_center_row": float(cx + (xc - cx) / cos_t),
                }
            )

    for t in range(k - 1):
        g0, g1 = bounds[t][1], bounds[t + 1][0]
        gap_centers.append((g0 + g1 - 1) / 2.0)
        gmask = np.zeros((h, w), dtype=bool)
        gmask[tooth_r0:tooth_r1, g0:g1] = True
        gap_masks.append(gmask)

    if spec.tilt_degrees != 0:
        scene = rotate(scene, spec.tilt_degrees)
        tooth_masks = [_tilt_mask(m, spec.tilt_degrees) for m in tooth_masks]
        gap_masks = [_tilt_mask(m, spec.tilt_degrees) for m in gap_masks]

    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        scene = scene + rng.normal(0.0, spec.noise_sigma, scene.shape)
    scene = np.clip(scene, 0.0, 255.0)

    truth = PhantomTruth(gap_masks, gap_centers, spec.tilt_degrees, canal_lines, tooth_masks)
    return scene, truth


def save_truth(truth: PhantomTruth, path, mask_prefix) -> None:
    """Write truth JSON plus per-mask PGM files next to it."""
    path = Path(path)
    gap_paths, tooth_paths = [], []
    for i, m in enumerate(truth.gap_masks):
        p = f"{mask_prefix}_gap{i:02d}.pgm"
        save_image(m.astype(np.float64) * 255.0, path.parent / p)
        gap_paths.append(p)
    for i, m in enumerate(truth.tooth_masks):
        p = f"{mask_prefix}_tooth{i:02d}.pgm"
        save_image(m.astype(np.float64) * 255.0, path.parent / p)
        tooth_paths.append(p)
    doc = {
        "gap_centers": truth.gap_centers,
        "tilt_degrees": truth.tilt_degrees,
        "canal_centerlines": truth.canal_centerlines,
        "gap_masks": gap_paths,
        "tooth_masks": tooth_paths,
    }
    path.write_text(json.dumps(doc, indent=2))


def load_truth(path) -> PhantomTruth:
    path = Path(path)
    doc = json.loads(path.read_text())
    gap_masks = [load_image(path.parent / p) > 127 for p in doc["gap_masks"]]
    tooth_masks = [load_image(path.parent / p) > 127 for p in doc["tooth_masks"]]
    return PhantomTruth(
        gap_masks,
        list(doc["gap_centers"]),
        float(doc["tilt_degrees"]),
        list(doc["canal_centerlines"]),
        tooth_masks,
    )


def default_batch_specs(count: int = 51) -> List[PhantomSpec]:
    """Deterministic desk-scale stand-in for the 51-film dataset.

    Spans tooth counts 2..5, tilts in [-15, 15] degrees, widths in
    [450, 650] and heights in [600, 850], noise sigma 8.
    """
    specs = []
    for i in range(count):
        k = 2 + i % 4
        tilt = -15.0 + 30.0 * i / max(1, count - 1)
        width = 450 + round_half_up(200.0 * ((i * 7) % count) / max(1, count - 1))
        height = 600 + round_half_up(250.0 * ((i * 11) % count) / max(1, count - 1))
        canals = (i % k,) if k < 4 else (i % k, (i + 2) % k)
        specs.append(
            PhantomSpec(
                width=width,
                height=height,
                tooth_count=k,
                tilt_degrees=round(tilt, 2),
                canal_teeth=canals,
                noise_sigma=8.0,
                seed=1000 + i,
            )
        )
    return specs


def batch(specs: Sequence[PhantomSpec], out_dir, force: bool = False) -> Path:
    """Write images, truth files and a manifest; returns the manifest path."""
    if not specs:
        raise ValueError("empty spec list")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, spec in enumerate(specs):
        img_name = f"phantom_{i:03d}.pgm"
        truth_name = f"truth_{i:03d}.json"
        img_path = out_dir / img_name
        truth_path = out_dir / truth_name
        if not force and (img_path.exists() or truth_path.exists()):
            raise FileExistsError(f"{img_path} exists (use force to overwrite)")
        img, truth = generate(spec)
        save_image(img, img_path)
        save_truth(truth, truth_path, f"truth_{i:03d}")
        entries.append({"image": img_name, "truth": truth_name, "spec": spec.to_json_dict()})
    manifest = out_dir / "manifest.json"
    manifest.write_text(json.dumps({"phantoms": entries}, indent=2))
    return manifest
