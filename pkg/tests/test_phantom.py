import json
from pathlib import Path

import numpy as np
import pytest

from periseg.imagecore import save_image
from periseg.phantom import (
    PhantomSpec,
    batch,
    default_batch_specs,
    generate,
    load_truth,
    save_truth,
)

GOLDEN = Path(__file__).resolve().parent / "golden"


def test_generate_shapes_and_range():
    spec = PhantomSpec(width=300, height=400, tooth_count=3)
    img, truth = generate(spec)
    assert img.shape == (400, 300)
    assert img.min() >= 0.0 and img.max() <= 255.0
    assert truth.tooth_count == 3
    assert len(truth.gap_masks) == 2
    assert len(truth.gap_centers) == 2
    assert len(truth.canal_centerlines) == 1


def test_generate_is_deterministic():
    spec = PhantomSpec(width=200, height=260, noise_sigma=8.0, seed=77, tooth_count=2)
    a, _ = generate(spec)
    b, _ = generate(spec)
    assert np.array_equal(a, b)
    c, _ = generate(PhantomSpec(width=200, height=260, noise_sigma=8.0, seed=78, tooth_count=2))
    assert not np.array_equal(a, c)


def test_generate_matches_golden_image(tmp_path):
    # freezes the noise generator and layout; regenerate the golden file
    # deliberately if either ever changes
    spec = PhantomSpec(width=120, height=160, tooth_count=2, gap_width=8,
                       tilt_degrees=5.0, canal_teeth=(0,), canal_width=6,
                       noise_sigma=8.0, seed=42)
    img, _ = generate(spec)
    p = tmp_path / "now.pgm"
    save_image(img, p)
    assert p.read_bytes() == (GOLDEN / "phantom_golden.pgm").read_bytes()


def test_untilted_levels_and_gap_columns():
    spec = PhantomSpec(width=400, height=500, tooth_count=2, gap_width=20,
                       tilt_degrees=0.0, noise_sigma=0.0, canal_teeth=(1,))
    img, truth = generate(spec)
    assert img[0, 0] == spec.air
    h, w = img.shape
    center = truth.gap_centers[0]
    assert img[h // 2, int(round(center))] == spec.gum  # gap shows gum level
    # canal level present inside the marked tooth
    line = truth.canal_centerlines[0]
    assert line["slope"] == 0.0
    assert img[h // 2, int(round(line["col_at_center_row"]))] == spec.canal
    # dentin on the tooth body away from the canal
    assert img[h // 2, int(round(center)) - 30] == spec.dentin


def test_gap_masks_between_tooth_masks():
    spec = PhantomSpec(width=350, height=450, tooth_count=3, tilt_degrees=0.0,
                       noise_sigma=0.0)
    _, truth = generate(spec)
    for g, gap in enumerate(truth.gap_masks):
        assert gap.any()
        assert not (gap & truth.tooth_masks[g]).any()
        assert not (gap & truth.tooth_masks[g + 1]).any()
        cols = np.nonzero(gap.any(axis=0))[0]
        assert cols.mean() == pytest.approx(truth.gap_centers[g], abs=0.5)


def test_tilted_masks_follow_scene():
    spec = PhantomSpec(width=320, height=420, tooth_count=2, tilt_degrees=10.0,
                       noise_sigma=0.0, canal_teeth=(0,))
    img, truth = generate(spec)
    # the scene is darker than dentin wherever no tooth mask covers it
    outside = ~(truth.tooth_masks[0] | truth.tooth_masks[1])
    assert img[outside].max() < spec.dentin
    # mask columns drift with row in the tilt direction
    mask = truth.tooth_masks[0]
    rows = np.nonzero(mask.any(axis=1))[0]
    top, bottom = rows[len(rows) // 4], rows[3 * len(rows) // 4]
    col_top = np.nonzero(mask[top])[0].mean()
    col_bottom = np.nonzero(mask[bottom])[0].mean()
    slope = (col_bottom - col_top) / (bottom - top)
    assert slope == pytest.approx(np.tan(np.radians(10.0)), abs=0.03)


def test_canal_centerline_geometry_when_tilted():
    spec = PhantomSpec(width=360, height=480, tooth_count=2, tilt_degrees=-7.0,
                       noise_sigma=0.0, canal_teeth=(1,))
    img, truth = generate(spec)
    h, w = img.shape
    line = truth.canal_centerlines[0]
    assert line["slope"] == pytest.approx(np.tan(np.radians(-7.0)))
    # the described line must run through bright canal pixels
    cy = (h - 1) / 2.0
    for dr in (-60, 0, 60):
        r = int(round(cy + dr))
        c = int(round(line["col_at_center_row"] + line["slope"] * dr))
        assert img[r, c] == pytest.approx(spec.canal, abs=1e-9)


def test_spec_validation():
    with pytest.raises(ValueError):
        PhantomSpec(tooth_count=0)
    with pytest.raises(ValueError):
        PhantomSpec(tooth_count=7)
    with pytest.raises(ValueError):
        PhantomSpec(air=150.0, gum=120.0)
    with pytest.raises(ValueError):
        PhantomSpec(noise_sigma=-1.0)
    with pytest.raises(ValueError):
        PhantomSpec(tooth_count=2, canal_teeth=(2,))
    with pytest.raises(ValueError):
        generate(PhantomSpec(width=60, height=100, tooth_count=6))


def test_spec_json_roundtrip():
    spec = PhantomSpec(width=222, height=333, tooth_count=3, canal_teeth=(0, 2),
                       tilt_degrees=-3.5, seed=9)
    assert PhantomSpec.from_json_dict(spec.to_json_dict()) == spec


def test_truth_save_load_roundtrip(tmp_path):
    spec = PhantomSpec(width=160, height=200, tooth_count=2, tilt_degrees=4.0,
                       noise_sigma=0.0)
    _, truth = generate(spec)
    save_truth(truth, tmp_path / "t.json", "t")
    back = load_truth(tmp_path / "t.json")
    assert back.tooth_count == truth.tooth_count
    assert back.gap_centers == truth.gap_centers
    assert back.tilt_degrees == truth.tilt_degrees
    assert back.canal_centerlines == truth.canal_centerlines
    for a, b in zip(back.gap_masks, truth.gap_masks):
        assert np.array_equal(a, b)
    for a, b in zip(back.tooth_masks, truth.tooth_masks):
        assert np.array_equal(a, b)


def test_default_batch_specs_cover_study_shape():
    specs = default_batch_specs(51)
    assert len(specs) == 51
    assert {s.tooth_count for s in specs} == {2, 3, 4, 5}
    tilts = [s.tilt_degrees for s in specs]
    assert min(tilts) == -15.0 and max(tilts) == 15.0
    assert all(450 <= s.width <= 650 and 600 <= s.height <= 850 for s in specs)
    assert len({s.seed for s in specs}) == 51
    # deterministic
    assert default_batch_specs(51) == specs


def test_batch_writes_manifest_and_refuses_overwrite(tmp_path):
    specs = [PhantomSpec(width=140, height=180, tooth_count=2, noise_sigma=0.0,
                         tilt_degrees=0.0)]
    manifest = batch(specs, tmp_path / "out")
    doc = json.loads(manifest.read_text())
    assert len(doc["phantoms"]) == 1
    entry = doc["phantoms"][0]
    assert (tmp_path / "out" / entry["image"]).exists()
    assert (tmp_path / "out" / entry["truth"]).exists()
    assert PhantomSpec.from_json_dict(entry["spec"]) == specs[0]
    with pytest.raises(FileExistsError):
        batch(specs, tmp_path / "out")
    batch(specs, tmp_path / "out", force=True)  # force allows rewrite
    with pytest.raises(ValueError):
        batch([], tmp_path / "out2")
