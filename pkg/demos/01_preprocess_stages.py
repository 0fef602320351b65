"""Walk a noisy radiograph-like image through the enhancement cascade.

Generates a synthetic phantom, applies each preprocessing stage in turn
and prints simple statistics so the effect of every stage is visible.
The stage images are written next to this script as PGM files.
"""

from pathlib import Path

import numpy as np

from periseg import PhantomSpec, generate, save_image
from periseg.preprocess import ButterworthSpec, HomomorphicSpec, SmoothingSpec, pipeline_stages

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

spec = PhantomSpec(width=460, height=620, tooth_count=3, tilt_degrees=6.0,
                   canal_teeth=(1,), noise_sigma=10.0, seed=4)
img, _ = generate(spec)
save_image(img, out_dir / "stage_input.pgm")
print(f"input          mean={img.mean():7.2f}  std={img.std():6.2f}")

for name, stage in pipeline_stages(img, ButterworthSpec(), HomomorphicSpec(), SmoothingSpec()):
    save_image(stage, out_dir / f"stage_{name}.pgm")
    print(f"{name:<14} mean={stage.mean():7.2f}  std={stage.std():6.2f}")

print(f"\nstage images written to {out_dir}/")
