"""Tooth segmentation for periapical dental radiographs.

Pipeline: Butterworth + homomorphic enhancement, mean/Wiener/Gaussian
smoothing, root-canal-based rotation estimation, vertical integral
projection with valley detection, and weighted optimality/failure metrics.
"""

from .imagecore import Band, load_image, middle_band, rotate, save_image
from .preprocess import (
    ButterworthSpec,
    HomomorphicSpec,
    SmoothingSpec,
    butterworth_filter,
    butterworth_gain,
    gaussian_filter,
    homomorphic_filter,
    mean_filter,
    preprocess_pipeline,
    wiener_filter,
)
from .projection import ProjectionProfile, ValleySet, detect_valleys, smooth_profile, vertical_projection
from .rotation import (
    RotationEstimate,
    TraceConfig,
    TraceSet,
    apply_mode,
    estimate_rotation,
    fit_slope,
    iterate_rotation,
    row_maxima,
    trace_maxima,
)
from .segmentation import SegmentationConfig, SegmentationResult, count_correct, render_overlay, segment
from .evaluation import EvalMatrix, EvalReport, accumulate, failure, film_totals, optimality, report, sub_optimality
from .phantom import PhantomSpec, PhantomTruth, batch, default_batch_specs, generate

__version__ = "0.1.0"
