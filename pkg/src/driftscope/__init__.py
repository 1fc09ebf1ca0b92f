"""Drift analysis for labeled streams.

Windowed histogram summaries over shifting windows, adaptive-window drift
detection with a Hoeffding mean-shift test, drift localization that aligns
window boundaries with drift points, and deterministic SVG timeline
diagrams.
"""

from .analysis import (
    AlignmentResult,
    ContinuousRegion,
    FeatureReport,
    FeatureStatus,
    LocalizationReport,
    align_drift,
    filter_features,
    localize,
    ranked_features,
)
from .detector import (
    DriftDetector,
    DriftReport,
    HoeffdingAdaptiveDetector,
    detect_stream,
    window_size_profile,
)
from .generators import (
    CirclesConfig,
    Sine1Config,
    generate_circles,
    generate_sine1,
    true_drift_points,
)
from .histograms import (
    Histogram,
    MeanSeries,
    WindowSummary,
    mean_series,
    summarize_stream,
    summarize_window,
    tv_distance,
)
from .render import (
    PhtFigure,
    RenderSpec,
    build_pht_figure,
    render_parallel_histograms,
    render_pht,
)
from .stream import (
    CsvFormatError,
    Sample,
    StreamSchema,
    Window,
    WindowSpec,
    load_csv,
    slice_windows,
    write_csv,
)

__version__ = "0.1.0"
