"""Compact shape trees for 2-D shape correspondence.

The package is organised by concern:

``boundary`` / ``raster``
    boundary ingestion and geometric primitives (arc length, centroid,
    resampling, curvature);
``sampling``
    scale- and rotation-invariant sample placement;
``shape_tree``
    trees, matching costs and O(n^2) correspondence search;
``invariants_spatial`` / ``invariants_fourier``
    rotation and scale invariant descriptors;
``ellipse_lab``
    the half-ellipse curvature experiments;
``cli``
    the ``shapetree`` command.
"""

from .boundary import (
    CurvatureProfile,
    SampledBoundary,
    centroid,
    curvature_profile,
    from_points,
    make_ellipse,
    parse_boundary,
    resample_uniform,
    total_arc_length,
)
from .errors import (
    AlignmentError,
    ArgumentError,
    DegenerateShapeError,
    NoDistinctExtremaError,
    ParseError,
    QuadratureAccuracyError,
    ShapeTreeError,
    TraceError,
    UnstableFrequencyError,
)
from .raster import trace_raster_boundary
from .sampling import SamplePointSet, sample
from .shape_tree import (
    CompactShapeTree,
    MatchReport,
    SampledShape,
    Weights,
    build_tree,
    match_shapes,
    shape_from_samples,
)

__version__ = "0.1.0"
