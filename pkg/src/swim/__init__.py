"""Two-dimensional conformal-map swimmer at low Reynolds number.

Shapes are images of the unit disc under ``z(ζ) = Wζ + X + Y/ζ + Z/(√2 ζ²)``
with real (W, Y, Z). The package evaluates the exact Stokes flow around such
a swimmer, the displacement and dissipation of closed strokes in shape space,
and searches for the stroke of least swimming drag on the unit-area surface.
"""

from swim.geometry import (
    ConeStatus,
    LocatedShape,
    ShapePoint,
    area,
    boundary_derivative,
    boundary_point,
    cone_classify,
    critical_points,
    project_to_unit_area,
    sample_boundary,
    self_intersects,
)
from swim.flow import DeformationRate, connection_A, power_closed_form, power_contour, velocity, with_connection
from swim.stroke import Stroke, StrokeMetrics, circle_stroke, displacement, drag, length, metrics

__version__ = "0.1.0"

__all__ = [
    "ConeStatus",
    "DeformationRate",
    "LocatedShape",
    "ShapePoint",
    "Stroke",
    "StrokeMetrics",
    "area",
    "boundary_derivative",
    "boundary_point",
    "circle_stroke",
    "cone_classify",
    "connection_A",
    "critical_points",
    "displacement",
    "drag",
    "length",
    "metrics",
    "power_closed_form",
    "power_contour",
    "project_to_unit_area",
    "sample_boundary",
    "self_intersects",
    "velocity",
    "with_connection",
]
