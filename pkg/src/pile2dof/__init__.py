"""Reference-free total displacement of piles from two-axis accelerometers.

Dynamic displacement comes from a regularized FIR filter on the top
acceleration; pseudo-static displacement comes from tilt, either with the
fixed-base cantilever (top rotation only) or the partially fixed pile (top
and ground-level rotations).
"""

__version__ = "0.1.0"

from .beam import BeamSection, PileGeometry, delta_1dof, delta_2dof, fixity_ratio
from .beam import forward_cantilever, forward_pile
from .fir import FirConfig, FirFilter, build_fir, estimate_dynamic, optimal_lambda
from .fir import second_difference_matrix
from .inclination import ChannelPair, InclinationConfig, angle_from_axes, angle_series
from .inclination import pseudo_static_angle, required_resolution
from .metrics import EstimationResult, ScoreRow, compare_methods, peak_error, rms_error
from .metrics import total_displacement
from .series import TimeSeries, rms, sma_filter, subtract
from .synth import SensorEventRecord, TrainEventSpec, builtin_catalog, generate_event
from .synth import run_pipeline
