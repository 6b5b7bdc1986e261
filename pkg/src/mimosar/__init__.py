"""mimosar — simulation, backprojection focusing, and residual motion
compensation for automotive MIMO SAR."""

from .geometry import (
    ArrayConfig,
    GroundGrid,
    Trajectory,
    Vec3,
    range_history,
    unit_vector,
    vpc_positions,
    wavevector,
)
from .signal_sim import (
    DataCube,
    RadarConfig,
    Scatterer,
    Scene,
    apply_velocity_error,
    read_cube,
    simulate_range_compressed,
    write_cube,
)
from .tdbp import (
    ImageStack,
    SarImage,
    backproject_pulse,
    backproject_stack,
    coherent_sum,
    read_image,
    read_stack,
    write_image,
    write_stack,
)
from .moco import (
    Gcp,
    MocoError,
    MocoReport,
    PhaseScreenSet,
    autofocus,
    autofocus_refine,
    compensate,
    estimate_gcp_frequency,
    gcps_from_references,
    incoherent_mean,
    integrate_residual_velocity,
    phase_screens,
    reject_outliers,
    residual_doppler_height,
    select_gcp,
    solve_wls,
    unwrap_gcp_phase,
    write_gcp_csv,
    write_report_json,
)
from .metrics import (
    FocusMetrics,
    compute_focus_metrics,
    image_contrast,
    image_entropy,
    impulse_response_width,
    localization_error,
)

__version__ = "0.1.0"
