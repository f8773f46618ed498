"""twizzle: helicoidal (twizzler) CMC surfaces in R^3, S^3 and H^3.

The library builds screw-motion surfaces over planar base curves, verifies
the flux-conservation characterization of constant mean curvature both in
closed form and by independent quadrature, relates it to the treadmillsled
picture, and generates CMC base curves from the first-order condition.
"""

from .conservation import (
    ConservationData,
    FluxReport,
    check_constancy,
    conserved_quantity,
    flux_conormal,
    flux_shaving,
)
from .curve import (
    BaseCurve,
    SupportCurve,
    from_support,
    kinematics,
    read_curve_csv,
    support_parameterize,
    write_curve_csv,
)
from .errors import TwizzleError
from .solver import SolverConfig, solve_h3, solve_r3, solve_s3
from .spaceform import EUCLIDEAN3, HYPERBOLIC3, SPHERE3, SpaceForm, boost, from_name, inner, killing_field, project_tangent
from .treadmill import (
    TreadmillPath,
    equivalence_check,
    reconstruct,
    support_tau,
    treadmill,
    treadmill_residual,
)
from .twizzler import (
    FrameAtPoint,
    FundamentalData,
    Mesh,
    Twizzler,
    fundamental_forms,
    helix_frame,
    immerse,
    sample_mesh,
    write_obj,
)

__version__ = "0.1.0"
