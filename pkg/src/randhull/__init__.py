"""Random polytopes as estimators of convex bodies.

Sample i.i.d. points in (or on) a body, take the support function of their
convex hull, and measure how fast it converges to the body's: sup deficits
over sphere nets, center-relative scaling distances, L^p deficits, plug-in
functionals, finite-sample deviation bounds, and the dented-ball family that
shows the rates are tight.
"""

from .geometry import (
    Ball,
    BodySpec,
    BumpBall,
    Ellipsoid,
    PolytopeV,
    ball_volume,
    body_from_dict,
    body_to_dict,
    bump_eta,
    bump_profile,
    c_alpha,
    canonical_center,
    cap_area_sphere,
    cap_volume_ball,
    contains,
    load_body,
    minkowski_functional,
    polar_body,
    polar_support_identity_check,
    save_body,
    sphere_area,
    support,
    support_batch,
    width_function,
)
from .nets import (
    Decomposition,
    SphereNet,
    build_net,
    certified_sup_deficit,
    decompose,
    load_net,
    save_net,
)
from .sampling import (
    SampleCloud,
    empirical_cap_probability,
    load_points,
    sample,
    save_points,
)
from .estimators import (
    DistanceResult,
    HullSupport,
    d_l_estimate,
    functional_s,
    functional_t,
    hausdorff_to_body,
    hull_support,
    lp_error,
)
from .bounds import (
    ClassParams,
    DeviationBound,
    MembershipReport,
    check_class_membership,
    class_params_boundary,
    class_params_smooth,
    deviation_bound,
    fit_class_l,
    make_deviation_bound,
    rate_exponent,
)
from .experiments import (
    DeviationReport,
    ExperimentConfig,
    RateReport,
    build_lower_bound_family,
    emit_report,
    load_experiment_config,
    run_deviation_experiment,
    run_rate_experiment,
)

__version__ = "0.1.0"
