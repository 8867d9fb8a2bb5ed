"""Numerical diagnostics for leaves of holomorphic foliations uniformized by
Fuchsian groups: disk-likeness functions, horodisk injectivity, inductive
group constructions, local models near singular points and current masses."""

from .arcs import BoundaryArcSet
from .certified import CertifiedValue
from .constructor import (
    ConstraintViolation,
    ConstructionError,
    ConstructionState,
    coverage_check,
    fullmeasure_construct,
    limitgroup_hypotheses,
    next_generator,
)
from .currents import (
    AnalyticMapSpec,
    annulus_cover,
    deck_generator,
    derivative_bound_profile,
    mass_curve,
    nevanlinna_mass,
    ray_divergence,
)
from .group import (
    FuchsianGroupSpec,
    ResourceError,
    boundary_stabilizer,
    convergence_sum,
    cyclic_group,
    dirichlet_domain,
    displacement,
    fundamental_domain_violations,
    limit_set_sample,
    ping_pong,
    tail_bounds,
    word_ball,
)
from .horocycles import (
    RefusalError,
    displacement_floor,
    displacement_floor_empirical,
    horocycle_injectivity,
    in_U,
    sigma_estimate,
)
from .leafmetrics import (
    DirectionError,
    TruncationWarning,
    alpha_at,
    alpha_decay_profile,
    beta_at,
    covered_disk_check,
    displacement_propagation,
    koebe_disk_radius,
    leaf_report,
    rho_lower_at,
    suita_density_at,
)
from .localmodel import (
    AnnulusSpec,
    SingularModelSpec,
    StripSpec,
    annulus_density,
    choose_annulus_and_winding,
    covering_projection_degree,
    flow,
    strip_injectivity,
)
from .moebius import (
    BoundaryPoint,
    ClassificationError,
    DiskAutomorphism,
    DomainError,
    Geodesic,
    Horocycle,
    Kind,
    classify,
    compose,
    conjugate,
    fixed_points,
    invert,
    make_hyperbolic,
    moebius_distance,
    poincare_distance,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
