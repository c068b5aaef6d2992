"""Order-induced conjugate-function operators on tori, martingale
transforms, and the truncated Hilbert transform, with numerical
norm-constant estimation on finite-dimensional coordinate spaces."""

__version__ = "0.1.0"

from .indices import Index, eval_character, in_block, last_nonzero, wrap_angle
from .orders import (
    DegenerateOrderError,
    Homomorphism,
    RevLex,
    SignTwisted,
    separating_homomorphism,
    sgn_order,
    twist,
    verify_separation,
)
from .spaces import NormedSpaceSpec, norming_functional, vector_norm
from .polynomials import (
    GridQuadrature,
    MonteCarloQuadrature,
    TrigPolynomial,
    default_quadrature,
    eval_poly,
    lp_norm,
    random_poly,
)
from .operators import (
    LineSamples,
    composition_residual,
    conjugate,
    hilbert_multiplier,
    martingale_transform,
    split_blocks,
    transferred_truncated,
    truncated_hilbert_line,
)
from .martingales import (
    DyadicMDS,
    TorusMDS,
    block_spectrum_check,
    distribution_check,
    martingale_property_check,
    random_mds,
    realize_on_torus,
    sign_fourier,
)
from .estimator import (
    ConstantKind,
    EstimateReport,
    SearchParams,
    estimate_constant,
    grid_ascent_reference,
    random_block_polys,
    rayleigh,
    theorem31_consistency,
)

__all__ = [name for name in dir() if not name.startswith("_")]
