"""Student t convolution powers: exact Bessel mixtures, transform inversion, sampling."""
__version__ = "0.1.0"

from ._kernels import BACKEND
from .config import DEFAULT_CONFIG, QuadratureConfig
from .densities import (
    MixtureDensity,
    StudentParams,
    SubordinatorParams,
    gaussian_semigroup_pdf,
    inv_gamma_logpdf,
    inv_gamma_pdf,
    mixture_pdf,
    student_logpdf,
    student_pdf,
)
from .exactpoly import (
    BesselMixture,
    ProductSpec,
    RationalPoly,
    bessel_alpha,
    bessel_q,
    bessel_to_monomial,
    carlitz_delta,
    corollary_beta_min,
    expand_product,
    expand_product_float,
    monomial_to_bessel,
)
from .sampling import SampleBatch, WalkSpec, empirical_tail_count, sample_student, sample_walk
from .specfun import char_kernel, log_char_kernel, macdonald_k, student_norm_const, inv_gamma_const
from .transforms import (
    ConvergenceError,
    ConvolutionSpec,
    LossOfPrecisionWarning,
    TailReport,
    fourier_invert_density,
    laplace_invert_subordinator,
    subordinated_density,
    subordinator_tail_scan,
    tail_ratio_scan,
    total_mass,
)

__all__ = [name for name in dir() if not name.startswith("_")]
