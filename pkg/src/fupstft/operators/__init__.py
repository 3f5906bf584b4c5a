from .bargmann import (
    bargmann_hermite,
    bargmann_quadrature,
    check_stft_bargmann_identity,
    check_hermite_sampling_identity,
    eval_stft_quotient,
    gauss_tf_inner,
    hermite_functions,
    stft_gauss,
)
from .gabor import (
    Lattice2d,
    MatrixCapError,
    check_condition_h,
    dump_matrix,
    gabor_multiplier_norm,
    gram_matrix,
    lattice_restriction,
    load_matrix,
    overlap_count,
    power_iteration,
)
from .radial import Spectrum, daubechies_radial_spectrum, radial_spectrum_recurrence
from .subaveraging import check_subaveraging
