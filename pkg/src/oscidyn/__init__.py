"""Total positivity, sign variation and periodic discrete-time dynamics."""
from .classify import (SSR, Classification, Decision, Verdict, classify, classify_oscillatory,
                       classify_tn, classify_tp, contiguous_minors_tp, is_hankel,
                       is_irreducible, ssr_order, tridiagonal_dominance_tn)
from .kernels import BACKEND
from .lineintegral import (Certificate, NonConvergentError, QuadConfig, F_segment,
                           checkerboard_certificate, closed_form_F, integrate, max_tp_radius,
                           perturbation_bounds, variational_matrix)
from .matrix import (DEFAULT_TOL, Tolerance, all_minors, cauchy_binet_minor, det, matmul,
                     matpow, minor, submatrix)
from .signvar import in_V, profile, s_minus, s_plus, sigma, vdp_tn_check, vdp_tp_check

__version__ = "0.1.0"
