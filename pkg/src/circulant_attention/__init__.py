"""Circulant attention: attention maps restricted to BCCB structure, in O(N log N)."""

from .attention import (AttentionConfig, ProjectionWeights, Reweighting, circulant_attention,
                        circulant_attention_naive, circulant_scores, circulant_scores_naive,
                        compute_reweighting, multihead_circulant_attention, self_attention_reference,
                        softmax_first_row)
from .errors import DomainError, FormatError, ImaginaryResidueError, MissingReweight, ShapeMismatch, TooLarge
from .gradients import HeadGradients, circulant_attention_backward, finite_difference_gradient
from .spectral import (GridShape, circconv2d, circorr2d, dft1d_forward, dft1d_inverse, dft2d_forward,
                       dft2d_inverse)
from .structured import (BccbKernel, CirculantKernel, ProjectionResult, bccb_materialize, bccb_matvec_naive,
                         circulant_matvec_naive, nearest_bccb_distance_check, project_to_bccb)

__version__ = "0.1.0"
