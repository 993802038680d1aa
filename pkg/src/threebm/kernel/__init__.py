"""Heat kernel at the identity by quadrature of its Fourier representation."""
from .audit import ImportanceDensity, NormalizationAudit, normalization
from .direct import horiz_grad_log_direct, p_t_direct_batch
from .heat import (HOMOGENEOUS_DIM, RAW_MASS, RAW_TIME, constants_W, grad_p1, grad_p_t_batch, heat_residual,
                   heat_residual_batch, horiz_grad_log_pt, horiz_grad_log_pt_batch, p1, p_t, p_t_batch, peak)
from .quadrature import KernelValue, QuadratureSpec, convergence_gate, grad_p1_raw_batch, p1_raw, p1_raw_batch

__all__ = [
    "horiz_grad_log_direct", "p_t_direct_batch",
    "ImportanceDensity", "NormalizationAudit", "normalization",
    "HOMOGENEOUS_DIM", "RAW_MASS", "RAW_TIME", "constants_W", "grad_p1", "grad_p_t_batch", "heat_residual",
    "heat_residual_batch", "horiz_grad_log_pt", "horiz_grad_log_pt_batch", "p1", "p_t", "p_t_batch", "peak",
    "KernelValue", "QuadratureSpec", "convergence_gate", "grad_p1_raw_batch", "p1_raw", "p1_raw_batch",
]
