"""Polynomial corners in F_p^2: averages, exponential-sum kernels, bounds, counts."""

from .averaging import (
    JDecomposition,
    MainResidual,
    average_direct,
    average_fourier,
    j2_ratio,
    j_decompose,
    main_residual,
)
from .bounds import (
    BoundReport,
    bombieri_sum,
    k4_scan,
    katz_variety_sum,
    verify_bombieri_family,
    verify_gauss,
    verify_weil,
)
from .corners import SubsetGrid, count_corners, generate_set, roth_chain, verify_e3
from .fp import FpPoly, PrimeField, is_prime, parse_poly
from .kernel import KernelTable, gauss_kernel_quadratic, kernel, kernel_fast, kernel_naive, truncate
from .transform import GridFn, dft, dft_fast, inverse_dft, inverse_dft_fast, norm_r

__all__ = [
    "BoundReport", "FpPoly", "GridFn", "JDecomposition", "KernelTable", "MainResidual",
    "PrimeField", "SubsetGrid", "average_direct", "average_fourier", "bombieri_sum",
    "count_corners", "dft", "dft_fast", "gauss_kernel_quadratic", "generate_set",
    "inverse_dft", "inverse_dft_fast", "is_prime", "j2_ratio", "j_decompose", "k4_scan",
    "katz_variety_sum", "kernel", "kernel_fast", "kernel_naive", "main_residual", "norm_r",
    "parse_poly", "roth_chain", "truncate", "verify_bombieri_family", "verify_e3",
    "verify_gauss", "verify_weil",
]
