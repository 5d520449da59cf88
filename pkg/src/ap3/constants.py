"""Numerical constants of the density-increment and Bohr-set arguments.

They are conventions of one particular exposition of these proofs rather than
optimal values, so they live here in one place.  Everything is an exact
integer or Fraction so comparisons can be done without rounding.
"""

from fractions import Fraction

# F_3^n increment: the argument needs 3^n >= SMALL_N_MESHULAM / alpha^2 and
# gains alpha^2 / MESHULAM_GAIN_DIV in density on a hyperplane.
SMALL_N_MESHULAM = 2
MESHULAM_GAIN_DIV = 4
MESHULAM_FOURIER_FLOOR_DIV = 2  # some |1_A^(xi)| >= alpha^2 / 2

# [N] increment: needs N >= SMALL_N_ROTH / alpha^2.
SMALL_N_ROTH = 8
ROTH_FOURIER_FLOOR_DIV = 2**7  # |sum f_A(x) e(xi x / p)| >= alpha^2 p / 2^7
ROTH_CELL_LENGTH_DIV = 2**10  # N' = ceil(alpha^2 sqrt(p) / 2^10)
ROTH_GAIN_DIV = 2**11  # density gain alpha^2 / 2^11
ROTH_LENGTH_DIV = 2**21  # new length >= alpha^4 sqrt(N) / 2^21
ROTH_PHASE_DIV = 2**8  # phase spread within a cell <= alpha^2 / 2^8

# Iteration bookkeeping for the F_3^n driver: i0 <= 16/alpha, n < 32/alpha.
MESHULAM_STEPS_NUM = 16
MESHULAM_DIM_NUM = 32

# Bohr sets: regularity window, AP-count regime and per-shift defect.
REGULARITY_CONST = 100
REGIME_LOW_DIV = 800  # rho > 1 / (800 r)
REGIME_HIGH_DIV = 400  # rho < 1 / (400 r)
DEFECT_CONST = 200  # defect <= 200 r rho |B| |B_rho|
DILATE_SIZE_DIV = 4  # |B_rho| >= (rho / 4)^r |B|
DOUBLING_BASE = 4  # |B_{2 nu}| <= 4^r |B_nu|


def meshulam_small_bound(alpha: Fraction) -> Fraction:
    return Fraction(SMALL_N_MESHULAM) / (alpha * alpha)


def meshulam_floor(alpha: Fraction) -> Fraction:
    return alpha + alpha * alpha / MESHULAM_GAIN_DIV


def roth_small_bound(alpha: Fraction) -> Fraction:
    return Fraction(SMALL_N_ROTH) / (alpha * alpha)


def roth_floor(alpha: Fraction) -> Fraction:
    return alpha + alpha * alpha / ROTH_GAIN_DIV
