"""Spectral data of the path graph on ell vertices.

The compiled instances behave like a weighted path graph; everything needed
about it is closed-form: eigenvalues 2cos(pi(j+1)/(ell+1)), sine
eigenvectors, the corner weights w_j, and the resulting bounds on corner
entries of powers.  An exact integer recurrence serves as ground truth for
the spectral formulas.
"""

from __future__ import annotations

import math


class SpectralError(Exception):
    pass


def _check(ell: int, j: int | None = None) -> None:
    if ell < 2:
        raise SpectralError(f"need ell >= 2, got {ell}")
    if j is not None and not 0 <= j < ell:
        raise SpectralError(f"index {j} out of range for ell = {ell}")


def eigenvalue(ell: int, j: int) -> float:
    """j-th largest eigenvalue of the ell-vertex path graph."""
    _check(ell, j)
    return 2.0 * math.cos(math.pi * (j + 1) / (ell + 1))


def eigvec_entry(ell: int, j: int, k: int) -> float:
    """Entry k of the j-th orthonormal eigenvector."""
    _check(ell, j)
    _check(ell, k)
    return math.sqrt(2.0 / (ell + 1)) * math.sin(
        math.pi * (j + 1) * (k + 1) / (ell + 1)
    )


def weight(ell: int, j: int) -> float:
    """Corner weight w_j: product of the eigenvector's first and last entries."""
    return eigvec_entry(ell, j, 0) * eigvec_entry(ell, j, ell - 1)


def corner_entry(ell: int, m: int) -> tuple[int, float]:
    """(0, ell-1) entry of the m-th power of the path adjacency matrix.

    Returns the exact integer (walk count, by the recurrence
    v'_k = v_{k-1} + v_{k+1}) and the float spectral sum; the sum uses
    compensated summation since the terms alternate in sign.
    """
    _check(ell)
    if m < 0:
        raise SpectralError("power must be >= 0")
    v = [0] * ell
    v[0] = 1
    for _ in range(m):
        nxt = [0] * ell
        for k in range(ell):
            left = v[k - 1] if k > 0 else 0
            right = v[k + 1] if k < ell - 1 else 0
            nxt[k] = left + right
        v = nxt
    exact = v[ell - 1]

    total = 0.0
    comp = 0.0
    for j in range(ell):
        term = weight(ell, j) * eigenvalue(ell, j) ** m
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return exact, total


def bounds(ell: int, m: int) -> tuple[float, float, bool]:
    """Upper and lower bounds on the corner entry of the m-th power.

    Upper: lambda_0^m.  Lower: lambda_0^m * w_0, valid when
    (lambda_1/lambda_0)^m <= w_0 so the subleading terms cannot cancel the
    leading one.  Requires m of parity opposite to ell and m >= ell-1.
    """
    _check(ell)
    if m % 2 == ell % 2:
        raise SpectralError(f"m = {m} has the parity of ell = {ell}")
    if m < ell - 1:
        raise SpectralError(f"need m >= ell-1, got m = {m}")
    log_upper, log_lower, lower_valid = log_bounds(ell, m)
    try:
        upper = math.exp(log_upper)
    except OverflowError:
        upper = math.inf
    try:
        lower = math.exp(log_lower)
    except OverflowError:
        lower = math.inf
    return upper, lower, lower_valid


def log_bounds(ell: int, m: int) -> tuple[float, float, bool]:
    """Natural logs of the bounds; usable where lambda_0^m overflows."""
    _check(ell)
    if m % 2 == ell % 2:
        raise SpectralError(f"m = {m} has the parity of ell = {ell}")
    if m < ell - 1:
        raise SpectralError(f"need m >= ell-1, got m = {m}")
    lam0 = eigenvalue(ell, 0)
    lam1 = eigenvalue(ell, 1)
    w0 = weight(ell, 0)
    log_upper = m * math.log(lam0)
    log_lower = log_upper + math.log(w0)
    # the validity condition controls the interior eigenvalues, whose
    # magnitude is at most |lambda_1|; a two-vertex path has none
    a1 = abs(lam1)
    if ell == 2 or a1 == 0.0:
        lower_valid = True
    else:
        lower_valid = m * (math.log(a1) - math.log(lam0)) <= math.log(w0)
    return log_upper, log_lower, lower_valid


def choose_m(ell: int, mode: str = "paper") -> int:
    """Walk length for the gap-condition instance.

    paper: the reference prescription (ell+1)^3, whose parity is
    automatically opposite to ell's.
    minimal: smallest m >= ell-1 of correct parity whose lower bound is valid.
    sign_only: smallest m >= ell-1 of correct parity (corner entry positive).
    """
    _check(ell)
    if mode == "paper":
        return (ell + 1) ** 3
    if mode not in ("minimal", "sign_only"):
        raise SpectralError(f"unknown m mode {mode!r}")
    m = ell - 1 if (ell - 1) % 2 != ell % 2 else ell
    while True:
        if mode == "sign_only":
            return m
        if bounds(ell, m)[2]:
            return m
        m += 2


def convergence_check(ell_tilde: int) -> float:
    """Value whose large-ell limit is exp(-pi^2/2), bounding the weight decay."""
    if ell_tilde < 4:
        raise SpectralError("need ell_tilde >= 4")
    r = (math.pi / ell_tilde) ** 2
    return ((1.0 - r) / (1.0 - 0.5 * r)) ** (ell_tilde**2)
