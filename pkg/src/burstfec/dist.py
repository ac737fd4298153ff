"""Distributions of bit error counts over interleaved codewords.

Everything here is computed by matrix recursions over the channel model:
a saturating counter per codeword, and one S x S probability-flow matrix
per counter value.  Counters saturate at ``cap``, so the top bucket reads
"cap or more errors"; running with cap = n keeps full resolution.

Under column-wise interleaving of depth I, consecutive bits of one
codeword are I transmission slots apart, and the matching bits of two
adjacent codewords go out back to back.  The recursions therefore
alternate counted steps (split d0/d1 kernels) with marginalized gap
powers of the full transition matrix: D**(I-1) between the bits of one
codeword, D**(I-2) between the bit pairs of two adjacent codewords.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import FsmcModel


@dataclass(frozen=True)
class CountMatrixFamily:
    """Bucketed probability-flow matrices over one recursion horizon.

    ``buckets[j]`` (or ``buckets[i, j]`` for joint families) is the S x S
    matrix of path probabilities reaching those counter values.  Summed
    over all buckets the family reproduces the plain multi-slot transition
    matrix of the chain, which is the main internal consistency check.
    """

    buckets: np.ndarray
    cap: int

    def total(self) -> np.ndarray:
        """Sum over all buckets; row-stochastic over the full horizon."""
        count_axes = tuple(range(self.buckets.ndim - 2))
        return self.buckets.sum(axis=count_axes)


@dataclass(frozen=True)
class JointErrorDistribution:
    """Joint law of the bucketed bit error counts in two adjacent codewords."""

    q: np.ndarray  # (cap+1, cap+1); q[i, j] = P(first counts i, second counts j)
    cap: int
    family: CountMatrixFamily

    @property
    def first_marginal(self) -> np.ndarray:
        return self.q.sum(axis=1)

    @property
    def second_marginal(self) -> np.ndarray:
        return self.q.sum(axis=0)


def _count_step(buckets, miss_kernel, hit_kernel, axis=0):
    """Advance every bucket matrix by one counted bit.

    Multiplies by the no-error/error kernels and shifts the counter on
    ``axis``, saturating at the top bucket.
    """
    moved = np.moveaxis(buckets, axis, 0)
    out = moved @ miss_kernel
    hit = moved @ hit_kernel
    out[1:] += hit[:-1]
    out[-1] += hit[-1]
    return np.moveaxis(out, 0, axis)


def marginal_error_distribution(model: FsmcModel, n: int, depth: int, cap: int):
    """Distribution of the bucketed error count in one interleaved codeword.

    Every counted bit except the last is followed by a marginalized gap
    of depth-1 slots occupied by the other codewords of the block.
    Returns the bucket family and the probability vector
    ``probs[j] = pi @ buckets[j] @ 1``.
    """
    if n < 1:
        raise ValueError(f"codeword length must be >= 1, got {n}")
    if depth < 1:
        raise ValueError(f"interleaving depth must be >= 1, got {depth}")
    if cap < 0:
        raise ValueError(f"counter cap must be >= 0, got {cap}")
    gap = np.linalg.matrix_power(model.transition, depth - 1)
    miss, hit = model.d0 @ gap, model.d1 @ gap
    buckets = np.zeros((cap + 1, model.states, model.states))
    buckets[0] = np.eye(model.states)
    for _ in range(n - 1):
        buckets = _count_step(buckets, miss, hit)
    buckets = _count_step(buckets, model.d0, model.d1)
    family = CountMatrixFamily(buckets=buckets, cap=cap)
    probs = np.einsum("s,jst->j", model.pi, buckets)
    return family, probs


def joint_error_distribution(model: FsmcModel, n: int, depth: int, cap: int):
    """Joint law of the bucketed error counts in two adjacent codewords.

    The matching bits of the two codewords are transmitted back to back;
    successive bit pairs are separated by depth-2 marginalized slots, and
    the final pair has no trailing gap.  Requires depth >= 2 -- depth 1
    has no column pairing (see :func:`sequential_joint_distribution`).
    """
    if depth < 2:
        raise ValueError(
            "joint pairing needs depth >= 2; "
            "use sequential_joint_distribution for depth 1"
        )
    if n < 1:
        raise ValueError(f"codeword length must be >= 1, got {n}")
    if cap < 0:
        raise ValueError(f"counter cap must be >= 0, got {cap}")
    gap = np.linalg.matrix_power(model.transition, depth - 2)
    size = model.states
    buckets = np.zeros((cap + 1, cap + 1, size, size))
    buckets[0, 0] = np.eye(size)
    for i in range(n):
        buckets = _count_step(buckets, model.d0, model.d1, axis=0)
        buckets = _count_step(buckets, model.d0, model.d1, axis=1)
        if i < n - 1 and depth > 2:
            buckets = buckets @ gap
    family = CountMatrixFamily(buckets=buckets, cap=cap)
    q = np.einsum("s,ijst->ij", model.pi, buckets)
    return JointErrorDistribution(q=q, cap=cap, family=family)


def sequential_joint_distribution(model: FsmcModel, n: int, cap: int):
    """Joint error-count law of two codewords sent back to back.

    This is the depth-1 layout: the two codewords occupy 2n consecutive
    transmission slots with no interleaving gaps at all.
    """
    if n < 1:
        raise ValueError(f"codeword length must be >= 1, got {n}")
    if cap < 0:
        raise ValueError(f"counter cap must be >= 0, got {cap}")
    size = model.states
    buckets = np.zeros((cap + 1, cap + 1, size, size))
    buckets[0, 0] = np.eye(size)
    for _ in range(n):
        buckets = _count_step(buckets, model.d0, model.d1, axis=0)
    for _ in range(n):
        buckets = _count_step(buckets, model.d0, model.d1, axis=1)
    family = CountMatrixFamily(buckets=buckets, cap=cap)
    q = np.einsum("s,ijst->ij", model.pi, buckets)
    return JointErrorDistribution(q=q, cap=cap, family=family)


def marginal_consistency_check(joint: JointErrorDistribution, marginal_probs) -> float:
    """Largest absolute gap between the joint's first marginal and the
    one-codeword distribution computed for the same parameters.

    Both recursions integrate the same path measure, so the gap is pure
    floating-point noise; anything above ~1e-12 indicates a bug.
    """
    probs = np.asarray(marginal_probs, dtype=float)
    if probs.shape != (joint.cap + 1,):
        raise ValueError(
            f"marginal has {probs.shape[0]} buckets, joint expects {joint.cap + 1}"
        )
    return float(np.max(np.abs(joint.first_marginal - probs)))
