"""Exhaustive references for small interleaved blocks.

Everything here enumerates every bit error pattern of a whole
interleaved codeblock and weighs it by its Markov path probability --
no marginalized gaps, no saturating counters, no codeword-level chain.
Cost is exponential in the slot count, so instances must stay small;
the point is to pin down the production recursions and the analytic
models on cases where exactness is checkable, both from the test suite
and from the ``oracle`` CLI verb.
"""

from __future__ import annotations

import numpy as np

from .channel import FsmcModel

# Hard ceiling on enumerated slots: 2**20 patterns times an S x S matrix
# each is about 32 MB for two states; anything beyond is a mistake.
MAX_SLOTS = 20


def _pattern_flow(model: FsmcModel, slots: int) -> np.ndarray:
    """(2**slots, S, S) path matrices; pattern index bit u = error in slot u."""
    if not 1 <= slots <= MAX_SLOTS:
        raise ValueError(f"slot count must be in [1, {MAX_SLOTS}], got {slots}")
    mats = np.eye(model.states)[np.newaxis]
    for _ in range(slots):
        # new pattern index = old index + (slot error << slot); extending
        # the path product on the right keeps slot order intact
        mats = np.concatenate([mats @ model.d0, mats @ model.d1])
    return mats


def _slot_errors(slots: int) -> np.ndarray:
    """(2**slots, slots) 0/1 matrix unpacking every pattern index."""
    idx = np.arange(1 << slots, dtype=np.uint32)
    return ((idx[:, np.newaxis] >> np.arange(slots, dtype=np.uint32)) & 1).astype(np.uint8)


def _codeword_of_slot(n: int, depth: int, slots: int) -> np.ndarray:
    """Codeword index occupying each slot.

    For depth >= 2 this is the interleaved layout (slot u carries bit
    u // depth of codeword u % depth); for depth 1 consecutive codewords
    simply follow each other, n slots apiece.
    """
    if depth >= 2:
        return np.arange(slots) % depth
    return np.arange(slots) // n


def exact_joint_law(model: FsmcModel, n: int, depth: int, cap: int) -> np.ndarray:
    """Exact bucketed joint error-count law of the first two codewords.

    For depth >= 2 the enumeration covers the whole interleaved block of
    n * depth slots; for depth 1 it covers two back-to-back codewords.
    """
    if n < 1 or depth < 1 or cap < 0:
        raise ValueError("need n >= 1, depth >= 1, cap >= 0")
    slots = n * depth if depth >= 2 else 2 * n
    mats = _pattern_flow(model, slots)
    errors = _slot_errors(slots)
    codeword = _codeword_of_slot(n, depth, slots)
    first = np.minimum(errors[:, codeword == 0].sum(axis=1), cap)
    second = np.minimum(errors[:, codeword == 1].sum(axis=1), cap)
    weights = np.einsum("s,pst->p", model.pi, mats)
    q = np.zeros((cap + 1, cap + 1))
    np.add.at(q, (first, second), weights)
    return q


def exact_marginal_law(model: FsmcModel, n: int, depth: int, cap: int) -> np.ndarray:
    """Exact bucketed error-count law of the first codeword of a block."""
    if n < 1 or depth < 1 or cap < 0:
        raise ValueError("need n >= 1, depth >= 1, cap >= 0")
    slots = n * depth if depth >= 2 else n
    mats = _pattern_flow(model, slots)
    errors = _slot_errors(slots)
    codeword = _codeword_of_slot(n, depth, slots)
    count = np.minimum(errors[:, codeword == 0].sum(axis=1), cap)
    weights = np.einsum("s,pst->p", model.pi, mats)
    probs = np.zeros(cap + 1)
    np.add.at(probs, count, weights)
    return probs


def _block_flow(model: FsmcModel, n: int, depth: int, l: int):
    """(block error probability, flow matrix over decodable blocks)."""
    slots = n * depth
    mats = _pattern_flow(model, slots)
    errors = _slot_errors(slots)
    codeword = _codeword_of_slot(n, depth, slots)
    decodable = np.ones(1 << slots, dtype=bool)
    for cw in range(depth):
        decodable &= errors[:, codeword == cw].sum(axis=1) <= l
    flow_ok = mats[decodable].sum(axis=0)
    p_block = 1.0 - float(model.pi @ flow_ok @ np.ones(model.states))
    return min(max(p_block, 0.0), 1.0), flow_ok


def exact_block_error(model: FsmcModel, n: int, depth: int, l: int) -> float:
    """P(any codeword of one interleaved block exceeds l errors), exactly."""
    if n < 1 or depth < 1 or l < 0:
        raise ValueError("need n >= 1, depth >= 1, l >= 0")
    p_block, _ = _block_flow(model, n, depth, l)
    return p_block


def exact_packet_error(model: FsmcModel, n: int, depth: int, l: int, blocks: int) -> float:
    """Exact loss probability of ``blocks`` consecutive interleaved blocks.

    The channel stream runs on across block boundaries, so the decodable
    flow matrix of one block is chained ``blocks`` times; this keeps the
    enumeration at 2**(n * depth) patterns rather than 2**(n * depth * blocks).
    """
    if blocks < 1:
        raise ValueError(f"block count must be >= 1, got {blocks}")
    _, flow_ok = _block_flow(model, n, depth, l)
    survived = float(
        model.pi @ np.linalg.matrix_power(flow_ok, blocks) @ np.ones(model.states)
    )
    return min(max(1.0 - survived, 0.0), 1.0)
