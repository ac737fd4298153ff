"""Monte Carlo reference: DAR(1) bit errors, interleaved decoding, CIs.

The bit error stream follows a DAR(1) recursion -- keep the previous bit
with probability ``nacf``, otherwise redraw Bernoulli(ber) -- which is
stochastically identical to the two-state model used by the analytic
side but vectorizes cleanly: one uniform drives each slot, deciding both
whether the value is fresh and, if so, what it is.

Packets are simulated in fixed-size batches whose RNG streams derive
from (seed, batch index) only, so estimates are bit-for-bit reproducible
for any worker count.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpec, CodeSpec, SchemeSpec

BIT_GENERATOR = "philox"  # pinned counter-based generator, echoed in reports
_BATCH_PACKETS = 1024  # RNG partition size; independent of the worker count


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: channel, code, interleaving, sample size."""

    channel: ChannelSpec
    code: CodeSpec
    scheme: SchemeSpec
    packets: int = 100_000
    seed: int = 0
    gamma: float = 0.95

    def __post_init__(self):
        if self.packets < 1:
            raise ValueError(f"packet count must be >= 1, got {self.packets}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"confidence level must be in (0, 1), got {self.gamma!r}")


@dataclass(frozen=True)
class CiEstimate:
    """Loss-rate estimate with its two-sided normal confidence interval.

    ``degenerate`` flags estimates of exactly 0 or 1, where the normal
    interval collapses and says nothing useful.
    """

    p_hat: float
    lo: float
    hi: float
    packets: int
    gamma: float
    losses: int
    degenerate: bool


def confidence_interval(p_hat: float, packets: int, gamma: float):
    """Two-sided normal interval around a proportion estimate.

    Half width is t * sqrt(p_hat * (1 - p_hat) / packets) with t the
    standard normal quantile at (1 + gamma) / 2; bounds are clamped to
    [0, 1].
    """
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError(f"estimate must be in [0, 1], got {p_hat!r}")
    if packets < 1:
        raise ValueError(f"packet count must be >= 1, got {packets}")
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"confidence level must be in (0, 1), got {gamma!r}")
    quantile = statistics.NormalDist().inv_cdf((1.0 + gamma) / 2.0)
    half = quantile * math.sqrt(p_hat * (1.0 - p_hat) / packets)
    return max(0.0, p_hat - half), min(1.0, p_hat + half)


def interleave_index(codeword: int, bit: int, depth: int, n: int) -> int:
    """Transmission slot of a codeword bit under column-wise interleaving."""
    if not 0 <= codeword < depth:
        raise ValueError(f"codeword index must be in [0, {depth}), got {codeword}")
    if not 0 <= bit < n:
        raise ValueError(f"bit position must be in [0, {n}), got {bit}")
    return bit * depth + codeword


def deinterleave_index(slot: int, depth: int, n: int):
    """Inverse map: transmission slot -> (codeword index, bit position)."""
    if not 0 <= slot < n * depth:
        raise ValueError(f"slot must be in [0, {n * depth}), got {slot}")
    return slot % depth, slot // depth


def _batch_rng(seed: int, index: int) -> np.random.Generator:
    key = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(key))


def _dar1_matrix(rng, rows, cols, ber, nacf):
    """``rows`` independent DAR(1) error streams of ``cols`` bits each.

    The first slot of every stream draws from the stationary law; one
    uniform per slot decides copy-vs-redraw and the redrawn value at
    once (conditional on u >= nacf being false, u rescaled is uniform, so
    u < nacf + (1 - nacf) * ber is a Bernoulli(ber) redraw).
    """
    u = rng.random((rows, cols))
    if nacf == 0.0:
        return u < ber
    fresh = u >= nacf
    fresh[:, 0] = True
    values = u < nacf + (1.0 - nacf) * ber
    values[:, 0] = u[:, 0] < ber  # stationary start, no copy branch to rescale
    last_fresh = np.maximum.accumulate(
        np.where(fresh, np.arange(cols), 0), axis=1
    )
    return np.take_along_axis(values, last_fresh, axis=1)


def dar1_stream(channel: ChannelSpec, length: int, seed: int) -> np.ndarray:
    """One DAR(1) bit error stream as a boolean array; deterministic in seed."""
    if length < 1:
        raise ValueError(f"stream length must be >= 1, got {length}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    return _dar1_matrix(rng, 1, length, channel.ber, channel.nacf)[0]


def simulate_packets(cfg: SimConfig, workers: int = 1) -> CiEstimate:
    """Estimate the packet loss probability by direct simulation.

    Each packet is one continuous channel stream (fresh stationary
    start) of blocks * depth * n bits; a codeword fails when its
    deinterleaved error count exceeds code.l, and the packet is lost
    when any of its codewords fails.
    """
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    code, scheme = cfg.code, cfg.scheme
    bits = scheme.packet_bits(code.n)

    spans = [
        (index, min(_BATCH_PACKETS, cfg.packets - start))
        for index, start in enumerate(range(0, cfg.packets, _BATCH_PACKETS))
    ]

    def batch_losses(span):
        index, count = span
        rng = _batch_rng(cfg.seed, index)
        errors = _dar1_matrix(rng, count, bits, cfg.channel.ber, cfg.channel.nacf)
        counts = errors.reshape(count, scheme.blocks, code.n, scheme.depth).sum(axis=2)
        return int(np.count_nonzero((counts > code.l).any(axis=(1, 2))))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            losses = sum(pool.map(batch_losses, spans))
    else:
        losses = sum(map(batch_losses, spans))

    p_hat = losses / cfg.packets
    lo, hi = confidence_interval(p_hat, cfg.packets, cfg.gamma)
    return CiEstimate(
        p_hat=p_hat,
        lo=lo,
        hi=hi,
        packets=cfg.packets,
        gamma=cfg.gamma,
        losses=losses,
        degenerate=losses in (0, cfg.packets),
    )
