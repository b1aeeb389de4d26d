"""Two-length configurations of {a*x mod 1} and their stepping laws.

Placing the multiples 0, {a}, {2a}, ... of a fraction splits the unit circle
into intervals of at most two distinct lengths.  A configuration (i, t) after
partially applying the (i+1)-th continued-fraction quotient has q_cur
intervals of length theta_prev_t and q_prev_t intervals of length theta_cur,
tied together by the exact identity

    q_cur * theta_prev_t + q_prev_t * theta_cur = 1.

Lengths live in raw W-bit units (theta_-1 = 1 is the full circle, raw 2^W,
one past the top of the W-bit fraction range, which is why the raw integers
rather than UFrac are the stored representation).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .fixedpoint import DEFAULT_WORD_BITS, DivisionMode, UFrac, _div_steps


class ExpansionTerminated(Exception):
    """The current length reached zero: a is rational in W-bit units and all
    its multiples have been placed; there is no next configuration."""


class SplitDirection(Enum):
    """Which piece of a split long interval carries the *new* short length.

    LEFT_FIRST: the theta_cur piece is the left part (even i);
    RIGHT_FIRST: the theta_cur piece is the right part (odd i).
    """

    LEFT_FIRST = "left"
    RIGHT_FIRST = "right"


@dataclass(frozen=True, slots=True)
class CFConfig:
    index: int              # i
    partial: int            # t, in [0, k_{i+1})
    theta_cur_raw: int      # theta_i
    theta_prev_t_raw: int   # theta_{i-1} - t*theta_i
    q_cur: int              # q_i
    q_prev_t: int           # q_{i-1} + t*q_i
    width: int = DEFAULT_WORD_BITS

    @property
    def parity(self) -> int:
        return self.index & 1

    @property
    def points_placed(self) -> int:
        """Number of multiples placed so far (counting x = 0)."""
        return self.q_cur + self.q_prev_t

    @property
    def terminated(self) -> bool:
        return self.theta_cur_raw == 0

    @property
    def theta_cur(self) -> UFrac:
        return UFrac(self.theta_cur_raw, self.width)

    @property
    def theta_prev_t(self) -> UFrac:
        if self.theta_prev_t_raw >= (1 << self.width):
            raise ValueError("theta_prev_t is the full circle; use theta_prev_t_raw")
        return UFrac(self.theta_prev_t_raw, self.width)

    def identity_lhs(self) -> int:
        """q_cur*theta_prev_t + q_prev_t*theta_cur in raw units (== 2^W always)."""
        return self.q_cur * self.theta_prev_t_raw + self.q_prev_t * self.theta_cur_raw


def cf_init(a: UFrac) -> CFConfig:
    """Configuration (0, 0) for the two points {0, a}: theta_0 = a,
    theta_-1 = 1, q_0 = 1, q_-1 = 0."""
    if a.raw == 0:
        raise ValueError("a = 0 places every multiple at the origin")
    return CFConfig(
        index=0,
        partial=0,
        theta_cur_raw=a.raw,
        theta_prev_t_raw=1 << a.width,
        q_cur=1,
        q_prev_t=0,
        width=a.width,
    )


def cf_next(cfg: CFConfig) -> CFConfig:
    """Place the next q_cur points: one subtractive step of the expansion.

    Either stays at (i, t+1) when the residual still reaches theta_cur, or
    rolls over to (i+1, 0) when the remainder becomes the new short length.
    """
    if cfg.terminated:
        raise ExpansionTerminated(cfg)
    residual = cfg.theta_prev_t_raw - cfg.theta_cur_raw
    q_new = cfg.q_prev_t + cfg.q_cur
    if residual >= cfg.theta_cur_raw:
        return replace(cfg, partial=cfg.partial + 1, theta_prev_t_raw=residual, q_prev_t=q_new)
    return CFConfig(
        index=cfg.index + 1,
        partial=0,
        theta_cur_raw=residual,
        theta_prev_t_raw=cfg.theta_cur_raw,
        q_cur=q_new,
        q_prev_t=cfg.q_cur,
        width=cfg.width,
    )


def cf_next_div(cfg: CFConfig, mode: DivisionMode = DivisionMode.HARDWARE) -> tuple[CFConfig, int]:
    """Whole-quotient step (i, t) -> (i+1, 0); returns the quotient consumed.

    Must sit at a quotient boundary (t = 0); equals k_{i+1} - t applications
    of cf_next otherwise, so callers mid-quotient should keep stepping.
    """
    if cfg.terminated:
        raise ExpansionTerminated(cfg)
    if cfg.partial != 0:
        raise ValueError("cf_next_div requires a quotient boundary (t = 0)")
    k = _div_steps(cfg.theta_prev_t_raw, cfg.theta_cur_raw, mode)
    residual = cfg.theta_prev_t_raw - k * cfg.theta_cur_raw
    return (
        CFConfig(
            index=cfg.index + 1,
            partial=0,
            theta_cur_raw=residual,
            theta_prev_t_raw=cfg.theta_cur_raw,
            q_cur=cfg.q_prev_t + k * cfg.q_cur,
            q_prev_t=cfg.q_cur,
            width=cfg.width,
        ),
        k,
    )


def split_direction(cfg: CFConfig) -> SplitDirection:
    """Where the short piece lands when a long interval splits at this level:
    even index -> (theta_cur, remainder) left-to-right, odd index mirrored."""
    return SplitDirection.LEFT_FIRST if cfg.parity == 0 else SplitDirection.RIGHT_FIRST


