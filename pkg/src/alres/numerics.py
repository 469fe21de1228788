"""Numeric probes of the exact kernels: tail decay, jumps across the region
boundaries, and (|w|, h) sweeps."""
from __future__ import annotations

import cmath
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import AlresError, BoundarySurface, NotABoundaryPair
from .potential import Potential
from .resolvent import (
    REGIONS,
    KernelWindow,
    RegionTag,
    Window,
    gamma,
    region_classify,
    resolvent_window,
    x_col,
    y_row,
)

DECAY_RATIO = 1 - 1e-6
PROBE_RTOL = 1e-9
DEFAULT_LAM0 = 0.1


def interior_point(region: RegionTag, rng: random.Random, margin: float = 0.05) -> Tuple[complex, float]:
    """Random (w0, h0) with |w0| and h0 at least a factor 1+margin away from both surfaces."""
    f = 1 + margin
    phase = cmath.exp(2j * math.pi * rng.random())

    def log_uniform(lo: float, hi: float) -> float:
        return math.exp(rng.uniform(math.log(lo), math.log(hi)))

    if region is RegionTag.R_BOTH_BELOW:
        a = log_uniform(0.25, 4.0)
        h = max(a, 1 / a) * log_uniform(f, 3.0)
    elif region is RegionTag.R_BOTH_ABOVE:
        a = log_uniform(0.25, 4.0)
        h = min(a, 1 / a) * log_uniform(0.2, 1 / f)
    else:
        # need a gap of f^2 between 1/a and a
        a = log_uniform(f * f * 1.01, 4.0)
        h = log_uniform(f / a, a / f)
        if region is RegionTag.R_WINV_ABOVE:
            a = 1 / a
    return a * phase, h


# decay

@dataclass
class DecayReport:
    region: str
    w0: complex
    h0: float
    n: int
    passed: bool
    worst_ratio: float
    failure: Optional[int] = None  # row m where the ratio check failed

    def to_json(self) -> dict:
        d = asdict(self)
        d["w0"] = [self.w0.real, self.w0.imag]
        return d


def decay_column(p: Potential, region: RegionTag, n: Optional[int] = None,
                 offset: int = 10, length: int = 8) -> KernelWindow:
    """Exact column n of the kernel, reaching offset+length sites past the support."""
    n = p.k if n is None else n
    return resolvent_window(p, region, (p.k - offset - length, p.K + offset + length, n, n))


def decay_profile(p: Potential, region: RegionTag, w0: complex, h0: float,
                  lam0: complex = DEFAULT_LAM0, column: Optional[KernelWindow] = None,
                  n: Optional[int] = None, offset: int = 10, length: int = 8) -> DecayReport:
    """Successive magnitudes |h0^(n-m) M(m, n)| must shrink by DECAY_RATIO on both
    tails, starting ``offset`` sites beyond the support.  Exactly-zero tails pass."""
    if region_classify(abs(w0), h0) is not region:
        raise ValueError(f"({abs(w0)}, {h0}) is not inside {region.value}")
    column = column or decay_column(p, region, n, offset, length)
    n = column.n_lo
    mags = {m: np.linalg.norm(column.full_entry(m, n, w0, lam0, h0))
            for m in range(column.m_lo, column.m_hi + 1)}
    upper = list(range(p.K + offset, column.m_hi + 1))
    lower = list(range(p.k - offset, column.m_lo - 1, -1))
    worst = 0.0
    for tail in (upper, lower):
        for a, b in zip(tail, tail[1:]):
            if mags[a] == 0.0:
                if mags[b] != 0.0:
                    return DecayReport(region.value, w0, h0, n, False, math.inf, b)
                continue
            ratio = mags[b] / mags[a]
            worst = max(worst, ratio)
            if not ratio < DECAY_RATIO:
                return DecayReport(region.value, w0, h0, n, False, ratio, b)
    return DecayReport(region.value, w0, h0, n, True, worst)


# discontinuities

@dataclass
class ProbePair:
    h_minus: float
    h_plus: float
    region_minus: str
    region_plus: str
    surface: Optional[str]  # "|w|=h", "|w|h=1" or None for an interior pair
    passed: bool
    max_rel_error: float
    jump_norm: Dict[str, float] = field(default_factory=dict)  # "m,n" -> |jump|


@dataclass
class ProbeReport:
    potential: str
    w0: complex
    lam0: complex
    window: Window
    pairs: List[ProbePair]

    @property
    def passed(self) -> bool:
        return all(pr.passed for pr in self.pairs)

    def to_json(self) -> dict:
        return {
            "potential": self.potential,
            "w0": [self.w0.real, self.w0.imag],
            "lam0": [complex(self.lam0).real, complex(self.lam0).imag],
            "window": list(self.window),
            "passed": self.passed,
            "pairs": [asdict(pr) for pr in self.pairs],
        }


def _classify_pair(abs_w: float, h_minus: float, h_plus: float,
                   allow_interior: bool) -> Tuple[RegionTag, RegionTag, Optional[str]]:
    try:
        lo, hi = region_classify(abs_w, h_minus), region_classify(abs_w, h_plus)
    except BoundarySurface as exc:
        raise NotABoundaryPair(f"h pair ({h_minus}, {h_plus}) touches a surface") from exc
    flips = [a != b for a, b in zip(lo.theta_below, hi.theta_below)]
    if flips == [True, False]:
        return lo, hi, "|w|=h"
    if flips == [False, True]:
        return lo, hi, "|w|h=1"
    if flips == [False, False] and allow_interior:
        return lo, hi, None
    raise NotABoundaryPair(
        f"h pair ({h_minus}, {h_plus}) at |w| = {abs_w} crosses {sum(flips)} surfaces")


def _numeric_window(kernel: KernelWindow, w0: complex, lam0: complex) -> Dict[Tuple[int, int], np.ndarray]:
    return {mn: A.evaluate(w0, lam0) for mn, A in kernel.entries.items()}


def discontinuity_probe(p: Potential, w0: complex, h_pairs: Sequence[Tuple[float, float]],
                        lam0: complex = DEFAULT_LAM0, window: Optional[Window] = None,
                        allow_interior: bool = False) -> ProbeReport:
    """Jump of the h-stripped kernel M(h_plus) - M(h_minus) against -x_m (G+ - G-) y_n.

    The first term of the kernel does not depend on the region, so the whole
    jump comes from the Gamma branch.  ``allow_interior`` accepts pairs inside
    one region (the expected jump is then zero) instead of raising.
    """
    if w0 == 0:
        raise ValueError("w0 = 0 is a pole")
    window = window or (p.k - 2, p.K + 2, p.k - 2, p.K + 2)
    m_lo, m_hi, n_lo, n_hi = window
    kernels: Dict[RegionTag, Dict] = {}
    gammas = {}

    def numeric(region):
        if region not in kernels:
            kernels[region] = _numeric_window(resolvent_window(p, region, window), w0, lam0)
            gammas[region] = gamma(p, region)
        return kernels[region]

    xs = {m: x_col(p, m) for m in range(m_lo, m_hi + 1)}
    ys = {n: y_row(p, n) for n in range(n_lo, n_hi + 1)}
    pairs = []
    for h_minus, h_plus in h_pairs:
        lo, hi, surface = _classify_pair(abs(w0), h_minus, h_plus, allow_interior)
        k_lo, k_hi = numeric(lo), numeric(hi)
        # the branch difference is formed exactly; float rounding of x and y is
        # amplified by the cancellation inside x G y
        d_gamma = gammas[hi] - gammas[lo]
        worst = 0.0
        norms = {}
        for mn in k_lo:
            jump = k_hi[mn] - k_lo[mn]
            expected = (-(xs[mn[0]] @ d_gamma @ ys[mn[1]])).evaluate(w0, lam0)
            scale = max(np.linalg.norm(expected), np.linalg.norm(k_lo[mn]),
                        np.linalg.norm(k_hi[mn]))
            err = np.linalg.norm(jump - expected)
            if scale > 0:
                err /= scale
            worst = max(worst, float(err))
            norms[f"{mn[0]},{mn[1]}"] = float(np.linalg.norm(jump))
        pairs.append(ProbePair(h_minus, h_plus, lo.value, hi.value, surface,
                               worst <= PROBE_RTOL, worst, norms))
    return ProbeReport(str(p), complex(w0), lam0, window, pairs)


# sweeps

def sweep_columns(entries: Sequence[Tuple[int, int]]) -> List[str]:
    """CSV header: grid point, region, status, then |h^(n-m) M(m, n)| and the
    jump |M(m, n)(next h) - M(m, n)(h)| of the h-stripped entry per listed (m, n)."""
    cols = ["abs_w", "h", "region", "status"]
    cols += [f"abs_m{m}_n{n}" for m, n in entries]
    cols += [f"jump_m{m}_n{n}" for m, n in entries]
    return cols


def _sweep_block(args) -> List[dict]:
    p, abs_w, h_grid, entries, lam0, phase = args
    w0 = abs_w * cmath.exp(1j * phase)
    rows: List[dict] = []
    stripped: List[Optional[Dict]] = []
    cache: Dict[RegionTag, KernelWindow] = {}
    if entries:
        ms, ns = [m for m, _ in entries], [n for _, n in entries]
        window = (min(ms), max(ms), min(ns), max(ns))
    for h in h_grid:
        row = {c: "" for c in sweep_columns(entries)}
        row.update(abs_w=abs_w, h=h)
        values = None
        try:
            if abs_w == 0:
                raise ValueError("w0 = 0 is a pole of every entry")
            region = region_classify(abs_w, h)
            row["region"] = region.value
            if entries:
                if region not in cache:
                    cache[region] = resolvent_window(p, region, window)
                values = {mn: cache[region][mn].evaluate(w0, lam0) for mn in entries}
                for m, n in entries:
                    row[f"abs_m{m}_n{n}"] = float(np.linalg.norm(h ** (n - m) * values[m, n]))
            row["status"] = "ok"
        except BoundarySurface:
            row["status"] = "boundary"
            values = None
        except (AlresError, ValueError, ZeroDivisionError, OverflowError) as exc:
            row["status"] = f"error:{type(exc).__name__}"
            values = None
        rows.append(row)
        stripped.append(values)
    for i in range(len(rows) - 1):
        a, b = stripped[i], stripped[i + 1]
        if a is not None and b is not None:
            for m, n in entries:
                rows[i][f"jump_m{m}_n{n}"] = float(np.linalg.norm(b[m, n] - a[m, n]))
    return rows


def sweep(p: Potential, w_grid: Sequence[float], h_grid: Sequence[float],
          entries: Sequence[Tuple[int, int]] = (), lam0: complex = DEFAULT_LAM0,
          phase: float = 0.0, jobs: int = 1) -> List[dict]:
    """One row per (|w|, h) grid point in w-major order; failures become row markers."""
    entries = [tuple(e) for e in entries]
    tasks = [(p, float(a), [float(h) for h in h_grid], entries, lam0, phase) for a in w_grid]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            blocks = list(pool.map(_sweep_block, tasks))
    else:
        blocks = [_sweep_block(t) for t in tasks]
    return [row for block in blocks for row in block]


def sample_interior_points(count: int, seed: int = 0) -> Dict[RegionTag, List[Tuple[complex, float]]]:
    rng = random.Random(seed)
    return {region: [interior_point(region, rng) for _ in range(count)] for region in REGIONS}
