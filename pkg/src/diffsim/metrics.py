"""Temporal distance between two event logs: earth mover's distance over
cycle-time histograms (EMD-CT) and over hourly timestamp histograms (EMD-WR).

EMD values live on an absolute, dataset-dependent scale: they rank candidate
models against one fixed reference log and must never be compared across
reference logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime

import numpy as np

from .eventlog import EventLog

CT_BASE_BINS = 100
HOURS_PER_WEEK = 168

NORMALIZE_MODES = ("mass", "raw")
WR_MODES = ("absolute-hour", "hour-of-week")


@dataclass(frozen=True)
class Histogram:
    masses: tuple[float, ...]
    width: float
    origin: float

    def __post_init__(self) -> None:
        if any(m < 0 for m in self.masses):
            raise ValueError("histogram masses must be nonnegative")

    @property
    def total(self) -> float:
        return float(sum(self.masses))


def emd_1d(h1: Histogram, h2: Histogram, normalize: str = "mass") -> float:
    """Minimal transport cost between two histograms on a shared binning,
    with ground distance = bin index difference (cumulative-difference
    formula). Masses are scaled to a common total first: mode "mass" scales
    both to 1, mode "raw" rescales to the mean of the two raw totals."""
    if normalize not in NORMALIZE_MODES:
        raise ValueError(f"unknown normalization mode {normalize!r}")
    if not math.isclose(h1.width, h2.width, rel_tol=1e-12) or not math.isclose(
        h1.origin, h2.origin, rel_tol=1e-12, abs_tol=1e-9
    ):
        raise ValueError("histograms must share bin width and origin")
    n = max(len(h1.masses), len(h2.masses))
    a = np.zeros(n)
    b = np.zeros(n)
    a[: len(h1.masses)] = h1.masses
    b[: len(h2.masses)] = h2.masses
    ta, tb = a.sum(), b.sum()
    if ta == 0 or tb == 0:
        raise ValueError("histogram carries no mass")
    base = float(np.abs(np.cumsum(a / ta - b / tb)).sum())
    if normalize == "mass":
        return base
    return base * (ta + tb) / 2.0


def _cycle_times(log: EventLog) -> list[float]:
    return [t.cycle_seconds for t in log.traces]


def _bin_index(x: float, origin: float, width: float, last_base_bin: int) -> int:
    idx = math.floor((x - origin) / width)
    # the right edge of the base range is inclusive
    if idx == last_base_bin + 1 and x <= origin + (last_base_bin + 1) * width:
        idx = last_base_bin
    return idx


def _aligned_histograms(
    ref_values: list[float], other_values: list[float], base_bins: int
) -> tuple[Histogram, Histogram]:
    """Bin ref_values into `base_bins` equidistant bins spanning their range;
    bin other_values with the same width and origin, appending overflow bins
    on either side as needed."""
    rmin, rmax = min(ref_values), max(ref_values)
    width = (rmax - rmin) / base_bins
    if width == 0:
        width = 1.0
    idx_ref = [_bin_index(x, rmin, width, base_bins - 1) for x in ref_values]
    idx_other = [_bin_index(x, rmin, width, base_bins - 1) for x in other_values]
    lo = min(0, *idx_other)
    hi = max(base_bins - 1, *idx_other)
    size = hi - lo + 1
    a = [0.0] * size
    b = [0.0] * size
    for i in idx_ref:
        a[i - lo] += 1.0
    for i in idx_other:
        b[i - lo] += 1.0
    origin = rmin + lo * width
    return Histogram(tuple(a), width, origin), Histogram(tuple(b), width, origin)


def emd_ct(real: EventLog, simulated: EventLog, normalize: str = "mass") -> float:
    """EMD between trace cycle-time histograms; binning anchored on the real
    log (100 equidistant bins over its range), simulated values binned with
    the same width and origin."""
    if not real.traces or not simulated.traces:
        raise ValueError("empty log")
    h_real, h_sim = _aligned_histograms(_cycle_times(real), _cycle_times(simulated), CT_BASE_BINS)
    return emd_1d(h_real, h_sim, normalize)


def _stamps(log: EventLog) -> list[datetime]:
    out = []
    for ev in log.events():
        out.append(ev.start)
        out.append(ev.end)
    return out


def emd_wr(
    real: EventLog,
    simulated: EventLog,
    mode: str = "absolute-hour",
    normalize: str = "mass",
) -> float:
    """EMD between the hourly histograms of all start/end timestamps.

    absolute-hour buckets by whole hours since the earlier log's first
    timestamp; hour-of-week folds stamps into 168 weekly slots.
    """
    if mode not in WR_MODES:
        raise ValueError(f"unknown work-rhythm mode {mode!r}")
    if not real.traces or not simulated.traces:
        raise ValueError("empty log")
    real_stamps = _stamps(real)
    sim_stamps = _stamps(simulated)
    if mode == "hour-of-week":
        a = [0.0] * HOURS_PER_WEEK
        b = [0.0] * HOURS_PER_WEEK
        for t in real_stamps:
            a[t.weekday() * 24 + t.hour] += 1.0
        for t in sim_stamps:
            b[t.weekday() * 24 + t.hour] += 1.0
        return emd_1d(Histogram(tuple(a), 1.0, 0.0), Histogram(tuple(b), 1.0, 0.0), normalize)
    t0 = min(min(real_stamps), min(sim_stamps))
    idx_a = [int((t - t0).total_seconds() // 3600) for t in real_stamps]
    idx_b = [int((t - t0).total_seconds() // 3600) for t in sim_stamps]
    size = max(max(idx_a), max(idx_b)) + 1
    a = [0.0] * size
    b = [0.0] * size
    for i in idx_a:
        a[i] += 1.0
    for i in idx_b:
        b[i] += 1.0
    return emd_1d(Histogram(tuple(a), 1.0, 0.0), Histogram(tuple(b), 1.0, 0.0), normalize)


def compare_runs(
    real: EventLog,
    simulated: list[EventLog],
    labels: list[str] | None = None,
    normalize: str = "mass",
    wr_mode: str = "absolute-hour",
) -> list[dict]:
    """One comparison row per simulated log against a single reference log."""
    if not simulated:
        raise ValueError("need at least one simulated log")
    if labels is not None and len(labels) != len(simulated):
        raise ValueError("one label per simulated log required")
    from .eventlog import compute_kpis

    real_kpis = compute_kpis(real)
    real_ct = real_kpis.aggregates["cycle_time"]["mean"]
    real_wt = real_kpis.aggregates["waiting_time"]["mean"]
    real_pt = real_kpis.aggregates["processing_time"]["mean"]
    rows = []
    for i, sim in enumerate(simulated):
        kpis = compute_kpis(sim)
        rows.append(
            {
                "label": labels[i] if labels else f"simulated_{i + 1}",
                "emd_ct": emd_ct(real, sim, normalize),
                "emd_wr": emd_wr(real, sim, wr_mode, normalize),
                "normalize": normalize,
                "wr_mode": wr_mode,
                "mean_cycle_time_delta": kpis.aggregates["cycle_time"]["mean"] - real_ct,
                "mean_waiting_time_delta": kpis.aggregates["waiting_time"]["mean"] - real_wt,
                "mean_processing_time_delta": kpis.aggregates["processing_time"]["mean"] - real_pt,
            }
        )
    return rows
