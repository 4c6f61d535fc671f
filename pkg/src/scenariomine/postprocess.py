"""Pre- and post-execution filters around program execution.

Fixed pipeline order: filter_top_k (before execution) -> execute ->
prune_far_relationships -> dilate_segments -> resample_output.
"""

from __future__ import annotations

import numpy as np

from scenariomine.config import (
    DEFAULT_POSTPROCESS_CONFIG,
    LARGE_TOP_K_CLASSES,
    PostprocessConfig,
)
from scenariomine.core import ScenarioEntry, ScenarioSet, Track
from scenariomine.io import LogBundle


def filter_top_k(
    tracks: list[Track], config: PostprocessConfig = DEFAULT_POSTPROCESS_CONFIG
) -> list[Track]:
    """Keep the K highest tracks per class by summed confidence (ties by id)."""
    by_class: dict[str, list[Track]] = {}
    for track in tracks:
        by_class.setdefault(track.category, []).append(track)
    kept: list[Track] = []
    for cls, group in by_class.items():
        k = config.top_k_large if cls in LARGE_TOP_K_CLASSES else config.top_k_other
        group = sorted(group, key=lambda t: (-t.summed_confidence(), t.track_id))
        kept.extend(group[:k])
    order = {t.track_id: i for i, t in enumerate(tracks)}
    return sorted(kept, key=lambda t: order[t.track_id])


def prune_far_relationships(
    result: ScenarioSet,
    bundle: LogBundle,
    config: PostprocessConfig = DEFAULT_POSTPROCESS_CONFIG,
) -> ScenarioSet:
    """Drop relationship timestamps where the two centroids are farther apart
    than relationship_max_dist; referred timestamps are untouched."""
    tracks = bundle.track_map()
    entries = {}
    for tid, entry in result.entries.items():
        track = tracks[tid]
        related = {}
        for rid, stamps in entry.related.items():
            other = tracks[rid]
            keep = []
            for t in stamps:
                a = track.xy[track.row_of(t)]
                b = other.xy[other.row_of(t)]
                if float(np.hypot(a[0] - b[0], a[1] - b[1])) <= config.relationship_max_dist:
                    keep.append(t)
            if keep:
                related[rid] = tuple(keep)
        entries[tid] = ScenarioEntry(entry.timestamps, related)
    return ScenarioSet(entries)


def _segments(stamps: list[int], observed: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of referred stamps that are consecutive on the track's
    observation grid; returned as (start, end) timestamps."""
    rows = {int(t): i for i, t in enumerate(observed)}
    stamps = sorted(stamps)
    segments = []
    start = prev = stamps[0]
    for t in stamps[1:]:
        if rows[t] == rows[prev] + 1:
            prev = t
        else:
            segments.append((start, prev))
            start = prev = t
    segments.append((start, prev))
    return segments


def dilate_segments(
    result: ScenarioSet,
    bundle: LogBundle,
    config: PostprocessConfig = DEFAULT_POSTPROCESS_CONFIG,
) -> ScenarioSet:
    """Symmetrically extend referred segments shorter than min_segment_s to
    that length, clipped to the track's observed span (excess shifted to the
    other side so the total is preserved where observable)."""
    min_ns = int(round(config.min_segment_s * 1e9))
    tracks = bundle.track_map()
    entries = {}
    for tid, entry in result.entries.items():
        observed = tracks[tid].timestamps
        first = int(observed[0])
        last = int(observed[-1])
        keep: set[int] = set()
        for start, end in _segments(list(entry.timestamps), observed):
            deficit = min_ns - (end - start)
            if deficit > 0:
                pad = deficit // 2
                lo = start - pad
                hi = end + (deficit - pad)
                if lo < first:
                    hi += first - lo
                    lo = first
                if hi > last:
                    lo -= hi - last
                    hi = last
                lo = max(lo, first)
            else:
                lo, hi = start, end
            i = int(np.searchsorted(observed, lo, side="left"))
            j = int(np.searchsorted(observed, hi, side="right"))
            keep.update(int(t) for t in observed[i:j])
        entries[tid] = ScenarioEntry(tuple(sorted(keep)), entry.related)
    return ScenarioSet(entries)


def resample_grid(observed: np.ndarray, anchor: int, rate_hz: float) -> list[int]:
    """The observed timestamps nearest to each 1/rate tick from the anchor
    (ties to the earlier stamp); deduplicated, sorted."""
    step = int(round(1e9 / rate_hz))
    if len(observed) == 0:
        return []
    first = int(observed[0])
    last = int(observed[-1])
    start_k = (first - anchor) // step
    picked = set()
    k = start_k
    while True:
        tick = anchor + k * step
        if tick > last + step:
            break
        if tick >= first - step:
            i = int(np.searchsorted(observed, tick))
            best = None
            for cand in (i - 1, i):
                if 0 <= cand < len(observed):
                    d = abs(int(observed[cand]) - tick)
                    if best is None or d < best[0]:
                        best = (d, int(observed[cand]))
            if best is not None and best[0] <= step // 2:
                picked.add(best[1])
        k += 1
    return sorted(picked)


def resample_output(
    result: ScenarioSet,
    bundle: LogBundle,
    config: PostprocessConfig = DEFAULT_POSTPROCESS_CONFIG,
) -> ScenarioSet:
    """Keep only timestamps on the output-rate subgrid (nearest observed stamp
    to each tick, anchored at the log's first observation)."""
    tracks = bundle.track_map()
    anchor = min(int(t.timestamps[0]) for t in bundle.tracks) if bundle.tracks else 0
    entries = {}
    for tid, entry in result.entries.items():
        grid = set(resample_grid(tracks[tid].timestamps, anchor, config.output_rate_hz))
        stamps = tuple(t for t in entry.timestamps if t in grid)
        related = {
            rid: tuple(t for t in st if t in grid) for rid, st in entry.related.items()
        }
        entries[tid] = ScenarioEntry(stamps, related)
    return ScenarioSet(entries)


def run_postprocess(
    result: ScenarioSet,
    bundle: LogBundle,
    config: PostprocessConfig = DEFAULT_POSTPROCESS_CONFIG,
) -> ScenarioSet:
    """Post-execution pipeline in its fixed order: prune -> dilate -> resample."""
    result = prune_far_relationships(result, bundle, config)
    result = dilate_segments(result, bundle, config)
    return resample_output(result, bundle, config)
