"""Referential-tracking metrics: HOTA variants and balanced accuracy.

HOTA is computed per localization threshold alpha: detections are matched
one-to-one per timestamp by optimal assignment maximizing total similarity;
matched pairs with similarity >= alpha are true positives. DetA = TP/(TP+FN+FP),
AssA averages TPA/(TPA+FNA+FPA) over TPs, HOTA_alpha = sqrt(DetA*AssA), and
the score is the mean over alphas, as a percentage.

The three modes differ only in which detections exist:
  standard  every observed stamp of every input track
  temporal  exactly the referred stamps
  track     every observed stamp of tracks referred anywhere
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from scenariomine import geom
from scenariomine.core import ScenarioSet, Track, TrackBox

MODES = ("standard", "temporal", "track")
ROLES = ("REFERRED", "RELATED")

DEFAULT_ALPHAS = tuple(round(a * 0.05, 2) for a in range(1, 20))


@dataclass(frozen=True)
class EvalConfig:
    similarity: str = "iou3d"  # or "centroid"
    alpha_thresholds: tuple = DEFAULT_ALPHAS
    centroid_scale_m: float = 2.0  # sim = max(0, 1 - dist/scale) for "centroid"
    role: str = "REFERRED"
    score_related: bool = False

    def __post_init__(self):
        alphas = self.alpha_thresholds
        if not alphas or any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("alpha thresholds must be strictly increasing")
        if not all(0.0 < a < 1.0 for a in alphas):
            raise ValueError("alpha thresholds must lie in (0, 1)")
        if self.similarity not in ("iou3d", "centroid"):
            raise ValueError("similarity must be 'iou3d' or 'centroid'")


DEFAULT_EVAL_CONFIG = EvalConfig()


@dataclass
class EvalReport:
    hota: float
    hota_temporal: float
    hota_track: float
    log_balanced_accuracy: float
    timestamp_balanced_accuracy: float
    per_prompt: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "hota": self.hota,
            "hota_temporal": self.hota_temporal,
            "hota_track": self.hota_track,
            "log_balanced_accuracy": self.log_balanced_accuracy,
            "timestamp_balanced_accuracy": self.timestamp_balanced_accuracy,
            "per_prompt": self.per_prompt,
        }


def box_iou_3d(a: TrackBox, b: TrackBox) -> float:
    """Oriented 3D IoU: BEV rectangle intersection times vertical overlap,
    over the union volume."""
    inter_bev = float(
        geom.rect_intersection_area(
            np.array([[a.translation[0], a.translation[1], a.size[0], a.size[1], a.yaw]]),
            np.array([[b.translation[0], b.translation[1], b.size[0], b.size[1], b.yaw]]),
        )[0]
    )
    za0 = a.translation[2] - a.size[2] / 2.0
    za1 = a.translation[2] + a.size[2] / 2.0
    zb0 = b.translation[2] - b.size[2] / 2.0
    zb1 = b.translation[2] + b.size[2] / 2.0
    dz = max(0.0, min(za1, zb1) - max(za0, zb0))
    inter = inter_bev * dz
    vol_a = a.size[0] * a.size[1] * a.size[2]
    vol_b = b.size[0] * b.size[1] * b.size[2]
    union = vol_a + vol_b - inter
    return inter / union if union > 0 else 0.0


def _similarity_rows(tracks_a, rows_a, tracks_b, rows_b, config: EvalConfig) -> np.ndarray:
    """(len(a), len(b)) similarity matrix for detections at one timestamp."""
    n, m = len(rows_a), len(rows_b)
    out = np.zeros((n, m))
    if config.similarity == "centroid":
        pa = np.array([tracks_a[i].xy[r] for i, r in rows_a])
        pb = np.array([tracks_b[i].xy[r] for i, r in rows_b])
        d = np.sqrt(((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2))
        return np.maximum(0.0, 1.0 - d / config.centroid_scale_m)
    params_a = np.array(
        [
            [
                t.translations[r][0],
                t.translations[r][1],
                t.sizes[r][0],
                t.sizes[r][1],
                t.yaws[r],
            ]
            for t, r in ((tracks_a[i], r) for i, r in rows_a)
        ]
    )
    params_b = np.array(
        [
            [
                t.translations[r][0],
                t.translations[r][1],
                t.sizes[r][0],
                t.sizes[r][1],
                t.yaws[r],
            ]
            for t, r in ((tracks_b[i], r) for i, r in rows_b)
        ]
    )
    ii, jj = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
    inter_bev = geom.rect_intersection_area(
        params_a[ii.ravel()], params_b[jj.ravel()]
    ).reshape(n, m)
    za = np.array([(tracks_a[i].translations[r][2], tracks_a[i].sizes[r][2]) for i, r in rows_a])
    zb = np.array([(tracks_b[i].translations[r][2], tracks_b[i].sizes[r][2]) for i, r in rows_b])
    lo = np.maximum(za[:, None, 0] - za[:, None, 1] / 2, zb[None, :, 0] - zb[None, :, 1] / 2)
    hi = np.minimum(za[:, None, 0] + za[:, None, 1] / 2, zb[None, :, 0] + zb[None, :, 1] / 2)
    dz = np.maximum(0.0, hi - lo)
    inter = inter_bev * dz
    vol_a = np.array([np.prod(tracks_a[i].sizes[r]) for i, r in rows_a])
    vol_b = np.array([np.prod(tracks_b[i].sizes[r]) for i, r in rows_b])
    union = vol_a[:, None] + vol_b[None, :] - inter
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(union > 0, inter / union, 0.0)
    return out


def role_stamps(scenario: ScenarioSet, role: str) -> dict[str, set[int]]:
    """Track -> stamps for a role: REFERRED uses entry timestamps, RELATED
    collects relationship stamps keyed by the related object."""
    if role == "REFERRED":
        return {tid: set(e.timestamps) for tid, e in scenario.entries.items()}
    if role == "RELATED":
        out: dict[str, set[int]] = {}
        for entry in scenario.entries.values():
            for rid, stamps in entry.related.items():
                out.setdefault(rid, set()).update(stamps)
        return out
    raise ValueError(f"role must be one of {ROLES}")


def _detections(tracks: Mapping[str, Track], referred: dict[str, set[int]], mode: str):
    """(track id, timestamp) detections for a mode; validates duplicates.

    standard ignores the referral sets and uses every provided track; temporal
    uses exactly the referred stamps; track uses the whole observation of any
    track referred somewhere.
    """
    if mode == "standard":
        ids = sorted(tracks)
    else:
        ids = sorted(tid for tid, stamps in referred.items() if stamps)
    dets: dict[int, list[tuple[str, int]]] = defaultdict(list)
    count = 0
    for tid in ids:
        track = tracks.get(tid)
        if track is None:
            raise ValueError(f"no track geometry for id {tid!r}")
        if mode == "temporal":
            use = sorted(referred[tid])
        else:
            use = [int(t) for t in track.timestamps]
        seen = set()
        for t in use:
            if (tid, t) in seen:
                raise ValueError(f"duplicate detection ({tid!r}, {t})")
            seen.add((tid, t))
            dets[t].append((tid, track.row_of(t)))
            count += 1
    return dets, count


@dataclass
class _Accumulator:
    """Per-alpha counts pooled across instances."""

    alphas: tuple
    tp: np.ndarray = None
    fp: np.ndarray = None
    fn: np.ndarray = None
    pair_tp: list = None  # per alpha: Counter[(pred id, gt id)] -> count
    pred_dets: Counter = None
    gt_dets: Counter = None

    def __post_init__(self):
        n = len(self.alphas)
        self.tp = np.zeros(n)
        self.fp = np.zeros(n)
        self.fn = np.zeros(n)
        self.pair_tp = [Counter() for _ in range(n)]
        self.pred_dets = Counter()
        self.gt_dets = Counter()

    def empty(self) -> bool:
        return not self.pred_dets and not self.gt_dets

    def score(self) -> float:
        if self.empty():
            return 100.0
        hotas = []
        for k in range(len(self.alphas)):
            denom = self.tp[k] + self.fn[k] + self.fp[k]
            det_a = self.tp[k] / denom if denom > 0 else 0.0
            if self.tp[k] > 0:
                ass = 0.0
                for (pid, gid), c in self.pair_tp[k].items():
                    fna = self.gt_dets[gid] - c
                    fpa = self.pred_dets[pid] - c
                    ass += c * (c / (c + fna + fpa))
                ass_a = ass / self.tp[k]
            else:
                ass_a = 0.0
            hotas.append(math.sqrt(det_a * ass_a))
        return float(np.mean(hotas) * 100.0)


def _accumulate(
    acc: _Accumulator,
    pred_tracks: Mapping[str, Track],
    pred_referred: dict[str, set[int]],
    gt_tracks: Mapping[str, Track],
    gt_referred: dict[str, set[int]],
    mode: str,
    config: EvalConfig,
    instance: object = None,
):
    pred_dets, n_pred = _detections(pred_tracks, pred_referred, mode)
    gt_dets, n_gt = _detections(gt_tracks, gt_referred, mode)
    alphas = np.asarray(acc.alphas)
    for tid_stamps, counter in ((pred_dets, acc.pred_dets), (gt_dets, acc.gt_dets)):
        for t, items in tid_stamps.items():
            for tid, _ in items:
                counter[(instance, tid)] += 1
    timestamps = sorted(set(pred_dets) | set(gt_dets))
    for t in timestamps:
        preds = pred_dets.get(t, [])
        gts = gt_dets.get(t, [])
        if preds and gts:
            sim = _similarity_rows(
                pred_tracks, [(tid, r) for tid, r in preds], gt_tracks, gts, config
            )
            rows, cols = linear_sum_assignment(-sim)
            matched_sims = sim[rows, cols]
            for k, alpha in enumerate(alphas):
                ok = matched_sims >= alpha
                n_tp = int(ok.sum())
                acc.tp[k] += n_tp
                acc.fp[k] += len(preds) - n_tp
                acc.fn[k] += len(gts) - n_tp
                for r, c, good in zip(rows, cols, ok):
                    if good:
                        acc.pair_tp[k][
                            ((instance, preds[r][0]), (instance, gts[c][0]))
                        ] += 1
        else:
            acc.fp += len(preds)
            acc.fn += len(gts)


def hota(
    pred_tracks: Mapping[str, Track],
    pred_scenario: ScenarioSet,
    gt_tracks: Mapping[str, Track],
    gt_scenario: ScenarioSet,
    mode: str = "standard",
    config: EvalConfig = DEFAULT_EVAL_CONFIG,
) -> float:
    """HOTA percentage for one prediction/ground-truth pair."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    acc = _Accumulator(config.alpha_thresholds)
    _accumulate(
        acc,
        pred_tracks,
        role_stamps(pred_scenario, config.role),
        gt_tracks,
        role_stamps(gt_scenario, config.role),
        mode,
        config,
    )
    return acc.score()


def hota_pooled(instances: Iterable[tuple], mode: str, config: EvalConfig = DEFAULT_EVAL_CONFIG) -> float:
    """HOTA pooled over (key, pred_tracks, pred_scenario, gt_tracks,
    gt_scenario) instances: counts accumulate before the final score."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    acc = _Accumulator(config.alpha_thresholds)
    for key, pred_tracks, pred_scenario, gt_tracks, gt_scenario in instances:
        _accumulate(
            acc,
            pred_tracks,
            role_stamps(pred_scenario, config.role),
            gt_tracks,
            role_stamps(gt_scenario, config.role),
            mode,
            config,
            instance=key,
        )
    return acc.score()


def balanced_accuracy(
    pred: Mapping[tuple, ScenarioSet],
    gt: Mapping[tuple, ScenarioSet],
    level: str = "log",
    grids: Mapping[str, Iterable[int]] | None = None,
) -> float:
    """(TPR + TNR)/2 as a percentage over (prompt, log) pairs.

    level="log": a pair is positive iff any referred object exists.
    level="timestamp": outcomes per (prompt, log, grid timestamp); grids maps
    log id -> evaluation timestamps.
    """
    if set(pred) != set(gt):
        raise ValueError("prediction and ground-truth pairings differ")
    outcomes = []  # (actual, predicted)
    for key in sorted(gt):
        gt_set = gt[key]
        pred_set = pred[key]
        if level == "log":
            outcomes.append((bool(gt_set.entries), bool(pred_set.entries)))
        elif level == "timestamp":
            if grids is None:
                raise ValueError("timestamp level requires grids")
            log_id = key[1]
            gt_stamps = set()
            for entry in gt_set.entries.values():
                gt_stamps.update(entry.timestamps)
            pred_stamps = set()
            for entry in pred_set.entries.values():
                pred_stamps.update(entry.timestamps)
            for t in grids[log_id]:
                outcomes.append((t in gt_stamps, t in pred_stamps))
        else:
            raise ValueError("level must be 'log' or 'timestamp'")
    pos = sum(1 for actual, _ in outcomes if actual)
    neg = len(outcomes) - pos
    if pos == 0 or neg == 0:
        raise ValueError("balanced accuracy undefined without both positives and negatives")
    tp = sum(1 for actual, predicted in outcomes if actual and predicted)
    tn = sum(1 for actual, predicted in outcomes if not actual and not predicted)
    tpr = tp / pos
    tnr = tn / neg
    return (tpr + tnr) / 2.0 * 100.0
