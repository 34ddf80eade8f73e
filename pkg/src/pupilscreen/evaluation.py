"""Evaluation harness: ROC/AUC, score histograms, d-sweep, synthetic corpus.

The synthetic corpus stands in for large face datasets at desk scale: the
"real" class is clean rasterized ellipses, the "gan" class the same ellipse
population with low-frequency radial boundary perturbation. Generation is
bit-deterministic for a given seed.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from .ellipse import EllipseGeometry, rasterize_ellipse
from .errors import InvalidSpec, OneClassOnly
from .maskio import write_mask
from .pipeline import (
    FaceScore,
    ManifestEntry,
    PipelineConfig,
    face_from_prepared,
    prepare_face,
    read_manifest,
)

LABEL_REAL = "real"
LABEL_GAN = "gan"

_PERTURB_HARMONICS = 3  # sinusoid terms per perturbed boundary


@dataclass(frozen=True)
class LabeledScore:
    """One scored face with its ground-truth class."""

    face_id: str
    label: str
    score: float


@dataclass(frozen=True)
class RocCurve:
    """ROC samples (fpr ascending from (0,0) to (1,1)) plus rank-based AUC."""

    points: tuple[tuple[float, float], ...]
    thresholds: tuple[float, ...]
    auc: float


def _split_by_label(scores) -> tuple[np.ndarray, np.ndarray]:
    pos = np.array([s.score for s in scores if s.label == LABEL_REAL], dtype=float)
    neg = np.array([s.score for s in scores if s.label == LABEL_GAN], dtype=float)
    if len(pos) == 0 or len(neg) == 0:
        raise OneClassOnly(
            f"need scores from both classes, got {len(pos)} real / {len(neg)} gan"
        )
    return pos, neg


def roc(scores) -> RocCurve:
    """ROC curve and AUC with real as the positive class (higher = more real).

    The AUC is the Mann-Whitney rank statistic with half credit for ties,
    which equals the trapezoidal area under the emitted threshold-sweep
    points exactly.
    """
    pos, neg = _split_by_label(scores)
    ranks = rankdata(np.concatenate([pos, neg]))
    n_pos, n_neg = len(pos), len(neg)
    auc = (ranks[:n_pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)

    pos_sorted = np.sort(pos)
    neg_sorted = np.sort(neg)
    points = [(0.0, 0.0)]
    thresholds = [math.inf]
    for value in np.unique(np.concatenate([pos, neg]))[::-1]:
        tp = n_pos - np.searchsorted(pos_sorted, value, side="left")
        fp = n_neg - np.searchsorted(neg_sorted, value, side="left")
        points.append((fp / n_neg, tp / n_pos))
        thresholds.append(float(value))
    return RocCurve(points=tuple(points), thresholds=tuple(thresholds), auc=float(auc))


def trapezoid_auc(points) -> float:
    """Trapezoidal area under (fpr, tpr) samples sorted by fpr."""
    pts = np.asarray(points, dtype=float)
    return float(np.trapezoid(pts[:, 1], pts[:, 0]))


def youden_threshold(scores) -> float:
    """Score threshold maximizing tpr - fpr; ties resolve to the highest threshold."""
    curve = roc(scores)
    best_j = -math.inf
    best_t = math.inf
    for (fpr, tpr), t in zip(curve.points, curve.thresholds):
        j = tpr - fpr
        if j > best_j:
            best_j, best_t = j, t
    return best_t


def score_histogram(scores, bins: int = 20) -> list[tuple[float, float, float, float]]:
    """Per-class normalized histogram rows (bin_lo, bin_hi, real_frac, gan_frac) over [0, 1]."""
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    pos, neg = _split_by_label(scores)
    edges = np.linspace(0.0, 1.0, bins + 1)
    pos_counts, _ = np.histogram(pos, bins=edges)
    neg_counts, _ = np.histogram(neg, bins=edges)
    return [
        (float(edges[i]), float(edges[i + 1]),
         float(pos_counts[i] / len(pos)), float(neg_counts[i] / len(neg)))
        for i in range(bins)
    ]


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the seeded synthetic mask corpus."""

    n_per_class: int = 200
    width: int = 128
    height: int = 128
    axes_range: tuple[float, float] = (15.0, 35.0)
    perturb_amplitude_range: tuple[float, float] = (1.5, 3.0)
    perturb_frequency_range: tuple[int, int] = (3, 8)
    seed: int = 7

    def __post_init__(self):
        if self.n_per_class < 1:
            raise InvalidSpec(f"n_per_class must be >= 1, got {self.n_per_class}")
        if self.width < 16 or self.height < 16:
            raise InvalidSpec(f"raster must be at least 16x16, got {self.width}x{self.height}")
        ax_lo, ax_hi = self.axes_range
        if not 0.0 < ax_lo <= ax_hi:
            raise InvalidSpec(f"bad axes_range {self.axes_range}")
        amp_lo, amp_hi = self.perturb_amplitude_range
        if not 0.0 <= amp_lo <= amp_hi:
            raise InvalidSpec(f"bad perturb_amplitude_range {self.perturb_amplitude_range}")
        f_lo, f_hi = self.perturb_frequency_range
        if not 1 <= f_lo <= f_hi:
            raise InvalidSpec(f"bad perturb_frequency_range {self.perturb_frequency_range}")
        # worst case: semi-major plus all harmonics peaking together plus center jitter
        reach = ax_hi + _PERTURB_HARMONICS * amp_hi + self._center_jitter()
        if 2.0 * reach >= min(self.width, self.height):
            raise InvalidSpec(
                f"ellipses (reach {reach:.1f} px) may not fit a "
                f"{self.width}x{self.height} raster"
            )

    def _center_jitter(self) -> float:
        return 0.05 * min(self.width, self.height)

    def to_json_dict(self) -> dict:
        return {
            "n_per_class": self.n_per_class,
            "raster": [self.width, self.height],
            "axes_range": list(self.axes_range),
            "perturb_amplitude_range": list(self.perturb_amplitude_range),
            "perturb_frequency_range": list(self.perturb_frequency_range),
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SynthSpec":
        if not isinstance(data, dict):
            raise InvalidSpec(f"spec must be a JSON object, got {type(data).__name__}")
        known = {
            "n_per_class", "raster", "axes_range",
            "perturb_amplitude_range", "perturb_frequency_range", "seed",
        }
        unknown = set(data) - known
        if unknown:
            raise InvalidSpec(f"unknown spec keys: {sorted(unknown)}")
        kwargs: dict = {}
        try:
            if "n_per_class" in data:
                kwargs["n_per_class"] = int(data["n_per_class"])
            if "raster" in data:
                width, height = data["raster"]
                kwargs["width"], kwargs["height"] = int(width), int(height)
            if "axes_range" in data:
                lo, hi = data["axes_range"]
                kwargs["axes_range"] = (float(lo), float(hi))
            if "perturb_amplitude_range" in data:
                lo, hi = data["perturb_amplitude_range"]
                kwargs["perturb_amplitude_range"] = (float(lo), float(hi))
            if "perturb_frequency_range" in data:
                lo, hi = data["perturb_frequency_range"]
                kwargs["perturb_frequency_range"] = (int(lo), int(hi))
            if "seed" in data:
                kwargs["seed"] = int(data["seed"])
        except (TypeError, ValueError) as exc:
            raise InvalidSpec(f"malformed spec value: {exc}") from exc
        return cls(**kwargs)


def _sample_geometry(rng: np.random.Generator, spec: SynthSpec) -> EllipseGeometry:
    jitter = spec._center_jitter()
    cx = spec.width / 2.0 + rng.uniform(-jitter, jitter)
    cy = spec.height / 2.0 + rng.uniform(-jitter, jitter)
    axes = np.sort(rng.uniform(spec.axes_range[0], spec.axes_range[1], size=2))[::-1]
    rotation = rng.uniform(0.0, math.pi)
    return EllipseGeometry(
        center_x=float(cx), center_y=float(cy),
        semi_major=float(axes[0]), semi_minor=float(axes[1]),
        rotation=float(rotation),
    )


def _sample_harmonics(rng: np.random.Generator, spec: SynthSpec):
    f_lo, f_hi = spec.perturb_frequency_range
    a_lo, a_hi = spec.perturb_amplitude_range
    terms = []
    for _ in range(_PERTURB_HARMONICS):
        k = int(rng.integers(f_lo, f_hi + 1))
        amplitude = float(rng.uniform(a_lo, a_hi))
        phase = float(rng.uniform(0.0, 2.0 * math.pi))
        terms.append((k, amplitude, phase))
    return terms


def rasterize_perturbed(geometry: EllipseGeometry, harmonics, width: int, height: int) -> np.ndarray:
    """Fill the star-shaped region whose radius is the ellipse radius plus
    a sum of radial sinusoids a_k * sin(k * phi + phase_k)."""
    xs = np.arange(width, dtype=float) + 0.5
    ys = np.arange(height, dtype=float) + 0.5
    dx = xs[np.newaxis, :] - geometry.center_x
    dy = ys[:, np.newaxis] - geometry.center_y
    phi = np.arctan2(dy, dx)
    t = phi - geometry.rotation
    r_ellipse = (geometry.semi_major * geometry.semi_minor) / np.sqrt(
        (geometry.semi_minor * np.cos(t)) ** 2 + (geometry.semi_major * np.sin(t)) ** 2
    )
    radius = r_ellipse
    for k, amplitude, phase in harmonics:
        radius = radius + amplitude * np.sin(k * phi + phase)
    radius = np.maximum(radius, 0.0)
    return dx * dx + dy * dy < radius * radius


def generate_synth_corpus(spec: SynthSpec, outdir) -> Path:
    """Write the corpus (PGM masks + manifest.csv + spec.json); returns the manifest path.

    The draw order is fixed, so runs with equal seeds emit byte-identical
    trees. Amplitude bounds are consumed through a uniform draw even when
    equal, which keeps geometry aligned across amplitude settings.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    masks_dir = outdir / "masks"
    masks_dir.mkdir(exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    rows = []
    for label in (LABEL_REAL, LABEL_GAN):
        for index in range(spec.n_per_class):
            face_id = f"{label}_{index:04d}"
            paths = []
            for eye in ("left", "right"):
                geometry = _sample_geometry(rng, spec)
                if label == LABEL_GAN:
                    harmonics = _sample_harmonics(rng, spec)
                    mask = rasterize_perturbed(geometry, harmonics, spec.width, spec.height)
                else:
                    mask = rasterize_ellipse(geometry, spec.width, spec.height)
                rel = f"masks/{face_id}_{eye}.pgm"
                write_mask(outdir / rel, mask)
                paths.append(rel)
            rows.append((face_id, label, paths[0], paths[1]))

    manifest_path = outdir / "manifest.csv"
    with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["face_id", "label", "left_path", "right_path"])
        writer.writerows(rows)
    with open(outdir / "spec.json", "w", encoding="utf-8") as fh:
        json.dump(spec.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


@dataclass(frozen=True)
class EvaluationResult:
    """Everything one evaluate run produces, in manifest order."""

    faces: tuple[FaceScore, ...]
    scores: tuple[LabeledScore, ...]
    curve: RocCurve
    config: PipelineConfig

    @property
    def n_real(self) -> int:
        return sum(1 for s in self.scores if s.label == LABEL_REAL)

    @property
    def n_gan(self) -> int:
        return sum(1 for s in self.scores if s.label == LABEL_GAN)


def _labeled(entries, faces) -> tuple[LabeledScore, ...]:
    return tuple(
        LabeledScore(face_id=face.face_id, label=entry.label, score=face.aggregate)
        for entry, face in zip(entries, faces)
        if entry.label in (LABEL_REAL, LABEL_GAN) and face.aggregate is not None
    )


def evaluate_manifest(entries, config: PipelineConfig) -> EvaluationResult:
    """Score every manifest entry and compute the ROC over the labeled ones."""
    if isinstance(entries, (str, Path)):
        entries = read_manifest(entries)
    faces = tuple(
        face_from_prepared(entry, prepare_face(entry, config), config)
        for entry in entries
    )
    scores = _labeled(entries, faces)
    return EvaluationResult(faces=faces, scores=scores, curve=roc(scores), config=config)


def sweep_d(entries, d_values, config: PipelineConfig) -> list[tuple[int, float]]:
    """AUC per band distance, reusing segmentation and fits across d values."""
    if isinstance(entries, (str, Path)):
        entries = read_manifest(entries)
    d_values = [int(d) for d in d_values]
    if not d_values or any(d < 1 for d in d_values):
        raise ValueError(f"d values must be a non-empty list of ints >= 1, got {d_values}")
    prepared = [(entry, prepare_face(entry, config)) for entry in entries]
    result = []
    for d in d_values:
        faces = [face_from_prepared(entry, prep, config, d=d) for entry, prep in prepared]
        scores = _labeled([entry for entry, _ in prepared], faces)
        result.append((d, roc(scores).auc))
    return result
