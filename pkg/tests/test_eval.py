import hashlib
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from pupilscreen import (
    InvalidSpec,
    LabeledScore,
    OneClassOnly,
    PipelineConfig,
    SynthSpec,
    evaluate_manifest,
    generate_synth_corpus,
    read_manifest,
    roc,
    score_histogram,
    sweep_d,
    trapezoid_auc,
    youden_threshold,
)


def labeled(real, gan):
    out = [LabeledScore(f"r{i}", "real", s) for i, s in enumerate(real)]
    out += [LabeledScore(f"g{i}", "gan", s) for i, s in enumerate(gan)]
    return out


class TestRoc:
    def test_perfect_separation(self):
        curve = roc(labeled([0.9, 0.8, 0.7], [0.3, 0.2, 0.1]))
        assert curve.auc == 1.0
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1] == (1.0, 1.0)

    def test_all_ties(self):
        curve = roc(labeled([0.5, 0.5, 0.5], [0.5, 0.5]))
        assert curve.auc == 0.5
        assert trapezoid_auc(curve.points) == pytest.approx(0.5, abs=1e-15)

    def test_hand_listed_example(self):
        scores = labeled([0.9, 0.8, 0.4], [0.7, 0.3, 0.2])
        curve = roc(scores)
        assert curve.auc == pytest.approx(8 / 9, abs=1e-15)
        pos = [s.score for s in scores if s.label == "real"]
        neg = [s.score for s in scores if s.label == "gan"]
        assert curve.auc == oracles.auc_pairs_ref(pos, neg)

    def test_one_class_only(self):
        with pytest.raises(OneClassOnly):
            roc(labeled([0.9, 0.8], []))

    def test_fpr_sorted_and_endpoints(self, rng):
        scores = labeled(rng.random(30).tolist(), rng.random(25).tolist())
        curve = roc(scores)
        fprs = [p[0] for p in curve.points]
        assert fprs == sorted(fprs)
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1] == (1.0, 1.0)
        assert curve.thresholds[0] == math.inf

    @given(st.integers(0, 300))
    def test_rank_auc_equals_trapezoid_auc(self, seed):
        rng = np.random.default_rng(seed)
        n_pos = int(rng.integers(1, 25))
        n_neg = int(rng.integers(1, 25))
        # quantized scores force plenty of ties
        pos = (rng.integers(0, 8, n_pos) / 8.0).tolist()
        neg = (rng.integers(0, 8, n_neg) / 8.0).tolist()
        curve = roc(labeled(pos, neg))
        assert abs(curve.auc - trapezoid_auc(curve.points)) < 1e-12
        assert curve.auc == oracles.auc_pairs_ref(pos, neg)

    @given(st.integers(0, 100))
    def test_monotone_transform_invariance(self, seed):
        rng = np.random.default_rng(seed)
        pos = rng.random(12).tolist()
        neg = rng.random(9).tolist()
        base = roc(labeled(pos, neg)).auc
        squashed = roc(labeled([p**3 for p in pos], [n**3 for n in neg])).auc
        assert base == pytest.approx(squashed, abs=1e-12)

    @given(st.integers(0, 100))
    def test_relabel_maps_auc_to_complement(self, seed):
        rng = np.random.default_rng(seed)
        pos = rng.random(10).tolist()
        neg = rng.random(11).tolist()
        forward = roc(labeled(pos, neg)).auc
        swapped = roc(labeled(neg, pos)).auc
        assert forward == pytest.approx(1.0 - swapped, abs=1e-12)

    def test_youden_threshold_separating_case(self):
        scores = labeled([0.9, 0.8, 0.7], [0.3, 0.2])
        t = youden_threshold(scores)
        assert 0.3 < t <= 0.7


class TestHistogram:
    def test_all_ones_in_last_bin(self):
        rows = score_histogram(labeled([1.0, 1.0], [1.0]), bins=10)
        assert rows[-1][2] == 1.0 and rows[-1][3] == 1.0
        assert sum(r[2] for r in rows) == 1.0

    def test_fractions_sum_to_one_per_class(self, rng):
        scores = labeled(rng.random(40).tolist(), rng.random(30).tolist())
        rows = score_histogram(scores, bins=12)
        assert sum(r[2] for r in rows) == pytest.approx(1.0, abs=1e-12)
        assert sum(r[3] for r in rows) == pytest.approx(1.0, abs=1e-12)

    def test_matches_direct_counting(self, rng):
        real = rng.random(25).tolist()
        gan = rng.random(35).tolist()
        rows = score_histogram(labeled(real, gan), bins=5)
        for lo, hi, real_frac, gan_frac in rows:
            last = hi == 1.0
            count_real = sum(1 for s in real if lo <= s < hi or (last and s == 1.0))
            count_gan = sum(1 for s in gan if lo <= s < hi or (last and s == 1.0))
            assert real_frac == count_real / len(real)
            assert gan_frac == count_gan / len(gan)

    def test_bad_bins(self):
        with pytest.raises(ValueError):
            score_histogram(labeled([0.5], [0.4]), bins=1)


def tree_digest(root: Path) -> dict[str, str]:
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


class TestSynthCorpus:
    def test_deterministic_given_seed(self, tmp_path):
        spec = SynthSpec(n_per_class=4, width=64, height=64, axes_range=(8.0, 14.0), seed=5)
        generate_synth_corpus(spec, tmp_path / "a")
        generate_synth_corpus(spec, tmp_path / "b")
        assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")

    def test_seed_changes_output(self, tmp_path):
        base = dict(n_per_class=3, width=64, height=64, axes_range=(8.0, 14.0))
        generate_synth_corpus(SynthSpec(seed=1, **base), tmp_path / "a")
        generate_synth_corpus(SynthSpec(seed=2, **base), tmp_path / "b")
        assert tree_digest(tmp_path / "a") != tree_digest(tmp_path / "b")

    def test_manifest_loads_and_scores(self, tmp_path):
        spec = SynthSpec(n_per_class=5, width=96, height=96, axes_range=(10.0, 20.0), seed=3)
        manifest = generate_synth_corpus(spec, tmp_path)
        entries = read_manifest(manifest)
        assert len(entries) == 10
        assert {e.label for e in entries} == {"real", "gan"}
        result = evaluate_manifest(entries, PipelineConfig())
        assert len(result.faces) == 10
        assert result.n_real == 5 and result.n_gan == 5

    def test_invalid_spec_rejected(self):
        with pytest.raises(InvalidSpec):
            SynthSpec(n_per_class=0)
        with pytest.raises(InvalidSpec):
            SynthSpec(axes_range=(40.0, 20.0))
        with pytest.raises(InvalidSpec):
            SynthSpec(width=64, height=64, axes_range=(30.0, 35.0))  # does not fit

    def test_spec_json_round_trip(self):
        spec = SynthSpec(n_per_class=9, seed=123)
        again = SynthSpec.from_json_dict(spec.to_json_dict())
        assert again == spec
        with pytest.raises(InvalidSpec):
            SynthSpec.from_json_dict({"bogus": 1})


@pytest.fixture(scope="module")
def small_corpus(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("sweepcorpus")
    spec = SynthSpec(
        n_per_class=12, width=96, height=96,
        axes_range=(10.0, 18.0), perturb_amplitude_range=(1.0, 2.0), seed=17,
    )
    return generate_synth_corpus(spec, outdir)


class TestSweep:
    def test_saturated_d_reproduces_plain_iou_auc(self, small_corpus):
        from pupilscreen import iou
        from pupilscreen.pipeline import prepare_face

        config = PipelineConfig()
        entries = read_manifest(small_corpus)
        d_sat = math.ceil(math.hypot(96, 96))
        pairs = sweep_d(entries, [2, d_sat], config)

        scores = []
        for entry in entries:
            left, right = prepare_face(entry, config)
            vals = [iou(p.fitted, p.predicted) for p in (left, right) if p.status == "ok"]
            scores.append(LabeledScore(entry.face_id, entry.label, sum(vals) / len(vals)))
        plain_auc = roc(scores).auc
        assert pairs[-1][1] == plain_auc

    def test_single_d_matches_evaluate(self, small_corpus):
        config = PipelineConfig(d=4)
        entries = read_manifest(small_corpus)
        pairs = sweep_d(entries, [4], config)
        result = evaluate_manifest(entries, config)
        assert pairs == [(4, result.curve.auc)]

    def test_bad_d_values(self, small_corpus):
        with pytest.raises(ValueError):
            sweep_d(read_manifest(small_corpus), [], PipelineConfig())
        with pytest.raises(ValueError):
            sweep_d(read_manifest(small_corpus), [0, 4], PipelineConfig())
