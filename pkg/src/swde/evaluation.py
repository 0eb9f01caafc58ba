"""Classification metrics and the published-results comparison report.

The positive class is clickbait, and a probability equal to the threshold
counts as positive. MSE is measured against the graded annotation mean when
a record carries one, falling back to the hard label otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from swde.corpus import Post
from swde.errors import ConfigError, UnlabeledPostsError
from swde.model import TrainedModel, score_post

# reference rows from the published comparison table: (name, f1, accuracy)
TABLE1_BASELINES = (
    ("Proposed Approach", 0.63, 0.8349),
    ("BiLSTM", 0.61, 0.8328),
    ("Feature Engineering SotA", 0.55, 0.8324),
    ("Concatenated NN", 0.39, 0.74),
)


@dataclass(frozen=True)
class Metrics:
    tp: int
    fp: int
    tn: int
    fn: int
    mse: float

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def precision(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def recall(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2.0 * p * r / (p + r) if p + r else 0.0


def tally(
    scored: Sequence[tuple[float, int, float | None]], threshold: float = 0.5
) -> Metrics:
    """Reduce (probability, label, truth_mean) triples to counts and MSE.

    truth_mean may be None per triple; the squared error then uses the label.
    """
    if not math.isfinite(threshold):
        raise ConfigError(f"threshold must be finite, got {threshold}")
    tp = fp = tn = fn = 0
    squared = 0.0
    for prob, label, truth_mean in scored:
        predicted = prob >= threshold
        if label:
            tp, fn = tp + int(predicted), fn + int(not predicted)
        else:
            fp, tn = fp + int(predicted), tn + int(not predicted)
        target = truth_mean if truth_mean is not None else float(label)
        squared += (prob - target) ** 2
    mse = squared / len(scored) if scored else 0.0
    return Metrics(tp=tp, fp=fp, tn=tn, fn=fn, mse=mse)


def evaluate(
    model: TrainedModel,
    posts: Sequence[Post],
    threshold: float = 0.5,
    infer_steps: int = 100,
) -> Metrics:
    """Score every post and reduce to Metrics.

    Every post must carry a label or a truth mean; ids lacking both are
    reported together in the raised error.
    """
    unlabeled = [p.id for p in posts if p.label is None and p.truth_mean is None]
    if unlabeled:
        raise UnlabeledPostsError(unlabeled)
    scored = []
    for post in posts:
        prob = score_post(model, post, infer_steps=infer_steps)
        label = post.label if post.label is not None else int(post.truth_mean >= 0.5)
        scored.append((prob, label, post.truth_mean))
    return tally(scored, threshold)


def compare_to_table1(m: Metrics) -> dict:
    """Measured metrics beside the published rows, as a JSON-ready dict.

    With nothing evaluated the measured values are null and no_data is set;
    the baseline rows are still listed, without deltas.
    """
    no_data = m.total == 0
    baselines = []
    for name, f1, accuracy in TABLE1_BASELINES:
        baselines.append(
            {
                "name": name,
                "f1": f1,
                "accuracy": accuracy,
                "delta_f1": None if no_data else m.f1 - f1,
                "delta_accuracy": None if no_data else m.accuracy - accuracy,
            }
        )
    return {
        "accuracy": None if no_data else m.accuracy,
        "f1": None if no_data else m.f1,
        "mse": None if no_data else m.mse,
        "evaluated": m.total,
        "no_data": no_data,
        "baselines": baselines,
    }


def format_table1_comparison(report: dict) -> str:
    """Human-readable rendering of a compare_to_table1 report."""
    lines = [f"{'model':<28}{'F1':>8}{'accuracy':>12}{'dF1':>10}{'dacc':>10}"]
    if report["no_data"]:
        lines.append("measured: no data (0 posts evaluated)")
    else:
        lines.append(
            f"{'measured':<28}{report['f1']:>8.4f}{report['accuracy'] * 100:>11.2f}%"
        )
    for row in report["baselines"]:
        base = f"{row['name']:<28}{row['f1']:>8.2f}{row['accuracy'] * 100:>11.2f}%"
        if row["delta_f1"] is not None:
            base += f"{row['delta_f1']:>+10.4f}{row['delta_accuracy'] * 100:>+9.2f}%"
        lines.append(base)
    return "\n".join(lines)
