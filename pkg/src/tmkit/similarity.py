"""Similarity framework: deterministic TF-IDF vectors and three comparison modes.

The default vectorizer is deterministic (word unigrams + character
3-grams of normalized text, smoothed IDF over the supplied corpus) so that
comparisons are reproducible; an external embedding client can be plugged
in behind the same `vectorize` contract.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from .errors import KindMismatch
from .model import JsonDict, TmkModel, flatten_json
from .textnorm import normalize_tokens

Vector = dict[str, float]

COMPONENT_KINDS = ("Task", "Method", "Knowledge")
METRIC_NAMES = ("Overall", "Per-Field", "Dict-Symmetric")


def _features(text: str) -> list[str]:
    tokens = normalize_tokens(text)
    joined = " ".join(tokens)
    feats = [f"w:{token}" for token in tokens]
    feats.extend(f"c:{joined[i:i + 3]}" for i in range(len(joined) - 2))
    return feats


def vectorize(corpus_texts: Sequence[str]) -> list[Vector]:
    """TF-IDF vectors over the supplied corpus; empty text gives a zero vector."""
    docs = [_features(text) for text in corpus_texts]
    doc_count = len(docs)
    df: dict[str, int] = {}
    for feats in docs:
        for feature in set(feats):
            df[feature] = df.get(feature, 0) + 1
    # Smoothed IDF keeps every weight positive, so identical texts always
    # compare at 1 even when a feature appears in every document.
    idf = {
        feature: math.log((1 + doc_count) / (1 + count)) + 1.0
        for feature, count in df.items()
    }
    vectors: list[Vector] = []
    for feats in docs:
        tf: dict[str, int] = {}
        for feature in feats:
            tf[feature] = tf.get(feature, 0) + 1
        vectors.append({feature: count * idf[feature] for feature, count in tf.items()})
    return vectors


def cosine(a: Vector, b: Vector) -> float:
    """Standard cosine similarity clamped to [0, 1]; 0 if either vector is zero."""
    if not a or not b:
        return 0.0
    dot = sum(weight * b[feature] for feature, weight in a.items() if feature in b)
    norm_a = math.sqrt(sum(w * w for w in a.values()))
    norm_b = math.sqrt(sum(w * w for w in b.values()))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return min(1.0, max(0.0, dot / (norm_a * norm_b)))


@dataclass(frozen=True)
class ComponentDoc:
    """One component payload tagged with its kind for mismatch checks."""

    kind: str  # "Task" | "Method" | "Knowledge"
    payload: Any  # canonical dict (Task, Knowledge) or list of dicts (Method)

    def leaves(self) -> list[tuple[str, str]]:
        return flatten_json(self.payload)

    def overall_text(self) -> str:
        return " ".join(text for _, text in self.leaves())


def component_docs(model: TmkModel) -> dict[str, ComponentDoc]:
    canonical = model.to_canonical()
    return {
        "Task": ComponentDoc("Task", canonical["task"]),
        "Method": ComponentDoc("Method", canonical["methods"]),
        "Knowledge": ComponentDoc("Knowledge", canonical["knowledge"]),
    }


def _require_same_kind(a: ComponentDoc, b: ComponentDoc) -> None:
    if a.kind != b.kind:
        raise KindMismatch(f"cannot compare {a.kind} with {b.kind}")


def overall_similarity(a: ComponentDoc, b: ComponentDoc) -> float:
    """Cosine of the two components' overall texts."""
    _require_same_kind(a, b)
    vec_a, vec_b = vectorize([a.overall_text(), b.overall_text()])
    return cosine(vec_a, vec_b)


def _bucket(path: str) -> str:
    """Top-level field name of a leaf path, skipping leading list indexes."""
    for segment in path.replace("]", "").split("."):
        name = segment.split("[", 1)[0]
        if name:
            return name
    return ""


def _direction_score(
    leaves_a: list[tuple[str, str]],
    leaves_b: list[tuple[str, str]],
    vec_of: dict[int, Vector],
    offset_b: int,
) -> tuple[float, list[JsonDict]]:
    if not leaves_a:
        return (1.0 if not leaves_b else 0.0), []
    if not leaves_b:
        return 0.0, [{"pathA": p, "pathB": None, "score": 0.0} for p, _ in leaves_a]
    by_bucket: dict[str, list[int]] = {}
    for j in range(len(leaves_b)):
        by_bucket.setdefault(_bucket(leaves_b[j][0]), []).append(j)
    total = 0.0
    details: list[JsonDict] = []
    for i, (path_a, _) in enumerate(leaves_a):
        candidates = by_bucket.get(_bucket(path_a)) or range(len(leaves_b))
        best = 0.0
        best_path = None
        for j in candidates:
            score = cosine(vec_of[i], vec_of[offset_b + j])
            if score > best:
                best = score
                best_path = leaves_b[j][0]
        total += best
        details.append({"pathA": path_a, "pathB": best_path, "score": best})
    return total / len(leaves_a), details


def per_field_similarity(a: ComponentDoc, b: ComponentDoc) -> float:
    """Direction-averaged best-field matching.

    Each leaf field is matched against the other component's leaf fields
    sharing the same top-level field name (falling back to all fields), and
    the directional means are averaged, which makes the result symmetric.
    """
    score, _ = per_field_similarity_detailed(a, b)
    return score


def per_field_similarity_detailed(
    a: ComponentDoc, b: ComponentDoc
) -> tuple[float, JsonDict]:
    _require_same_kind(a, b)
    leaves_a = a.leaves()
    leaves_b = b.leaves()
    corpus = [text for _, text in leaves_a] + [text for _, text in leaves_b]
    vectors = dict(enumerate(vectorize(corpus)))
    forward, forward_details = _direction_score(leaves_a, leaves_b, vectors, len(leaves_a))
    # Swap roles: vector table is reindexed so B's leaves come first.
    swapped = {j: vectors[len(leaves_a) + j] for j in range(len(leaves_b))}
    swapped.update({len(leaves_b) + i: vectors[i] for i in range(len(leaves_a))})
    backward, backward_details = _direction_score(leaves_b, leaves_a, swapped, len(leaves_b))
    if not leaves_a and not leaves_b:
        return 1.0, {"aToB": [], "bToA": []}
    score = (forward + backward) / 2
    return score, {"aToB": forward_details, "bToA": backward_details}


def dict_symmetric_similarity(a: ComponentDoc, b: ComponentDoc) -> float:
    """Recursive structural similarity, symmetric by construction.

    Objects average over the union of keys (missing counterpart scores 0);
    arrays greedily pair elements by best score over max length; leaf texts
    compare by cosine.
    """
    _require_same_kind(a, b)
    texts: list[str] = [text for _, text in a.leaves()] + [text for _, text in b.leaves()]
    vectors = vectorize(texts)
    vector_of: dict[str, Vector] = {}
    for text, vector in zip(texts, vectors):
        vector_of.setdefault(text, vector)

    def leaf_text(value: Any) -> str:
        return value if isinstance(value, str) else json.dumps(value)

    def sim(x: Any, y: Any) -> float:
        x_is_dict, y_is_dict = isinstance(x, dict), isinstance(y, dict)
        x_is_list, y_is_list = isinstance(x, (list, tuple)), isinstance(y, (list, tuple))
        if x_is_dict and y_is_dict:
            keys = sorted(set(x) | set(y))
            if not keys:
                return 1.0
            return sum(sim(x[k], y[k]) if k in x and k in y else 0.0 for k in keys) / len(keys)
        if x_is_list and y_is_list:
            if not x and not y:
                return 1.0
            if not x or not y:
                return 0.0
            scores = [(sim(xi, yj), i, j) for i, xi in enumerate(x) for j, yj in enumerate(y)]
            scores.sort(key=lambda item: (-item[0], item[1], item[2]))
            used_x: set[int] = set()
            used_y: set[int] = set()
            total = 0.0
            for score, i, j in scores:
                if i in used_x or j in used_y:
                    continue
                used_x.add(i)
                used_y.add(j)
                total += score
            return total / max(len(x), len(y))
        if x_is_dict or y_is_dict or x_is_list or y_is_list:
            return 0.0
        ta, tb = leaf_text(x), leaf_text(y)
        va = vector_of.get(ta) or vectorize([ta])[0]
        vb = vector_of.get(tb) or vectorize([tb])[0]
        return cosine(va, vb)

    return min(1.0, max(0.0, sim(a.payload, b.payload)))


@dataclass(frozen=True)
class ComponentScores:
    overall: float
    perField: float
    dictSymmetric: float
    fieldDetails: JsonDict = field(default_factory=dict)

    def to_dict(self) -> JsonDict:
        return {
            "overall": self.overall,
            "perField": self.perField,
            "dictSymmetric": self.dictSymmetric,
            "fieldDetails": self.fieldDetails,
        }

    def metric(self, name: str) -> float:
        return {
            "Overall": self.overall,
            "Per-Field": self.perField,
            "Dict-Symmetric": self.dictSymmetric,
        }[name]


@dataclass(frozen=True)
class SimilarityReport:
    """All nine component x metric scores for one model pair."""

    skillA: str
    skillB: str
    components: dict[str, ComponentScores]

    def to_dict(self) -> JsonDict:
        return {
            "skillA": self.skillA,
            "skillB": self.skillB,
            "components": {kind: s.to_dict() for kind, s in self.components.items()},
        }


def compare_models(model_a: TmkModel, model_b: TmkModel) -> SimilarityReport:
    docs_a = component_docs(model_a)
    docs_b = component_docs(model_b)
    components: dict[str, ComponentScores] = {}
    for kind in COMPONENT_KINDS:
        a, b = docs_a[kind], docs_b[kind]
        per_field, details = per_field_similarity_detailed(a, b)
        components[kind] = ComponentScores(
            overall=overall_similarity(a, b),
            perField=per_field,
            dictSymmetric=dict_symmetric_similarity(a, b),
            fieldDetails=details,
        )
    return SimilarityReport(
        skillA=model_a.skillName, skillB=model_b.skillName, components=components
    )


@dataclass(frozen=True)
class AggregateCell:
    mean: float
    sd: float
    n: int

    def to_dict(self) -> JsonDict:
        return {"mean": self.mean, "sd": self.sd, "n": self.n}


@dataclass(frozen=True)
class CorpusAggregate:
    """Mean / population SD / n per component x metric over a report corpus."""

    cells: dict[tuple[str, str], AggregateCell]

    def cell(self, component: str, metric: str) -> AggregateCell:
        return self.cells[(component, metric)]

    def to_dict(self) -> JsonDict:
        return {
            "cells": [
                {"component": component, "metric": metric, **cell.to_dict()}
                for (component, metric), cell in sorted(
                    self.cells.items(),
                    key=lambda item: (
                        COMPONENT_KINDS.index(item[0][0]),
                        METRIC_NAMES.index(item[0][1]),
                    ),
                )
            ]
        }

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["component", "metric", "mean", "sd", "n"])
        for component in COMPONENT_KINDS:
            for metric in METRIC_NAMES:
                cell = self.cells[(component, metric)]
                writer.writerow(
                    [component, metric, f"{cell.mean:.4f}", f"{cell.sd:.4f}", cell.n]
                )
        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CorpusAggregate":
        reader = csv.DictReader(io.StringIO(text))
        cells: dict[tuple[str, str], AggregateCell] = {}
        for row in reader:
            cells[(row["component"], row["metric"])] = AggregateCell(
                mean=float(row["mean"]), sd=float(row["sd"]), n=int(row["n"])
            )
        return cls(cells=cells)


def aggregate(reports: Sequence[SimilarityReport]) -> CorpusAggregate:
    """Population statistics over per-model similarity reports."""
    if not reports:
        raise ValueError("aggregate requires at least one report")
    cells: dict[tuple[str, str], AggregateCell] = {}
    for component in COMPONENT_KINDS:
        for metric in METRIC_NAMES:
            values = [report.components[component].metric(metric) for report in reports]
            mean = sum(values) / len(values)
            variance = sum((v - mean) ** 2 for v in values) / len(values)
            cells[(component, metric)] = AggregateCell(
                mean=mean, sd=math.sqrt(variance), n=len(values)
            )
    return CorpusAggregate(cells=cells)
