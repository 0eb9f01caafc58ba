"""Corpus ingestion, tokenization, vocabularies, title encoding, splitting.

Input is JSONL with one post per line. Recognized fields: ``id``,
``postText`` (string or list of strings), ``targetParagraphs`` (list of
strings), ``targetDescription`` (string), ``truthMean`` (float in [0, 1]),
``truthClass`` ("clickbait" / "no-clickbait"). Everything else is ignored.
"""

from __future__ import annotations

import json
import math
import random
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from swde.errors import CorpusError, DegenerateInputError

PAD = 0
UNK = 1


@dataclass(frozen=True)
class Post:
    id: str
    title: str
    body: str
    truth_mean: float | None = None
    label: int | None = None


@dataclass
class LoadResult:
    posts: list[Post]
    malformed: int = 0
    # ids of records that parsed but had no usable title text; the predict
    # command reports these per record instead of dropping them silently
    empty_title_ids: list[str] = field(default_factory=list)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, peel leading/trailing punctuation.

    Internal punctuation (apostrophes, hyphens) stays inside the token:
    "You Won't Believe" -> ["you", "won't", "believe"]; "Wow!" -> ["wow", "!"].
    """
    out: list[str] = []
    for chunk in text.lower().split():
        lead: list[str] = []
        while chunk and _is_punct(chunk[0]):
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail: list[str] = []
        while chunk and _is_punct(chunk[-1]):
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        out.extend(lead)
        if chunk:
            out.append(chunk)
        out.extend(reversed(trail))
    return out


def _title_from(raw) -> str | None:
    if isinstance(raw, str):
        return raw
    if isinstance(raw, list) and all(isinstance(x, str) for x in raw):
        return " ".join(raw)
    return None


def _body_from(record: dict) -> str | None:
    paragraphs = record.get("targetParagraphs")
    if isinstance(paragraphs, list) and all(isinstance(x, str) for x in paragraphs):
        return "\n".join(paragraphs)
    if isinstance(paragraphs, str):
        return paragraphs
    description = record.get("targetDescription")
    if isinstance(description, str):
        return description
    if paragraphs is None and description is None:
        return ""
    return None


def _parse_record(record: dict) -> Post | None:
    raw_id = record.get("id")
    if not isinstance(raw_id, (str, int)) or isinstance(raw_id, bool):
        return None
    title = _title_from(record.get("postText"))
    body = _body_from(record)
    if title is None or body is None:
        return None

    truth_mean = None
    if "truthMean" in record:
        value = record["truthMean"]
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            return None
        truth_mean = float(value)
        if not (0.0 <= truth_mean <= 1.0) or not math.isfinite(truth_mean):
            return None

    label = None
    if "truthClass" in record:
        cls = record["truthClass"]
        if cls == "clickbait":
            label = 1
        elif cls == "no-clickbait":
            label = 0
        else:
            return None
    elif truth_mean is not None:
        label = 1 if truth_mean >= 0.5 else 0

    return Post(id=str(raw_id), title=title, body=body, truth_mean=truth_mean, label=label)


def load_jsonl(path) -> LoadResult:
    """Parse a JSONL corpus; malformed lines are skipped and counted."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc

    result = LoadResult(posts=[])
    for line in lines:
        line = line.strip()
        if not line:
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError:
            result.malformed += 1
            continue
        if not isinstance(record, dict):
            result.malformed += 1
            continue
        post = _parse_record(record)
        if post is None:
            result.malformed += 1
            continue
        if not tokenize(post.title):
            result.empty_title_ids.append(post.id)
            continue
        result.posts.append(post)

    if not result.posts:
        raise CorpusError(
            f"corpus {path} contains no valid records "
            f"({result.malformed} malformed line(s))"
        )
    return result


class CharVocab:
    """Character → index map; index 0 is PAD, 1 is UNK, both reserved."""

    def __init__(self, chars: Sequence[str]):
        self.index = {ch: i + 2 for i, ch in enumerate(chars)}

    @property
    def size(self) -> int:
        return len(self.index) + 2

    def encode(self, ch: str) -> int:
        return self.index.get(ch, UNK)

    def ordered_chars(self) -> list[str]:
        return sorted(self.index, key=self.index.__getitem__)


class TokenVocab:
    """Token → index map; index 0 is a reserved unknown-token sentinel.

    ``counts`` keeps the training-split occurrence count per index (0 for the
    sentinel) so the sampling distribution can be rebuilt exactly from a
    serialized model.
    """

    def __init__(self, tokens: Sequence[str], counts: Sequence[int]):
        if len(tokens) != len(counts):
            raise DegenerateInputError("token/count lists must be parallel")
        self.index = {tok: i + 1 for i, tok in enumerate(tokens)}
        self.counts = [0] + [int(c) for c in counts]

    @property
    def size(self) -> int:
        return len(self.counts)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def id_of(self, token: str) -> int:
        return self.index.get(token, 0)

    def ordered_tokens(self) -> list[str]:
        return sorted(self.index, key=self.index.__getitem__)


def build_char_vocab(titles: Iterable[str], min_count: int = 5) -> CharVocab:
    """Count characters across tokenized titles; keep those seen >= min_count."""
    counts: Counter[str] = Counter()
    for title in titles:
        for token in tokenize(title):
            counts.update(token)
    kept = sorted(
        (ch for ch, n in counts.items() if n >= min_count),
        key=lambda ch: (-counts[ch], ch),
    )
    return CharVocab(kept)


def build_token_vocab(documents: Iterable[Sequence[str]], min_count: int = 2) -> TokenVocab:
    counts: Counter[str] = Counter()
    for tokens in documents:
        counts.update(tokens)
    kept = sorted(
        (tok for tok, n in counts.items() if n >= min_count),
        key=lambda tok: (-counts[tok], tok),
    )
    return TokenVocab(kept, [counts[tok] for tok in kept])


@dataclass(frozen=True)
class EncodedTitle:
    grid: np.ndarray  # (K, L_char) int indices, PAD-filled
    valid_token_count: int


def encode_title(title: str, cv: CharVocab, k: int, l_char: int) -> EncodedTitle:
    """Fixed-shape character grid: one row per title token, PAD elsewhere."""
    if k < 1 or l_char < 1:
        raise DegenerateInputError(f"grid dimensions must be positive, got K={k}, L_char={l_char}")
    tokens = tokenize(title)[:k]
    grid = np.zeros((k, l_char), dtype=np.int64)
    for row, token in enumerate(tokens):
        for col, ch in enumerate(token[:l_char]):
            grid[row, col] = cv.encode(ch)
    return EncodedTitle(grid=grid, valid_token_count=len(tokens))


def compute_k(posts: Sequence[Post], cap: int = 30) -> int:
    """Longest training title in tokens, capped so one outlier can't size the net."""
    if not posts:
        raise DegenerateInputError("cannot size the title grid from an empty split")
    longest = max(len(tokenize(p.title)) for p in posts)
    return max(1, min(longest, cap))


def split_train_val(posts: Sequence[Post], seed: int) -> tuple[list[Post], list[Post]]:
    """Seeded shuffle, then an 80/20 cut (train gets the ceiling)."""
    n = len(posts)
    if n < 5:
        raise DegenerateInputError(f"need at least 5 posts to split 4:1, got {n}")
    shuffled = list(posts)
    random.Random(seed).shuffle(shuffled)
    cut = -(-4 * n // 5)
    return shuffled[:cut], shuffled[cut:]
