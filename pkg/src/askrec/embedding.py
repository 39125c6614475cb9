"""Text vectors for queries, item descriptions, and pros/cons phrases.

The default provider is 256-dim signed feature hashing over tokens and
token bigrams: dependency-free, identical across processes, and strong
enough for the one property the rankers rely on (shared vocabulary =>
higher cosine). A real sentence-encoder provider can be dropped in behind
the same contract; the optional on-disk cache makes such runs replayable
offline.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .catalog import Catalog, Equals, FilterSet, OneOf, Range

_TOKEN = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class Vector:
    """Fixed-length embedding with its Euclidean norm cached.

    A zero norm marks a zero-information vector (empty text); cosine
    against it is defined as 0 so downstream scores never see NaNs.
    """

    components: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.components, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)
        object.__setattr__(self, "norm", float(np.linalg.norm(arr)))

    @property
    def dimension(self) -> int:
        return int(self.components.shape[0])


class EmbeddingProvider(Protocol):
    provider_id: str
    dimension: int

    def embed(self, text: str) -> Vector: ...


class HashingEmbedder:
    """Deterministic signed feature hashing of tokens and bigrams."""

    def __init__(self, dimension: int = 256):
        self.dimension = dimension
        self.provider_id = f"hash{dimension}-v1"

    def embed(self, text: str) -> Vector:
        tokens = _TOKEN.findall(text.lower())
        components = np.zeros(self.dimension, dtype=np.float64)
        for feature in self._features(tokens):
            digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
            h = int.from_bytes(digest, "big")
            sign = 1.0 if h & 1 else -1.0
            components[(h >> 1) % self.dimension] += sign
        norm = np.linalg.norm(components)
        if norm > 0:
            components /= norm
        return Vector(components)

    @staticmethod
    def _features(tokens: Sequence[str]) -> Iterable[str]:
        yield from tokens
        for a, b in zip(tokens, tokens[1:]):
            yield f"{a}_{b}"


def cosine_similarity(a: Vector, b: Vector) -> float:
    """cos(a, b) in [-1, 1]; 0 when either side carries no information."""
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    value = float(np.dot(a.components, b.components) / (a.norm * b.norm))
    return max(-1.0, min(1.0, value))


def _predicate_text(pred: Equals | OneOf | Range) -> str:
    if isinstance(pred, Equals):
        return pred.value
    if isinstance(pred, OneOf):
        return " or ".join(pred.values)
    parts = []
    if pred.lo is not None and pred.hi is not None:
        return f"{pred.lo:g} to {pred.hi:g}"
    if pred.hi is not None:
        return f"up to {pred.hi:g}"
    if pred.lo is not None:
        return f"from {pred.lo:g}"
    return " ".join(parts)


def build_query_text(
    filters: FilterSet,
    liked: Sequence[str] = (),
    disliked: Sequence[str] = (),
    schema_order: Sequence[str] = (),
) -> str:
    """Deterministic textual query: 'dim: value' pairs in schema order,
    then liked and avoided phrases. Empty state yields empty text."""
    order = list(schema_order) or sorted(filters.dimensions())
    parts = [
        f"{dim}: {_predicate_text(filters.entries[dim])}"
        for dim in order
        if dim in filters.entries
    ]
    if liked:
        parts.append("likes: " + ", ".join(liked))
    if disliked:
        parts.append("avoids: " + ", ".join(disliked))
    if not parts:
        return ""
    return ". ".join(parts) + "."


class EmbeddingCache:
    """On-disk vector cache keyed by (provider id, text hash).

    Entries are raw little-endian float32 arrays, one file each, so runs
    against an external encoder can be replayed with no network access.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _path(self, provider_id: str, text: str) -> Path:
        key = hashlib.sha256(text.encode("utf-8")).hexdigest()[:40]
        return self.root / provider_id / f"{key}.bin"

    def get(self, provider_id: str, text: str) -> np.ndarray | None:
        path = self._path(provider_id, text)
        if not path.exists():
            return None
        return np.frombuffer(path.read_bytes(), dtype="<f4").astype(np.float64)

    def put(self, provider_id: str, text: str, components: np.ndarray) -> None:
        path = self._path(provider_id, text)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(np.asarray(components, dtype="<f4").tobytes())


class CachingProvider:
    """Wraps a provider with an EmbeddingCache (float32 round-trip)."""

    def __init__(self, provider: EmbeddingProvider, cache: EmbeddingCache):
        self.provider = provider
        self.cache = cache
        self.provider_id = provider.provider_id
        self.dimension = provider.dimension

    def embed(self, text: str) -> Vector:
        cached = self.cache.get(self.provider_id, text)
        if cached is not None:
            return Vector(cached)
        vector = self.provider.embed(text)
        self.cache.put(self.provider_id, text, vector.components)
        return vector


class EmbeddingStore:
    """Per-catalog precomputed vectors: descriptions and pros/cons phrases.

    Built once at load time and shared read-only across sessions; turns
    never re-embed item text.
    """

    def __init__(self, catalog: Catalog, provider: EmbeddingProvider):
        self.provider = provider
        self.description: dict[str, Vector] = {}
        self.pros: dict[str, tuple[Vector, ...]] = {}
        self.cons: dict[str, tuple[Vector, ...]] = {}
        for item in catalog.items:
            self.description[item.id] = provider.embed(item.description)
            self.pros[item.id] = tuple(provider.embed(p) for p in item.pros)
            self.cons[item.id] = tuple(provider.embed(c) for c in item.cons)

    def embed_query(self, text: str) -> Vector:
        return self.provider.embed(text)

    def description_vectors(self, item_ids: Sequence[str]) -> list[Vector]:
        return [self.description[item_id] for item_id in item_ids]
