"""Turn free-form user text into structured state: filter deltas, liked and
disliked feature phrases, and a patience signal.

The rule-based parser here is the deterministic ground truth used by the
test suite. Adapters with the same contract (e.g. an external LLM behind
``HttpParserAdapter``) can replace it per config without engine changes;
they must never emit dimensions outside the schema.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Protocol, Sequence

from .catalog import CATEGORICAL, CONTINUOUS, Catalog, Equals, FilterSet, OneOf, Range

PATIENT = "patient"
IMPATIENT = "impatient"


@dataclass(frozen=True)
class ParsedTurn:
    """Structured reading of one user message."""

    filter_delta: FilterSet = field(default_factory=FilterSet)
    liked: tuple[str, ...] = ()
    disliked: tuple[str, ...] = ()
    patience: str = PATIENT

    def to_json(self) -> dict:
        return {
            "filter_delta": self.filter_delta.to_json(),
            "liked": list(self.liked),
            "disliked": list(self.disliked),
            "patience": self.patience,
        }

    @staticmethod
    def from_json(data: Mapping) -> "ParsedTurn":
        return ParsedTurn(
            filter_delta=FilterSet.from_json(data.get("filter_delta", {})),
            liked=tuple(data.get("liked", ())),
            disliked=tuple(data.get("disliked", ())),
            patience=data.get("patience", PATIENT),
        )


class ParserAdapter(Protocol):
    def parse(self, text: str, history: Sequence[Mapping] = ()) -> ParsedTurn: ...


def merge_filters(existing: FilterSet, delta: FilterSet) -> FilterSet:
    """Union by dimension; on collision the newer predicate wins whole."""
    merged = dict(existing.entries)
    merged.update(delta.entries)
    return FilterSet(merged)


def detect_impatience(parsed: ParsedTurn) -> bool:
    return parsed.patience == IMPATIENT


# --------------------------------------------------------------------------
# Rule tables
# --------------------------------------------------------------------------

_SKIP_PHRASES = (
    "just show me",
    "just give me",
    "show me what you have",
    "surprise me",
    "don't care",
    "do not care",
    "doesn't matter",
    "does not matter",
    "anything is fine",
    "anything works",
    "no more questions",
    "stop asking",
)
_SKIP_WORDS = ("skip", "whatever")

_UPPER_CUES = (
    "under", "below", "at most", "up to", "within", "less than",
    "no more than", "max", "maximum", "cheaper than", "around", "about",
    "budget", "tops",
)
_LOWER_CUES = (
    "over", "above", "at least", "more than", "minimum", "min",
    "starting at", "upwards of",
)

_NUM = r"\$?\s*(\d[\d,]*(?:\.\d+)?)\s*(k\b|grand\b)?"
_MILES_RE = re.compile(r"(\d[\d,]*(?:\.\d+)?)\s*(k\b)?[\s-]*(?:miles|mi)\b")
_MONEY_RE = re.compile(_NUM)
_YEAR_RE = re.compile(r"\b(19\d{2}|20\d{2})\b")
_BETWEEN_RE = re.compile(rf"between\s+{_NUM}\s+and\s+{_NUM}")

_LIKE_CUE = re.compile(
    r"\b(?:love|like|want|need|prefer|would like|hoping for|looking for|care about)\b\s*(.*)"
)
_DISLIKE_CUE = re.compile(
    r"\b(?:hate|avoid|dislike|don'?t want|do not want|not a fan of|no)\b\s*(.*)"
)

_PHRASE_DROP = {
    "a", "an", "the", "some", "any", "my", "our", "your", "that", "this",
    "it", "something", "car", "cars", "vehicle", "vehicles", "please",
    "under", "below", "over", "above", "around", "about", "budget", "max",
    "maximum", "least", "most", "than", "less", "more", "up", "to", "k",
    "grand", "miles", "mi", "of", "for", "with", "in", "is", "be", "new",
    "ideally", "really", "interior", "exterior", "inside", "outside",
    "color", "colour",
}
# Cleaned phrases made only of these tokens are preference-talk, not features.
_NON_FEATURE_TOKENS = {
    "strong", "particular", "specific", "real", "preference", "preferences",
    "opinion", "opinions", "idea", "ideas", "clue", "requirements", "thanks",
}

_TOKEN_RE = re.compile(r"[a-z0-9$']+")


def _to_number(digits: str, suffix: str | None) -> float:
    value = float(digits.replace(",", ""))
    if suffix and suffix.strip().lower() in ("k", "grand"):
        value *= 1000.0
    return value


class RuleBasedParser:
    """Keyword/pattern extraction against the catalog's value vocabulary.

    Numeric rules bind to continuous dimensions through their units:
    money phrases go to the USD dimension, mileage phrases to the miles
    dimension, and four-digit years to a dimension named ``year``. A token
    shared by several categorical dimensions (e.g. a color) resolves via
    nearby hint words, falling back to schema order.
    """

    def __init__(
        self,
        catalog: Catalog,
        aliases: Mapping[str, tuple[str, str]] | None = None,
        hint_words: Mapping[str, Sequence[str]] | None = None,
    ):
        self.catalog = catalog
        self._money_dim = self._find_dim(unit="USD")
        self._miles_dim = self._find_dim(unit="miles")
        self._year_dim = self._find_dim(name="year")
        self.hint_words = {
            dim: tuple(words) for dim, words in (hint_words or {}).items()
        }
        # value vocabulary: casefolded token -> ordered list of (dim, value)
        vocab: dict[str, list[tuple[str, str]]] = {}
        order = {name: i for i, name in enumerate(catalog.dimensions())}
        for item in catalog.items:
            for spec in catalog.schema:
                if spec.kind != CATEGORICAL:
                    continue
                value = item.attributes.get(spec.name)
                if value is None:
                    continue
                key = str(value).casefold()
                entry = (spec.name, str(value))
                bucket = vocab.setdefault(key, [])
                if entry not in bucket:
                    bucket.append(entry)
        for alias, (dim, value) in (aliases or {}).items():
            if dim in self.catalog.schema_by_name:
                vocab.setdefault(alias.casefold(), []).append((dim, value))
        for bucket in vocab.values():
            bucket.sort(key=lambda e: order.get(e[0], len(order)))
        self.vocabulary = vocab

    def _find_dim(self, unit: str | None = None, name: str | None = None) -> str | None:
        for spec in self.catalog.schema:
            if spec.kind != CONTINUOUS:
                continue
            if unit is not None and (spec.unit or "").casefold() == unit.casefold():
                return spec.name
            if name is not None and spec.name == name:
                return spec.name
        return None

    # -- numeric extraction ------------------------------------------------

    @staticmethod
    def _direction(text: str, start: int, end: int) -> str:
        before = text[max(0, start - 24):start]
        after = text[end:end + 16]
        for cue in _LOWER_CUES:
            if before.rstrip().endswith(cue):
                return "lo"
        for cue in _UPPER_CUES:
            if before.rstrip().endswith(cue) or cue in before:
                return "hi"
        if re.match(r"\s*or (?:more|higher|above)", after) or re.match(r"\s*and up", after):
            return "lo"
        for cue in _LOWER_CUES:
            if cue in before:
                return "lo"
        return "hi"

    def _extract_numeric(self, text: str, consumed: list[tuple[int, int]]) -> dict[str, Range]:
        found: dict[str, Range] = {}

        def taken(start: int, end: int) -> bool:
            return any(start < e and end > s for s, e in consumed)

        def claim(dim: str | None, start: int, end: int, rng: Range) -> None:
            if dim is None or taken(start, end) or dim in found:
                return
            consumed.append((start, end))
            found[dim] = rng

        for m in _BETWEEN_RE.finditer(text):
            lo = _to_number(m.group(1), m.group(2))
            hi = _to_number(m.group(3), m.group(4))
            lo, hi = min(lo, hi), max(lo, hi)
            span = text[m.start():m.end()]
            if self._year_dim and _YEAR_RE.fullmatch(m.group(1)) and _YEAR_RE.fullmatch(m.group(3)):
                claim(self._year_dim, m.start(), m.end(), Range(lo, hi))
            elif "mile" in text[m.end():m.end() + 8] or " mi" in text[m.end():m.end() + 4]:
                claim(self._miles_dim, m.start(), m.end(), Range(lo, hi))
            elif "$" in span or m.group(2) or m.group(4):
                claim(self._money_dim, m.start(), m.end(), Range(lo, hi))

        for m in _MILES_RE.finditer(text):
            value = _to_number(m.group(1), m.group(2))
            rng = Range(lo=value) if self._direction(text, m.start(), m.end()) == "lo" else Range(hi=value)
            claim(self._miles_dim, m.start(), m.end(), rng)

        for m in _YEAR_RE.finditer(text):
            if taken(m.start(), m.end()):
                continue
            year = float(m.group(1))
            before = text[max(0, m.start() - 20):m.start()]
            after = text[m.end():m.end() + 14]
            if re.search(r"(after|since|newer than|from)\s*$", before) or re.match(
                r"\s*(or newer|or later|and up|\+)", after
            ):
                rng = Range(lo=year)
            elif re.search(r"(before|older than|until|up to)\s*$", before) or re.match(
                r"\s*(or older|or earlier)", after
            ):
                rng = Range(hi=year)
            else:
                rng = Range(lo=year, hi=year)
            claim(self._year_dim, m.start(), m.end(), rng)

        for m in _MONEY_RE.finditer(text):
            if taken(m.start(), m.end()):
                continue
            span = text[m.start():m.end()]
            value = _to_number(m.group(1), m.group(2))
            moneyish = (
                "$" in span
                or bool(m.group(2))
                or any(w in text[max(0, m.start() - 30):m.start()] for w in ("budget", "price", "spend", "pay", "afford", "cost"))
            )
            if not moneyish:
                continue
            rng = Range(lo=value) if self._direction(text, m.start(), m.end()) == "lo" else Range(hi=value)
            claim(self._money_dim, m.start(), m.end(), rng)

        return found

    # -- categorical extraction --------------------------------------------

    def _resolve_shared_token(
        self, text: str, start: int, end: int, options: Sequence[tuple[str, str]]
    ) -> tuple[str, str]:
        window = text[max(0, start - 20):min(len(text), end + 20)]
        for dim, value in options:
            for word in self.hint_words.get(dim, ()):
                if word in window:
                    return dim, value
        return options[0]

    def _extract_categorical(
        self, text: str, consumed: list[tuple[int, int]]
    ) -> tuple[dict[str, list[str]], set[str]]:
        matches: dict[str, list[str]] = {}
        matched_tokens: set[str] = set()

        def taken(start: int, end: int) -> bool:
            return any(start < e and end > s for s, e in consumed)

        for token in sorted(self.vocabulary, key=len, reverse=True):
            for m in re.finditer(rf"\b{re.escape(token)}\b", text):
                if taken(m.start(), m.end()):
                    continue
                options = self.vocabulary[token]
                dim, value = (
                    self._resolve_shared_token(text, m.start(), m.end(), options)
                    if len(options) > 1
                    else options[0]
                )
                consumed.append((m.start(), m.end()))
                matched_tokens.add(token)
                values = matches.setdefault(dim, [])
                if value not in values:
                    values.append(value)
        return matches, matched_tokens

    # -- preference phrases --------------------------------------------------

    def _clean_phrases(self, raw: str, matched_tokens: set[str]) -> list[str]:
        phrases = []
        for part in re.split(r"\band\b|\bor\b", raw):
            tokens = _TOKEN_RE.findall(part)
            kept: list[str] = []
            for tok in tokens:
                if tok.startswith("$") or any(ch.isdigit() for ch in tok):
                    continue
                if tok in _PHRASE_DROP or tok in matched_tokens:
                    continue
                if tok in self.vocabulary:
                    continue
                kept.append(tok)
                if len(kept) >= 6:
                    break
            if kept and not set(kept) <= _NON_FEATURE_TOKENS:
                phrases.append(" ".join(kept))
        return phrases

    def _extract_preferences(
        self, text: str, matched_tokens: set[str]
    ) -> tuple[list[str], list[str]]:
        liked: list[str] = []
        disliked: list[str] = []
        for clause in re.split(r"[.;!?,]+|\bbut\b", text):
            clause = clause.strip()
            if not clause:
                continue
            m = _DISLIKE_CUE.search(clause)
            if m:
                for phrase in self._clean_phrases(m.group(1), matched_tokens):
                    if phrase not in disliked:
                        disliked.append(phrase)
                continue
            m = _LIKE_CUE.search(clause)
            if m:
                for phrase in self._clean_phrases(m.group(1), matched_tokens):
                    if phrase not in liked:
                        liked.append(phrase)
        return liked, disliked

    # -- impatience -----------------------------------------------------------

    @staticmethod
    def _is_impatient(text: str, history: Sequence[Mapping]) -> bool:
        lowered = text.lower()
        if any(phrase in lowered for phrase in _SKIP_PHRASES):
            return True
        if any(re.search(rf"\b{w}\b", lowered) for w in _SKIP_WORDS):
            return True
        if history:
            last = history[-1]
            speaker = last.get("speaker") if isinstance(last, Mapping) else getattr(last, "speaker", None)
            if speaker == "agent" and len(_TOKEN_RE.findall(lowered)) <= 2:
                return True
        return False

    # -- entry point ------------------------------------------------------------

    def parse(self, text: str, history: Sequence[Mapping] = ()) -> ParsedTurn:
        """Unparseable text is harmless: empty delta, patient."""
        lowered = text.lower()
        consumed: list[tuple[int, int]] = []
        numeric = self._extract_numeric(lowered, consumed)
        categorical, matched_tokens = self._extract_categorical(lowered, consumed)
        liked, disliked = self._extract_preferences(lowered, matched_tokens)

        entries: dict[str, Equals | OneOf | Range] = {}
        for dim, rng in numeric.items():
            entries[dim] = rng
        for dim, values in categorical.items():
            entries[dim] = Equals(values[0]) if len(values) == 1 else OneOf(tuple(values))

        patience = IMPATIENT if self._is_impatient(text, history) else PATIENT
        return ParsedTurn(
            filter_delta=FilterSet(entries),
            liked=tuple(liked),
            disliked=tuple(disliked),
            patience=patience,
        )


# --------------------------------------------------------------------------
# External-adapter JSON contract
# --------------------------------------------------------------------------


def build_parse_request(text: str, catalog: Catalog, history: Sequence[Mapping]) -> dict:
    """Request payload an external parser receives: the raw text, a schema
    summary, and the conversation history."""
    return {
        "text": text,
        "schema": [
            {"name": s.name, "kind": s.kind, "unit": s.unit, "label": s.question_label}
            for s in catalog.schema
        ],
        "history": [dict(h) for h in history],
    }


class HttpParserAdapter:
    """Parser contract over HTTP: POSTs the request JSON, expects a
    ParsedTurn JSON back. Transport is injectable for testing; filters on
    unknown dimensions are rejected rather than passed through."""

    def __init__(
        self,
        catalog: Catalog,
        url: str,
        transport: Callable[[str, dict], dict] | None = None,
    ):
        self.catalog = catalog
        self.url = url
        self.transport = transport or self._post

    @staticmethod
    def _post(url: str, payload: dict) -> dict:
        import urllib.request

        req = urllib.request.Request(
            url,
            data=json.dumps(payload).encode("utf-8"),
            headers={"Content-Type": "application/json"},
        )
        with urllib.request.urlopen(req, timeout=30) as resp:
            return json.loads(resp.read().decode("utf-8"))

    def parse(self, text: str, history: Sequence[Mapping] = ()) -> ParsedTurn:
        payload = build_parse_request(text, self.catalog, history)
        parsed = ParsedTurn.from_json(self.transport(self.url, payload))
        known = set(self.catalog.dimensions())
        unknown = [d for d in parsed.filter_delta.dimensions() if d not in known]
        if unknown:
            raise ValueError(f"adapter returned unknown dimensions: {unknown}")
        return parsed
