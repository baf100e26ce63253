import json
from dataclasses import dataclass, field
from pathlib import Path

from jsonschema import Draft7Validator

from config_loader import get_settings, resolve_path
from diagram import parse_pd
from errors import InputError, UnknownDiagram
from logger import get_logger
from pretzel import braid_closure, pretzel

logger = get_logger(__name__)

CORPUS_SCHEMA = {
    "type": "object",
    "required": ["diagrams"],
    "properties": {
        "schema": {"type": "integer"},
        "diagrams": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "oneOf": [
                    {"required": ["pd"]},
                    {"required": ["pretzel"]},
                    {"required": ["braid"]},
                ],
                "properties": {
                    "pd": {"type": "string"},
                    "pretzel": {"type": "array", "items": {"type": "integer"}, "minItems": 2},
                    "braid": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                    "strands": {"type": "integer", "minimum": 2},
                    "det": {"type": "integer", "minimum": 0},
                    "skein_crossing": {"type": "integer", "minimum": 0},
                },
            },
        },
        "reidemeister_pairs": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
        },
        "skein_fixtures": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["diagram", "crossing", "dets"],
                "properties": {
                    "diagram": {"type": "string"},
                    "crossing": {"type": "integer"},
                    "dets": {"type": "array", "items": {"type": "integer"}, "minItems": 3, "maxItems": 3},
                },
            },
        },
    },
}


@dataclass
class Corpus:
    entries: dict
    reidemeister_pairs: list = field(default_factory=list)
    skein_fixtures: list = field(default_factory=list)
    source: Path | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def names(self):
        return list(self.entries)

    def get(self, name):
        if name not in self.entries:
            raise UnknownDiagram(f"no diagram named {name!r} in {self.source}")
        if name not in self._cache:
            entry = self.entries[name]
            try:
                if "pd" in entry:
                    d = parse_pd(entry["pd"], name=name)
                elif "pretzel" in entry:
                    d = pretzel(entry["pretzel"], name=name)
                else:
                    d = braid_closure(entry["braid"], entry.get("strands"), name=name)
            except InputError as exc:
                raise type(exc)(f"{name}: {exc}") from exc
            self._cache[name] = d
        return self._cache[name]

    def expected_det(self, name):
        return self.entries[name].get("det")

    def diagrams(self, max_crossings=None):
        for name in self.names:
            d = self.get(name)
            if max_crossings is None or d.n_crossings <= max_crossings:
                yield d


def load_corpus(path=None):
    if path is None:
        path = get_settings()["paths"]["corpus"]
    path = resolve_path(path)
    if not path.exists():
        raise UnknownDiagram(f"corpus file not found at {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            payload = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputError(f"corpus file {path} is not valid JSON: {exc}") from exc

    errors = list(Draft7Validator(CORPUS_SCHEMA).iter_errors(payload))
    if errors:
        raise InputError(f"{path}: " + "; ".join(e.message for e in errors))

    corpus = Corpus(
        payload["diagrams"],
        [tuple(p) for p in payload.get("reidemeister_pairs", [])],
        payload.get("skein_fixtures", []),
        path,
    )
    logger.debug(f"Loaded {len(corpus.entries)} diagrams from {path}")
    return corpus
