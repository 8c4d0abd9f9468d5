"""Keyword extraction and the offline synonym lexicon.

The extraction pipeline: tokenize, keep noun/verb tokens, split compound
words, drop stop words (checked before and after splitting), stem, dedupe.
Synonym expansion is done at match time against a lexicon of synsets loaded
from a plain text file, never baked into stored keyword sets.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import ParseError
from .porter import stem

KeywordSet = frozenset  # alias: a frozenset of lowercase stems

# Closed-class words: articles, pronouns, prepositions, conjunctions,
# auxiliaries. These are tagged "other" and never survive extraction.
CLOSED_CLASS_WORDS = frozenset("""
a an the this that these those there here
i you he she it we they me him her us them
my your his its our their mine yours hers ours theirs
myself yourself himself herself itself ourselves themselves
of in on at by for with about against between into through during
before after above below to from up down out off over under
again further then once all any both each few more most other
some such no nor not only own same so than too very just
is am are was were be been being have has had having
do does did doing will would shall should can could may might must
and but or if because as until while when where why how what
which who whom whose
""".split())

# Domain noise on top of the closed-class words; the first four are fixed,
# the rest are common protocol boilerplate. Callers may pass their own set.
DOMAIN_STOP_WORDS = frozenset({
    "service", "operation", "wsdl", "soap",
    "http", "xml", "request", "response", "get", "set",
})

DEFAULT_STOP_WORDS = CLOSED_CLASS_WORDS | DOMAIN_STOP_WORDS

_NOUN_SUFFIXES = ("tion", "ment", "ness", "ity")
_VERB_SUFFIXES = ("ize", "ify", "ate")

_TOKEN_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9_.\-]*")
_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|[0-9]+")


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str  # "noun" | "verb" | "other"


def pos_tag(surface: str) -> str:
    """Heuristic tagger: closed-class words are "other", common verbal
    suffixes mark verbs, everything else counts as a noun so unknown domain
    terms are kept."""
    word = surface.lower()
    if word in CLOSED_CLASS_WORDS:
        return "other"
    if word.endswith(_VERB_SUFFIXES):
        return "verb"
    if word.endswith(_NOUN_SUFFIXES):
        return "noun"
    return "noun"


def tokenize(text: str) -> list[Token]:
    return [Token(m.group(), pos_tag(m.group())) for m in _TOKEN_RE.finditer(text)]


def split_compound(token: str) -> list[str]:
    """Split a combined word into lowercase parts.

    Boundaries: camelCase transitions, digit/letter transitions and the
    separators ``_``, ``-``, ``.``. A run of capitals stays together until a
    lowercase letter follows (so HTTPServer gives http + server). Total
    function; joining the parts reproduces the input minus separators.
    """
    parts: list[str] = []
    for chunk in re.split(r"[_.\-]+", token):
        parts.extend(m.group().lower() for m in _CAMEL_RE.finditer(chunk))
    return parts


def extract_keywords(text: str, stop_words: frozenset = DEFAULT_STOP_WORDS) -> KeywordSet:
    """Run the full extraction pipeline over free text.

    Deterministic; empty text yields an empty set. The result contains only
    lowercase stems and never the stem of a configured stop word.
    """
    stop_stems = frozenset(stem(w) for w in stop_words)
    stems: set[str] = set()
    for token in tokenize(text):
        if token.pos == "other":
            continue
        if token.surface.lower() in stop_words:
            continue
        for piece in split_compound(token.surface):
            if piece in stop_words:
                continue
            if len(piece) < 2 or not any(c.isalpha() for c in piece):
                continue
            stemmed = stem(piece)
            if stemmed and stemmed not in stop_stems:
                stems.add(stemmed)
    return frozenset(stems)


@dataclass(frozen=True)
class SynonymLexicon:
    """Offline synset store with symmetric stem-level synonym lookup.

    Hypernym lines are kept for inspection but play no role in scoring.
    """

    synsets: tuple[frozenset, ...] = ()
    hypernyms: tuple[frozenset, ...] = ()
    _stem_sets: tuple[frozenset, ...] = field(init=False, repr=False, compare=False, default=())
    _stem_index: dict = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        stem_sets = tuple(frozenset(stem(lemma) for lemma in synset) for synset in self.synsets)
        index: dict[str, list[int]] = {}
        for i, stems in enumerate(stem_sets):
            for s in stems:
                index.setdefault(s, []).append(i)
        object.__setattr__(self, "_stem_sets", stem_sets)
        object.__setattr__(self, "_stem_index", index)

    def expand(self, stemmed_keyword: str) -> frozenset:
        """All stems sharing a synset with the given stem, plus itself."""
        result = {stemmed_keyword}
        for i in self._stem_index.get(stemmed_keyword, ()):
            result.update(self._stem_sets[i])
        return frozenset(result)

    def related(self, a: str, b: str) -> bool:
        return b in self.expand(a)


EMPTY_LEXICON = SynonymLexicon()


def expand_synonyms(stemmed_keyword: str, lexicon: SynonymLexicon) -> frozenset:
    return lexicon.expand(stemmed_keyword)


def load_lexicon(text: str) -> SynonymLexicon:
    """Parse the ``lemma1|lemma2|...`` one-synset-per-line format.

    ``#`` starts a comment line; a ``>`` prefix continues the previous synset
    with hypernym lemmas. Blank lines are skipped; single-lemma synsets are
    allowed.
    """
    synsets: list[frozenset] = []
    hypernyms: list[set] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        is_hypernym = line.startswith(">")
        if is_hypernym:
            line = line[1:].strip()
        lemmas = frozenset(p.strip().lower() for p in line.split("|") if p.strip())
        if not lemmas:
            continue
        if is_hypernym:
            if not synsets:
                raise ParseError("hypernym continuation before any synset", line=lineno, column=1)
            hypernyms[-1].update(lemmas)
        else:
            synsets.append(lemmas)
            hypernyms.append(set())
    return SynonymLexicon(tuple(synsets), tuple(frozenset(h) for h in hypernyms))


@lru_cache(maxsize=16384)
def normalize_name(name: str) -> tuple:
    """Stems of a parameter name's compound parts, used for name matching.

    Cached: matching evaluates the same few param names across every
    candidate operation, so stemming dominates without it.
    """
    return tuple(stem(piece) for piece in split_compound(name))


def names_match(a: str, b: str, lexicon: SynonymLexicon = EMPTY_LEXICON) -> bool:
    """True when two parameter names agree part by part, where each aligned
    part may match through the synonym lexicon."""
    na, nb = normalize_name(a), normalize_name(b)
    if len(na) != len(nb):
        return False
    return all(pa == pb or lexicon.related(pa, pb) for pa, pb in zip(na, nb))
