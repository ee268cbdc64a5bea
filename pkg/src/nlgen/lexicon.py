"""English inflection and closed-class word knowledge.

Pluralization and conjugation are rule-based with an irregulars table
loaded from a plain-text data file, so the lexicon can grow without code
changes.  File format: UTF-8, tab-separated, '#' comments, with section
headers [plurals], [verbs], [pronouns] and [articles]:

    [plurals]   lemma <TAB> plural
    [verbs]     lemma <TAB> person <TAB> number <TAB> tense <TAB> form
    [pronouns]  person <TAB> number <TAB> gender <TAB> case <TAB> form
    [articles]  word <TAB> a|an

Pronoun rows use "-" for gender where English makes no distinction (first
and second person, and the third-person plural).  Unknown verbs conjugate
regularly rather than erroring, so generation never fails on a new domain
verb; misinflections surface in the golden tests instead.  Orthographic
doubling (run -> running) is not modeled: only the tense forms below are
ever generated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .errors import DataError

VOWELS = "aeiou"
SIBILANT_ENDINGS = ("s", "x", "z", "ch", "sh")

_PERSONS = ("first", "second", "third")
_NUMBERS = ("singular", "plural")
_TENSES = ("present", "past", "future")
_CASES = ("subjective", "objective", "reflexive")


@dataclass(frozen=True)
class Lexicon:
    irregular_plurals: dict[str, str] = field(default_factory=dict)
    irregular_verbs: dict[tuple[str, str, str, str], str] = \
        field(default_factory=dict)
    pronoun_table: dict[tuple[str, str, str, str], str] = \
        field(default_factory=dict)
    article_exceptions: dict[str, str] = field(default_factory=dict)


def load_lexicon(text: str) -> Lexicon:
    """Parse lexicon file text; raises DataError on malformed lines."""
    plurals: dict[str, str] = {}
    verbs: dict[tuple[str, str, str, str], str] = {}
    pronouns: dict[tuple[str, str, str, str], str] = {}
    articles: dict[str, str] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in ("plurals", "verbs", "pronouns", "articles"):
                raise DataError(f"lexicon line {lineno}: unknown section "
                                f"[{section}]")
            continue
        fields = line.split("\t")
        if section == "plurals":
            if len(fields) != 2:
                raise DataError(f"lexicon line {lineno}: expected "
                                f"'lemma<TAB>plural'")
            plurals[fields[0]] = fields[1]
        elif section == "verbs":
            if len(fields) != 5:
                raise DataError(
                    f"lexicon line {lineno}: expected "
                    f"'lemma<TAB>person<TAB>number<TAB>tense<TAB>form'")
            lemma, person, number, tense, form = fields
            if person not in _PERSONS or number not in _NUMBERS \
                    or tense not in _TENSES:
                raise DataError(f"lexicon line {lineno}: bad verb features")
            verbs[(lemma, person, number, tense)] = form
        elif section == "pronouns":
            if len(fields) != 5:
                raise DataError(
                    f"lexicon line {lineno}: expected "
                    f"'person<TAB>number<TAB>gender<TAB>case<TAB>form'")
            person, number, gender, case, form = fields
            if person not in _PERSONS or number not in _NUMBERS \
                    or case not in _CASES:
                raise DataError(
                    f"lexicon line {lineno}: bad pronoun features")
            pronouns[(person, number, gender, case)] = form
        elif section == "articles":
            if len(fields) != 2 or fields[1] not in ("a", "an"):
                raise DataError(f"lexicon line {lineno}: expected "
                                f"'word<TAB>a|an'")
            articles[fields[0]] = fields[1]
        else:
            raise DataError(f"lexicon line {lineno}: entry before any "
                            f"section header")
    return Lexicon(plurals, verbs, pronouns, articles)


def load_lexicon_file(path: str) -> Lexicon:
    with open(path, encoding="utf-8") as fh:
        return load_lexicon(fh.read())


_default: Lexicon | None = None


def default_lexicon() -> Lexicon:
    """The lexicon shipped with the package, loaded once."""
    global _default
    if _default is None:
        text = resources.files("nlgen").joinpath("data/lexicon.txt") \
            .read_text(encoding="utf-8")
        _default = load_lexicon(text)
    return _default


def _ends_sibilant(word: str) -> bool:
    return word.endswith(SIBILANT_ENDINGS)


def pluralize(lemma: str, lex: Lexicon | None = None) -> str:
    """Plural of a noun lemma; irregular table hit wins over the rules."""
    if not lemma:
        raise ValueError("cannot pluralize an empty lemma")
    lex = lex or default_lexicon()
    if lemma in lex.irregular_plurals:
        return lex.irregular_plurals[lemma]
    if _ends_sibilant(lemma):
        return lemma + "es"
    if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in VOWELS:
        return lemma[:-1] + "ies"
    return lemma + "s"


def verb_form(lemma: str, person: str, number: str, tense: str,
              lex: Lexicon | None = None) -> str:
    """Inflected verb form agreeing with the given subject features."""
    if person not in _PERSONS or number not in _NUMBERS \
            or tense not in _TENSES:
        raise ValueError(
            f"bad verb features: {person!r}/{number!r}/{tense!r}")
    lex = lex or default_lexicon()
    hit = lex.irregular_verbs.get((lemma, person, number, tense))
    if hit is not None:
        return hit
    if tense == "future":
        return "will " + lemma
    if tense == "past":
        if lemma.endswith("e"):
            return lemma + "d"
        if lemma.endswith("y") and len(lemma) > 1 \
                and lemma[-2] not in VOWELS:
            return lemma[:-1] + "ied"
        return lemma + "ed"
    # Present: only the third singular inflects, with the same spelling
    # adjustments as pluralize.
    if person == "third" and number == "singular":
        if _ends_sibilant(lemma):
            return lemma + "es"
        if lemma.endswith("y") and len(lemma) > 1 \
                and lemma[-2] not in VOWELS:
            return lemma[:-1] + "ies"
        return lemma + "s"
    return lemma


def pronoun(person: str, number: str, gender: str, case: str,
            lex: Lexicon | None = None) -> str:
    """Pronoun form for a feature cell; total over the declared domain."""
    lex = lex or default_lexicon()
    form = lex.pronoun_table.get((person, number, gender, case))
    if form is None:
        # Standard syncretisms are stored under gender "-".
        form = lex.pronoun_table.get((person, number, "-", case))
    if form is None:
        raise KeyError(
            f"no pronoun for {person}/{number}/{gender}/{case}")
    return form
