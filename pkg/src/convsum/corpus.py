"""Ground-truth corpus: loading, checking, and scoring.

A corpus is a line-oriented text file of records

    id | expr | start | expect | provenance | note

with ``#`` comments and blank lines ignored.  ``expect`` is either a
verdict (``C`` / ``D``) checked against :func:`convsum.tests.auto`, or a
power-series expectation such as ``r=2 (-2, 2)`` or
``r=3 (2, 8) center=5`` checked against :func:`convsum.power_series`.
"""

from __future__ import annotations

import importlib.resources
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import expr as X
from .errors import EngineError
from .tests import CONVERGES, DIVERGES, INCONCLUSIVE, auto
from .power_series import interval

__all__ = ["CorpusEntry", "EntryResult", "ScoreReport",
           "load_corpus", "load_default", "check_entry", "score"]

_VERDICT_SHORT = {"C": CONVERGES, "D": DIVERGES}

DEFAULT_CORPUS = "corpus.txt"


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    expr_text: str
    start: int
    expect: str
    provenance: str
    note: str

    @property
    def is_power_series(self):
        return self.expect.startswith("r=")


@dataclass
class EntryResult:
    entry: CorpusEntry
    status: str          # "pass" | "fail" | "inconclusive" | "error"
    got: str
    detail: str = ""

    @property
    def contradicts(self):
        return self.status in ("fail", "error")


@dataclass
class ScoreReport:
    results: list

    @property
    def counts(self):
        out = {"pass": 0, "fail": 0, "inconclusive": 0, "error": 0}
        for r in self.results:
            out[r.status] += 1
        return out

    @property
    def contradictions(self):
        return [r for r in self.results if r.contradicts]


def _parse_line(line: str, lineno: int) -> CorpusEntry:
    parts = [p.strip() for p in line.split("|")]
    if len(parts) != 6:
        raise ValueError(
            f"line {lineno}: expected 6 '|'-separated fields, got {len(parts)}")
    ident, expr_text, start, expect, prov, note = parts
    if not ident:
        raise ValueError(f"line {lineno}: empty id")
    X.parse(expr_text, _entry_var(expr_text))  # must parse
    return CorpusEntry(ident, expr_text, int(start), expect, prov, note)


def _entry_var(expr_text: str) -> str:
    # corpus entries are written in n; fall back to the single free symbol
    try:
        e = X.parse(expr_text)
        free = X.free_vars(e)
    except EngineError:
        return "n"
    if "n" in free or not free:
        return "n"
    if len(free) == 1:
        return free.pop()
    return "n"


def load_corpus(path) -> list:
    """Parse a corpus file; raises ValueError on malformed or duplicate ids."""
    entries = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            e = _parse_line(line, lineno)
            if e.id in seen:
                raise ValueError(f"line {lineno}: duplicate id {e.id!r}")
            seen.add(e.id)
            entries.append(e)
    return entries


def load_default() -> list:
    """The corpus shipped with the package."""
    ref = importlib.resources.files(__package__) / "data" / DEFAULT_CORPUS
    with importlib.resources.as_file(ref) as path:
        return load_corpus(path)


def _parse_radius_expect(expect: str):
    """Split 'r=<expr> [<interval>] [center=<q>]' into its parts."""
    toks = expect.replace(", ", ",").split()
    rtext = toks[0][2:]
    itext = None
    center = Fraction(0)
    for t in toks[1:]:
        if t.startswith("center="):
            center = Fraction(t[len("center="):])
        else:
            itext = t.replace(",", ", ")
    return rtext, itext, center


def _canon(expr_text: str) -> str:
    return X.format_expr(X.parse(expr_text))


def check_entry(entry: CorpusEntry, var: str = None) -> EntryResult:
    var = var or _entry_var(entry.expr_text)
    try:
        a = X.parse(entry.expr_text, var)
        if entry.is_power_series:
            want_r, want_i, center = _parse_radius_expect(entry.expect)
            res = interval(a, center=center, var=var)
            got_r = res.radius if isinstance(res.radius, str) \
                else X.format_expr(res.radius)
            got_i = res.interval_text()
            got = f"r={got_r} {got_i}"
            ok = (got_r == want_r if want_r in ("inf", "0")
                  else res.exact and got_r == _canon(want_r))
            if ok and want_i is not None:
                ok = got_i == want_i
            return EntryResult(entry, "pass" if ok else "fail", got)
        want = _VERDICT_SHORT.get(entry.expect, entry.expect)
        v = auto(a, var=var)
        if v.outcome == want:
            return EntryResult(entry, "pass", v.outcome,
                               detail=v.deciding_test or "")
        if v.outcome == INCONCLUSIVE:
            return EntryResult(entry, "inconclusive", v.outcome)
        return EntryResult(entry, "fail", v.outcome,
                           detail=v.deciding_test or "")
    except EngineError as exc:
        return EntryResult(entry, "error", type(exc).__name__, detail=str(exc))


def score(entries, jobs: int = 4) -> ScoreReport:
    """Check every entry concurrently; results ordered by id."""
    ordered = sorted(entries, key=lambda e: e.id)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(check_entry, ordered))
    return ScoreReport(results)
