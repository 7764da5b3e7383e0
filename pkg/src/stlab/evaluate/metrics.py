"""Corpus BLEU and WER."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field


@dataclass
class ScoreReport:
    bleu: float | None = None
    precisions: list = field(default_factory=list)
    brevity_penalty: float = 1.0
    hyp_length: int = 0
    ref_length: int = 0
    wer: float | None = None
    utterances: int = 0
    recipe: str = ""
    smoothed: bool = False

    def to_json(self):
        return {
            "bleu": self.bleu,
            "precisions": self.precisions,
            "brevity_penalty": self.brevity_penalty,
            "hyp_length": self.hyp_length,
            "ref_length": self.ref_length,
            "wer": self.wer,
            "utterances": self.utterances,
            "recipe": self.recipe,
            "smoothed": self.smoothed,
        }

    def table(self):
        rows = []
        if self.bleu is not None:
            rows.append(("BLEU", f"{self.bleu:.2f}"))
            rows.append(("1-4gram precisions",
                         " / ".join(f"{p:.3f}" for p in self.precisions)))
            rows.append(("brevity penalty", f"{self.brevity_penalty:.4f}"))
        if self.wer is not None:
            rows.append(("WER", f"{self.wer:.4f}"))
        rows.append(("utterances", str(self.utterances)))
        if self.recipe:
            rows.append(("recipe", self.recipe))
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _tokens(x):
    return x.split() if isinstance(x, str) else list(x)


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(hypotheses, references, max_n=4, smooth=False, recipe=""):
    """Corpus BLEU on 0-100: geometric mean of clipped n-gram precisions
    times the brevity penalty. ``smooth`` add-ones higher-order counts for
    tiny dev sets; the plain variant is the scoring contract."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"count mismatch: {len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not hypotheses:
        raise ValueError("empty corpus")
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        h, r = _tokens(hyp), _tokens(ref)
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, max_n + 1):
            hc = _ngrams(h, n)
            if not hc:
                continue
            rc = _ngrams(r, n)
            matches[n - 1] += sum(min(c, rc[g]) for g, c in hc.items())
            totals[n - 1] += sum(hc.values())
    precisions = []
    for n in range(max_n):
        m, t = matches[n], totals[n]
        if smooth and n > 0:
            m, t = m + 1, t + 1
        precisions.append(m / t if t else 0.0)
    if hyp_len == 0 or any(p == 0.0 for p in precisions):
        score = 0.0
        bp = 1.0 if hyp_len >= ref_len or hyp_len == 0 else math.exp(1.0 - ref_len / hyp_len)
    else:
        log_mean = sum(math.log(p) for p in precisions) / max_n
        bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
        score = 100.0 * bp * math.exp(log_mean)
    return ScoreReport(bleu=score, precisions=precisions, brevity_penalty=bp,
                       hyp_length=hyp_len, ref_length=ref_len,
                       utterances=len(hypotheses), recipe=recipe, smoothed=smooth)


def edit_distance(a, b):
    """Levenshtein distance over token lists."""
    n, m = len(a), len(b)
    if n == 0:
        return m
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[m]


def wer(hypotheses, references, recipe=""):
    """Corpus WER: total edit operations over total reference words."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"count mismatch: {len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not references:
        raise ValueError("empty reference corpus")
    edits = 0
    words = 0
    for hyp, ref in zip(hypotheses, references):
        h, r = _tokens(hyp), _tokens(ref)
        edits += edit_distance(h, r)
        words += len(r)
    if words == 0:
        raise ValueError("reference corpus has no words")
    return ScoreReport(wer=edits / words, utterances=len(hypotheses), recipe=recipe)
