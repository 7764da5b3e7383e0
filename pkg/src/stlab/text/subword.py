"""Subword segmentation: character vocabularies and a unigram LM trained by EM.

The unigram trainer follows the usual recipe: seed candidates are all
substrings up to length 6 seen more than twice (single characters are always
kept for full coverage), four EM rounds re-estimate piece probabilities from
expected counts over the segmentation lattice, and each round prunes the 20%
least probable multi-character pieces, never going below the requested
vocabulary size. Encoding is Viterbi best segmentation; characters outside
the vocabulary map to <unk> and are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

PAD_ID, BOS_ID, EOS_ID, UNK_ID = 0, 1, 2, 3
RESERVED = ("<pad>", "<s>", "</s>", "<unk>")
UNK_LOGPROB = -100.0
MAX_PIECE_LEN = 6

FILE_HEADER = "stlab-subword-1"


class SubwordError(ValueError):
    pass


@dataclass
class SubwordModel:
    mode: str                 # "char" | "unigram"
    pieces: dict              # piece -> logprob (<= 0)
    piece_to_id: dict
    id_to_piece: list

    @classmethod
    def from_pieces(cls, mode, pieces):
        ordered = sorted(pieces)
        id_to_piece = list(RESERVED) + ordered
        piece_to_id = {p: i for i, p in enumerate(id_to_piece)}
        return cls(mode=mode, pieces=dict(sorted(pieces.items())),
                   piece_to_id=piece_to_id, id_to_piece=id_to_piece)

    @property
    def vocab_size(self):
        return len(self.id_to_piece)

    @property
    def max_len(self):
        return max((len(p) for p in self.pieces), default=1)

    # -- encode / decode -------------------------------------------------

    def encode_report(self, text):
        """Viterbi segmentation -> (ids, unknown character count)."""
        if not text:
            return [], 0
        n = len(text)
        max_len = self.max_len
        pieces = self.pieces
        best = [(-math.inf, -1, None)] * (n + 1)  # (score, backpointer, piece)
        best[0] = (0.0, -1, None)
        for j in range(1, n + 1):
            lo = max(0, j - max_len)
            b_score, b_i, b_piece = -math.inf, -1, None
            for i in range(lo, j):
                prev = best[i][0]
                if prev == -math.inf:
                    continue
                piece = text[i:j]
                lp = pieces.get(piece)
                if lp is None:
                    continue
                score = prev + lp
                if score > b_score:
                    b_score, b_i, b_piece = score, i, piece
            # unknown-character fallback keeps segmentation total
            if j >= 1 and best[j - 1][0] != -math.inf:
                score = best[j - 1][0] + UNK_LOGPROB
                if score > b_score:
                    b_score, b_i, b_piece = score, j - 1, None
            best[j] = (b_score, b_i, b_piece)
        ids = []
        n_unk = 0
        j = n
        while j > 0:
            _, i, piece = best[j]
            if piece is None:
                ids.append(UNK_ID)
                n_unk += 1
            else:
                ids.append(self.piece_to_id[piece])
            j = i
        ids.reverse()
        return ids, n_unk

    def encode(self, text):
        return self.encode_report(text)[0]

    def decode(self, ids):
        out = []
        for i in ids:
            if i in (PAD_ID, BOS_ID, EOS_ID):
                continue
            out.append("<unk>" if i == UNK_ID else self.id_to_piece[i])
        return "".join(out)

    # -- persistence -----------------------------------------------------

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{FILE_HEADER}\n")
            fh.write(f"mode\t{self.mode}\n")
            for piece in sorted(self.pieces):
                fh.write(f"{piece}\t{self.pieces[piece]!r}\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if header != FILE_HEADER:
                raise SubwordError(f"{path}: bad header {header!r}")
            mode_line = fh.readline().rstrip("\n").split("\t")
            if len(mode_line) != 2 or mode_line[0] != "mode":
                raise SubwordError(f"{path}: missing mode line")
            pieces = {}
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                piece, lp = line.rsplit("\t", 1)
                pieces[piece] = float(lp)
        return cls.from_pieces(mode_line[1], pieces)


def _char_counts(corpus):
    counts = {}
    for line in corpus:
        for c in line:
            counts[c] = counts.get(c, 0) + 1
    return counts


def train_subword(corpus, mode="unigram", vocab_size=200, seed=0):
    """Train a segmentation model on normalized lines.

    vocab_size counts pieces excluding the four reserved ids; must be at
    least the alphabet size of the corpus.
    """
    corpus = [line for line in corpus if line]
    if not corpus:
        raise SubwordError("empty training corpus")
    char_counts = _char_counts(corpus)
    alphabet = sorted(char_counts)
    if vocab_size < len(alphabet):
        raise SubwordError(
            f"vocab_size {vocab_size} below alphabet size {len(alphabet)}"
        )
    if mode == "char":
        total = sum(char_counts.values())
        pieces = {c: math.log(char_counts[c] / total) for c in alphabet}
        return SubwordModel.from_pieces("char", pieces)
    if mode != "unigram":
        raise SubwordError(f"unknown subword mode {mode!r}")

    # seed candidates: substrings of length 2..6 seen more than twice
    sub_counts = {}
    for line in corpus:
        n = len(line)
        for i in range(n):
            hi = min(n, i + MAX_PIECE_LEN)
            for j in range(i + 2, hi + 1):
                s = line[i:j]
                sub_counts[s] = sub_counts.get(s, 0) + 1
    candidates = dict(char_counts)
    for s, c in sub_counts.items():
        if c > 2:
            candidates[s] = c
    total = sum(candidates.values())
    logprobs = {p: math.log(c / total) for p, c in sorted(candidates.items())}

    for _ in range(4):
        logprobs = _em_round(corpus, logprobs, alphabet)
        logprobs = _prune(logprobs, alphabet, vocab_size, fraction=0.2)
    logprobs = _prune(logprobs, alphabet, vocab_size, fraction=1.0)
    return SubwordModel.from_pieces("unigram", logprobs)


def _em_round(corpus, logprobs, alphabet):
    """One forward-backward pass collecting expected piece counts."""
    expected = {p: 0.0 for p in logprobs}
    max_len = max(len(p) for p in logprobs)
    for line in corpus:
        n = len(line)
        alpha = [-math.inf] * (n + 1)
        alpha[0] = 0.0
        spans = []  # (i, j, piece, logprob)
        for j in range(1, n + 1):
            acc = -math.inf
            lo = max(0, j - max_len)
            for i in range(lo, j):
                if alpha[i] == -math.inf:
                    continue
                piece = line[i:j]
                lp = logprobs.get(piece)
                if lp is None:
                    continue
                spans.append((i, j, piece, lp))
                acc = _logadd(acc, alpha[i] + lp)
            alpha[j] = acc
        if alpha[n] == -math.inf:
            continue
        beta = [-math.inf] * (n + 1)
        beta[n] = 0.0
        for i, j, piece, lp in reversed(spans):
            beta[i] = _logadd(beta[i], lp + beta[j])
        z = alpha[n]
        for i, j, piece, lp in spans:
            if beta[j] == -math.inf:
                continue
            expected[piece] += math.exp(alpha[i] + lp + beta[j] - z)
    floor = 1e-10
    total = sum(expected.values()) + floor * len(expected)
    return {
        p: math.log((expected[p] + floor) / total) for p in sorted(expected)
    }


def _logadd(a, b):
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    m = a if a > b else b
    return m + math.log1p(math.exp(-abs(a - b)))


def _prune(logprobs, alphabet, vocab_size, fraction):
    """Drop the lowest-probability multi-char pieces, keeping >= vocab_size."""
    singles = {p for p in logprobs if len(p) == 1}
    multi = sorted(
        (p for p in logprobs if len(p) > 1),
        key=lambda p: (-logprobs[p], p),
    )
    keep = max(vocab_size - len(singles), int(round(len(multi) * (1.0 - fraction))))
    keep = max(0, keep)
    kept = set(multi[:keep]) | singles
    # renormalize over surviving pieces
    total = sum(math.exp(logprobs[p]) for p in kept)
    return {p: logprobs[p] - math.log(total) for p in sorted(kept)}
