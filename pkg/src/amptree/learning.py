"""One-shot learning of a threshold from a single example string.

Each learned item samples one random input position i of the example X and
freezes its building block to (A v B) ^ C when X_i = 1, else (A ^ B) v C,
then wires its three leaves to uniformly random items of the previous
level.  The block mix therefore converges to the firing fraction of X, and
the learned structure behaves like the linear threshold construction at
t = ||X||_1 / n, evaluated on fresh inputs with the wiring held fixed.

Determinism: level j of the learner uses PCG64(derive_seed(seed, j)) and
draws the block picks, then the wiring, as two blocks.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputShapeError
from .rng import generator


@dataclass(frozen=True)
class LearnedTree:
    """A frozen, finite realization: per-level blocks and leaf wiring.

    ``blocks[j]`` is 1 where the item uses (A v B) ^ C; wiring indices at
    level j point into level j-1 (level 0 = inputs).
    """

    n: int
    blocks: tuple[np.ndarray, ...]
    wiring: tuple[np.ndarray, ...]
    seed: int
    example_ones: int

    @property
    def levels(self) -> int:
        return len(self.blocks)

    @property
    def width(self) -> int:
        return int(self.blocks[0].shape[0]) if self.blocks else 0

    def block_fraction(self) -> float:
        """Fraction of items using the (A v B) ^ C block."""
        total = sum(int(b.sum()) for b in self.blocks)
        count = sum(b.size for b in self.blocks)
        return total / count

    def to_json(self) -> str:
        return json.dumps({
            "n": self.n,
            "seed": self.seed,
            "example_ones": self.example_ones,
            "levels": [
                {"blocks": lvl.tolist(), "wiring": w.tolist()}
                for lvl, w in zip(self.blocks, self.wiring)],
        }, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "LearnedTree":
        data = json.loads(text)
        blocks = tuple(np.asarray(lvl["blocks"], dtype=np.uint8)
                       for lvl in data["levels"])
        wiring = tuple(np.asarray(lvl["wiring"], dtype=np.int64)
                       for lvl in data["levels"])
        return cls(n=int(data["n"]), blocks=blocks, wiring=wiring,
                   seed=int(data["seed"]),
                   example_ones=int(data["example_ones"]))


def learn_threshold(levels: int, width: int, example: Sequence[int],
                    seed: int) -> LearnedTree:
    """Build a width-``width``, ``levels``-level structure from one example.

    Degenerate all-zero / all-one examples are allowed: the learner still
    runs and produces a monotone-trivial function (pure AND or pure OR
    amplification).
    """
    x = np.asarray(list(example), dtype=np.uint8)
    if x.size == 0:
        raise InputShapeError("the example string is empty")
    if levels < 1 or width < 1:
        raise InputShapeError("levels and width must be >= 1")
    n = int(x.size)
    blocks = []
    wiring = []
    prev_size = n
    for level in range(1, levels + 1):
        rng = generator(seed, level)
        picks = rng.integers(0, n, size=width)
        blocks.append(x[picks])
        wiring.append(rng.integers(0, prev_size, size=(width, 3)))
        prev_size = width
    return LearnedTree(n=n, blocks=tuple(blocks), wiring=tuple(wiring),
                       seed=seed, example_ones=int(x.sum()))


def evaluate_learned(tree: LearnedTree, input_bits: Sequence[int],
                     sample: int | None = None,
                     return_trace: bool = False):
    """Evaluate the learned structure level by level on a fresh input.

    Returns the firing fraction of the sampled top-level items (the first
    ``sample`` items; items are exchangeable by construction, so a prefix
    is a uniform sample and keeps evaluation deterministic).  With
    ``return_trace`` also returns the per-level firing fractions.
    """
    bits = np.asarray(list(input_bits), dtype=np.uint8)
    if bits.size != tree.n:
        raise InputShapeError(
            f"input has {bits.size} bits, learned structure expects {tree.n}")
    cur = bits
    trace = [float(cur.mean())]
    for blocks, wires in zip(tree.blocks, tree.wiring):
        leaves = cur[wires]
        a, b, c = leaves[:, 0], leaves[:, 1], leaves[:, 2]
        t1 = (a | b) & c
        t2 = (a & b) | c
        cur = np.where(blocks == 1, t1, t2).astype(np.uint8)
        trace.append(float(cur.mean()))
    top = cur if sample is None else cur[:sample]
    fraction = float(top.mean())
    if return_trace:
        return fraction, trace
    return fraction
