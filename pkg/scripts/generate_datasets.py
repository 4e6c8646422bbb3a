#!/usr/bin/env python3
"""Regenerate the bundled dataset CSVs.

* tic_tac_toe.csv — every distinct final board of tic-tac-toe with x moving
  first (play stops at the first completed line or a full board); class is
  "positive" when x holds a completed line.  This enumeration reproduces the
  classic 958-row endgame dataset exactly.
* breast_cancer.csv — the Wisconsin diagnostic dataset as shipped inside
  scikit-learn (569 rows, 30 numeric features); label 1 = benign.

Run from the repository root:  python scripts/generate_datasets.py
"""

from __future__ import annotations

import csv
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "rdtcombine" / "datasets"

LINES = (
    (0, 1, 2),
    (3, 4, 5),
    (6, 7, 8),
    (0, 3, 6),
    (1, 4, 7),
    (2, 5, 8),
    (0, 4, 8),
    (2, 4, 6),
)

SQUARES = (
    "top-left-square",
    "top-middle-square",
    "top-right-square",
    "middle-left-square",
    "middle-middle-square",
    "middle-right-square",
    "bottom-left-square",
    "bottom-middle-square",
    "bottom-right-square",
)


def _winner(board: tuple[str, ...]) -> str | None:
    for a, b, c in LINES:
        if board[a] != "b" and board[a] == board[b] == board[c]:
            return board[a]
    return None


def enumerate_endgames() -> dict[tuple[str, ...], str]:
    """All distinct boards at which a game ends, with the game outcome."""
    finals: dict[tuple[str, ...], str] = {}
    stack: list[tuple[tuple[str, ...], str]] = [(("b",) * 9, "x")]
    seen: set[tuple[tuple[str, ...], str]] = set()
    while stack:
        board, mover = stack.pop()
        if (board, mover) in seen:
            continue
        seen.add((board, mover))
        win = _winner(board)
        if win is not None or "b" not in board:
            finals[board] = "positive" if win == "x" else "negative"
            continue
        nxt = "o" if mover == "x" else "x"
        for i, cell in enumerate(board):
            if cell == "b":
                child = board[:i] + (mover,) + board[i + 1 :]
                stack.append((child, nxt))
    return finals


def write_tic_tac_toe() -> None:
    finals = enumerate_endgames()
    rows = sorted(finals.items())
    n_pos = sum(1 for _, label in rows if label == "positive")
    assert len(rows) == 958, f"expected 958 endgame boards, got {len(rows)}"
    assert n_pos == 626, f"expected 626 x-wins, got {n_pos}"
    out = OUT_DIR / "tic_tac_toe.csv"
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(SQUARES) + ["class"])
        for board, label in rows:
            writer.writerow(list(board) + [label])
    print(f"wrote {out} ({len(rows)} rows, {n_pos} positive)")


def write_breast_cancer() -> None:
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()
    names = [n.replace(" ", "_") for n in bunch.feature_names]
    out = OUT_DIR / "breast_cancer.csv"
    with out.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names + ["class"])
        for values, target in zip(bunch.data, bunch.target):
            writer.writerow([repr(float(v)) for v in values] + [int(target)])
    n_pos = int(bunch.target.sum())
    print(f"wrote {out} ({len(bunch.target)} rows, {n_pos} positive)")


if __name__ == "__main__":
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    write_tic_tac_toe()
    write_breast_cancer()
