"""Built-in desk-scale classification tasks and their CSV form.

Two generated datasets: a three-arm spiral in the plane (quick smoke
tests) and a 10-class set of noisy 8x8 digit glyphs (64 features) sized
so that multi-layer networks split across crossbar tiles. Generation is
fully determined by the seed; the CSV files written by
:func:`export_dataset` are byte-stable.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .streams import stream

_GLYPHS = {
    0: ("..####..",
        ".#....#.",
        ".#...##.",
        ".#..#.#.",
        ".#.#..#.",
        ".##...#.",
        ".#....#.",
        "..####.."),
    1: ("...##...",
        "..###...",
        "...##...",
        "...##...",
        "...##...",
        "...##...",
        "...##...",
        ".######."),
    2: ("..####..",
        ".#....#.",
        "......#.",
        ".....#..",
        "....#...",
        "...#....",
        "..#.....",
        ".######."),
    3: ("..####..",
        ".#....#.",
        "......#.",
        "...###..",
        "......#.",
        "......#.",
        ".#....#.",
        "..####.."),
    4: ("....##..",
        "...#.#..",
        "..#..#..",
        ".#...#..",
        ".######.",
        ".....#..",
        ".....#..",
        ".....#.."),
    5: (".######.",
        ".#......",
        ".#......",
        ".#####..",
        "......#.",
        "......#.",
        ".#....#.",
        "..####.."),
    6: ("..####..",
        ".#....#.",
        ".#......",
        ".#####..",
        ".#....#.",
        ".#....#.",
        ".#....#.",
        "..####.."),
    7: (".######.",
        "......#.",
        ".....#..",
        "....#...",
        "...##...",
        "...#....",
        "...#....",
        "...#...."),
    8: ("..####..",
        ".#....#.",
        ".#....#.",
        "..####..",
        ".#....#.",
        ".#....#.",
        ".#....#.",
        "..####.."),
    9: ("..####..",
        ".#....#.",
        ".#....#.",
        ".#....#.",
        "..#####.",
        "......#.",
        ".#....#.",
        "..####.."),
}


@dataclass
class Dataset:
    name: str
    x_train: np.ndarray
    y_train: np.ndarray
    x_val: np.ndarray
    y_val: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray

    @property
    def n_classes(self) -> int:
        return int(self.y_train.max()) + 1

    @property
    def n_features(self) -> int:
        return self.x_train.shape[1]


def _glyph_array(digit: int) -> np.ndarray:
    rows = _GLYPHS[digit]
    return np.array([[1.0 if c == "#" else 0.0 for c in row] for row in rows])


def _digit_samples(n: int, rng, noise_std: float, max_shift: int) -> tuple:
    labels = rng.integers(0, 10, n)
    out = np.empty((n, 64))
    for i, lab in enumerate(labels):
        img = _glyph_array(int(lab))
        if max_shift > 0:
            dx, dy = rng.integers(-max_shift, max_shift + 1, 2)
            img = np.roll(np.roll(img, int(dy), axis=0), int(dx), axis=1)
        img = img * rng.uniform(0.8, 1.2)
        img = img + noise_std * rng.standard_normal((8, 8))
        out[i] = img.ravel() - 0.25
    return out, labels.astype(int)


def make_digits(
    n_train: int = 1200,
    n_val: int = 200,
    n_test: int = 400,
    seed: int = 0,
    noise_std: float = 0.8,
    max_shift: int = 1,
) -> Dataset:
    """Noisy shifted 8x8 glyphs; 64 features, 10 classes."""
    rng = stream(seed, "data-gen")
    x_tr, y_tr = _digit_samples(n_train, rng, noise_std, max_shift)
    x_va, y_va = _digit_samples(n_val, rng, noise_std, max_shift)
    x_te, y_te = _digit_samples(n_test, rng, noise_std, max_shift)
    return Dataset("digits64", x_tr, y_tr, x_va, y_va, x_te, y_te)


def make_spirals(
    n_per_class: int = 400,
    n_classes: int = 3,
    seed: int = 0,
    noise_std: float = 0.04,
    turns: float = 1.5,
) -> Dataset:
    """Interleaved spiral arms in the plane; 2 features."""
    rng = stream(seed, "data-gen")
    n_total = n_per_class * n_classes
    x = np.empty((n_total, 2))
    y = np.empty(n_total, dtype=int)
    for c in range(n_classes):
        t = rng.uniform(0.15, 1.0, n_per_class)
        angle = 2.0 * np.pi * (turns * t + c / n_classes)
        radius = t
        xs = radius * np.cos(angle) + noise_std * rng.standard_normal(n_per_class)
        ys = radius * np.sin(angle) + noise_std * rng.standard_normal(n_per_class)
        sl = slice(c * n_per_class, (c + 1) * n_per_class)
        x[sl, 0], x[sl, 1], y[sl] = xs, ys, c
    order = rng.permutation(n_total)
    x, y = x[order], y[order]
    n_tr = int(0.6 * n_total)
    n_va = int(0.15 * n_total)
    return Dataset(
        "spirals", x[:n_tr], y[:n_tr],
        x[n_tr:n_tr + n_va], y[n_tr:n_tr + n_va],
        x[n_tr + n_va:], y[n_tr + n_va:],
    )


def make_dataset(name: str, seed: int = 0) -> Dataset:
    if name == "digits64":
        return make_digits(seed=seed)
    if name == "spirals":
        return make_spirals(seed=seed)
    raise KeyError(f"unknown dataset {name!r}; available: digits64, spirals")


# --- CSV form ---------------------------------------------------------------

def save_csv(path, x: np.ndarray, y: np.ndarray) -> None:
    """Features then integer label, one row per sample, with header."""
    x = np.atleast_2d(x)
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(x.shape[1])] + ["label"])
        for row, lab in zip(x, y):
            writer.writerow([repr(float(v)) for v in row] + [int(lab)])


def load_csv(path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[-1] != "label":
            raise ValueError(f"{path}: expected a trailing 'label' column")
        feats, labels = [], []
        for row in reader:
            feats.append([float(v) for v in row[:-1]])
            labels.append(int(row[-1]))
    return np.array(feats), np.array(labels, dtype=int)


def export_dataset(ds: Dataset, data_dir) -> list[Path]:
    """Write {name}_{train,val,test}.csv under data_dir."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for split, x, y in (("train", ds.x_train, ds.y_train),
                        ("val", ds.x_val, ds.y_val),
                        ("test", ds.x_test, ds.y_test)):
        p = data_dir / f"{ds.name}_{split}.csv"
        save_csv(p, x, y)
        written.append(p)
    return written


def load_dataset(data_dir, name: str) -> Dataset:
    """Load a previously exported dataset; fall back to regeneration."""
    data_dir = Path(data_dir)
    paths = {s: data_dir / f"{name}_{s}.csv" for s in ("train", "val", "test")}
    if all(p.exists() for p in paths.values()):
        x_tr, y_tr = load_csv(paths["train"])
        x_va, y_va = load_csv(paths["val"])
        x_te, y_te = load_csv(paths["test"])
        return Dataset(name, x_tr, y_tr, x_va, y_va, x_te, y_te)
    return make_dataset(name)
