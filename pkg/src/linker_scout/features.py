"""Standardisation and principal component projection of invariant matrices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .invariants import INVARIANT_NAMES


@dataclass(frozen=True)
class PcaModel:
    means: np.ndarray
    stds: np.ndarray
    components: np.ndarray  # (c, c), columns are eigenvectors
    eigenvalues: np.ndarray  # non-increasing

    @property
    def n_features(self):
        return len(self.eigenvalues)

    def explained_ratio(self):
        return np.cumsum(self.eigenvalues) / self.eigenvalues.sum()


def standardize(x, columns=INVARIANT_NAMES):
    """Z-score each column with the sample (n-1) standard deviation.

    Returns ``(z, means, stds)``. A constant column is an error.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need a 2-d matrix with at least two rows")
    if not np.all(np.isfinite(x)):
        raise ValueError("feature matrix contains non-finite values")
    means = x.mean(axis=0)
    stds = x.std(axis=0, ddof=1)
    flat = np.flatnonzero(~(stds > 0))
    if flat.size:
        names = [columns[i] if i < len(columns) else str(i) for i in flat]
        raise ValueError(f"zero variance in column(s): {', '.join(names)}")
    return (x - means) / stds, means, stds


def fit_pca(z, means=None, stds=None):
    """Eigendecomposition of the sample covariance of ``z``.

    Each eigenvector is flipped so its largest-magnitude coefficient is
    positive (first such coefficient on exact ties).
    """
    z = np.asarray(z, dtype=float)
    n, c = z.shape
    if n <= c:
        raise ValueError(f"need more rows than columns for PCA (got {n}x{c})")
    centered = z - z.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    if not np.all(np.isfinite(cov)):
        raise FloatingPointError("covariance matrix is not finite")
    cov = 0.5 * (cov + cov.T)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals)[::-1]
    vals = np.clip(vals[order], 0.0, None)
    vecs = vecs[:, order]
    pivots = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[pivots, np.arange(c)])
    vecs = vecs * signs
    if means is None:
        means = np.zeros(c)
    if stds is None:
        stds = np.ones(c)
    return PcaModel(np.asarray(means, float), np.asarray(stds, float), vecs, vals)


def parse_policy(text):
    """``"variance:0.99"`` -> ("variance", 0.99); ``"fixed:8"`` -> ("fixed", 8)."""
    kind, _, value = text.partition(":")
    if kind == "variance":
        theta = float(value)
        if not 0.0 < theta <= 1.0:
            raise ValueError(f"variance threshold must lie in (0, 1], got {theta}")
        return ("variance", theta)
    if kind == "fixed":
        return ("fixed", int(value))
    raise ValueError(f"unknown component policy {text!r}")


def format_policy(policy):
    kind, value = policy
    return f"{kind}:{value}"


def select_components(model, policy):
    if isinstance(policy, str):
        policy = parse_policy(policy)
    kind, value = policy
    c = model.n_features
    if kind == "fixed":
        return int(min(max(int(value), 1), c))
    if kind != "variance":
        raise ValueError(f"unknown component policy {kind!r}")
    if not 0.0 < value <= 1.0:
        raise ValueError(f"variance threshold must lie in (0, 1], got {value}")
    if value == 1.0:
        return c
    ratio = model.explained_ratio()
    # rounding in the cumulative sum must not push m past c
    return int(min(np.searchsorted(ratio, value - 1e-12) + 1, c))


def transform(z, model, m):
    z = np.asarray(z, dtype=float)
    if z.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} columns, got {z.shape[1]}")
    if not 1 <= m <= model.n_features:
        raise ValueError(f"m={m} out of range 1..{model.n_features}")
    # fixed accumulation order: identical rows map to identical rows, independent of BLAS
    comps = model.components[:, :m]
    out = np.zeros((z.shape[0], m))
    for j in range(z.shape[1]):
        out += z[:, j : j + 1] * comps[j]
    return out


def _fmt(values):
    return " ".join(f"{v:.17g}" for v in np.ravel(values))


def dump_pca_model(model):
    c = model.n_features
    lines = [
        f"n_features {c}",
        f"means {_fmt(model.means)}",
        f"stds {_fmt(model.stds)}",
        f"eigenvalues {_fmt(model.eigenvalues)}",
    ]
    lines += [f"component_row {_fmt(row)}" for row in model.components]
    return "\n".join(lines) + "\n"


def load_pca_model(text):
    fields: dict[str, list] = {"component_row": []}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, rest = line.partition(" ")
        values = [float(v) for v in rest.split()]
        if key == "component_row":
            fields[key].append(values)
        else:
            fields[key] = values
    return PcaModel(
        np.array(fields["means"]),
        np.array(fields["stds"]),
        np.array(fields["component_row"]),
        np.array(fields["eigenvalues"]),
    )
