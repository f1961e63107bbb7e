"""Figure rendering for report outputs.

Every report path that emits tabular data can also render a small figure
next to it.  Figures are written as PNG with pinned metadata so repeated
runs produce identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

_METADATA = {"Software": "anticyclo"}


def _save(fig, path: Path) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=144, metadata=_METADATA)
    plt.close(fig)
    return str(path)


def render_lambda_table(table_dict: dict, path: Path, title: str = "") -> str:
    """Bar chart of per-prime lambda contributions for one form."""
    rows = table_dict.get("rows", [])
    labels = [f"q={r['q']}\n{r['class']}" for r in rows]
    values = [r["contribution"] if r["contribution"] is not None else 0 for r in rows]
    unknown = [r["contribution"] is None for r in rows]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(rows) + 2), 3.2))
    colors = ["#b44" if u else "#2c5282" for u in unknown]
    ax.bar(range(len(rows)), values, color=colors)
    ax.set_xticks(range(len(rows)), labels, fontsize=8)
    ax.set_ylabel("lambda contribution")
    ax.set_title(title or f"local corrections: {table_dict.get('form', '')}")
    ax.grid(True, axis="y", ls=":", alpha=0.4)
    fig.tight_layout()
    return _save(fig, path)


def render_verdict_counts(counts: dict, path: Path, title: str = "verdicts") -> str:
    keys = sorted(counts)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(keys) + 2), 3.2))
    palette = {"HOLDS": "#2c7a3f", "OK": "#2c7a3f", "PROPAGATED": "#2c7a3f",
               "CONGRUENT": "#2c7a3f", "UNKNOWN": "#b8860b"}
    ax.bar(range(len(keys)), [counts[k] for k in keys],
           color=[palette.get(k, "#a33") for k in keys])
    ax.set_xticks(range(len(keys)), keys, fontsize=8)
    ax.set_ylabel("rows")
    ax.set_title(title)
    ax.grid(True, axis="y", ls=":", alpha=0.4)
    fig.tight_layout()
    return _save(fig, path)


def render_batch_lambdas(rows: list[dict], path: Path) -> str:
    """Transferred invariants per batch row (where a transfer produced one)."""
    xs, ys = [], []
    for r in rows:
        value = r.get("lambda_out")
        if value is None:
            continue
        xs.append(r["index"])
        ys.append(value)
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    if xs:
        ax.bar(xs, ys, color="#2c5282")
    ax.set_xlabel("manifest row")
    ax.set_ylabel("transferred lambda")
    ax.set_title("transferred invariants by row")
    ax.grid(True, axis="y", ls=":", alpha=0.4)
    fig.tight_layout()
    return _save(fig, path)
