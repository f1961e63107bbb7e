"""Canonical report serialization.

Reports must be byte-identical across runs and thread counts, so JSON is
emitted with sorted keys and every numeric leaf as a decimal string
(p-adic mantissas routinely exceed native word sizes, and strings
serialize identically everywhere).
"""

from __future__ import annotations

import json


def _stringify(obj):
    if obj is None or isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return obj
    if isinstance(obj, float):
        raise TypeError(f"floats are banned from reports: {obj!r}")
    if isinstance(obj, dict):
        return {str(k): _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v) for v in obj]
    if hasattr(obj, "to_json_dict"):
        return _stringify(obj.to_json_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__} into a report")


def canonical_json(obj) -> str:
    return json.dumps(_stringify(obj), sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True) + "\n"


def _md_scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _md_lines(obj, heading: str, depth: int) -> list[str]:
    lines = []
    if isinstance(obj, dict):
        lines.append(f"{'#' * min(depth, 6)} {heading}")
        lines.append("")
        flat = {k: v for k, v in sorted(obj.items())
                if not isinstance(v, (dict, list, tuple))}
        for k, v in flat.items():
            lines.append(f"- **{k}**: {_md_scalar(v)}")
        if flat:
            lines.append("")
        for k, v in sorted(obj.items()):
            if isinstance(v, (dict, list, tuple)):
                lines.extend(_md_lines(v, k, depth + 1))
    elif isinstance(obj, (list, tuple)):
        if obj and all(isinstance(r, dict) for r in obj) \
                and all(not isinstance(v, (dict, list, tuple))
                        for r in obj for v in r.values()):
            keys = sorted({k for r in obj for k in r})
            lines.append(f"{'#' * min(depth, 6)} {heading}")
            lines.append("")
            lines.append("| " + " | ".join(keys) + " |")
            lines.append("|" + "---|" * len(keys))
            for r in obj:
                lines.append("| " + " | ".join(_md_scalar(r.get(k)) for k in keys) + " |")
            lines.append("")
        else:
            lines.append(f"{'#' * min(depth, 6)} {heading}")
            lines.append("")
            for i, v in enumerate(obj):
                if isinstance(v, (dict, list, tuple)):
                    lines.extend(_md_lines(v, f"{heading}[{i}]", depth + 1))
                else:
                    lines.append(f"- {_md_scalar(v)}")
            lines.append("")
    return lines


def markdown_report(obj, title: str = "Report") -> str:
    data = _stringify(obj)
    lines = _md_lines(data, title, 1)
    out = []
    previous_blank = False
    for line in lines:
        blank = line == ""
        if blank and previous_blank:
            continue
        out.append(line)
        previous_blank = blank
    return "\n".join(out).rstrip() + "\n"
