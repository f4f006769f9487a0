"""Report serialization: canonical JSON with floats at 17 significant digits.

Reports are plain dicts; this module pins the float format (so byte-identical
reproducibility is a matter of content, not of repr quirks) and converts
Fractions and polynomials to their canonical text forms.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .polynomials import UniPoly, format_poly

_TOKEN = "@@F17G:{}@@"
_TOKEN_RE = re.compile(r'"@@F17G:(\d+)@@"')


def _walk(obj, floats: list[str]):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, float):
        floats.append(format(obj, ".17g"))
        return _TOKEN.format(len(floats) - 1)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, UniPoly):
        return format_poly(obj)
    if isinstance(obj, dict):
        return {str(k): _walk(v, floats) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_walk(v, floats) for v in obj]
    return obj


def dumps_report(report: dict, indent: int = 2) -> str:
    floats: list[str] = []
    text = json.dumps(_walk(report, floats), indent=indent)
    return _TOKEN_RE.sub(lambda m: floats[int(m.group(1))], text)


def write_report(report: dict, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_report(report))
        fh.write("\n")
