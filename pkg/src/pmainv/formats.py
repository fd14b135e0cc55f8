"""Line-oriented equation and contact-map files.

Both formats are ``KEY = expression`` lines; ``#`` starts a comment and
blank lines are ignored. Equation files need exactly the keys N, A, B, C,
D; map files need x, y, u, p, q (the images) and x_inv, ..., q_inv (the
inverse components).
"""

from __future__ import annotations

from pathlib import Path

from .calculus import Diffeo
from .errors import ExprSyntaxError, UserError
from .pma import MAEquation
from .symbolic import VARIABLES, RationalFn, parse

EQUATION_KEYS = ("N", "A", "B", "C", "D")
MAP_KEYS = tuple(VARIABLES) + tuple(f"{v}_inv" for v in VARIABLES)


class FileFormatError(UserError):
    code = "file_format"


def _parse_lines(text: str, keys: tuple[str, ...], what: str) -> dict[str, RationalFn]:
    found: dict[str, RationalFn] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ExprSyntaxError("expected 'KEY = expression'", raw, len(raw) - len(raw.lstrip()), lineno)
        key, _, expr = line.partition("=")
        key = key.strip()
        if key not in keys:
            raise ExprSyntaxError(f"unknown key {key!r} in {what} file", raw, raw.index(key) if key else 0, lineno)
        if key in found:
            raise ExprSyntaxError(f"duplicate key {key!r}", raw, raw.index(key), lineno)
        offset = len(line) - len(expr)
        try:
            found[key] = parse(expr)
        except ExprSyntaxError as exc:
            raise type(exc)(exc.message, raw, offset + exc.position, lineno) from None
    missing = [k for k in keys if k not in found]
    if missing:
        raise FileFormatError(f"{what} file lacks {', '.join(missing)}")
    return found


def parse_equation(text: str, name: str = "") -> MAEquation:
    c = _parse_lines(text, EQUATION_KEYS, "equation")
    return MAEquation(*(c[k] for k in EQUATION_KEYS), name=name)


def parse_diffeo(text: str, name: str = "") -> Diffeo:
    c = _parse_lines(text, MAP_KEYS, "map")
    return Diffeo([c[v] for v in VARIABLES], [c[f"{v}_inv"] for v in VARIABLES], name=name)


def _read(path: str | Path) -> str:
    p = Path(path)
    try:
        return p.read_text()
    except FileNotFoundError:
        raise FileFormatError(f"file not found: {path}") from None
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc.strerror}") from None


def load_equation(path: str | Path) -> MAEquation:
    return parse_equation(_read(path), name=Path(path).stem)


def load_diffeo(path: str | Path) -> Diffeo:
    return parse_diffeo(_read(path), name=Path(path).stem)


def format_equation(E: MAEquation) -> str:
    return "".join(f"{k} = {c.to_text()}\n" for k, c in zip(EQUATION_KEYS, E.coefficients))


def format_diffeo(phi: Diffeo) -> str:
    lines = [f"{v} = {g.to_text()}" for v, g in zip(VARIABLES, phi.images)]
    lines += [f"{v}_inv = {g.to_text()}" for v, g in zip(VARIABLES, phi.inverse)]
    return "\n".join(lines) + "\n"
