"""Command line front end.

    pmainv [options] classify FILE
    pmainv [options] invariants FILE
    pmainv [options] verify FILE
    pmainv [options] independence FILE --quintuple ID
    pmainv [options] compare FILE1 FILE2
    pmainv [options] transform FILE --map MAPFILE

``pkg:NAME`` refers to a file shipped in the package data directory.
Exit status: 0 success, 2 user error, 3 internal identity violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Any, Sequence

from . import analysis, formats, invariants
from .classify import classify
from .errors import ExprSyntaxError, IdentityViolation, NoWitnessFound, PmaError, UserError
from .pma import MAEquation, common_factor
from .symbolic import RationalFn

SCHEMA_VERSION = "1.0"
SEED_ENV = "PMAINV_SEED"
DEFAULT_SEED = 1
EXIT_OK, EXIT_USER, EXIT_IDENTITY = 0, 2, 3
FORMATS = ("text", "json", "latex")


@dataclass
class JobConfig:
    command: str
    inputs: list[str]
    output: str = "text"
    seed: int = DEFAULT_SEED
    budget: int = 200
    ceiling: int = invariants.DEFAULT_CEILING
    variant: str = invariants.DEFAULT_VARIANT

    def __post_init__(self):
        if self.seed <= 0 or self.budget <= 0:
            raise UserError("seed and budget must be positive")
        if self.ceiling <= 0:
            raise UserError("ceiling must be positive")
        if self.output not in FORMATS:
            raise UserError(f"unknown output format {self.output!r}")
        if self.variant not in invariants.VARIANTS:
            raise UserError(f"unknown formula variant {self.variant!r}")

    def to_dict(self) -> dict:
        return {"seed": self.seed, "budget": self.budget, "ceiling": self.ceiling, "variant": self.variant}


def resolve(path: str) -> str:
    if path.startswith("pkg:"):
        return str(resources.files("pmainv") / "data" / path[4:])
    return path


# serialization -------------------------------------------------------------


def _scalar(v) -> str:
    if isinstance(v, RationalFn):
        return v.to_text()
    if hasattr(v, "value"):
        return str(v.value())
    return str(v)


def _latex(v) -> str:
    if isinstance(v, RationalFn):
        return v.to_latex()
    if hasattr(v, "value"):
        v = v.value()
    return RationalFn(v).to_latex()


def report_to_dict(rep: invariants.InvariantReport) -> dict:
    choices = {k: (v if isinstance(v, (int, str)) or v is None else str(v)) for k, v in sorted(rep.choices.items())}
    return {
        "mode": rep.mode,
        "point": None if rep.point is None else [str(c) for c in rep.point],
        "choices": choices,
        "quantities": {k: _scalar(v) for k, v in rep.quantities().items()},
        "graded": {
            k: {"grade": g.grade, "base": g.base_name, "rational": _scalar(g.rational)} for k, g in rep.graded.items()
        },
    }


_LATEX_NAMES = {
    "Theta3": r"\Theta_3",
    "Theta4": r"\Theta_4",
    "Theta31": r"\Theta_{3\cdot1}",
    "Lambda3": r"\Lambda_3",
    "Lambda4": r"\Lambda_4",
    "Lambda31": r"\Lambda_{3\cdot1}",
    "kappa1_cubed": r"\kappa_1^3",
    "kappa2_cubed": r"\kappa_2^3",
    "tau1_cubed": r"\tau_1^3",
    "tau2_cubed": r"\tau_2^3",
    "gamma3": r"\gamma_3",
    "gamma4": r"\gamma_4",
    "gamma31": r"\gamma_{3\cdot1}",
}


def equation_latex(E: MAEquation) -> str:
    N, A, B, C, D = (c.to_latex() for c in E.coefficients)
    return rf"\left({N}\right)(rt-s^2)+\left({A}\right)r+\left({B}\right)s+\left({C}\right)t+\left({D}\right)=0"


# commands ------------------------------------------------------------------


def _load(path: str) -> MAEquation:
    return formats.load_equation(resolve(path))


def cmd_classify(cfg: JobConfig) -> tuple[dict, list[str], list[str]]:
    E = _load(cfg.inputs[0])
    cl = classify(E, seed=cfg.seed)
    result = cl.to_dict()
    text = [f"verdict: {cl.verdict}"]
    if cl.type_of_Z is not None:
        text.append(f"type of Z: {cl.type_of_Z}, form ranks {list(cl.form_ranks)}")
    if cl.message:
        text.append(cl.message)
    if cl.singular_locus:
        text.append("singular locus: " + "; ".join(f.to_text() + " = 0" for f in cl.singular_locus))
    tex = [rf"\text{{{cl.verdict}}}:\quad {equation_latex(E)}"]
    tex += [f.to_latex() + " = 0" for f in cl.singular_locus]
    return {"equation": E.to_dict(), "classification": result}, text, tex


def cmd_invariants(cfg: JobConfig, mode: str, complement: str, point) -> tuple[dict, list[str], list[str]]:
    E = _load(cfg.inputs[0])
    rep = invariants.invariant_report(
        E, mode=mode, variant=cfg.variant, complement=complement, ceiling=cfg.ceiling, point=point, seed=cfg.seed
    )
    d = report_to_dict(rep)
    where = "" if rep.point is None else " at (" + ", ".join(d["point"]) + ")"
    text = [f"mode: {rep.mode}{where}", "choices: " + ", ".join(f"{k}={v}" for k, v in d["choices"].items())]
    text += [f"{k} = {v}" for k, v in d["quantities"].items()]
    tex = [f"{_LATEX_NAMES[k]} = {_latex(v)}" for k, v in rep.quantities().items()]
    return {"equation": E.to_dict(), "report": d}, text, tex


def cmd_verify(cfg: JobConfig) -> tuple[dict, list[str], list[str]]:
    E = _load(cfg.inputs[0])
    v = analysis.verify_equation(E, seed=cfg.seed, ceiling=cfg.ceiling, variant=cfg.variant)
    text = [f"verdict: {v.verdict}"]
    text += [f"{'PASS' if c.passed else 'FAIL'} {c.name} [{c.mode}] {c.detail}" for c in v.checks]
    tex = [rf"\text{{{'PASS' if c.passed else 'FAIL'} {c.name}}}" for c in v.checks]
    if not v.passed:
        raise _Failed({"equation": E.to_dict(), "verification": v.to_dict()}, text, tex)
    return {"equation": E.to_dict(), "verification": v.to_dict()}, text, tex


def cmd_independence(cfg: JobConfig, quintuple: str) -> tuple[dict, list[str], list[str]]:
    E = _load(cfg.inputs[0])
    cert = analysis.independence(E, quintuple, budget=cfg.budget, seed=cfg.seed, variant=cfg.variant)
    d = cert.to_dict()
    text = [
        f"quintuple {quintuple}: {', '.join(cert.names)}",
        f"rank {cert.rank_at_witness} at {tuple(d['witness_points'][0])} after {cert.trials} trials: certified",
    ]
    tex = [rf"\operatorname{{rank}} = {cert.rank_at_witness}"]
    return {"equation": E.to_dict(), "certificate": d}, text, tex


def cmd_compare(cfg: JobConfig) -> tuple[dict, list[str], list[str]]:
    E1, E2 = _load(cfg.inputs[0]), _load(cfg.inputs[1])
    c = analysis.compare(E1, E2, seed=cfg.seed, ceiling=cfg.ceiling)
    text = [f"verdict: {c.verdict}"] + [f"{k}: {why}" for k, why in c.reasons.items()]
    tex = [rf"\text{{{c.verdict}}}"] + [rf"{_LATEX_NAMES[k]}:\ \text{{{why}}}" for k, why in c.reasons.items()]
    return {"equations": [E1.to_dict(), E2.to_dict()], "comparison": c.to_dict()}, text, tex


def cmd_transform(cfg: JobConfig, map_path: str, check: bool) -> tuple[dict, list[str], list[str]]:
    E = _load(cfg.inputs[0])
    phi = formats.load_diffeo(resolve(map_path))
    out: dict[str, Any] = {"equation": E.to_dict(), "map": phi.to_dict()}
    if check:
        res = analysis.covariance_check(E, phi, seed=cfg.seed, ceiling=cfg.ceiling, variant=cfg.variant)
        E2 = res.transformed
        out["covariance"] = res.to_dict()
    else:
        E2 = analysis.transform_equation(E, phi)
    g = common_factor(E, E2)
    out["transformed"] = E2.to_dict()
    text = formats.format_equation(E2).splitlines()
    if g is not None:
        text.append(f"(the map preserves the equation up to the factor {g.to_text()})")
    if check:
        text.append(f"covariance [{out['covariance']['mode']}]: {'PASS' if out['covariance']['passed'] else 'FAIL'}")
    tex = [equation_latex(E2)]
    if check and not out["covariance"]["passed"]:
        raise _Failed(out, text, tex)
    return out, text, tex


class _Failed(Exception):
    """A verification ran to completion and found a violated identity."""

    def __init__(self, result: dict, text: list[str], tex: list[str]):
        self.result, self.text, self.tex = result, text, tex


# entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pmainv", description="Parabolic Monge-Ampere classification and invariants")
    ap.add_argument("--format", choices=FORMATS, default="text", dest="output")
    ap.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    ap.add_argument("--budget", type=int, default=200, help="witness trials for independence")
    ap.add_argument("--ceiling", type=int, default=invariants.DEFAULT_CEILING, help="term ceiling for closed forms")
    ap.add_argument("--variant", choices=invariants.VARIANTS, default=invariants.DEFAULT_VARIANT)
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("classify").add_argument("file")
    p = sub.add_parser("invariants")
    p.add_argument("file")
    p.add_argument("--mode", choices=("auto", "symbolic", "pointwise"), default="auto")
    p.add_argument("--complement", choices=("auto", "X1", "X2"), default="auto")
    p.add_argument("--point", help="comma separated rational coordinates x,y,u,p,q")
    sub.add_parser("verify").add_argument("file")
    p = sub.add_parser("independence")
    p.add_argument("file")
    p.add_argument("--quintuple", choices=sorted(analysis.QUINTUPLES), required=True)
    p = sub.add_parser("compare")
    p.add_argument("file1")
    p.add_argument("file2")
    p = sub.add_parser("transform")
    p.add_argument("file")
    p.add_argument("--map", required=True, dest="map_path")
    p.add_argument("--check", action="store_true", help="also verify I' o Phi = I")
    return ap


def _seed(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UserError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _point(text: str | None):
    if text is None:
        return None
    try:
        pt = tuple(Fraction(c.strip()) for c in text.split(","))
    except ValueError:
        raise UserError(f"bad point {text!r}") from None
    if len(pt) != 5:
        raise UserError("a point needs five coordinates x,y,u,p,q")
    return pt


def _error_dict(exc: PmaError) -> dict:
    d: dict[str, Any] = {"code": exc.code, "message": str(exc)}
    if isinstance(exc, ExprSyntaxError):
        d["line"] = exc.line
        d["column"] = exc.position + 1
    if isinstance(exc, NoWitnessFound) and exc.certificate is not None:
        d["certificate"] = exc.certificate.to_dict()
    return d


def _emit(fmt: str, payload: dict, text: list[str], tex: list[str], stream) -> None:
    if fmt == "json":
        stream.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    elif fmt == "latex":
        stream.write("\\begin{align*}\n" + " \\\\\n".join(f"& {t}" for t in tex) + "\n\\end{align*}\n")
    else:
        stream.write("\n".join(text) + "\n")


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    inputs = [getattr(args, k) for k in ("file", "file1", "file2") if getattr(args, k, None) is not None]
    base = {"schema_version": SCHEMA_VERSION, "command": args.command}
    try:
        cfg = JobConfig(
            args.command, inputs, args.output, _seed(args.seed), args.budget, args.ceiling, args.variant
        )
        base["config"] = cfg.to_dict()
        base["inputs"] = list(inputs)
        if cfg.command == "classify":
            result, text, tex = cmd_classify(cfg)
        elif cfg.command == "invariants":
            result, text, tex = cmd_invariants(cfg, args.mode, args.complement, _point(args.point))
        elif cfg.command == "verify":
            result, text, tex = cmd_verify(cfg)
        elif cfg.command == "independence":
            result, text, tex = cmd_independence(cfg, args.quintuple)
        elif cfg.command == "compare":
            result, text, tex = cmd_compare(cfg)
        else:
            result, text, tex = cmd_transform(cfg, args.map_path, args.check)
    except _Failed as f:
        _emit(args.output, {**base, "status": "failed", "result": f.result}, f.text, f.tex, stdout)
        return EXIT_IDENTITY
    except PmaError as exc:
        code = EXIT_IDENTITY if isinstance(exc, IdentityViolation) else EXIT_USER
        err = _error_dict(exc)
        if args.output == "json":
            _emit("json", {**base, "status": "error", "error": err}, [], [], stdout)
        else:
            stderr.write(f"error[{err['code']}]: {err['message']}\n")
            if "certificate" in err:
                c = err["certificate"]
                stderr.write(f"best exact rank {c['rank_at_witness']} at {c['witness_points']} (inconclusive)\n")
        return code
    _emit(args.output, {**base, "status": "ok", "result": result}, text, tex, stdout)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
